// Copyright (C) 2026 The recimatch Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#include "recimatch/grid_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include "recimatch/error.h"

namespace recimatch {
namespace {

class ByteWriter {
 public:
  void Magic(std::string_view magic) { bytes_.insert(bytes_.end(), magic.begin(), magic.end()); }
  void U8(std::uint8_t x) { bytes_.push_back(static_cast<char>(x)); }
  void U32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((x >> (8 * i)) & 0xFFu));
  }
  void U64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((x >> (8 * i)) & 0xFFu));
  }
  void F32(float x) { U32(std::bit_cast<std::uint32_t>(x)); }

  void WriteTo(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::vector<char> bytes, std::string name) : bytes_(std::move(bytes)), name_(std::move(name)) {}

  void ExpectMagic(std::string_view magic) {
    Need(magic.size(), "magic");
    if (std::string_view(bytes_.data() + pos_, magic.size()) != magic) {
      throw Error(ErrorCode::kBadMagic, name_ + ": expected magic \"" + std::string(magic) + "\"");
    }
    pos_ += magic.size();
  }
  std::uint8_t U8() {
    Need(1, "u8");
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t U32() {
    Need(4, "u32");
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return x;
  }
  std::uint64_t U64() {
    Need(8, "u64");
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return x;
  }
  float F32() { return std::bit_cast<float>(U32()); }

  void ExpectVersion() {
    const std::uint32_t version = U32();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::kUnsupportedVersion, name_ + ": version " + std::to_string(version));
    }
  }
  // Guards allocations against corrupt headers.
  void ExpectRemaining(std::uint64_t count, std::uint64_t element_size, const char* what) {
    const std::uint64_t remaining = bytes_.size() - pos_;
    if (element_size != 0 && count > remaining / element_size) {
      throw Error(ErrorCode::kTruncated, name_ + ": payload too short for " + what);
    }
  }
  void ExpectEnd() const {
    if (pos_ != bytes_.size()) throw Error(ErrorCode::kParse, name_ + ": trailing bytes after payload");
  }

 private:
  void Need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, name_ + ": truncated while reading " + what);
  }

  std::vector<char> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::vector<char> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "failed reading " + path.string());
  return bytes;
}

std::string PixelName(GridShape shape, std::size_t linear) {
  const PixelCoord p = shape.pixel(linear);
  return "(" + std::to_string(p.u) + "," + std::to_string(p.v) + ")";
}

}  // namespace

DescriptorGrid LoadDescriptorGrid(const std::filesystem::path& path) {
  ByteReader in(ReadAll(path), path.string());
  in.ExpectMagic("DGRD");
  in.ExpectVersion();
  const std::uint32_t h = in.U32();
  const std::uint32_t w = in.U32();
  const std::uint32_t d = in.U32();
  const std::uint32_t flags = in.U32();
  const std::uint64_t count = static_cast<std::uint64_t>(h) * w * d;
  in.ExpectRemaining(count, 4, "descriptors");
  std::vector<float> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = in.F32();
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::kNonFinite, path.string() + ": non-finite value at pixel " +
                                             PixelName(GridShape{h, w}, i / d));
    }
  }
  in.ExpectEnd();
  return DescriptorGrid(h, w, d, std::move(data), (flags & 1u) != 0);
}

void SaveDescriptorGrid(const DescriptorGrid& grid, const std::filesystem::path& path) {
  const auto data = grid.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::kNonFinite,
                  "refusing to write non-finite descriptor at pixel " + PixelName(grid.shape(), i / grid.dim()));
    }
  }
  ByteWriter out;
  out.Magic("DGRD");
  out.U32(kFormatVersion);
  out.U32(grid.height());
  out.U32(grid.width());
  out.U32(grid.dim());
  out.U32(grid.normalized() ? 1u : 0u);
  for (float x : data) out.F32(x);
  out.WriteTo(path);
}

PointMap LoadPointMap(const std::filesystem::path& path) {
  ByteReader in(ReadAll(path), path.string());
  in.ExpectMagic("PMAP");
  in.ExpectVersion();
  const std::uint32_t h = in.U32();
  const std::uint32_t w = in.U32();
  const std::uint64_t n = static_cast<std::uint64_t>(h) * w;
  in.ExpectRemaining(n, 13, "points and mask");
  std::vector<float> points(3 * n);
  for (auto& x : points) x = in.F32();
  std::vector<std::uint8_t> valid(n);
  for (auto& m : valid) m = in.U8();
  in.ExpectEnd();
  return PointMap(h, w, std::move(points), std::move(valid));
}

void SavePointMap(const PointMap& map, const std::filesystem::path& path) {
  ByteWriter out;
  out.Magic("PMAP");
  out.U32(kFormatVersion);
  out.U32(map.height());
  out.U32(map.width());
  for (float x : map.points()) out.F32(x);
  for (std::uint8_t m : map.valid_mask()) out.U8(m);
  out.WriteTo(path);
}

ConfidenceMap LoadConfidenceMap(const std::filesystem::path& path) {
  ByteReader in(ReadAll(path), path.string());
  in.ExpectMagic("CONF");
  in.ExpectVersion();
  const std::uint32_t h = in.U32();
  const std::uint32_t w = in.U32();
  const std::uint64_t n = static_cast<std::uint64_t>(h) * w;
  in.ExpectRemaining(n, 4, "confidences");
  std::vector<float> values(n);
  for (auto& x : values) x = in.F32();
  in.ExpectEnd();
  return ConfidenceMap(h, w, std::move(values));
}

void SaveConfidenceMap(const ConfidenceMap& map, const std::filesystem::path& path) {
  ByteWriter out;
  out.Magic("CONF");
  out.U32(kFormatVersion);
  out.U32(map.height());
  out.U32(map.width());
  for (float x : map.values()) out.F32(x);
  out.WriteTo(path);
}

CorrespondenceSet LoadCorrespondences(const std::filesystem::path& path) {
  std::vector<char> bytes = ReadAll(path);
  if (bytes.size() >= 4 && std::string_view(bytes.data(), 4) == "CORR") {
    ByteReader in(std::move(bytes), path.string());
    in.ExpectMagic("CORR");
    const std::uint64_t count = in.U64();
    in.ExpectRemaining(count, 16, "pairs");
    std::vector<Correspondence> pairs(count);
    for (auto& c : pairs) {
      c.first.u = in.U32();
      c.first.v = in.U32();
      c.second.u = in.U32();
      c.second.v = in.U32();
    }
    in.ExpectEnd();
    return CorrespondenceSet(std::move(pairs));
  }

  std::istringstream text(std::string(bytes.begin(), bytes.end()));
  std::vector<Correspondence> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(text, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<long long> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        const long long value = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        values.push_back(value);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": bad field '" + token + "'");
      }
    }
    if (values.empty()) continue;
    if (values.size() != 4 && values.size() != 5) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected 4 or 5 fields");
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (values[i] < 0 || values[i] > 0xFFFFFFFFLL) {
        throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": coordinate out of range");
      }
    }
    if (values.size() == 5 && values[4] != 0 && values[4] != 1) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": flag must be 0 or 1");
    }
    Correspondence c;
    c.first = {static_cast<std::uint32_t>(values[0]), static_cast<std::uint32_t>(values[1])};
    c.second = {static_cast<std::uint32_t>(values[2]), static_cast<std::uint32_t>(values[3])};
    c.false_padding = values.size() == 5 && values[4] == 1;
    pairs.push_back(c);
  }
  return CorrespondenceSet(std::move(pairs));
}

void SaveCorrespondencesText(const CorrespondenceSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << "# u1 v1 u2 v2 [flag]\n";
  for (const auto& c : set) {
    out << c.first.u << ' ' << c.first.v << ' ' << c.second.u << ' ' << c.second.v;
    if (c.false_padding) out << " 1";
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void SaveCorrespondencesBinary(const CorrespondenceSet& set, const std::filesystem::path& path) {
  if (set.has_padding()) {
    throw Error(ErrorCode::kInvalidArgument, "binary correspondence files cannot carry padding flags");
  }
  ByteWriter out;
  out.Magic("CORR");
  out.U64(set.size());
  for (const auto& c : set) {
    out.U32(c.first.u);
    out.U32(c.first.v);
    out.U32(c.second.u);
    out.U32(c.second.v);
  }
  out.WriteTo(path);
}

void SaveCorrespondences(const CorrespondenceSet& set, const std::filesystem::path& path) {
  if (path.extension() == ".corr") {
    SaveCorrespondencesBinary(set, path);
  } else {
    SaveCorrespondencesText(set, path);
  }
}

LabelGrid LoadLabelGrid(const std::filesystem::path& path) {
  ByteReader in(ReadAll(path), path.string());
  in.ExpectMagic("BLBL");
  in.ExpectVersion();
  LabelGrid grid;
  grid.shape.height = in.U32();
  grid.shape.width = in.U32();
  in.ExpectRemaining(grid.shape.pixel_count(), 4, "labels");
  grid.labels.resize(grid.shape.pixel_count());
  for (auto& label : grid.labels) label = in.U32();
  in.ExpectEnd();
  return grid;
}

void SaveLabelGrid(const LabelGrid& grid, const std::filesystem::path& path) {
  if (grid.labels.size() != grid.shape.pixel_count()) {
    throw Error(ErrorCode::kShapeMismatch, "label count does not match H*W");
  }
  ByteWriter out;
  out.Magic("BLBL");
  out.U32(kFormatVersion);
  out.U32(grid.shape.height);
  out.U32(grid.shape.width);
  for (std::uint32_t label : grid.labels) out.U32(label);
  out.WriteTo(path);
}

}  // namespace recimatch
