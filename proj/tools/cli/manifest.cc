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


#include "cli/manifest.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "recimatch/error.h"
#include "recimatch/grid_io.h"

namespace recimatch::cli {
namespace {

using nlohmann::json;

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kParse, "manifest: " + what);
}

const json& Member(const json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) Malformed(where + " is missing \"" + key + "\"");
  return object.at(key);
}

std::filesystem::path ResolveGrid(const json& value, const json& grids, const std::filesystem::path& base_dir,
                                  const std::string& where) {
  if (!value.is_string()) Malformed(where + " must be a string");
  std::string name = value.get<std::string>();
  if (grids.is_object() && grids.contains(name)) {
    if (!grids.at(name).is_string()) Malformed("grids." + name + " must be a path string");
    name = grids.at(name).get<std::string>();
  }
  const std::filesystem::path path(name);
  return path.is_absolute() ? path : base_dir / path;
}

std::vector<ManifestWindow> ReadWindows(const json& doc, const char* key, const json& grids,
                                        const std::filesystem::path& base_dir) {
  const json& list = Member(doc, key, "manifest");
  if (!list.is_array()) Malformed(std::string(key) + " must be an array");
  std::vector<ManifestWindow> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = std::string(key) + "[" + std::to_string(i) + "]";
    const json& rect = Member(list[i], "window", where);
    if (!rect.is_array() || rect.size() != 4) Malformed(where + ".window must be [x0, y0, x1, y1]");
    for (const auto& v : rect) {
      if (!v.is_number_unsigned()) Malformed(where + ".window entries must be non-negative integers");
    }
    ManifestWindow entry;
    entry.window = {rect[0].get<std::uint32_t>(), rect[1].get<std::uint32_t>(), rect[2].get<std::uint32_t>(),
                    rect[3].get<std::uint32_t>()};
    if (entry.window.x0 >= entry.window.x1 || entry.window.y0 >= entry.window.y1) {
      Malformed(where + ".window " + entry.window.ToString() + " is empty");
    }
    entry.grid = ResolveGrid(Member(list[i], "grid", where), grids, base_dir, where + ".grid");
    out.push_back(std::move(entry));
  }
  return out;
}

Resolution ReadSize(const json& doc, const char* key, const std::vector<ManifestWindow>& windows) {
  if (doc.contains(key)) {
    const json& size = doc.at(key);
    if (!size.is_array() || size.size() != 2 || !size[0].is_number_unsigned() || !size[1].is_number_unsigned()) {
      Malformed(std::string(key) + " must be [W, H]");
    }
    return {size[0].get<std::uint32_t>(), size[1].get<std::uint32_t>()};
  }
  Resolution extent;
  for (const auto& w : windows) {
    extent.width = std::max(extent.width, w.window.x1);
    extent.height = std::max(extent.height, w.window.y1);
  }
  if (extent.width == 0) Malformed(std::string(key) + " is absent and there are no windows to infer it from");
  return extent;
}

}  // namespace

std::vector<Window> Manifest::Windows(int image) const {
  const auto& list = image == 0 ? windows1 : windows2;
  std::vector<Window> out;
  for (const auto& entry : list) out.push_back(entry.window);
  return out;
}

Manifest ParseManifest(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    Malformed(e.what());
  }
  if (!doc.is_object()) Malformed("top level must be an object");
  if (doc.contains("version") && doc.at("version") != 1) {
    throw Error(ErrorCode::kUnsupportedVersion, "manifest: unsupported version " + doc.at("version").dump());
  }
  const json grids = doc.contains("grids") ? doc.at("grids") : json::object();
  if (!grids.is_object()) Malformed("grids must be an object");

  Manifest m;
  const json& coarse = Member(doc, "coarse", "manifest");
  m.coarse1 = ResolveGrid(Member(coarse, "d1", "coarse"), grids, base_dir, "coarse.d1");
  m.coarse2 = ResolveGrid(Member(coarse, "d2", "coarse"), grids, base_dir, "coarse.d2");
  m.windows1 = ReadWindows(doc, "windows1", grids, base_dir);
  m.windows2 = ReadWindows(doc, "windows2", grids, base_dir);
  m.size1 = ReadSize(doc, "size1", m.windows1);
  m.size2 = ReadSize(doc, "size2", m.windows2);
  return m;
}

Manifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseManifest(buffer.str(), path.parent_path());
}

DescriptorGrid ManifestProvider::Descriptors(int image, const Window& window, Resolution working) const {
  const Resolution size = image == 0 ? manifest_.size1 : manifest_.size2;
  const auto& list = image == 0 ? manifest_.windows1 : manifest_.windows2;
  const bool whole = window == Window{0, 0, size.width, size.height};
  const auto entry =
      std::find_if(list.begin(), list.end(), [&](const ManifestWindow& e) { return e.window == window; });
  if (whole && (entry == list.end() || !(working == size))) {
    return LoadDescriptorGrid(image == 0 ? manifest_.coarse1 : manifest_.coarse2);
  }
  if (entry == list.end()) throw Error(ErrorCode::kNotFound, "no grid listed for this window");
  return LoadDescriptorGrid(entry->grid);
}

}  // namespace recimatch::cli
