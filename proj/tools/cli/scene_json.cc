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


#include "cli/scene_json.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "recimatch/error.h"

namespace recimatch::cli {
namespace {

using nlohmann::json;

void ReadSize(const json& doc, const char* key, std::uint32_t& width, std::uint32_t& height) {
  if (!doc.contains(key)) return;
  const auto& size = doc.at(key);
  if (!size.is_array() || size.size() != 2) throw Error(ErrorCode::kParse, std::string(key) + " must be [W, H]");
  width = size[0].get<std::uint32_t>();
  height = size[1].get<std::uint32_t>();
}

template <typename T>
void ReadValue(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

Warp ReadWarp(const json& warp) {
  auto numbers = [&](const char* key, std::size_t count) {
    const auto& values = warp.at(key);
    if (!values.is_array() || values.size() != count) {
      throw Error(ErrorCode::kParse, std::string("warp.") + key + " needs " + std::to_string(count) + " numbers");
    }
    return values.get<std::vector<double>>();
  };
  if (warp.contains("translation")) {
    const auto v = numbers("translation", 2);
    return Warp::Translation(v[0], v[1]);
  }
  if (warp.contains("similarity")) {
    const auto v = numbers("similarity", 3);
    return Warp::Similarity(v[0], v[1], v[2]);
  }
  if (warp.contains("homography")) {
    const auto v = numbers("homography", 9);
    Warp w;
    std::copy(v.begin(), v.end(), w.h.begin());
    return w;
  }
  throw Error(ErrorCode::kParse, "warp needs one of translation, similarity, homography");
}

}  // namespace

SceneSpec ParseSceneSpec(const std::string& text) {
  SceneSpec spec;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw Error(ErrorCode::kParse, "scene document must be a JSON object");
    ReadSize(doc, "canvas", spec.canvas_width, spec.canvas_height);
    ReadSize(doc, "view1", spec.width1, spec.height1);
    ReadSize(doc, "view2", spec.width2, spec.height2);
    ReadValue(doc, "dim", spec.dim);
    ReadValue(doc, "sigma", spec.sigma);
    ReadValue(doc, "seed", spec.seed);
    ReadValue(doc, "length_scale", spec.length_scale);
    ReadValue(doc, "detail_scale", spec.detail_scale);
    ReadValue(doc, "detail_amplitude", spec.detail_amplitude);
    ReadValue(doc, "detail_falloff", spec.detail_falloff);
    ReadValue(doc, "pixel_size", spec.pixel_size);
    ReadValue(doc, "depth", spec.depth);
    if (doc.contains("warp")) spec.warp = ReadWarp(doc.at("warp"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("scene document: ") + e.what());
  }
  spec.Validate();
  return spec;
}

SceneSpec LoadSceneSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseSceneSpec(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string SceneSpecToJson(const SceneSpec& spec) {
  json doc;
  doc["canvas"] = {spec.canvas_width, spec.canvas_height};
  doc["view1"] = {spec.width1, spec.height1};
  doc["view2"] = {spec.width2, spec.height2};
  doc["warp"] = {{"homography", spec.warp.h}};
  doc["dim"] = spec.dim;
  doc["sigma"] = spec.sigma;
  doc["seed"] = spec.seed;
  doc["length_scale"] = spec.length_scale;
  doc["detail_scale"] = spec.detail_scale;
  doc["detail_amplitude"] = spec.detail_amplitude;
  doc["detail_falloff"] = spec.detail_falloff;
  doc["pixel_size"] = spec.pixel_size;
  doc["depth"] = spec.depth;
  return doc.dump(2);
}

}  // namespace recimatch::cli
