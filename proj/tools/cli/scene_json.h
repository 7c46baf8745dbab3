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


#pragma once

#include <filesystem>
#include <string>

#include "recimatch/synth.h"

namespace recimatch::cli {

// Scene documents are JSON objects; every key is optional:
//   canvas [W, H], view1 [W, H], view2 [W, H], dim, sigma, seed,
//   length_scale, detail_scale, detail_amplitude, detail_falloff,
//   pixel_size, depth, and warp as one of
//   {"translation": [tx, ty]}, {"similarity": [s, tx, ty]},
//   {"homography": [h00, h01, h02, h10, h11, h12, h20, h21, h22]}.
SceneSpec ParseSceneSpec(const std::string& text);
SceneSpec LoadSceneSpec(const std::filesystem::path& path);
std::string SceneSpecToJson(const SceneSpec& spec);

}  // namespace recimatch::cli
