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
#include <vector>

#include "recimatch/coarse2fine.h"
#include "recimatch/grids.h"

namespace recimatch::cli {

// Window manifest for coarse-to-fine matching, a JSON object:
//
//   {
//     "version": 1,                        optional
//     "size1": [W, H], "size2": [W, H],    optional, default to the window extents
//     "coarse": {"d1": GRID, "d2": GRID},
//     "windows1": [{"window": [x0, y0, x1, y1], "grid": GRID}, ...],
//     "windows2": [...],
//     "grids": {"name": "path", ...}       optional
//   }
//
// A GRID string names an entry of "grids" if one exists, otherwise it is a
// DGRD path. Relative paths resolve against the manifest's directory.
// Windows are half-open pixel rectangles of the full-resolution image.
struct ManifestWindow {
  Window window;
  std::filesystem::path grid;
};

struct Manifest {
  Resolution size1;
  Resolution size2;
  std::filesystem::path coarse1;
  std::filesystem::path coarse2;
  std::vector<ManifestWindow> windows1;
  std::vector<ManifestWindow> windows2;

  std::vector<Window> Windows(int image) const;
};

Manifest ParseManifest(const std::string& text, const std::filesystem::path& base_dir);
Manifest LoadManifest(const std::filesystem::path& path);

// Serves the grids listed in a manifest, loading files on demand. A request
// for the whole image returns the coarse grid, unless a window entry covers
// the whole image and the request is at full resolution. Grids are returned at
// their stored resolution whatever resolution is requested.
class ManifestProvider : public DescriptorProvider {
 public:
  explicit ManifestProvider(const Manifest& manifest) : manifest_(manifest) {}
  DescriptorGrid Descriptors(int image, const Window& window, Resolution working) const override;

 private:
  const Manifest& manifest_;
};

}  // namespace recimatch::cli
