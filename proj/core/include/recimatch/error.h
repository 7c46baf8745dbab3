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

#include <stdexcept>
#include <string>
#include <string_view>

namespace recimatch {

enum class ErrorCode {
  kIo,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kNonFinite,
  kParse,
  kNotFound,
  kInvalidArgument,
  kEmptyGrid,
  kDimensionMismatch,
  kShapeMismatch,
  kBackendMismatch,
  kZeroNorm,
  kNotNormalized,
  kDuplicatePixel,
  kOutOfBounds,
  kNoValidPixels,
};

std::string_view ErrorCodeName(ErrorCode code);

// True for errors caused by reading or parsing external data, as opposed to
// violated preconditions of in-memory values.
bool IsInputError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace recimatch
