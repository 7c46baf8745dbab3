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

#include "recimatch/error.h"

namespace recimatch {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kEmptyGrid: return "empty-grid";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kBackendMismatch: return "backend-mismatch";
    case ErrorCode::kZeroNorm: return "zero-norm";
    case ErrorCode::kNotNormalized: return "not-normalized";
    case ErrorCode::kDuplicatePixel: return "duplicate-pixel";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kNoValidPixels: return "no-valid-pixels";
  }
  return "unknown";
}

bool IsInputError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kBadMagic:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kTruncated:
    case ErrorCode::kNonFinite:
    case ErrorCode::kParse:
    case ErrorCode::kNotFound:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message), code_(code) {}

}  // namespace recimatch
