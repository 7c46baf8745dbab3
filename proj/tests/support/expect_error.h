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

#include <gtest/gtest.h>

#include <optional>
#include <string>

#include "recimatch/error.h"

namespace recimatch::testing {

struct CaughtError {
  ErrorCode code;
  std::string message;
};

template <typename F>
std::optional<CaughtError> Catch(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return CaughtError{e.code(), e.what()};
  }
  return std::nullopt;
}

}  // namespace recimatch::testing

#define EXPECT_RECIMATCH_ERROR(statement, expected_code)                                        \
  do {                                                                                          \
    const auto caught_ = ::recimatch::testing::Catch([&] { (void)(statement); });               \
    if (!caught_) {                                                                             \
      ADD_FAILURE() << "no recimatch::Error thrown by " #statement;                             \
    } else {                                                                                    \
      EXPECT_EQ(caught_->code, expected_code)                                                   \
          << #statement << " threw " << ::recimatch::ErrorCodeName(caught_->code) << ": "      \
          << caught_->message;                                                                  \
    }                                                                                           \
  } while (0)
