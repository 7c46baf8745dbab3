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

#include <cstddef>
#include <functional>

namespace recimatch {

// Number of worker threads used by internal parallel loops. Honors the
// RECIMATCH_THREADS environment variable (0 or unset = hardware concurrency)
// unless overridden with SetThreadCount.
std::size_t ThreadCount();

// 0 restores the environment/hardware default.
void SetThreadCount(std::size_t n);

// Calls body(begin, end) over disjoint contiguous chunks covering [0, n).
// Chunk boundaries depend on the thread count, so bodies must only write
// per-index results.
void ParallelFor(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                 std::size_t min_chunk = 64);

}  // namespace recimatch
