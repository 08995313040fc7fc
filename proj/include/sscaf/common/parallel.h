// Copyright 2026 The sscaf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSCAF_COMMON_PARALLEL_H_
#define SSCAF_COMMON_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace sscaf {

// Worker cap from SSCAF_THREADS (default: hardware concurrency, at least 1).
int MaxThreads();

// Runs fn(i) for i in [0, n). Each index is processed exactly once; callers
// write to disjoint outputs so results never depend on the thread count.
// The first exception thrown by any task is rethrown on the calling thread.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sscaf

#endif  // SSCAF_COMMON_PARALLEL_H_
