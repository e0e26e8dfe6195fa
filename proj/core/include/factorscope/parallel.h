// Copyright 2026 The FactorScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FACTORSCOPE_PARALLEL_H_
#define FACTORSCOPE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace factorscope {

// Runs fn(0..count-1) on up to `jobs` threads. Each index runs exactly once;
// callers write results into per-index slots, so output never depends on
// scheduling. After a failure no new indices start; once workers finish,
// the exception of the lowest failed index is rethrown.
void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& fn);

}  // namespace factorscope

#endif  // FACTORSCOPE_PARALLEL_H_
