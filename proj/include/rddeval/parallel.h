/* Copyright 2026 The rddeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef RDDEVAL_PARALLEL_H_
#define RDDEVAL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace rddeval {

// Runs fn(0) .. fn(n - 1) on at most `threads` workers (the calling thread
// counts as one). Each index runs exactly once; callers write results into
// per-index slots so the outcome does not depend on scheduling. If any
// invocation throws, the exception of the lowest failing index is rethrown
// after all workers have joined.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn);

// `requested` if positive, else the RDDEVAL_THREADS environment variable if
// it holds a positive integer, else the hardware concurrency (at least 1).
int ResolveThreadCount(int requested);

}  // namespace rddeval

#endif  // RDDEVAL_PARALLEL_H_
