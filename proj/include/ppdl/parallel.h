// Copyright 2026 The ppdl Authors
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

#ifndef PPDL_PARALLEL_H_
#define PPDL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace ppdl {

// Number of worker threads, read from PPDL_THREADS (default: hardware
// concurrency, at least 1).
int WorkerCount();

// Runs body(i) for i in [0, count). Iterations are split into contiguous
// blocks, one per worker; callers write results into per-index slots so the
// outcome does not depend on scheduling.
void ParallelFor(size_t count, const std::function<void(size_t)>& body);

}  // namespace ppdl

#endif  // PPDL_PARALLEL_H_
