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

#include "ppdl/parallel.h"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ppdl {
namespace {

// Nested loops run serially inside an outer worker.
thread_local bool in_worker = false;

}  // namespace

int WorkerCount() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("PPDL_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) return std::min(requested, hw);
  }
  return hw;
}

void ParallelFor(size_t count, const std::function<void(size_t)>& body) {
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(WorkerCount()), count);
  if (workers <= 1 || in_worker) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const size_t block = (count + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = w * block;
    const size_t end = std::min(count, begin + block);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] {
      in_worker = true;
      for (size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace ppdl
