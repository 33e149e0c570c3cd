// Copyright 2026 The Audiodist Authors. All Rights Reserved.
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

#ifndef AUDIODIST_PARALLEL_H_
#define AUDIODIST_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace audiodist {

// Upper bound on worker threads used by ParallelFor. 0 selects the number of
// hardware threads. Process-wide; set once by the CLI before work starts.
void SetMaxThreads(size_t n);
size_t MaxThreads();

// Invokes fn(i) for every i in [0, count), spread over up to MaxThreads()
// workers. Callers write results into per-index slots and reduce them in
// index order afterwards, so output never depends on the thread count.
// The first exception thrown by any fn(i) is rethrown after all workers join.
void ParallelFor(size_t count, const std::function<void(size_t)>& fn);

}  // namespace audiodist

#endif  // AUDIODIST_PARALLEL_H_
