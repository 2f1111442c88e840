// Copyright 2026 The kpzlab Authors
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

#pragma once

#include <cstddef>
#include <functional>

namespace kpz {

/// The THREADS environment variable if it parses as a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t default_thread_count();

/// Calls body(i) for i in [0, n) on up to `threads` workers (0 means
/// default_thread_count()). Indices are handed out in contiguous chunks, so
/// results written by index are independent of the thread count. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace kpz
