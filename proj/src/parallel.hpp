// SPDX-License-Identifier: Apache-2.0
//
// xlchan - near-field and spatially non-stationary THz XL-MIMO channel synthesis
// Copyright (C) 2026 The xlchan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef XLCHAN_PARALLEL_HPP
#define XLCHAN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace xlchan::detail
{
    // Worker count from XLCHAN_THREADS, defaulting to the hardware concurrency
    std::size_t thread_count();

    // Runs fn(i) for i in [0, n). Each index is visited exactly once; callers write disjoint outputs.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);
}

#endif
