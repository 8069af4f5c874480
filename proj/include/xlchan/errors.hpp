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

#ifndef XLCHAN_ERRORS_HPP
#define XLCHAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xlchan
{
    // Bad input values or inconsistent dimensions (CLI exit code 2)
    class config_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Source point coincides with an element, rays blocked, etc. (CLI exit code 2)
    class geometry_error : public config_error
    {
    public:
        using config_error::config_error;
    };

    // Factorization failures, zero-energy channels, non-convergence (CLI exit code 3)
    class numeric_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
