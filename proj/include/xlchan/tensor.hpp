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

#ifndef XLCHAN_TENSOR_HPP
#define XLCHAN_TENSOR_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace xlchan
{
    using cplx = std::complex<double>;

    // Dense row-major 3-D array; the last index is contiguous.
    template <typename T>
    class Tensor3
    {
    public:
        Tensor3() = default;
        Tensor3(std::size_t n0, std::size_t n1, std::size_t n2, T value = T{})
            : dims_{n0, n1, n2}, data_(n0 * n1 * n2, value) {}

        std::size_t dim(std::size_t i) const { return dims_[i]; }
        const std::array<std::size_t, 3> &dims() const { return dims_; }
        std::size_t size() const { return data_.size(); }

        T &operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
        const T &operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[index(i, j, k)]; }

        // Contiguous slice over the last index
        std::span<T> row(std::size_t i, std::size_t j) { return {data_.data() + index(i, j, 0), dims_[2]}; }
        std::span<const T> row(std::size_t i, std::size_t j) const { return {data_.data() + index(i, j, 0), dims_[2]}; }

        std::span<T> data() { return data_; }
        std::span<const T> data() const { return data_; }

        bool operator==(const Tensor3 &) const = default;

    private:
        std::size_t index(std::size_t i, std::size_t j, std::size_t k) const
        {
            return (i * dims_[1] + j) * dims_[2] + k;
        }

        std::array<std::size_t, 3> dims_{0, 0, 0};
        std::vector<T> data_;
    };

    using ComplexTensor3 = Tensor3<cplx>;
}

#endif
