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

#ifndef XLCHAN_CHANNEL_HPP
#define XLCHAN_CHANNEL_HPP

#include "xlchan/geometry.hpp"
#include "xlchan/nearfield.hpp"
#include "xlchan/tensor.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlchan
{
    // Uniform grid including both end points
    struct FrequencyGrid
    {
        double f_low = 90e9;
        double f_high = 110e9;
        std::size_t num_points = 2001;

        void validate() const;
        double at(std::size_t k) const;
        double center() const { return 0.5 * (f_low + f_high); }
        double step() const { return num_points > 1 ? (f_high - f_low) / double(num_points - 1) : 0.0; }
        std::vector<double> points() const;

        bool operator==(const FrequencyGrid &) const = default;
    };

    // M x L amplitude attenuation factors
    using AAFMatrix = Eigen::MatrixXd;

    // L x K; entry (l, k) = alpha_l exp(-j 2 pi f_k tau_l)
    using ReferenceResponse = Eigen::MatrixXcd;

    enum class ModelVariant
    {
        NF_SnS,
        NF_SS,
        FF_SnS,
        FF_SS,
        VR
    };

    std::string_view to_string(ModelVariant v);
    ModelVariant model_variant_from_string(std::string_view s);
    bool is_far_field(ModelVariant v);

    struct ChannelMetadata
    {
        std::size_t num_elements = 0;
        double spacing = 0.0;
        std::size_t reference_index = 0;
        FrequencyGrid grid;
        std::uint64_t seed = 0;
        ModelVariant variant = ModelVariant::NF_SnS;
        std::string config_hash;

        bool operator==(const ChannelMetadata &) const = default;
    };

    // Responses indexed (UE n, element m, frequency k)
    struct ChannelTensor
    {
        ComplexTensor3 values;
        ChannelMetadata meta;

        std::size_t num_ues() const { return values.dim(0); }
        std::size_t num_elements() const { return values.dim(1); }
        std::size_t num_frequencies() const { return values.dim(2); }

        // N x M matrix at frequency index k
        Eigen::MatrixXcd at_frequency(std::size_t k) const;

        bool operator==(const ChannelTensor &) const = default;
    };

    ReferenceResponse reference_response(std::span<const PathRecord> paths, const FrequencyGrid &grid);

    // Literal H_m(f_k) = sum_l A(m, l, k) S(m, l) H_ref(l, k)
    ComplexTensor3 assemble(const ComplexTensor3 &A, const AAFMatrix &S, const ReferenceResponse &h_ref);

    // Same product computed path by path without materializing A; returns a single-UE tensor
    ChannelTensor assemble(std::span<const PathRecord> paths, const ArrayGeometry &geom,
                           const AntennaPatterns &patterns, const FrequencyGrid &grid,
                           const AAFMatrix &S, double carrier_hz);

    ChannelTensor multi_user(std::span<const ChannelTensor> channels);

    // Half-open element range [begin, end)
    struct VisibleInterval
    {
        std::size_t begin = 0;
        std::size_t end = 0;
    };

    // Binary visibility-region AAF: 1 inside the interval, 0 outside
    std::vector<double> vr_aaf(std::size_t num_elements, VisibleInterval interval);

    // Ground-truth per-element path powers and delays (both M x L)
    struct PathDomain
    {
        Eigen::MatrixXd power;
        Eigen::MatrixXd delay;
    };

    PathDomain path_domain(std::span<const PathRecord> paths, const ArrayGeometry &geom,
                           const AntennaPatterns &patterns, const AAFMatrix &S, double carrier_hz);

    // Copies of the paths with the wavefront model forced to FF for far-field variants
    std::vector<PathRecord> apply_variant_wavefront(std::span<const PathRecord> paths, ModelVariant v);
}

#endif
