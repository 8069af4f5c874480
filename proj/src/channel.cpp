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

#include "xlchan/channel.hpp"
#include "xlchan/errors.hpp"
#include "parallel.hpp"

#include <cmath>
#include <string>

namespace xlchan
{
    void FrequencyGrid::validate() const
    {
        if (num_points == 0)
            throw config_error("frequency grid: at least one point is required");
        if (!(f_low > 0.0) || !(f_high >= f_low) || !std::isfinite(f_high))
            throw config_error("frequency grid: require 0 < f_low <= f_high");
    }

    double FrequencyGrid::at(std::size_t k) const
    {
        if (num_points == 1)
            return f_low;
        // endpoints exact
        if (k + 1 == num_points)
            return f_high;
        return f_low + (f_high - f_low) * double(k) / double(num_points - 1);
    }

    std::vector<double> FrequencyGrid::points() const
    {
        validate();
        std::vector<double> f(num_points);
        for (std::size_t k = 0; k < num_points; ++k)
            f[k] = at(k);
        return f;
    }

    std::string_view to_string(ModelVariant v)
    {
        switch (v)
        {
        case ModelVariant::NF_SnS:
            return "NF-SnS";
        case ModelVariant::NF_SS:
            return "NF-SS";
        case ModelVariant::FF_SnS:
            return "FF-SnS";
        case ModelVariant::FF_SS:
            return "FF-SS";
        case ModelVariant::VR:
            return "VR";
        }
        return "?";
    }

    ModelVariant model_variant_from_string(std::string_view s)
    {
        for (auto v : {ModelVariant::NF_SnS, ModelVariant::NF_SS, ModelVariant::FF_SnS, ModelVariant::FF_SS,
                       ModelVariant::VR})
            if (s == to_string(v))
                return v;
        throw config_error("unknown model variant '" + std::string(s) +
                           "' (expected NF-SnS, NF-SS, FF-SnS, FF-SS or VR)");
    }

    bool is_far_field(ModelVariant v)
    {
        return v == ModelVariant::FF_SnS || v == ModelVariant::FF_SS;
    }

    Eigen::MatrixXcd ChannelTensor::at_frequency(std::size_t k) const
    {
        const std::size_t N = num_ues(), M = num_elements();
        if (k >= num_frequencies())
            throw config_error("ChannelTensor: frequency index out of range");
        Eigen::MatrixXcd h(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(M));
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t m = 0; m < M; ++m)
                h(Eigen::Index(n), Eigen::Index(m)) = values(n, m, k);
        return h;
    }

    ReferenceResponse reference_response(std::span<const PathRecord> paths, const FrequencyGrid &grid)
    {
        const auto f = grid.points();
        ReferenceResponse h(Eigen::Index(paths.size()), Eigen::Index(f.size()));
        for (std::size_t l = 0; l < paths.size(); ++l)
        {
            validate(paths[l]);
            for (std::size_t k = 0; k < f.size(); ++k)
                h(Eigen::Index(l), Eigen::Index(k)) = std::polar(paths[l].amplitude, -2.0 * pi * f[k] * paths[l].delay);
        }
        return h;
    }

    ComplexTensor3 assemble(const ComplexTensor3 &A, const AAFMatrix &S, const ReferenceResponse &h_ref)
    {
        const std::size_t M = A.dim(0), L = A.dim(1), K = A.dim(2);
        if (std::size_t(S.rows()) != M || std::size_t(S.cols()) != L)
            throw config_error("assemble: AAF matrix is " + std::to_string(S.rows()) + "x" + std::to_string(S.cols()) +
                               ", expected " + std::to_string(M) + "x" + std::to_string(L));
        if (std::size_t(h_ref.rows()) != L || std::size_t(h_ref.cols()) != K)
            throw config_error("assemble: reference response is " + std::to_string(h_ref.rows()) + "x" +
                               std::to_string(h_ref.cols()) + ", expected " + std::to_string(L) + "x" +
                               std::to_string(K));

        ComplexTensor3 h(1, M, K);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t l = 0; l < L; ++l)
            {
                double s = S(Eigen::Index(m), Eigen::Index(l));
                for (std::size_t k = 0; k < K; ++k)
                    h(0, m, k) += A(m, l, k) * s * h_ref(Eigen::Index(l), Eigen::Index(k));
            }
        return h;
    }

    ChannelTensor assemble(std::span<const PathRecord> paths, const ArrayGeometry &geom,
                           const AntennaPatterns &patterns, const FrequencyGrid &grid,
                           const AAFMatrix &S, double carrier_hz)
    {
        const std::size_t M = geom.size(), L = paths.size();
        if (std::size_t(S.rows()) != M || std::size_t(S.cols()) != L)
            throw config_error("assemble: AAF matrix is " + std::to_string(S.rows()) + "x" + std::to_string(S.cols()) +
                               ", expected " + std::to_string(M) + "x" + std::to_string(L));
        const auto f = grid.points();
        const std::size_t K = f.size();

        std::vector<PathFactors> factors;
        factors.reserve(L);
        for (const auto &p : paths)
            factors.push_back(path_factors(p, geom, patterns, carrier_hz));

        ChannelTensor out;
        out.values = ComplexTensor3(1, M, K);
        out.meta.num_elements = M;
        out.meta.spacing = geom.spacing();
        out.meta.reference_index = geom.reference_index();
        out.meta.grid = grid;

        detail::parallel_for(M, [&](std::size_t m)
                             {
            auto row = out.values.row(0, m);
            for (std::size_t l = 0; l < L; ++l)
            {
                double mag = factors[l].gain[m] * S(Eigen::Index(m), Eigen::Index(l)) * paths[l].amplitude;
                if (mag == 0.0)
                    continue;
                double path_len = factors[l].excess_distance[m] / speed_of_light + paths[l].delay;
                for (std::size_t k = 0; k < K; ++k)
                    row[k] += std::polar(mag, -2.0 * pi * f[k] * path_len - factors[l].reference_phase);
            } });

        for (const auto &v : out.values.data())
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numeric_error("assemble: non-finite channel coefficient");
        return out;
    }

    ChannelTensor multi_user(std::span<const ChannelTensor> channels)
    {
        if (channels.empty())
            throw config_error("multi_user: no channels to stack");
        std::size_t N = 0;
        const std::size_t M = channels[0].num_elements(), K = channels[0].num_frequencies();
        for (const auto &c : channels)
        {
            if (c.num_elements() != M || c.num_frequencies() != K)
                throw config_error("multi_user: element or frequency counts differ between channels");
            N += c.num_ues();
        }

        ChannelTensor out;
        out.meta = channels[0].meta;
        out.values = ComplexTensor3(N, M, K);
        std::size_t n0 = 0;
        for (const auto &c : channels)
        {
            for (std::size_t n = 0; n < c.num_ues(); ++n, ++n0)
                for (std::size_t m = 0; m < M; ++m)
                {
                    auto src = c.values.row(n, m);
                    auto dst = out.values.row(n0, m);
                    std::copy(src.begin(), src.end(), dst.begin());
                }
        }
        return out;
    }

    std::vector<double> vr_aaf(std::size_t num_elements, VisibleInterval interval)
    {
        if (interval.end > num_elements || interval.begin >= interval.end)
            throw config_error("vr_aaf: visibility interval [" + std::to_string(interval.begin) + ", " +
                               std::to_string(interval.end) + ") is empty or outside [0, " +
                               std::to_string(num_elements) + ")");
        std::vector<double> s(num_elements, 0.0);
        for (std::size_t m = interval.begin; m < interval.end; ++m)
            s[m] = 1.0;
        return s;
    }

    PathDomain path_domain(std::span<const PathRecord> paths, const ArrayGeometry &geom,
                           const AntennaPatterns &patterns, const AAFMatrix &S, double carrier_hz)
    {
        const std::size_t M = geom.size(), L = paths.size();
        if (std::size_t(S.rows()) != M || std::size_t(S.cols()) != L)
            throw config_error("path_domain: AAF matrix dimensions do not match paths and array");
        PathDomain pd;
        pd.power.resize(Eigen::Index(M), Eigen::Index(L));
        pd.delay.resize(Eigen::Index(M), Eigen::Index(L));
        for (std::size_t l = 0; l < L; ++l)
        {
            PathFactors pf = path_factors(paths[l], geom, patterns, carrier_hz);
            bool ff = paths[l].model == WavefrontModel::FF;
            for (std::size_t m = 0; m < M; ++m)
            {
                double a = pf.gain[m] * S(Eigen::Index(m), Eigen::Index(l)) * paths[l].amplitude;
                pd.power(Eigen::Index(m), Eigen::Index(l)) = a * a;
                // a plane wave keeps the reference delay on every element
                pd.delay(Eigen::Index(m), Eigen::Index(l)) =
                    paths[l].delay + (ff ? 0.0 : pf.excess_distance[m] / speed_of_light);
            }
        }
        return pd;
    }

    std::vector<PathRecord> apply_variant_wavefront(std::span<const PathRecord> paths, ModelVariant v)
    {
        std::vector<PathRecord> out(paths.begin(), paths.end());
        if (is_far_field(v))
            for (auto &p : out)
                p.model = WavefrontModel::FF;
        return out;
    }
}
