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

#include "xlchan/nearfield.hpp"
#include "xlchan/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace xlchan
{
    std::string_view to_string(WavefrontModel m)
    {
        switch (m)
        {
        case WavefrontModel::LoS:
            return "LoS";
        case WavefrontModel::SRM:
            return "SRM";
        case WavefrontModel::SPM:
            return "SPM";
        case WavefrontModel::FF:
            return "FF";
        }
        return "?";
    }

    std::string_view to_string(Stationarity s)
    {
        return s == Stationarity::SS ? "SS" : "SnS";
    }

    WavefrontModel wavefront_model_from_string(std::string_view s)
    {
        if (s == "LoS")
            return WavefrontModel::LoS;
        if (s == "SRM")
            return WavefrontModel::SRM;
        if (s == "SPM")
            return WavefrontModel::SPM;
        if (s == "FF")
            return WavefrontModel::FF;
        throw config_error("unknown wavefront model tag '" + std::string(s) + "'");
    }

    Stationarity stationarity_from_string(std::string_view s)
    {
        if (s == "SS")
            return Stationarity::SS;
        if (s == "SnS")
            return Stationarity::SnS;
        throw config_error("unknown stationarity tag '" + std::string(s) + "'");
    }

    void validate(const PathRecord &path, std::size_t num_elements)
    {
        if (!(path.amplitude > 0.0) || !std::isfinite(path.amplitude))
            throw config_error("path amplitude must be positive and finite");
        if (!std::isfinite(path.phase))
            throw config_error("path phase must be finite");
        if (!(path.delay >= 0.0) || !std::isfinite(path.delay))
            throw config_error("path delay must be non-negative and finite");
        if (!(path.distance > 0.0) || !std::isfinite(path.distance))
            throw config_error("path distance must be positive and finite");
        for (const Angles *a : {&path.aod, &path.aoa})
        {
            if (!(a->azimuth > -pi - 1e-12 && a->azimuth <= pi + 1e-12))
                throw config_error("path azimuth outside (-pi, pi]");
            if (!(a->elevation >= -1e-12 && a->elevation <= pi + 1e-12))
                throw config_error("path elevation outside [0, pi]");
        }
        if (path.aaf_override)
        {
            const auto &s = *path.aaf_override;
            if (num_elements != 0 && s.size() != num_elements)
                throw config_error("AAF override has " + std::to_string(s.size()) + " values, expected " +
                                   std::to_string(num_elements));
            for (double v : s)
                if (!(v >= 0.0 && v <= 1.0))
                    throw config_error("AAF override values must lie in [0, 1]");
        }
    }

    // ---------------------------------------------------------------------------------------------

    AntennaPattern AntennaPattern::omnidirectional(double gain_dbi)
    {
        AntennaPattern p;
        p.kind_ = Kind::omnidirectional;
        p.gain_dbi_ = gain_dbi;
        return p;
    }

    AntennaPattern AntennaPattern::gaussian_lobe(const Vec3 &boresight, double gain_dbi,
                                                 double hpbw_az, double hpbw_el)
    {
        if (!(hpbw_az > 0.0) || !(hpbw_el > 0.0))
            throw config_error("antenna pattern: half-power beam widths must be positive");
        double n = boresight.norm();
        if (!(n > 0.0))
            throw config_error("antenna pattern: boresight must be a non-zero vector");
        AntennaPattern p;
        p.kind_ = Kind::gaussian_lobe;
        p.boresight_ = boresight / n;
        p.gain_dbi_ = gain_dbi;
        p.hpbw_az_ = hpbw_az;
        p.hpbw_el_ = hpbw_el;
        return p;
    }

    double AntennaPattern::gain_db(const Vec3 &direction) const
    {
        if (kind_ == Kind::omnidirectional)
            return gain_dbi_;

        Angles b = angles_from_vector(boresight_);
        Angles d = angles_from_vector(direction.normalized());
        double daz = std::remainder(d.azimuth - b.azimuth, 2.0 * pi);
        double del = d.elevation - b.elevation;
        double att = 12.0 * (daz / hpbw_az_) * (daz / hpbw_az_) + 12.0 * (del / hpbw_el_) * (del / hpbw_el_);
        return gain_dbi_ - std::min(att, max_attenuation_db);
    }

    double AntennaPattern::field_amplitude(const Vec3 &direction) const
    {
        return std::pow(10.0, gain_db(direction) / 20.0);
    }

    // ---------------------------------------------------------------------------------------------

    NearFieldExpansion expand_path(const PathRecord &path, const ArrayGeometry &geom, double carrier_hz)
    {
        validate(path, geom.size());
        const std::size_t M = geom.size();
        const double k0 = 2.0 * pi * carrier_hz / speed_of_light;
        const Vec3 aod_ref = direction_vector(path.aod);
        const Vec3 aoa_ref = direction_vector(path.aoa);

        NearFieldExpansion ex;
        ex.model = path.model;
        ex.reference_index = geom.reference_index();
        ex.elements.resize(M);

        ElementPath ref;
        ref.amplitude = path.amplitude;
        ref.phase = path.phase;
        ref.delay = path.delay;
        ref.distance = path.distance;
        ref.aod = aod_ref;
        ref.aoa = aoa_ref;

        if (path.model == WavefrontModel::FF)
        {
            for (std::size_t m = 0; m < M; ++m)
            {
                ElementPath e = ref;
                if (m != geom.reference_index())
                    e.phase = path.phase - k0 * geom.offset(m).dot(aod_ref);
                ex.elements[m] = e;
            }
            return ex;
        }

        const Vec3 source = path.distance * aod_ref;
        for (std::size_t m = 0; m < M; ++m)
        {
            if (m == geom.reference_index())
            {
                ex.elements[m] = ref;
                continue;
            }
            const Vec3 r_m = geom.offset(m);
            ElementPath e;
            e.distance = element_distance(path.distance, aod_ref, r_m);
            double excess = e.distance - path.distance;
            e.amplitude = path.amplitude * path.distance / e.distance;
            e.phase = path.phase + k0 * excess;
            e.delay = path.delay + excess / speed_of_light;
            e.aod = (source - r_m) / e.distance;
            switch (path.model)
            {
            case WavefrontModel::SRM:
                e.aoa = (e.aod - aod_ref + aoa_ref).normalized();
                break;
            case WavefrontModel::SPM:
                e.aoa = aoa_ref;
                break;
            default: // LoS: the arrival direction turns opposite to the departure direction
                e.aoa = (aoa_ref - (e.aod - aod_ref)).normalized();
                break;
            }
            ex.elements[m] = e;
        }
        return ex;
    }

    namespace
    {
        double nf_gain(const NearFieldExpansion &ex, std::size_t m, const AntennaPatterns &patterns)
        {
            const ElementPath &ref = ex.reference();
            const ElementPath &e = ex.elements[m];
            double ft_ref = patterns.tx.field_amplitude(ref.aod);
            double fr_ref = patterns.rx.field_amplitude(ref.aoa);
            if (!(ft_ref > 0.0) || !(fr_ref > 0.0))
                throw numeric_error("nf_entry: antenna pattern gain is zero at the reference angles");
            return (ref.distance / e.distance) *
                   (patterns.tx.field_amplitude(e.aod) / ft_ref) *
                   (patterns.rx.field_amplitude(e.aoa) / fr_ref);
        }
    }

    cplx nf_entry(const NearFieldExpansion &expansion, std::size_t m,
                  const AntennaPatterns &patterns, double frequency)
    {
        if (m >= expansion.elements.size())
            throw config_error("nf_entry: element index out of range");
        const ElementPath &ref = expansion.reference();
        double g = nf_gain(expansion, m, patterns);
        double excess = expansion.elements[m].distance - ref.distance;
        double arg = -2.0 * pi * frequency * excess / speed_of_light - ref.phase;
        return std::polar(g, arg);
    }

    cplx ff_entry(std::size_t m, const PathRecord &path, const ArrayGeometry &geom, double frequency)
    {
        if (m >= geom.size())
            throw config_error("ff_entry: element index out of range");
        double proj = geom.offset(m).dot(direction_vector(path.aod));
        double arg = 2.0 * pi * frequency * proj / speed_of_light - path.phase;
        return std::polar(1.0, arg);
    }

    cplx PathFactors::entry(std::size_t m, double frequency) const
    {
        double arg = -2.0 * pi * frequency * excess_distance[m] / speed_of_light - reference_phase;
        return std::polar(gain[m], arg);
    }

    PathFactors path_factors(const PathRecord &path, const ArrayGeometry &geom,
                             const AntennaPatterns &patterns, double carrier_hz)
    {
        const std::size_t M = geom.size();
        PathFactors pf;
        pf.gain.assign(M, 1.0);
        pf.excess_distance.assign(M, 0.0);
        pf.reference_phase = path.phase;

        if (path.model == WavefrontModel::FF)
        {
            validate(path, M);
            const Vec3 aod = direction_vector(path.aod);
            for (std::size_t m = 0; m < M; ++m)
                pf.excess_distance[m] = -geom.offset(m).dot(aod);
            return pf;
        }

        NearFieldExpansion ex = expand_path(path, geom, carrier_hz);
        for (std::size_t m = 0; m < M; ++m)
        {
            pf.gain[m] = nf_gain(ex, m, patterns);
            pf.excess_distance[m] = ex.elements[m].distance - ex.reference().distance;
        }
        return pf;
    }

    ComplexTensor3 build_A(std::span<const PathRecord> paths, const ArrayGeometry &geom,
                           const AntennaPatterns &patterns, std::span<const double> frequencies,
                           double carrier_hz)
    {
        const std::size_t M = geom.size(), L = paths.size(), K = frequencies.size();
        std::vector<PathFactors> factors;
        factors.reserve(L);
        for (const auto &p : paths)
            factors.push_back(path_factors(p, geom, patterns, carrier_hz));

        ComplexTensor3 A(M, L, K);
        detail::parallel_for(M * L, [&](std::size_t idx)
                             {
            std::size_t m = idx / L, l = idx % L;
            auto row = A.row(m, l);
            for (std::size_t k = 0; k < K; ++k)
                row[k] = factors[l].entry(m, frequencies[k]); });
        return A;
    }

    double ff_phase_delta(double angle_from_broadside)
    {
        return pi * std::sin(angle_from_broadside);
    }

    double nf_phase_delta(double angle_from_broadside, double distance, std::size_t m,
                          double wavelength, double spacing)
    {
        if (!(distance > 0.0))
            throw config_error("nf_phase_delta: distance must be positive");
        double s = std::sin(angle_from_broadside);
        double c2 = 1.0 - s * s;
        double mm = 2.0 * double(m) - 1.0;
        return 2.0 * pi / wavelength * (-spacing * s + mm * spacing * spacing * c2 / (2.0 * distance));
    }
}
