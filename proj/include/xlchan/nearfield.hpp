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

#ifndef XLCHAN_NEARFIELD_HPP
#define XLCHAN_NEARFIELD_HPP

#include "xlchan/geometry.hpp"
#include "xlchan/tensor.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlchan
{
    // How the wavefront of a path is expanded across the array.
    //  LoS - exact per-element geometry to the receiver
    //  SRM - specular reflection: spherical wave from the mirror image of the receiver
    //  SPM - point source at the scatterer
    //  FF  - plane wave
    enum class WavefrontModel
    {
        LoS,
        SRM,
        SPM,
        FF
    };

    enum class Stationarity
    {
        SS,
        SnS
    };

    std::string_view to_string(WavefrontModel m);
    std::string_view to_string(Stationarity s);
    WavefrontModel wavefront_model_from_string(std::string_view s); // throws config_error
    Stationarity stationarity_from_string(std::string_view s);      // throws config_error

    // One propagation path as seen from the reference element.
    // For SRM paths "distance" is the total path length (Tx to mirror image of the Rx),
    // for SPM paths it is the Tx-to-scatterer distance.
    struct PathRecord
    {
        double amplitude = 1.0; // linear, > 0
        double phase = 0.0;     // rad
        double delay = 0.0;     // s, >= 0
        double distance = 1.0;  // m, > 0
        Angles aod;
        Angles aoa;
        WavefrontModel model = WavefrontModel::LoS;
        Stationarity stationarity = Stationarity::SS;
        std::optional<std::vector<double>> aaf_override; // M values in [0, 1]

        bool operator==(const PathRecord &) const = default;
    };

    // Throws config_error when a field violates its range. Pass num_elements = 0 to skip
    // the AAF override length check.
    void validate(const PathRecord &path, std::size_t num_elements = 0);

    // Element radiation pattern. The Gaussian lobe loses 12 (psi / HPBW)^2 dB per axis,
    // i.e. -3 dB at half the HPBW, with the total loss floored at -30 dB.
    class AntennaPattern
    {
    public:
        enum class Kind
        {
            omnidirectional,
            gaussian_lobe
        };

        static AntennaPattern omnidirectional(double gain_dbi = 0.0);
        static AntennaPattern gaussian_lobe(const Vec3 &boresight, double gain_dbi,
                                            double hpbw_az, double hpbw_el);

        Kind kind() const { return kind_; }
        const Vec3 &boresight() const { return boresight_; }
        double peak_gain_dbi() const { return gain_dbi_; }
        double hpbw_az() const { return hpbw_az_; }
        double hpbw_el() const { return hpbw_el_; }

        double gain_db(const Vec3 &direction) const;
        double field_amplitude(const Vec3 &direction) const; // 10^(gain_db / 20)

        static constexpr double max_attenuation_db = 30.0;

    private:
        Kind kind_ = Kind::omnidirectional;
        Vec3 boresight_ = Vec3::UnitX();
        double gain_dbi_ = 0.0;
        double hpbw_az_ = 2.0 * pi;
        double hpbw_el_ = pi;
    };

    struct AntennaPatterns
    {
        AntennaPattern tx = AntennaPattern::omnidirectional();
        AntennaPattern rx = AntennaPattern::omnidirectional();
    };

    // Path parameters at one element
    struct ElementPath
    {
        double amplitude = 0.0;
        double phase = 0.0;
        double delay = 0.0;
        double distance = 0.0;
        Vec3 aod = Vec3::UnitX();
        Vec3 aoa = Vec3::UnitX();
    };

    struct NearFieldExpansion
    {
        WavefrontModel model = WavefrontModel::LoS;
        std::size_t reference_index = 0;
        std::vector<ElementPath> elements;

        const ElementPath &reference() const { return elements[reference_index]; }
    };

    // Per-element parameters of one path. The scalar phase uses the carrier frequency.
    // FF paths expand to constant amplitude, delay and angles with a linear phase.
    NearFieldExpansion expand_path(const PathRecord &path, const ArrayGeometry &geom, double carrier_hz);

    // NF entry of A(f) for element m of an expanded path.
    cplx nf_entry(const NearFieldExpansion &expansion, std::size_t m,
                  const AntennaPatterns &patterns, double frequency);

    // FF entry of A(f): unit-magnitude plane-wave phase relative to the reference element.
    cplx ff_entry(std::size_t m, const PathRecord &path, const ArrayGeometry &geom, double frequency);

    // Frequency-independent factors of one column of A(f):
    //   a_m(f) = gain[m] * exp(-j 2 pi f excess[m] / c - j phase_ref)
    struct PathFactors
    {
        std::vector<double> gain;
        std::vector<double> excess_distance;
        double reference_phase = 0.0;

        cplx entry(std::size_t m, double frequency) const;
    };

    PathFactors path_factors(const PathRecord &path, const ArrayGeometry &geom,
                             const AntennaPatterns &patterns, double carrier_hz);

    // A(f) for all paths, shaped (M, L, K). Paths tagged FF use the plane-wave entry,
    // everything else the spherical-wave entry.
    ComplexTensor3 build_A(std::span<const PathRecord> paths, const ArrayGeometry &geom,
                           const AntennaPatterns &patterns, std::span<const double> frequencies,
                           double carrier_hz);

    // Adjacent-element phase difference of a plane wave, pi sin(phi) for half-wavelength spacing.
    double ff_phase_delta(double angle_from_broadside);

    // Second-order (Fresnel) adjacent-element phase difference between elements m-1 and m:
    //   (2 pi / lambda) (-delta sin(phi) + (2m - 1) delta^2 cos^2(phi) / (2 d))
    // With m = 1 and delta = lambda / 2 this is -pi sin(phi) + pi lambda cos^2(phi) / (4 d).
    double nf_phase_delta(double angle_from_broadside, double distance, std::size_t m,
                          double wavelength, double spacing);
}

#endif
