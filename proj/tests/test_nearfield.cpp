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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "xlchan/errors.hpp"
#include "xlchan/nearfield.hpp"

#include <cmath>
#include <vector>

using namespace xlchan;

namespace
{
    PathRecord los_path(double d, Angles aod, double phase = 0.0)
    {
        PathRecord p;
        p.amplitude = 1e-3;
        p.phase = phase;
        p.delay = d / speed_of_light;
        p.distance = d;
        p.aod = aod;
        p.aoa = angles_from_vector(-direction_vector(aod));
        p.model = WavefrontModel::LoS;
        return p;
    }

    double wrap(double x) { return std::remainder(x, 2.0 * pi); }
}

TEST_CASE("tags round trip and reject unknown names")
{
    for (auto m : {WavefrontModel::LoS, WavefrontModel::SRM, WavefrontModel::SPM, WavefrontModel::FF})
        CHECK(wavefront_model_from_string(to_string(m)) == m);
    CHECK(stationarity_from_string("SnS") == Stationarity::SnS);
    CHECK_THROWS_AS(wavefront_model_from_string("DRM"), config_error);
    CHECK_THROWS_AS(stationarity_from_string("sns"), config_error);
}

TEST_CASE("PathRecord validation")
{
    PathRecord p = los_path(1.0, {0.0, pi / 2});
    CHECK_NOTHROW(validate(p));
    p.amplitude = 0.0;
    CHECK_THROWS_AS(validate(p), config_error);
    p = los_path(1.0, {0.0, pi / 2});
    p.aod.elevation = 4.0;
    CHECK_THROWS_AS(validate(p), config_error);
    p = los_path(1.0, {0.0, pi / 2});
    p.aaf_override = std::vector<double>{0.5, 1.2};
    CHECK_THROWS_AS(validate(p), config_error);
    p.aaf_override = std::vector<double>{0.5, 1.0};
    CHECK_THROWS_AS(validate(p, 3), config_error);
    CHECK_NOTHROW(validate(p, 2));
}

TEST_CASE("expand_path reference row and per-element quantities")
{
    // two elements, the second is the reference; element 0 sits 1 m further from the source
    ArrayGeometry g(2, 1.0, Vec3::UnitX(), 1);
    PathRecord p = los_path(1.0, {0.0, pi / 2}, 0.4);
    NearFieldExpansion ex = expand_path(p, g, 100e9);
    const ElementPath &ref = ex.reference();
    CHECK(ref.amplitude == p.amplitude);
    CHECK(ref.phase == p.phase);
    CHECK(ref.delay == p.delay);
    CHECK(ref.distance == p.distance);
    CHECK(ex.elements[0].distance == doctest::Approx(2.0));
    CHECK(ex.elements[0].amplitude == doctest::Approx(p.amplitude / 2.0));

    ArrayGeometry g2(2, 0.3, Vec3::UnitX(), 1);
    NearFieldExpansion ex2 = expand_path(p, g2, 100e9);
    CHECK(ex2.elements[0].delay - ex2.reference().delay == doctest::Approx(1.0007e-9).epsilon(1e-4));
}

TEST_CASE("expand_path arrival directions per wavefront model")
{
    ArrayGeometry g(11, 0.05, Vec3::UnitY(), 0);
    PathRecord p = los_path(2.0, {0.2, pi / 2});
    p.model = WavefrontModel::SPM;
    auto spm = expand_path(p, g, 100e9);
    for (const auto &e : spm.elements)
        CHECK((e.aoa - direction_vector(p.aoa)).norm() < 1e-15);

    // consistent LoS record: the exact arrival direction at element m is the reversed departure direction
    p.model = WavefrontModel::LoS;
    auto los = expand_path(p, g, 100e9);
    double worst = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m)
        worst = std::max(worst, (los.elements[m].aoa + los.elements[m].aod).norm());
    CHECK(worst < 0.02);

    p.model = WavefrontModel::FF;
    auto ff = expand_path(p, g, 100e9);
    for (const auto &e : ff.elements)
    {
        CHECK(e.distance == p.distance);
        CHECK(e.amplitude == p.amplitude);
    }
}

TEST_CASE("nf_entry")
{
    AntennaPatterns omni;
    ArrayGeometry g(2, 0.3, Vec3::UnitX(), 1);
    PathRecord p = los_path(1.0, {0.0, pi / 2}, 0.7);
    const double f = 100e9;
    auto ex = expand_path(p, g, f);
    cplx r = nf_entry(ex, 1, omni, f);
    CHECK(std::abs(r) == doctest::Approx(1.0));
    CHECK(wrap(std::arg(r) + 0.7) == doctest::Approx(0.0).epsilon(1e-12));

    // excess distance of exactly one wavelength
    double lambda = 0.3;
    cplx w = nf_entry(ex, 0, omni, speed_of_light / lambda);
    CHECK(std::abs(wrap(std::arg(w) + 0.7)) < 1e-9);
    CHECK(std::abs(w) == doctest::Approx(1.0 / 1.3));
}

TEST_CASE("nf_entry with a Gaussian lobe at half the HPBW")
{
    const double hpbw = 0.2;
    AntennaPatterns pat;
    pat.tx = AntennaPattern::gaussian_lobe(Vec3::UnitX(), 20.0, hpbw, hpbw);
    const double d = 2.0;
    const double r = d * std::tan(hpbw / 2);
    ArrayGeometry g(2, r, Vec3::UnitY(), 0);
    PathRecord p = los_path(d, {0.0, pi / 2});
    auto ex = expand_path(p, g, 100e9);
    // departure azimuth at element 1 is -hpbw/2 from boresight
    cplx e = nf_entry(ex, 1, pat, 100e9);
    double expected = d / ex.elements[1].distance * std::pow(10.0, -3.0 / 20.0);
    CHECK(std::abs(e) == doctest::Approx(expected).epsilon(1e-12));

    CHECK(pat.tx.gain_db(Vec3::UnitX()) == doctest::Approx(20.0));
    CHECK(pat.tx.gain_db(-Vec3::UnitX()) == doctest::Approx(-10.0)); // 30 dB floor
    CHECK_THROWS_AS(AntennaPattern::gaussian_lobe(Vec3::Zero(), 1.0, 0.1, 0.1), config_error);
}

TEST_CASE("ff_entry")
{
    const double f = 100e9, lambda = speed_of_light / f;
    ArrayGeometry g(8, lambda / 2, Vec3::UnitX(), 0);
    PathRecord p = los_path(5.0, {0.0, pi / 2}, 0.3);
    p.model = WavefrontModel::FF;
    cplx e0 = ff_entry(0, p, g, f);
    CHECK(std::abs(e0) == doctest::Approx(1.0));
    CHECK(wrap(std::arg(e0) + 0.3) == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t m = 1; m < g.size(); ++m)
    {
        cplx step = ff_entry(m, p, g, f) / ff_entry(m - 1, p, g, f);
        CHECK(std::abs(std::abs(wrap(std::arg(step))) - pi) < 1e-9);
        CHECK(std::abs(ff_entry(m, p, g, f)) == doctest::Approx(1.0));
    }
}

TEST_CASE("build_A")
{
    AntennaPatterns omni;
    ArrayGeometry g(301, 1.364e-3);
    const double f = 100e9;

    PathRecord ff = los_path(3.0, {0.4, 1.3});
    ff.model = WavefrontModel::FF;
    std::vector<double> one{f};
    auto A1 = build_A(std::vector<PathRecord>{ff}, g, omni, one, f);
    for (std::size_t m = 0; m < g.size(); ++m)
        CHECK(std::abs(A1(m, 0, 0)) == doctest::Approx(1.0).epsilon(1e-14));

    // far-away LoS source: NF converges to the plane wave
    PathRecord far = los_path(1e6 * g.aperture(), {0.4, 1.3});
    auto Anf = build_A(std::vector<PathRecord>{far}, g, omni, one, f);
    double worst = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m)
        worst = std::max(worst, std::abs(std::arg(Anf(m, 0, 0) / ff_entry(m, far, g, f))));
    CHECK(worst < 1e-3);

    std::vector<PathRecord> paths;
    for (int l = 0; l < 5; ++l)
    {
        PathRecord p = los_path(0.8 + 0.3 * l, {0.1 * l, 1.2 + 0.05 * l});
        p.model = l % 2 ? WavefrontModel::SRM : WavefrontModel::SPM;
        paths.push_back(p);
    }
    std::vector<double> freqs(2001);
    for (std::size_t k = 0; k < freqs.size(); ++k)
        freqs[k] = 90e9 + 1e7 * double(k);
    auto A = build_A(paths, g, omni, freqs, f);
    CHECK(A.dim(0) == 301);
    CHECK(A.dim(1) == 5);
    CHECK(A.dim(2) == 2001);
    bool finite = true;
    for (const cplx &v : A.data())
        finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
    CHECK(finite);

    // entries agree with the per-element expansion
    auto ex = expand_path(paths[1], g, f);
    CHECK(std::abs(A(123, 1, 7) - nf_entry(ex, 123, omni, freqs[7])) < 1e-12);
}

TEST_CASE("phase difference diagnostics")
{
    CHECK(ff_phase_delta(0.0) == 0.0);
    CHECK(ff_phase_delta(pi / 6) == doctest::Approx(pi / 2).epsilon(1e-15));
    double lambda = 3e-3;
    CHECK(nf_phase_delta(0.0, 1.0, 1, lambda, lambda / 2) == doctest::Approx(pi * 0.003 / 4).epsilon(1e-12));
    CHECK(nf_phase_delta(0.0, 1.0, 1, lambda, lambda / 2) == doctest::Approx(2.356e-3).epsilon(1e-3));
    CHECK_THROWS_AS(nf_phase_delta(0.0, 0.0, 1, lambda, lambda / 2), config_error);
}
