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
#include "xlchan/metrics.hpp"
#include "xlchan/sns.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace xlchan;

namespace
{
    // N rows of an M-point DFT matrix: orthogonal, unit-magnitude entries
    Eigen::MatrixXcd dft_rows(int N, int M)
    {
        Eigen::MatrixXcd h(N, M);
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m)
                h(n, m) = std::polar(1.0, 2.0 * pi * n * m / M);
        return h;
    }

    // Pooled-sample CvM by direct counting
    double cvm_oracle(const std::vector<double> &a, const std::vector<double> &b)
    {
        std::vector<double> pooled = a;
        pooled.insert(pooled.end(), b.begin(), b.end());
        double n = double(a.size()), m = double(b.size()), sum = 0.0;
        for (double z : pooled)
        {
            double fa = double(std::count_if(a.begin(), a.end(), [&](double x) { return x <= z; })) / n;
            double fb = double(std::count_if(b.begin(), b.end(), [&](double x) { return x <= z; })) / m;
            sum += (fa - fb) * (fa - fb);
        }
        return n * m / ((n + m) * (n + m)) * sum;
    }

    ChannelTensor tensor_from(const std::vector<std::vector<cplx>> &rows)
    {
        ChannelTensor t;
        t.values = ComplexTensor3(1, rows.size(), rows[0].size());
        for (std::size_t m = 0; m < rows.size(); ++m)
            for (std::size_t k = 0; k < rows[m].size(); ++k)
                t.values(0, m, k) = rows[m][k];
        return t;
    }
}

TEST_CASE("entropy_capacity closed forms")
{
    std::vector<Eigen::MatrixXcd> h(3, dft_rows(4, 64));
    const double gamma = std::pow(10.0, 1.5);
    CHECK(entropy_capacity(h, 15.0) == doctest::Approx(4 * std::log2(1 + gamma)).epsilon(1e-12));
    CHECK(entropy_capacity(h, 15.0) == doctest::Approx(20.11).epsilon(5e-4));

    std::vector<Eigen::MatrixXcd> one{Eigen::MatrixXcd::Ones(1, 301)};
    CHECK(entropy_capacity(one, 15.0) == doctest::Approx(5.03).epsilon(1e-3));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> r(4, Eigen::MatrixXcd(4, 32));
    for (auto &hk : r)
        for (int i = 0; i < hk.size(); ++i)
            hk(i) = cplx(n(rng), n(rng));
    double c0 = entropy_capacity(r, 10.0);
    for (auto &hk : r)
        hk *= cplx(0.0, -3.7e-4);
    CHECK(entropy_capacity(r, 10.0) == doctest::Approx(c0).epsilon(1e-12));

    std::vector<Eigen::MatrixXcd> zero{Eigen::MatrixXcd::Zero(2, 4)};
    CHECK_THROWS_AS(entropy_capacity(zero, 10.0), numeric_error);
}

TEST_CASE("demmel")
{
    std::vector<Eigen::MatrixXcd> h{dft_rows(4, 16)};
    auto d = demmel(h);
    CHECK(d.linear == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.db() == doctest::Approx(20 * std::log10(2.0)).epsilon(1e-12));

    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 50; ++t)
    {
        Eigen::MatrixXcd x(3, 10);
        for (int i = 0; i < x.size(); ++i)
            x(i) = cplx(n(rng), n(rng));
        std::vector<Eigen::MatrixXcd> v{x};
        CHECK(demmel(v).linear >= std::sqrt(3.0) - 1e-12);
    }

    Eigen::VectorXcd u = Eigen::VectorXcd::Random(4), w = Eigen::VectorXcd::Random(20);
    std::vector<Eigen::MatrixXcd> rank1{u * w.transpose()};
    auto r1 = demmel(rank1);
    CHECK(r1.rank_deficient);
    CHECK(std::isinf(r1.db()));

    std::vector<Eigen::MatrixXcd> row{Eigen::MatrixXcd::Ones(1, 4)};
    CHECK_THROWS_AS(demmel(row), config_error);
}

TEST_CASE("capacity_trials")
{
    ChannelTensor pool;
    pool.values = ComplexTensor3(6, 16, 3);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto &v : pool.values.data())
        v = cplx(n(rng), n(rng));
    CapacityConfig cfg{15.0, 4, 30};
    auto a = capacity_trials(pool, cfg, 9);
    auto b = capacity_trials(pool, cfg, 9);
    CHECK(a.capacity.size() == 30);
    CHECK(a.capacity == b.capacity);
    CHECK(a.demmel_db == b.demmel_db);

    // trial 0 by hand: same draw, same number
    std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
    CapacityConfig full{15.0, 6, 2};
    auto f = capacity_trials(pool, full, 3);
    auto mats = frequency_matrices(pool, all);
    CHECK(f.capacity[0] == doctest::Approx(entropy_capacity(mats, 15.0)).epsilon(1e-12));

    CapacityConfig too_many{15.0, 7, 2};
    CHECK_THROWS_AS(capacity_trials(pool, too_many, 1), config_error);
}

TEST_CASE("sns_amplitude_matrix")
{
    Eigen::VectorXcd href(2);
    href << cplx(0.0, 2.0), cplx(-0.5, 0.0);
    AAFMatrix ones = AAFMatrix::Ones(5, 2);
    auto a = sns_amplitude_matrix(ones, href);
    for (int m = 0; m < 5; ++m)
    {
        CHECK(a(m, 0) == doctest::Approx(2.0));
        CHECK(a(m, 1) == doctest::Approx(0.5));
    }
    AAFMatrix s(3, 1);
    s << 0.1, 0.5, 1.0;
    Eigen::VectorXcd h1(1);
    h1 << cplx(3.0, 4.0);
    auto b = sns_amplitude_matrix(s, h1);
    for (int m = 0; m < 3; ++m)
        CHECK(b(m, 0) == doctest::Approx(5.0 * s(m, 0)));
    CHECK_THROWS_AS(sns_amplitude_matrix(ones, h1), config_error);
}

TEST_CASE("avg_spatial_correlation")
{
    Eigen::MatrixXd same(20, 6);
    for (int m = 0; m < 20; ++m)
        same.row(m) << 1, 3, 2, 5, 4, 0.5;
    for (std::size_t dx = 0; dx < 20; ++dx)
        CHECK(avg_spatial_correlation(same, dx).value == doctest::Approx(1.0));

    Eigen::MatrixXd rnd = Eigen::MatrixXd::Random(30, 8);
    CHECK(avg_spatial_correlation(rnd, 0).value == doctest::Approx(1.0));

    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        // element rows drawn independently of each other
        Eigen::MatrixXd hi(301, 100);
        Rng rng = derive_rng(seed, 77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int m = 0; m < 301; ++m)
            for (int l = 0; l < 100; ++l)
                hi(m, l) = u(rng);
        for (std::size_t dx : {1, 5, 50})
            worst = std::max(worst, std::abs(avg_spatial_correlation(hi, dx).value));
    }
    CHECK(worst < 0.2);

    Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(4, 3);
    CHECK_THROWS_AS(avg_spatial_correlation(flat, 1), numeric_error);
    CHECK_THROWS_AS(avg_spatial_correlation(rnd, 30), config_error);
}

TEST_CASE("channel_gain_db")
{
    auto unit = tensor_from({{cplx(1, 0), cplx(0, 1)}, {cplx(-1, 0), cplx(0.6, 0.8)}});
    for (double g : channel_gain_db(unit))
        CHECK(g == doctest::Approx(0.0).epsilon(1e-12));
    auto twice = unit;
    for (auto &v : twice.values.data())
        v *= 2.0;
    CHECK(channel_gain_db(twice)[0] == doctest::Approx(20 * std::log10(2.0)));
    auto single = tensor_from({{std::polar(0.1, 0.3), std::polar(0.1, -1.0)}});
    CHECK(channel_gain_db(single)[0] == doctest::Approx(-20.0));
}

TEST_CASE("rician_k_db")
{
    Eigen::MatrixXd p(3, 3);
    p << 10, 1, 1,
        1, 1, 0,
        10, 1, 0.5;
    auto k = rician_k_db(p);
    CHECK(k[0] == doctest::Approx(10 * std::log10(5.0)));
    CHECK(k[0] == doctest::Approx(6.99).epsilon(1e-3));
    CHECK(k[1] == doctest::Approx(0.0));
    CHECK(k[2] > k[0]);

    Eigen::MatrixXd lone(1, 2);
    lone << 1.0, 0.0;
    CHECK(std::isinf(rician_k_db(lone)[0]));
}

TEST_CASE("rician_k_moment_db recovers K from Rician samples")
{
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 1.0);
    const double K = 5.0, omega = 1.0;
    const double nu = std::sqrt(K / (K + 1) * omega), sigma = std::sqrt(omega / (2 * (K + 1)));
    std::vector<double> pw(200000);
    for (double &v : pw)
        v = std::norm(cplx(nu + sigma * n(rng), sigma * n(rng)));
    CHECK(rician_k_moment_db(pw) == doctest::Approx(10 * std::log10(K)).epsilon(0.03));
}

TEST_CASE("rms_delay_spread")
{
    ElementPDP one{{3e-9}, {1.0}};
    CHECK(rms_delay_spread(one) == 0.0);
    ElementPDP two{{0.0, 10e-9}, {1.0, 1.0}};
    CHECK(rms_delay_spread(two) == 5e-9);
    ElementPDP three{{0.0, 1e-9, 2e-9}, {1.0, 1.0, 1.0}};
    CHECK(std::abs(rms_delay_spread(three) - std::sqrt(2.0 / 3.0) * 1e-9) < 1e-21);
    // a weak path below the dynamic range is ignored
    ElementPDP weak{{0.0, 10e-9, 50e-9}, {1.0, 1.0, 1e-5}};
    CHECK(rms_delay_spread(weak, 40.0) == doctest::Approx(5e-9).epsilon(1e-12));

    PathDomain pd;
    pd.power = Eigen::MatrixXd(2, 2);
    pd.delay = Eigen::MatrixXd(2, 2);
    pd.power << 1, 1, 1, 0;
    pd.delay << 0, 10e-9, 0, 10e-9;
    auto ds = rms_delay_spread(pdp_from_path_domain(pd));
    CHECK(ds[0] == doctest::Approx(5e-9));
    CHECK(ds[1] == 0.0);
}

TEST_CASE("cvm_distance")
{
    std::vector<double> a{0.3, 1.2, -0.4, 2.2, 0.9};
    CHECK(cvm_distance(a, a) == 0.0);
    std::vector<double> b{0.1, 0.5, 3.0};
    CHECK(cvm_distance(a, b) == doctest::Approx(cvm_distance(b, a)).epsilon(1e-15));
    CHECK(cvm_distance(a, b) == doctest::Approx(cvm_oracle(a, b)).epsilon(1e-12));

    std::vector<double> x(100), y(100);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i)
    {
        x[i] = u(rng);
        y[i] = 2.0 + u(rng);
    }
    CHECK(std::abs(cvm_distance(x, y) - cvm_oracle(x, y)) < 1e-12);

    std::vector<double> t1{1, 1, 2, 2, 3}, t2{1, 2, 2, 3, 3, 3};
    CHECK(cvm_distance(t1, t2) == doctest::Approx(cvm_oracle(t1, t2)).epsilon(1e-12));
    CHECK_THROWS_AS(cvm_distance(std::vector<double>{}, a), config_error);

    EmpiricalCDF F(a);
    CHECK(F(-1.0) == 0.0);
    CHECK(F(0.9) == doctest::Approx(0.6));
    CHECK(F(10.0) == 1.0);
}

TEST_CASE("impulse_response and extract_and_track")
{
    // delays on exact bins: bin spacing 1 / (K df)
    const std::size_t M = 12, K = 200;
    const double df = 1e8, f0 = 100e9, bin = 1.0 / (double(K) * df);
    ChannelTensor ch;
    ch.values = ComplexTensor3(1, M, K);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k)
        {
            double f = f0 + df * double(k);
            double t1 = double(20 + m) * bin, t2 = double(120 - m / 2) * bin;
            ch.values(0, m, k) = std::polar(1.0, -2 * pi * f * t1) + std::polar(0.3, -2 * pi * f * t2);
        }
    auto cir = impulse_response(ch);
    CHECK(std::abs(cir(0, 20)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(cir(0, 120)) == doctest::Approx(0.3).epsilon(1e-9));

    TrackingConfig cfg;
    cfg.delay_gate = 1.5 * bin;
    auto tracks = extract_and_track(cir, bin, cfg);
    REQUIRE(tracks.size() == 2);
    std::sort(tracks.begin(), tracks.end(), [](const Track &a, const Track &b) { return a.delay[0] < b.delay[0]; });
    for (std::size_t m = 0; m < M; ++m)
    {
        CHECK(tracks[0].delay[m] == double(20 + m) * bin);
        CHECK(tracks[1].delay[m] == double(120 - m / 2) * bin);
    }

    // a 50 dB weaker second path is gated out; the single remaining path spans the array
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k)
        {
            double f = f0 + df * double(k);
            ch.values(0, m, k) = std::polar(1.0, -2 * pi * f * 30 * bin) + std::polar(std::pow(10.0, -50.0 / 20.0), -2 * pi * f * 90 * bin);
        }
    auto one = extract_and_track(impulse_response(ch), bin, cfg);
    REQUIRE(one.size() == 1);
    CHECK(one[0].span() == M);
    CHECK(one[0].first_element == 0);
}

TEST_CASE("sliding_dft_angle")
{
    const double f = 100e9, lambda = speed_of_light / f, delta = lambda / 2;
    const std::size_t M = 301, grid = 4001;
    const double step = 2.0 / double(grid - 1);
    for (double u : {0.0, 0.31, -0.72})
    {
        std::vector<cplx> h(M);
        for (std::size_t m = 0; m < M; ++m)
            h[m] = std::polar(1.0, 2 * pi * double(m) * delta * u / lambda);
        auto est = sliding_dft_angle(h, f, delta, 51, grid);
        CHECK(est.size() == M - 50);
        double worst = 0.0;
        for (const auto &e : est)
            worst = std::max(worst, std::abs(e.direction_cosine - u));
        CHECK(worst <= step);
    }

    // spherical wave from a source beyond the window Rayleigh distance (~3.75 m): the local
    // direction cosine follows the geometry and drifts monotonically along the array
    Vec3 src(0.2, 3.0, 0.0);
    std::vector<cplx> h(M);
    for (std::size_t m = 0; m < M; ++m)
    {
        double d = (src - Vec3(double(m) * delta, 0, 0)).norm();
        h[m] = std::polar(1.0 / d, -2 * pi * d / lambda);
    }
    auto est = sliding_dft_angle(h, f, delta, 51, grid);
    bool monotone = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i)
    {
        if (i > 0)
            monotone = monotone && est[i].direction_cosine <= est[i - 1].direction_cosine;
        Vec3 centre(double(est[i].window_start + 25) * delta, 0, 0);
        worst = std::max(worst, std::abs(est[i].direction_cosine - (src - centre).normalized().x()));
    }
    CHECK(worst < 2 * step);
    CHECK(monotone);
    CHECK(est.front().direction_cosine > est.back().direction_cosine + 0.1);
}
