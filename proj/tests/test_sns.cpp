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
#include "xlchan/sns.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace xlchan;

namespace
{
    // Direct evaluation of the biased ACF
    std::vector<double> acf_oracle(const std::vector<double> &s)
    {
        const std::size_t M = s.size();
        double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(M);
        double den = 0.0;
        for (double v : s)
            den += (v - mean) * (v - mean);
        std::vector<double> r(M);
        for (std::size_t dx = 0; dx < M; ++dx)
        {
            double num = 0.0;
            for (std::size_t i = 0; i + dx < M; ++i)
                num += (s[i] - mean) * (s[i + dx] - mean);
            r[dx] = num / den;
        }
        return r;
    }

    // One-sample Kolmogorov-Smirnov statistic against Beta(p, q)
    double ks_beta(std::vector<double> x, double p, double q)
    {
        std::sort(x.begin(), x.end());
        double n = double(x.size()), d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            double F = boost::math::ibeta(p, q, x[i]);
            d = std::max({d, F - double(i) / n, double(i + 1) / n - F});
        }
        return d;
    }

    std::vector<double> ranks(const std::vector<double> &v)
    {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            r[idx[i]] = double(i);
        return r;
    }

    double pearson(const std::vector<double> &a, const std::vector<double> &b)
    {
        double ma = std::accumulate(a.begin(), a.end(), 0.0) / double(a.size());
        double mb = std::accumulate(b.begin(), b.end(), 0.0) / double(b.size());
        double sab = 0, saa = 0, sbb = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            sab += (a[i] - ma) * (b[i] - mb);
            saa += (a[i] - ma) * (a[i] - ma);
            sbb += (b[i] - mb) * (b[i] - mb);
        }
        return sab / std::sqrt(saa * sbb);
    }
}

TEST_CASE("normalize_aaf")
{
    auto s = normalize_aaf(std::vector<double>{2, 4, 1});
    CHECK(s == std::vector<double>{0.5, 1.0, 0.25});
    auto c = normalize_aaf(std::vector<double>{3, 3, 3});
    CHECK(c == std::vector<double>{1, 1, 1});
    auto k = normalize_aaf(std::vector<double>{14, 28, 7});
    CHECK(k == s);
    CHECK_THROWS_AS(normalize_aaf(std::vector<double>{0, 0}), numeric_error);
    CHECK_THROWS_AS(normalize_aaf(std::vector<double>{}), config_error);
}

TEST_CASE("acf")
{
    auto r = acf(std::vector<double>{1, 2, 3});
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(0.0));
    CHECK(r[2] == doctest::Approx(-0.5));

    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(64);
    for (double &v : s)
        v = u(rng);
    auto got = acf(s);
    auto want = acf_oracle(s);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));

    CHECK_THROWS_AS(acf(std::vector<double>{0.4, 0.4, 0.4}), numeric_error);
}

TEST_CASE("acf of an AR(1) sequence follows exp(-d dx)")
{
    const double d = 0.05, a = std::exp(-d);
    Rng rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> s(200000);
    s[0] = n(rng);
    for (std::size_t i = 1; i < s.size(); ++i)
        s[i] = a * s[i - 1] + std::sqrt(1 - a * a) * n(rng);
    auto r = acf(s);
    for (std::size_t dx = 1; dx <= 10; ++dx)
        CHECK(std::abs(r[dx] - std::exp(-d * double(dx))) < 0.03);
}

TEST_CASE("exponential_covariance equals the AR(1) covariance")
{
    auto S = exponential_covariance(40, 0.07);
    const double a = std::exp(-0.07);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j)
            CHECK(S(i, j) == doctest::Approx(std::pow(a, std::abs(i - j))).epsilon(1e-12));
}

TEST_CASE("fit_dcorr")
{
    for (double d : {0.05, 0.12, 0.018})
    {
        ACFSeries rho;
        for (int dx = 0; dx < 301; ++dx)
            rho.values.push_back(std::exp(-d * dx));
        CHECK(fit_dcorr(rho, 100) == doctest::Approx(d).epsilon(1e-6 / d));
    }

    Rng rng(99);
    std::normal_distribution<double> noise(0.0, 0.01);
    int within = 0;
    for (int t = 0; t < 100; ++t)
    {
        ACFSeries rho;
        rho.values.push_back(1.0);
        for (int dx = 1; dx < 301; ++dx)
            rho.values.push_back(std::exp(-0.05 * dx) + noise(rng));
        double fit = fit_dcorr(rho, 100);
        within += std::abs(fit - 0.05) <= 0.05 * 0.05;
    }
    CHECK(within == 100);

    ACFSeries tiny{{1.0, 0.5}};
    CHECK_THROWS_AS(fit_dcorr(tiny, 1), config_error);
    CHECK_THROWS_AS(fit_dcorr(tiny, 5), config_error);
}

TEST_CASE("sample_aaf_params")
{
    AAFStatParams st;
    Rng rng(2024);
    const int n = 100000;
    double sum_lnp = 0.0, sum_d = 0.0;
    bool ranges = true, relation = true;
    for (int i = 0; i < n; ++i)
    {
        AAFParams a = sample_aaf_params(st, rng);
        ranges = ranges && st.p_range.contains(a.p) && st.dcorr_range.contains(a.d_corr);
        relation = relation && std::abs(a.q - (0.48 * std::log(a.p) + 1.03)) < 1e-14;
        sum_lnp += std::log(a.p);
        sum_d += a.d_corr;
    }
    CHECK(ranges);
    CHECK(relation);

    // truncated-normal mean of ln p on [ln 0.2, ln 5]
    boost::math::normal N;
    double lo = (std::log(0.2) - 0.37) / 0.58, hi = (std::log(5.0) - 0.37) / 0.58;
    double mean_lnp = 0.37 + 0.58 * (boost::math::pdf(N, lo) - boost::math::pdf(N, hi)) /
                                 (boost::math::cdf(N, hi) - boost::math::cdf(N, lo));
    CHECK(sum_lnp / n == doctest::Approx(mean_lnp).epsilon(0.006 / mean_lnp));

    // truncated exponential mean on [a, b]
    const double lam = 40.61, a = 0.018, b = 0.12;
    double mean_d = 1.0 / lam + (a * std::exp(-lam * a) - b * std::exp(-lam * b)) /
                                    (std::exp(-lam * a) - std::exp(-lam * b));
    CHECK(sum_d / n == doctest::Approx(mean_d).epsilon(0.01));

    CHECK(0.48 * std::log(1.0) + 1.03 == doctest::Approx(1.03));
    CHECK(0.48 * std::log(0.2) + 1.03 == doctest::Approx(0.2575).epsilon(1e-3));

    AAFStatParams bad;
    bad.gamma = 0.5; // q < 0 near p = 0.2
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("sample_beta matches the Beta law")
{
    Rng rng(8);
    for (auto [p, q] : {std::pair{1.0, 1.03}, std::pair{0.4, 0.6}, std::pair{3.0, 1.5}})
    {
        std::vector<double> x(20000);
        for (double &v : x)
            v = sample_beta(p, q, rng);
        CHECK(ks_beta(x, p, q) < 1.628 / std::sqrt(double(x.size())));
    }
}

TEST_CASE("rank_order keeps ties in index order")
{
    auto r = rank_order(std::vector<double>{0.3, 0.1, 0.3, 0.2});
    CHECK(r == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("generate_aaf is a permutation of the Beta draws")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        Rng rng = derive_rng(seed);
        AAFDraw d = generate_aaf_detailed(301, 1.0, 1.03, 0.05, rng);
        auto a = d.aaf, b = d.beta_draws;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
        // the largest Gaussian sample carries the largest Beta draw
        auto im = std::max_element(d.gaussian.begin(), d.gaussian.end()) - d.gaussian.begin();
        CHECK(d.aaf[std::size_t(im)] == b.back());
    }
    Rng r1 = derive_rng(5), r2 = derive_rng(5);
    CHECK(generate_aaf(64, 0.8, 1.0, 0.1, r1) == generate_aaf(64, 0.8, 1.0, 0.1, r2));
}

TEST_CASE("generate_aaf correlation round trip")
{
    // The estimator (biased ACF, sample mean removed, lags up to 100) overshoots d_corr on short
    // arrays, so the reference is the same estimator applied to exact Gaussian AR(1) sequences.
    const std::size_t M = 512;
    const double d = 0.018, a = std::exp(-d);
    double sum = 0.0, oracle = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        Rng rng = derive_rng(seed, 1);
        auto s = generate_aaf(M, 1.0, 1.03, d, rng);
        sum += fit_dcorr(acf(s), default_max_lag(M));

        std::mt19937_64 g(seed + 1000);
        std::normal_distribution<double> n;
        std::vector<double> x(M);
        x[0] = n(g);
        for (std::size_t m = 1; m < M; ++m)
            x[m] = a * x[m - 1] + std::sqrt(1.0 - a * a) * n(g);
        oracle += fit_dcorr(acf(x), default_max_lag(M));
    }
    // rank mapping to the Beta marginal lowers the linear correlation only slightly
    CHECK(sum / oracle > 0.85);
    CHECK(sum / oracle < 1.05);
    CHECK(sum / 200.0 > d);

    double spearman = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        Rng rng = derive_rng(seed, 2);
        auto s = generate_aaf(301, 1.0, 1.03, 5.0, rng);
        std::vector<double> a(s.begin(), s.end() - 1), b(s.begin() + 1, s.end());
        spearman += pearson(ranks(a), ranks(b));
    }
    CHECK(std::abs(spearman / 200.0) < 0.05);
}

TEST_CASE("rescale_aaf")
{
    std::vector<double> s{0.2, 1.0, 0.5};
    CHECK(rescale_aaf(s, 2.0, 2.0) == s);
    CHECK(rescale_aaf(s, 2.0, 1.0) == std::vector<double>{0.4, 2.0, 1.0});

    std::vector<double> alpha{0.3, 1.2, 0.6, 0.9};
    auto n = normalize_aaf(alpha);
    auto r = rescale_aaf(n, 1.2, alpha[0]);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        CHECK(r[i] == doctest::Approx(alpha[i] / alpha[0]).epsilon(1e-14));
    CHECK_THROWS_AS(rescale_aaf(s, 1.0, 0.0), config_error);
}

TEST_CASE("identify_sns")
{
    CHECK(identify_sns(std::vector<double>{1, 1, 1}).stationarity == Stationarity::SS);
    auto half = identify_sns(std::vector<double>{1.0, 0.5, 0.8});
    CHECK(half.stationarity == Stationarity::SnS);
    CHECK(half.variation_db == doctest::Approx(20 * std::log10(2.0)));
    auto mild = identify_sns(std::vector<double>{1.0, 0.85});
    CHECK(mild.stationarity == Stationarity::SS);
    CHECK(mild.variation_db == doctest::Approx(1.41).epsilon(1e-2));
    auto zero = identify_sns(std::vector<double>{1.0, 0.0});
    CHECK(zero.stationarity == Stationarity::SnS);
    CHECK(zero.zero_amplitude);
}

TEST_CASE("derive_rng streams")
{
    Rng a = derive_rng(1, 2, 3), b = derive_rng(1, 2, 3), c = derive_rng(1, 3, 2);
    CHECK(a() == b());
    Rng a2 = derive_rng(1, 2, 3);
    CHECK(a2() != c());
}
