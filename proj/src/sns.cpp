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

#include "xlchan/sns.hpp"
#include "xlchan/errors.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace xlchan
{
    namespace
    {
        constexpr int rejection_cap = 10000;

        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        double sample_truncated_lognormal(double mu, double sigma, Interval range, Rng &rng)
        {
            std::lognormal_distribution<double> dist(mu, sigma);
            for (int i = 0; i < rejection_cap; ++i)
            {
                double p = dist(rng);
                if (range.contains(p))
                    return p;
            }
            boost::math::normal_distribution<double> normal(mu, sigma);
            double lo = boost::math::cdf(normal, std::log(range.low));
            double hi = boost::math::cdf(normal, std::log(range.high));
            std::uniform_real_distribution<double> u(lo, hi);
            return std::clamp(std::exp(boost::math::quantile(normal, u(rng))), range.low, range.high);
        }

        double sample_truncated_exponential(double rate, Interval range, Rng &rng)
        {
            std::exponential_distribution<double> dist(rate);
            for (int i = 0; i < rejection_cap; ++i)
            {
                double d = dist(rng);
                if (range.contains(d))
                    return d;
            }
            double lo = -std::expm1(-rate * range.low), hi = -std::expm1(-rate * range.high);
            std::uniform_real_distribution<double> u(lo, hi);
            return std::clamp(-std::log1p(-u(rng)) / rate, range.low, range.high);
        }
    }

    void AAFStatParams::validate() const
    {
        if (!(sigma_p > 0.0) || !std::isfinite(mu_p))
            throw config_error("AAF statistics: sigma_p must be positive and mu_p finite");
        if (!(lambda_corr > 0.0))
            throw config_error("AAF statistics: lambda_corr must be positive");
        if (!(p_range.low > 0.0) || !(p_range.high >= p_range.low))
            throw config_error("AAF statistics: p range must be a positive interval");
        if (!(dcorr_range.low > 0.0) || !(dcorr_range.high >= dcorr_range.low))
            throw config_error("AAF statistics: d_corr range must be a positive interval");
        double q_lo = std::min(xi * std::log(p_range.low), xi * std::log(p_range.high)) + gamma;
        if (!(q_lo > 0.0))
            throw config_error("AAF statistics: q = xi ln(p) + gamma is not positive over the p range");
    }

    std::vector<double> normalize_aaf(std::span<const double> amplitudes)
    {
        if (amplitudes.empty())
            throw config_error("normalize_aaf: empty amplitude sequence");
        double mx = 0.0;
        for (double a : amplitudes)
        {
            if (!(a >= 0.0) || !std::isfinite(a))
                throw config_error("normalize_aaf: amplitudes must be non-negative and finite");
            mx = std::max(mx, a);
        }
        if (!(mx > 0.0))
            throw numeric_error("normalize_aaf: all amplitudes are zero");
        std::vector<double> s(amplitudes.size());
        std::transform(amplitudes.begin(), amplitudes.end(), s.begin(), [mx](double a)
                       { return a / mx; });
        return s;
    }

    ACFSeries acf(std::span<const double> s)
    {
        const std::size_t M = s.size();
        if (M < 2)
            throw config_error("acf: at least two elements are required");
        double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(M);
        std::vector<double> c(M);
        double energy = 0.0, scale = 0.0;
        for (std::size_t m = 0; m < M; ++m)
        {
            c[m] = s[m] - mean;
            energy += c[m] * c[m];
            scale = std::max(scale, std::abs(s[m]));
        }
        // rounding residue of the mean counts as constant
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
        if (!(energy > double(M) * floor * floor))
            throw numeric_error("acf: sequence is constant, variance undefined");

        ACFSeries r;
        r.values.resize(M);
        for (std::size_t lag = 0; lag < M; ++lag)
        {
            double acc = 0.0;
            for (std::size_t m = 0; m + lag < M; ++m)
                acc += c[m] * c[m + lag];
            r.values[lag] = acc / energy;
        }
        r.values[0] = 1.0;
        return r;
    }

    std::size_t default_max_lag(std::size_t num_elements)
    {
        return std::min<std::size_t>(num_elements > 0 ? num_elements - 1 : 0, 100);
    }

    double fit_dcorr(const ACFSeries &rho, std::size_t max_lag)
    {
        if (max_lag < 2)
            throw config_error("fit_dcorr: max_lag must be at least 2");
        if (max_lag >= rho.size())
            throw config_error("fit_dcorr: max_lag " + std::to_string(max_lag) + " exceeds the ACF length");

        auto cost = [&](double d)
        {
            double acc = 0.0;
            for (std::size_t lag = 1; lag <= max_lag; ++lag)
            {
                double e = rho[lag] - std::exp(-d * double(lag));
                acc += e * e;
            }
            return acc;
        };

        // Coarse log-spaced scan to bracket the global minimum, then golden-section refinement.
        constexpr double d_lo = 1e-4, d_hi = 10.0;
        constexpr int n_grid = 401;
        std::vector<double> grid(n_grid);
        std::size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_grid; ++i)
        {
            grid[i] = d_lo * std::pow(d_hi / d_lo, double(i) / double(n_grid - 1));
            double c = cost(grid[i]);
            if (c < best_cost)
            {
                best_cost = c;
                best = std::size_t(i);
            }
        }
        if (!std::isfinite(best_cost))
            throw numeric_error("fit_dcorr: objective is not finite on [1e-4, 10]; ACF contains invalid values");

        double a = grid[best == 0 ? 0 : best - 1];
        double b = grid[std::min<std::size_t>(best + 1, n_grid - 1)];
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
        double f1 = cost(x1), f2 = cost(x2);
        int iter = 0;
        while ((b - a) > 1e-13 * std::max(1.0, std::abs(a)) && iter < 500)
        {
            if (f1 < f2)
            {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = cost(x1);
            }
            else
            {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = cost(x2);
            }
            ++iter;
        }
        if (iter >= 500 || !std::isfinite(f1) || !std::isfinite(f2))
            throw numeric_error("fit_dcorr: golden-section search did not converge (bracket [" +
                                std::to_string(a) + ", " + std::to_string(b) + "] after " +
                                std::to_string(iter) + " iterations)");
        double x = 0.5 * (a + b);
        return cost(x) <= best_cost ? x : grid[best];
    }

    AAFParams sample_aaf_params(const AAFStatParams &stats, Rng &rng)
    {
        stats.validate();
        AAFParams out;
        out.p = sample_truncated_lognormal(stats.mu_p, stats.sigma_p, stats.p_range, rng);
        out.q = stats.xi * std::log(out.p) + stats.gamma;
        out.d_corr = sample_truncated_exponential(stats.lambda_corr, stats.dcorr_range, rng);
        return out;
    }

    Eigen::MatrixXd exponential_covariance(std::size_t num_elements, double d_corr)
    {
        const auto M = Eigen::Index(num_elements);
        Eigen::MatrixXd sigma(M, M);
        for (Eigen::Index i = 0; i < M; ++i)
            for (Eigen::Index j = 0; j < M; ++j)
                sigma(i, j) = std::exp(-d_corr * double(std::abs(i - j)));
        return sigma;
    }

    double sample_beta(double p, double q, Rng &rng)
    {
        std::gamma_distribution<double> gx(p, 1.0), gy(q, 1.0);
        for (;;)
        {
            double x = gx(rng), y = gy(rng);
            double s = x + y;
            if (s > 0.0 && std::isfinite(s))
                return std::clamp(x / s, 0.0, 1.0);
        }
    }

    std::vector<std::size_t> rank_order(std::span<const double> values)
    {
        std::vector<std::size_t> idx(values.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                         { return values[a] < values[b]; });
        return idx;
    }

    AAFDraw generate_aaf_detailed(std::size_t num_elements, double p, double q, double d_corr, Rng &rng)
    {
        if (num_elements == 0)
            throw config_error("generate_aaf: number of elements must be at least 1");
        if (!(p > 0.0) || !(q > 0.0))
            throw config_error("generate_aaf: Beta shape parameters must be positive");
        if (!(d_corr > 0.0) || !std::isfinite(d_corr))
            throw config_error("generate_aaf: d_corr must be positive");

        const std::size_t M = num_elements;
        AAFDraw out;

        // Step 1: i.i.d. marginal draws
        out.beta_draws.resize(M);
        for (auto &x : out.beta_draws)
            x = sample_beta(p, q, rng);

        // Step 2: correlated Gaussian vector
        Eigen::LLT<Eigen::MatrixXd> llt(exponential_covariance(M, d_corr));
        if (llt.info() != Eigen::Success)
            throw numeric_error("generate_aaf: Cholesky factorization of the correlation matrix failed (M = " +
                                std::to_string(M) + ", d_corr = " + std::to_string(d_corr) + ")");
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd z(static_cast<Eigen::Index>(M));
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z(i) = normal(rng);
        Eigen::VectorXd y = llt.matrixL() * z;
        out.gaussian.assign(y.data(), y.data() + y.size());

        // Step 3: element with the r-th smallest y receives the r-th smallest Beta draw
        std::vector<double> sorted = out.beta_draws;
        std::sort(sorted.begin(), sorted.end());
        auto order = rank_order(out.gaussian);
        out.aaf.resize(M);
        for (std::size_t r = 0; r < M; ++r)
            out.aaf[order[r]] = sorted[r];
        return out;
    }

    std::vector<double> generate_aaf(std::size_t num_elements, double p, double q, double d_corr, Rng &rng)
    {
        return generate_aaf_detailed(num_elements, p, q, d_corr, rng).aaf;
    }

    std::vector<double> rescale_aaf(std::span<const double> s, double alpha_max, double alpha_ref)
    {
        if (!(alpha_ref > 0.0))
            throw config_error("rescale_aaf: reference amplitude must be positive");
        double k = alpha_max / alpha_ref;
        std::vector<double> out(s.size());
        std::transform(s.begin(), s.end(), out.begin(), [k](double v)
                       { return v * k; });
        return out;
    }

    SnsDecision identify_sns(std::span<const double> amplitudes, double threshold_db)
    {
        if (amplitudes.empty())
            throw config_error("identify_sns: empty amplitude sequence");
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for (double a : amplitudes)
        {
            if (!(a >= 0.0) || !std::isfinite(a))
                throw config_error("identify_sns: amplitudes must be non-negative and finite");
            mn = std::min(mn, a);
            mx = std::max(mx, a);
        }
        SnsDecision d;
        if (mn == 0.0)
        {
            d.zero_amplitude = true;
            d.variation_db = std::numeric_limits<double>::infinity();
            d.stationarity = Stationarity::SnS;
            return d;
        }
        d.variation_db = 20.0 * std::log10(mx / mn);
        d.stationarity = d.variation_db > threshold_db ? Stationarity::SnS : Stationarity::SS;
        return d;
    }

    Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t h1 = splitmix64(seed);
        std::uint64_t h2 = splitmix64(h1 ^ splitmix64(a + 0x632be59bd9b4e019ULL));
        std::uint64_t h3 = splitmix64(h2 ^ splitmix64(b + 0x8cb92ba72f3d8dd7ULL));
        std::seed_seq seq{std::uint32_t(h1), std::uint32_t(h1 >> 32), std::uint32_t(h2), std::uint32_t(h2 >> 32),
                          std::uint32_t(h3), std::uint32_t(h3 >> 32)};
        return Rng(seq);
    }
}
