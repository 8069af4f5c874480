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

#ifndef XLCHAN_SNS_HPP
#define XLCHAN_SNS_HPP

#include "xlchan/nearfield.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace xlchan
{
    using Rng = std::mt19937_64;

    struct Interval
    {
        double low = 0.0;
        double high = 0.0;

        bool contains(double x) const { return x >= low && x <= high; }
    };

    // Statistics of the amplitude attenuation factors (AAFs) of spatially non-stationary paths.
    //   p      ~ Logn(mu_p, sigma_p^2), truncated to p_range (mu_p, sigma_p describe ln p)
    //   q      = xi ln(p) + gamma
    //   d_corr ~ TruncExp(lambda_corr) on dcorr_range, in units of element index
    struct AAFStatParams
    {
        double mu_p = 0.37;
        double sigma_p = 0.58;
        double xi = 0.48;
        double gamma = 1.03;
        double lambda_corr = 40.61;
        Interval p_range{0.2, 5.0};
        Interval dcorr_range{0.018, 0.12};

        // Throws config_error, including when q would be non-positive somewhere on p_range
        void validate() const;
    };

    struct AAFParams
    {
        double p = 1.0;
        double q = 1.0;
        double d_corr = 0.05;
    };

    // rho(dx) for dx = 0 .. M-1
    struct ACFSeries
    {
        std::vector<double> values;

        std::size_t size() const { return values.size(); }
        double operator[](std::size_t lag) const { return values[lag]; }
    };

    // s_m = a_m / max(a)
    std::vector<double> normalize_aaf(std::span<const double> amplitudes);

    // Biased spatial ACF: lag-dx cross sum over the first M - dx elements divided by the
    // full centered energy. Throws numeric_error for a constant sequence.
    ACFSeries acf(std::span<const double> s);

    std::size_t default_max_lag(std::size_t num_elements);

    // Least-squares fit of exp(-d dx) to rho(1..max_lag) over d in [1e-4, 10]
    double fit_dcorr(const ACFSeries &rho, std::size_t max_lag);

    AAFParams sample_aaf_params(const AAFStatParams &stats, Rng &rng);

    // Sigma_ij = exp(-d |i - j|)
    Eigen::MatrixXd exponential_covariance(std::size_t num_elements, double d_corr);

    double sample_beta(double p, double q, Rng &rng);

    // Intermediate products of the rank-matching generator
    struct AAFDraw
    {
        std::vector<double> beta_draws; // i.i.d. Beta(p, q) samples, in draw order
        std::vector<double> gaussian;   // y = L z with Sigma = L L^T
        std::vector<double> aaf;        // Beta samples reordered by the ranks of y
    };

    AAFDraw generate_aaf_detailed(std::size_t num_elements, double p, double q, double d_corr, Rng &rng);

    // Spatially correlated AAF sequence with Beta(p, q) marginal
    std::vector<double> generate_aaf(std::size_t num_elements, double p, double q, double d_corr, Rng &rng);

    // Converts max-normalized AAFs to reference-element normalization: s * alpha_max / alpha_ref
    std::vector<double> rescale_aaf(std::span<const double> s, double alpha_max, double alpha_ref);

    struct SnsDecision
    {
        Stationarity stationarity = Stationarity::SS;
        double variation_db = 0.0; // 20 log10(max / min), +inf with a zero amplitude
        bool zero_amplitude = false;
    };

    SnsDecision identify_sns(std::span<const double> amplitudes, double threshold_db = 3.0);

    // Positions 0..n-1 ordered by value; ties keep index order
    std::vector<std::size_t> rank_order(std::span<const double> values);

    // Independent stream for a (seed, a, b) triple
    Rng derive_rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);
}

#endif
