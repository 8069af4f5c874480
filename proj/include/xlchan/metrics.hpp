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

#ifndef XLCHAN_METRICS_HPP
#define XLCHAN_METRICS_HPP

#include "xlchan/channel.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace xlchan
{
    struct CapacityConfig
    {
        double snr_db = 15.0;
        std::size_t num_ues = 4;
        std::size_t num_trials = 800;
    };

    // Entropy capacity without water-filling, averaged over frequency (bps/Hz).
    // Each matrix is N x M; the SNR is normalized by M times the average channel gain.
    double entropy_capacity(std::span<const Eigen::MatrixXcd> h, double snr_db);

    struct DemmelResult
    {
        double linear = 0.0; // mean over frequency of ||H||_F / sigma_min
        bool rank_deficient = false;

        double db() const;
    };

    DemmelResult demmel(std::span<const Eigen::MatrixXcd> h);

    // N x M matrices per frequency for a subset of UEs of a stacked channel
    std::vector<Eigen::MatrixXcd> frequency_matrices(const ChannelTensor &channel, std::span<const std::size_t> ues);

    struct CapacityTrials
    {
        std::vector<double> capacity;  // bps/Hz per trial
        std::vector<double> demmel_db; // +inf for rank-deficient draws
    };

    // Draws config.num_ues UEs without replacement from the pool for every trial.
    // Trial t uses the stream derive_rng(seed, t), so results do not depend on threading.
    CapacityTrials capacity_trials(const ChannelTensor &pool, const CapacityConfig &config, std::uint64_t seed);

    // |S diag(H_ref(f))|, i.e. entry (m, l) = S(m, l) |H_ref,l(f)|
    Eigen::MatrixXd sns_amplitude_matrix(const AAFMatrix &S, const Eigen::VectorXcd &h_ref);

    struct CorrelationResult
    {
        double value = 0.0;
        std::size_t skipped_rows = 0; // pairs dropped because a row had zero variance
    };

    // Mean Pearson correlation between rows i and i + dx
    CorrelationResult avg_spatial_correlation(const Eigen::MatrixXd &h_sns, std::size_t dx);

    // Per-element (1/K) sum_k |H_m(f_k)|^2 in dB
    std::vector<double> channel_gain_db(const ChannelTensor &channel, std::size_t ue = 0);

    // Per element: strongest path power over the sum of the others, dB; +inf with no other power
    std::vector<double> rician_k_db(const Eigen::MatrixXd &path_power);

    // Moment-method K-factor estimate from power samples |h|^2 of a fading envelope, dB
    double rician_k_moment_db(std::span<const double> power_samples);

    struct ElementPDP
    {
        std::vector<double> delay; // s
        std::vector<double> power; // linear
    };

    using PDP = std::vector<ElementPDP>;

    PDP pdp_from_path_domain(const PathDomain &pd);

    double rms_delay_spread(const ElementPDP &pdp, double dynamic_range_db = 40.0);
    std::vector<double> rms_delay_spread(const PDP &pdp, double dynamic_range_db = 40.0);

    class EmpiricalCDF
    {
    public:
        explicit EmpiricalCDF(std::span<const double> samples);

        double operator()(double x) const; // fraction of samples <= x
        const std::vector<double> &samples() const { return sorted_; }
        std::size_t size() const { return sorted_.size(); }

    private:
        std::vector<double> sorted_;
    };

    // Two-sample Cramer-von Mises criterion nm/(n+m)^2 sum over the pooled sample of (F_a - F_b)^2
    double cvm_distance(std::span<const double> a, std::span<const double> b);

    // Inverse DFT over the frequency grid, M x K, bin n at delay n / (K df)
    Eigen::MatrixXcd impulse_response(const ChannelTensor &channel, std::size_t ue = 0);

    struct Track
    {
        std::size_t first_element = 0;
        std::vector<double> delay;     // one entry per element from first_element on
        std::vector<double> amplitude; // |CIR| at the peak

        std::size_t span() const { return delay.size(); }
    };

    struct TrackingConfig
    {
        double peak_threshold_db = 40.0; // below the per-element peak
        double delay_gate = 0.5e-9;      // s, max delay jump between adjacent elements
        std::size_t min_span = 2;        // shorter tracks are dropped
    };

    // Local maxima of |CIR| per element, associated across adjacent elements by nearest delay
    std::vector<Track> extract_and_track(const Eigen::MatrixXcd &cir, double bin_spacing, const TrackingConfig &config);

    struct AngleEstimate
    {
        std::size_t window_start = 0;
        double direction_cosine = 0.0; // projection of the arrival direction on the array axis
        double angle = 0.0;            // acos(direction_cosine), angle from the array axis
    };

    // Peak of the spatial DFT of each window of consecutive elements over a direction-cosine grid
    std::vector<AngleEstimate> sliding_dft_angle(std::span<const cplx> h, double frequency, double spacing,
                                                 std::size_t window = 51, std::size_t grid_points = 4001);
}

#endif
