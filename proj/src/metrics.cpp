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

#include "xlchan/metrics.hpp"
#include "xlchan/errors.hpp"
#include "xlchan/sns.hpp"
#include "parallel.hpp"

#include <Eigen/SVD>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>

namespace xlchan
{
    namespace
    {
        std::mutex fftw_planner_mutex;

        Eigen::VectorXd singular_values(const Eigen::MatrixXcd &h)
        {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
            return svd.singularValues();
        }

        double pearson(const Eigen::VectorXd &a, const Eigen::VectorXd &b, bool &ok)
        {
            double ma = a.mean(), mb = b.mean();
            Eigen::VectorXd ca = a.array() - ma, cb = b.array() - mb;
            double va = ca.squaredNorm(), vb = cb.squaredNorm();
            ok = va > 0.0 && vb > 0.0;
            return ok ? ca.dot(cb) / std::sqrt(va * vb) : 0.0;
        }
    }

    double entropy_capacity(std::span<const Eigen::MatrixXcd> h, double snr_db)
    {
        if (h.empty())
            throw config_error("entropy_capacity: no frequency points");
        const Eigen::Index N = h[0].rows(), M = h[0].cols();
        double energy = 0.0;
        for (const auto &hk : h)
        {
            if (hk.rows() != N || hk.cols() != M)
                throw config_error("entropy_capacity: inconsistent matrix dimensions across frequency");
            if (!hk.allFinite())
                throw numeric_error("entropy_capacity: non-finite channel coefficient");
            energy += hk.squaredNorm();
        }
        const double K = double(h.size());
        double eta = energy / (double(M) * double(N) * K);
        if (!(eta > 0.0))
            throw numeric_error("entropy_capacity: channel has zero energy");

        const double gamma = std::pow(10.0, snr_db / 10.0);
        const double scale = gamma / (double(M) * eta);
        double c = 0.0;
        for (const auto &hk : h)
        {
            Eigen::VectorXd sv = singular_values(hk);
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                c += std::log2(1.0 + scale * sv(i) * sv(i));
        }
        return c / K;
    }

    double DemmelResult::db() const
    {
        return rank_deficient ? std::numeric_limits<double>::infinity() : 20.0 * std::log10(linear);
    }

    DemmelResult demmel(std::span<const Eigen::MatrixXcd> h)
    {
        if (h.empty())
            throw config_error("demmel: no frequency points");
        if (std::min(h[0].rows(), h[0].cols()) < 2)
            throw config_error("demmel: need min(N, M) >= 2");

        DemmelResult r;
        double acc = 0.0;
        for (const auto &hk : h)
        {
            Eigen::VectorXd sv = singular_values(hk);
            double smax = sv(0), smin = sv(sv.size() - 1);
            double tol = std::numeric_limits<double>::epsilon() * double(std::max(hk.rows(), hk.cols())) * smax;
            if (!(smin > tol))
            {
                r.rank_deficient = true;
                r.linear = std::numeric_limits<double>::infinity();
                return r;
            }
            acc += hk.norm() / smin;
        }
        r.linear = acc / double(h.size());
        return r;
    }

    std::vector<Eigen::MatrixXcd> frequency_matrices(const ChannelTensor &channel, std::span<const std::size_t> ues)
    {
        const std::size_t M = channel.num_elements(), K = channel.num_frequencies();
        std::vector<Eigen::MatrixXcd> out(K, Eigen::MatrixXcd(Eigen::Index(ues.size()), Eigen::Index(M)));
        for (std::size_t i = 0; i < ues.size(); ++i)
        {
            if (ues[i] >= channel.num_ues())
                throw config_error("frequency_matrices: UE index out of range");
            for (std::size_t m = 0; m < M; ++m)
            {
                auto row = channel.values.row(ues[i], m);
                for (std::size_t k = 0; k < K; ++k)
                    out[k](Eigen::Index(i), Eigen::Index(m)) = row[k];
            }
        }
        return out;
    }

    CapacityTrials capacity_trials(const ChannelTensor &pool, const CapacityConfig &config, std::uint64_t seed)
    {
        const std::size_t P = pool.num_ues();
        if (config.num_ues == 0 || config.num_ues > P)
            throw config_error("capacity_trials: requested " + std::to_string(config.num_ues) +
                               " UEs from a pool of " + std::to_string(P));
        if (config.num_trials == 0)
            throw config_error("capacity_trials: at least one trial is required");

        CapacityTrials out;
        out.capacity.resize(config.num_trials);
        out.demmel_db.resize(config.num_trials);
        const bool with_demmel = std::min(config.num_ues, pool.num_elements()) >= 2;
        detail::parallel_for(config.num_trials, [&](std::size_t t)
                             {
            Rng rng = derive_rng(seed, t);
            std::vector<std::size_t> idx(P);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (std::size_t i = 0; i < config.num_ues; ++i)
            {
                std::uniform_int_distribution<std::size_t> pick(i, P - 1);
                std::swap(idx[i], idx[pick(rng)]);
            }
            idx.resize(config.num_ues);
            auto h = frequency_matrices(pool, idx);
            out.capacity[t] = entropy_capacity(h, config.snr_db);
            out.demmel_db[t] = with_demmel ? demmel(h).db() : std::numeric_limits<double>::quiet_NaN(); });
        return out;
    }

    Eigen::MatrixXd sns_amplitude_matrix(const AAFMatrix &S, const Eigen::VectorXcd &h_ref)
    {
        if (S.cols() != h_ref.size())
            throw config_error("sns_amplitude_matrix: AAF matrix has " + std::to_string(S.cols()) +
                               " paths but the reference response has " + std::to_string(h_ref.size()));
        Eigen::MatrixXd out = S;
        for (Eigen::Index l = 0; l < S.cols(); ++l)
            out.col(l) *= std::abs(h_ref(l));
        return out.cwiseAbs();
    }

    CorrelationResult avg_spatial_correlation(const Eigen::MatrixXd &h_sns, std::size_t dx)
    {
        const std::size_t M = std::size_t(h_sns.rows());
        if (h_sns.cols() < 2)
            throw config_error("avg_spatial_correlation: at least two paths are required");
        if (dx >= M)
            throw config_error("avg_spatial_correlation: lag exceeds the number of elements");

        CorrelationResult r;
        double acc = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i + dx < M; ++i)
        {
            bool ok = false;
            double c = pearson(h_sns.row(Eigen::Index(i)).transpose(), h_sns.row(Eigen::Index(i + dx)).transpose(), ok);
            if (!ok)
            {
                ++r.skipped_rows;
                continue;
            }
            acc += c;
            ++used;
        }
        if (used == 0)
            throw numeric_error("avg_spatial_correlation: every row pair has zero variance");
        r.value = acc / double(used);
        return r;
    }

    std::vector<double> channel_gain_db(const ChannelTensor &channel, std::size_t ue)
    {
        if (ue >= channel.num_ues())
            throw config_error("channel_gain_db: UE index out of range");
        const std::size_t M = channel.num_elements(), K = channel.num_frequencies();
        std::vector<double> g(M);
        for (std::size_t m = 0; m < M; ++m)
        {
            double acc = 0.0;
            for (const auto &v : channel.values.row(ue, m))
                acc += std::norm(v);
            g[m] = 10.0 * std::log10(acc / double(K));
        }
        return g;
    }

    std::vector<double> rician_k_db(const Eigen::MatrixXd &path_power)
    {
        if (path_power.cols() < 1)
            throw config_error("rician_k_db: at least one path is required");
        std::vector<double> k(std::size_t(path_power.rows()));
        for (Eigen::Index m = 0; m < path_power.rows(); ++m)
        {
            Eigen::Index best = 0;
            double strongest = path_power.row(m).maxCoeff(&best);
            double rest = path_power.row(m).sum() - strongest;
            if (!(rest > 0.0))
                k[std::size_t(m)] = std::numeric_limits<double>::infinity();
            else
                k[std::size_t(m)] = 10.0 * std::log10(strongest / rest);
        }
        return k;
    }

    double rician_k_moment_db(std::span<const double> power_samples)
    {
        if (power_samples.size() < 2)
            throw config_error("rician_k_moment_db: at least two samples are required");
        double n = double(power_samples.size());
        double g = std::accumulate(power_samples.begin(), power_samples.end(), 0.0) / n;
        double v = 0.0;
        for (double p : power_samples)
            v += (p - g) * (p - g);
        v /= n;
        double d = g * g - v;
        if (!(d > 0.0))
            return -std::numeric_limits<double>::infinity(); // Rayleigh or worse
        double s = std::sqrt(d);
        if (!(g - s > 0.0))
            return std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(s / (g - s));
    }

    PDP pdp_from_path_domain(const PathDomain &pd)
    {
        PDP out(std::size_t(pd.power.rows()));
        for (Eigen::Index m = 0; m < pd.power.rows(); ++m)
        {
            auto &e = out[std::size_t(m)];
            e.delay.resize(std::size_t(pd.power.cols()));
            e.power.resize(std::size_t(pd.power.cols()));
            for (Eigen::Index l = 0; l < pd.power.cols(); ++l)
            {
                e.delay[std::size_t(l)] = pd.delay(m, l);
                e.power[std::size_t(l)] = pd.power(m, l);
            }
        }
        return out;
    }

    double rms_delay_spread(const ElementPDP &pdp, double dynamic_range_db)
    {
        if (pdp.delay.size() != pdp.power.size() || pdp.power.empty())
            throw config_error("rms_delay_spread: delay and power sequences must be non-empty and equal length");
        double peak = *std::max_element(pdp.power.begin(), pdp.power.end());
        if (!(peak > 0.0))
            throw config_error("rms_delay_spread: total power must be positive");
        const double floor = peak * std::pow(10.0, -dynamic_range_db / 10.0);

        // Moments about the strongest tap keep the subtraction well conditioned for large absolute delays.
        std::size_t ipk = std::size_t(std::max_element(pdp.power.begin(), pdp.power.end()) - pdp.power.begin());
        const double t0 = pdp.delay[ipk];
        double p0 = 0.0, p1 = 0.0, p2 = 0.0;
        for (std::size_t i = 0; i < pdp.power.size(); ++i)
        {
            double p = pdp.power[i];
            if (p < floor)
                continue;
            double t = pdp.delay[i] - t0;
            p0 += p;
            p1 += p * t;
            p2 += p * t * t;
        }
        double mean = p1 / p0;
        return std::sqrt(std::max(0.0, p2 / p0 - mean * mean));
    }

    std::vector<double> rms_delay_spread(const PDP &pdp, double dynamic_range_db)
    {
        std::vector<double> out(pdp.size());
        for (std::size_t m = 0; m < pdp.size(); ++m)
            out[m] = rms_delay_spread(pdp[m], dynamic_range_db);
        return out;
    }

    EmpiricalCDF::EmpiricalCDF(std::span<const double> samples) : sorted_(samples.begin(), samples.end())
    {
        std::sort(sorted_.begin(), sorted_.end());
    }

    double EmpiricalCDF::operator()(double x) const
    {
        if (sorted_.empty())
            return 0.0;
        auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return double(it - sorted_.begin()) / double(sorted_.size());
    }

    double cvm_distance(std::span<const double> a, std::span<const double> b)
    {
        if (a.empty() || b.empty())
            throw config_error("cvm_distance: both samples must be non-empty");
        std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        const double n = double(sa.size()), m = double(sb.size());

        // Walk the pooled sample in order; tied values share the ECDF value after the tie.
        std::size_t i = 0, j = 0;
        double acc = 0.0;
        while (i < sa.size() || j < sb.size())
        {
            double x = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
            std::size_t ci = 0, cj = 0;
            while (i < sa.size() && sa[i] == x)
                ++i, ++ci;
            while (j < sb.size() && sb[j] == x)
                ++j, ++cj;
            double d = double(i) / n - double(j) / m;
            acc += double(ci + cj) * d * d;
        }
        return n * m / ((n + m) * (n + m)) * acc;
    }

    Eigen::MatrixXcd impulse_response(const ChannelTensor &channel, std::size_t ue)
    {
        if (ue >= channel.num_ues())
            throw config_error("impulse_response: UE index out of range");
        const std::size_t M = channel.num_elements(), K = channel.num_frequencies();
        std::vector<cplx> in(K), out(K);
        fftw_plan plan;
        {
            std::lock_guard lock(fftw_planner_mutex);
            plan = fftw_plan_dft_1d(int(K), reinterpret_cast<fftw_complex *>(in.data()),
                                    reinterpret_cast<fftw_complex *>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        Eigen::MatrixXcd cir(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(K));
        for (std::size_t m = 0; m < M; ++m)
        {
            auto row = channel.values.row(ue, m);
            std::copy(row.begin(), row.end(), in.begin());
            fftw_execute(plan);
            for (std::size_t k = 0; k < K; ++k)
                cir(Eigen::Index(m), Eigen::Index(k)) = out[k] / double(K);
        }
        {
            std::lock_guard lock(fftw_planner_mutex);
            fftw_destroy_plan(plan);
        }
        return cir;
    }

    std::vector<Track> extract_and_track(const Eigen::MatrixXcd &cir, double bin_spacing, const TrackingConfig &config)
    {
        if (!(bin_spacing > 0.0))
            throw config_error("extract_and_track: bin spacing must be positive");
        const Eigen::Index M = cir.rows(), B = cir.cols();

        struct Open
        {
            Track track;
            bool extended = false;
        };
        std::vector<Open> open;
        std::vector<Track> closed;

        for (Eigen::Index m = 0; m < M; ++m)
        {
            Eigen::VectorXd mag = cir.row(m).cwiseAbs().transpose();
            double peak = B > 0 ? mag.maxCoeff() : 0.0;
            std::vector<std::pair<double, double>> peaks; // delay, amplitude
            if (peak > 0.0)
            {
                double thr = peak * std::pow(10.0, -config.peak_threshold_db / 20.0);
                for (Eigen::Index n = 0; n < B; ++n)
                {
                    double left = n > 0 ? mag(n - 1) : 0.0;
                    double right = n + 1 < B ? mag(n + 1) : 0.0;
                    if (mag(n) >= thr && mag(n) > left && mag(n) >= right)
                        peaks.emplace_back(double(n) * bin_spacing, mag(n));
                }
            }

            for (auto &o : open)
                o.extended = false;
            std::vector<bool> used(peaks.size(), false);

            // Greedy nearest-delay association, closest pairs first
            struct Candidate
            {
                double cost;
                std::size_t track, peak;
            };
            std::vector<Candidate> cand;
            for (std::size_t t = 0; t < open.size(); ++t)
                for (std::size_t p = 0; p < peaks.size(); ++p)
                {
                    double dd = std::abs(peaks[p].first - open[t].track.delay.back());
                    if (dd <= config.delay_gate)
                        cand.push_back({dd, t, p});
                }
            std::stable_sort(cand.begin(), cand.end(), [](const Candidate &a, const Candidate &b)
                             { return a.cost < b.cost; });
            for (const auto &c : cand)
            {
                if (open[c.track].extended || used[c.peak])
                    continue;
                open[c.track].extended = true;
                used[c.peak] = true;
                open[c.track].track.delay.push_back(peaks[c.peak].first);
                open[c.track].track.amplitude.push_back(peaks[c.peak].second);
            }

            std::vector<Open> next;
            for (auto &o : open)
            {
                if (o.extended)
                    next.push_back(std::move(o));
                else
                    closed.push_back(std::move(o.track));
            }
            for (std::size_t p = 0; p < peaks.size(); ++p)
            {
                if (used[p])
                    continue;
                Open o;
                o.track.first_element = std::size_t(m);
                o.track.delay.push_back(peaks[p].first);
                o.track.amplitude.push_back(peaks[p].second);
                o.extended = true;
                next.push_back(std::move(o));
            }
            open = std::move(next);
        }
        for (auto &o : open)
            closed.push_back(std::move(o.track));

        std::vector<Track> out;
        for (auto &t : closed)
            if (t.span() >= config.min_span)
                out.push_back(std::move(t));
        std::stable_sort(out.begin(), out.end(), [](const Track &a, const Track &b)
                         { return a.first_element != b.first_element ? a.first_element < b.first_element
                                                                      : a.delay.front() < b.delay.front(); });
        return out;
    }

    std::vector<AngleEstimate> sliding_dft_angle(std::span<const cplx> h, double frequency, double spacing,
                                                 std::size_t window, std::size_t grid_points)
    {
        const std::size_t M = h.size();
        if (window == 0 || window > M)
            throw config_error("sliding_dft_angle: window of " + std::to_string(window) +
                               " elements does not fit an array of " + std::to_string(M));
        if (grid_points < 2)
            throw config_error("sliding_dft_angle: direction grid needs at least two points");
        const double k = 2.0 * pi * frequency * spacing / speed_of_light;

        std::vector<AngleEstimate> out;
        out.reserve(M - window + 1);
        std::vector<cplx> phasor(window);
        for (std::size_t w = 0; w + window <= M; ++w)
        {
            double best_u = 0.0, best_p = -1.0;
            for (std::size_t g = 0; g < grid_points; ++g)
            {
                double u = -1.0 + 2.0 * double(g) / double(grid_points - 1);
                cplx step = std::polar(1.0, -k * u), rot(1.0, 0.0), acc(0.0, 0.0);
                for (std::size_t i = 0; i < window; ++i)
                {
                    acc += h[w + i] * rot;
                    rot *= step;
                }
                double p = std::norm(acc);
                if (p > best_p)
                {
                    best_p = p;
                    best_u = u;
                }
            }
            out.push_back({w, best_u, std::acos(std::clamp(best_u, -1.0, 1.0))});
        }
        return out;
    }
}
