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

#include "xlchan/errors.hpp"
#include "xlchan/pipeline.hpp"

#include <cmath>
#include <string>

namespace xlchan
{
    std::string_view to_string(Metric m)
    {
        switch (m)
        {
        case Metric::capacity:
            return "capacity";
        case Metric::demmel:
            return "demmel";
        case Metric::gain:
            return "gain";
        case Metric::kfactor:
            return "kfactor";
        case Metric::delay_spread:
            return "delay-spread";
        case Metric::correlation:
            return "correlation";
        }
        return "?";
    }

    Metric metric_from_string(std::string_view s)
    {
        for (Metric m : all_metrics())
            if (s == to_string(m))
                return m;
        throw config_error("unknown metric '" + std::string(s) +
                           "' (expected capacity, demmel, gain, kfactor, delay-spread or correlation)");
    }

    std::vector<Metric> all_metrics()
    {
        return {Metric::capacity, Metric::demmel, Metric::gain, Metric::kfactor, Metric::delay_spread,
                Metric::correlation};
    }

    const std::vector<double> *RunMetrics::find(Metric m) const
    {
        for (const auto &s : samples)
            if (s.metric == m)
                return &s.values;
        return nullptr;
    }

    RunData make_run_data(std::string label, const SynthesisResult &result, const PathSet &paths)
    {
        RunData r;
        r.label = std::move(label);
        r.channel = result.channel;
        r.paths = result.paths;
        r.aaf = result.aaf;
        for (const auto &ue : paths.ues)
        {
            std::vector<double> a;
            for (const auto &p : ue)
                a.push_back(p.amplitude);
            r.path_amplitudes.push_back(std::move(a));
        }
        return r;
    }

    namespace
    {
        RunMetrics evaluate_run(const RunData &run, const EvaluateOptions &opt)
        {
            RunMetrics out;
            out.label = run.label;
            const ChannelTensor &ch = run.channel;
            const std::size_t N = ch.num_ues();

            for (Metric metric : opt.metrics)
            {
                MetricSamples ms;
                ms.metric = metric;
                switch (metric)
                {
                case Metric::capacity:
                case Metric::demmel:
                {
                    CapacityConfig cc = opt.capacity;
                    if (cc.num_ues > N)
                        throw config_error("evaluate: run '" + run.label + "' has " + std::to_string(N) +
                                           " UEs, capacity needs " + std::to_string(cc.num_ues));
                    if (metric == Metric::demmel && std::min(cc.num_ues, ch.num_elements()) < 2)
                        throw config_error("evaluate: Demmel condition number needs at least two UEs");
                    auto trials = capacity_trials(ch, cc, opt.seed);
                    ms.values = metric == Metric::capacity ? trials.capacity : trials.demmel_db;
                    break;
                }
                case Metric::gain:
                    if (!run.paths.empty())
                    {
                        // wideband gain: sum of path powers, free of inter-path cross terms
                        for (const auto &pd : run.paths)
                        {
                            Eigen::VectorXd total = pd.power.rowwise().sum();
                            for (Eigen::Index m = 0; m < total.size(); ++m)
                                ms.values.push_back(10.0 * std::log10(total(m)));
                        }
                    }
                    else
                        for (std::size_t n = 0; n < N; ++n)
                        {
                            auto g = channel_gain_db(ch, n);
                            ms.values.insert(ms.values.end(), g.begin(), g.end());
                        }
                    break;
                case Metric::kfactor:
                    if (run.paths.empty())
                        throw config_error("evaluate: K-factor needs per-path data for run '" + run.label + "'");
                    for (const auto &pd : run.paths)
                    {
                        auto k = rician_k_db(pd.power);
                        ms.values.insert(ms.values.end(), k.begin(), k.end());
                    }
                    break;
                case Metric::delay_spread:
                    if (run.paths.empty())
                        throw config_error("evaluate: delay spread needs per-path data for run '" + run.label + "'");
                    for (const auto &pd : run.paths)
                    {
                        auto ds = rms_delay_spread(pdp_from_path_domain(pd), opt.dynamic_range_db);
                        for (double v : ds)
                            ms.values.push_back(v * 1e9); // ns
                    }
                    break;
                case Metric::correlation:
                {
                    if (run.aaf.empty() || run.aaf.size() != run.path_amplitudes.size())
                        throw config_error("evaluate: spatial correlation needs AAFs and path amplitudes for run '" +
                                           run.label + "'");
                    const std::size_t M = ch.num_elements();
                    const std::size_t max_lag = std::min(opt.max_correlation_lag, M - 1);
                    out.correlation.assign(max_lag + 1, 0.0);
                    std::vector<std::size_t> used(max_lag + 1, 0);
                    for (std::size_t n = 0; n < run.aaf.size(); ++n)
                    {
                        const auto &amp = run.path_amplitudes[n];
                        if (amp.size() < 2)
                            continue;
                        Eigen::VectorXcd h_ref(Eigen::Index(amp.size()));
                        for (std::size_t l = 0; l < amp.size(); ++l)
                            h_ref(Eigen::Index(l)) = amp[l];
                        Eigen::MatrixXd h_sns = sns_amplitude_matrix(run.aaf[n], h_ref);
                        for (std::size_t dx = 0; dx <= max_lag; ++dx)
                        {
                            try
                            {
                                out.correlation[dx] += avg_spatial_correlation(h_sns, dx).value;
                                ++used[dx];
                            }
                            catch (const numeric_error &)
                            {
                            }
                        }
                    }
                    for (std::size_t dx = 0; dx <= max_lag; ++dx)
                        out.correlation[dx] = used[dx] ? out.correlation[dx] / double(used[dx])
                                                       : std::numeric_limits<double>::quiet_NaN();
                    ms.values = out.correlation;
                    break;
                }
                }
                out.samples.push_back(std::move(ms));
            }
            return out;
        }

        std::vector<double> finite_or_inf(const std::vector<double> &v)
        {
            std::vector<double> out;
            for (double x : v)
                if (!std::isnan(x))
                    out.push_back(x);
            return out;
        }
    }

    Evaluation evaluate(const std::vector<RunData> &runs, const EvaluateOptions &options)
    {
        if (runs.empty())
            throw config_error("evaluate: no runs");
        for (const auto &r : runs)
        {
            if (r.channel.num_elements() != runs[0].channel.num_elements() ||
                r.channel.num_frequencies() != runs[0].channel.num_frequencies() ||
                !(r.channel.meta.grid == runs[0].channel.meta.grid))
                throw config_error("evaluate: run '" + r.label + "' does not share the array size and frequency grid of '" +
                                   runs[0].label + "'");
        }

        Evaluation ev;
        for (const auto &r : runs)
            ev.runs.push_back(evaluate_run(r, options));

        for (Metric m : options.metrics)
        {
            for (std::size_t a = 0; a < runs.size(); ++a)
                for (std::size_t b = a + 1; b < runs.size(); ++b)
                {
                    auto va = finite_or_inf(*ev.runs[a].find(m));
                    auto vb = finite_or_inf(*ev.runs[b].find(m));
                    if (va.empty() || vb.empty())
                        continue;
                    ev.cvm.push_back({m, a, b, cvm_distance(va, vb)});
                }
        }
        return ev;
    }
}
