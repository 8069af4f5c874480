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

// Command-line front end:
//   xlchan scenario     <preset|config.json>   path list from geometry
//   xlchan synthesize   <preset|config.json>   channel tensor, AAFs and phase data
//   xlchan generate-aaf                        AAF draws, histogram and ACF
//   xlchan evaluate     <run-dir>...           metric CDFs and pairwise CvM
//   xlchan compare      <preset|config.json>   synthesize and evaluate several variants
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.
// XLCHAN_THREADS sets the worker count.

#include "xlchan/errors.hpp"
#include "xlchan/io.hpp"
#include "xlchan/pipeline.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace xlchan;

namespace
{
    struct Globals
    {
        std::optional<std::uint64_t> seed;
        std::string out;
        std::string variant;
        std::string nlos_model;
        std::size_t frequency_points = 0;
    };

    ScenarioConfig resolve_config(const std::string &source, const Globals &g)
    {
        auto names = preset_names();
        ScenarioConfig c = std::find(names.begin(), names.end(), source) != names.end()
                               ? preset(source)
                               : load_config(source);
        if (g.seed)
            c.seed = g.seed;
        if (!g.variant.empty())
            c.variant = model_variant_from_string(g.variant);
        if (!g.nlos_model.empty())
            c.nlos_model = nlos_model_from_string(g.nlos_model);
        if (g.frequency_points)
            c.grid.num_points = g.frequency_points;
        c.validate();
        return c;
    }

    fs::path out_dir(const Globals &g)
    {
        fs::path d = g.out.empty() ? fs::path(".") : fs::path(g.out);
        std::error_code ec;
        fs::create_directories(d, ec);
        if (ec)
            throw config_error("cannot create output directory '" + d.string() + "': " + ec.message());
        return d;
    }

    CsvTable cdf_table(const std::vector<double> &samples, const std::string &name)
    {
        std::vector<double> finite;
        for (double v : samples)
            if (!std::isnan(v))
                finite.push_back(v);
        EmpiricalCDF F(finite);
        CsvTable t;
        t.columns = {name, "cdf"};
        t.data.resize(2);
        const auto &s = F.samples();
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            t.data[0].push_back(s[i]);
            t.data[1].push_back(double(i + 1) / double(s.size()));
        }
        return t;
    }

    // Inter-element phase differences of every path of UE 0 at the carrier, for the
    // configured wavefront and for the SRM, SPM and plane-wave alternatives
    void write_phase_data(const fs::path &dir, const ScenarioConfig &config, const PathSet &paths)
    {
        const ArrayGeometry geom = config.array.geometry();
        const double fc = config.carrier();
        const auto &ue = paths.ues.front();
        CsvTable t;
        t.columns = {"element"};
        t.data.emplace_back();
        for (std::size_t m = 1; m < geom.size(); ++m)
            t.data[0].push_back(double(m));
        auto add = [&](const PathRecord &p, const std::string &name)
        {
            PathFactors pf = path_factors(p, geom, config.patterns, fc);
            std::vector<double> d;
            for (std::size_t m = 1; m < geom.size(); ++m)
                d.push_back(std::arg(pf.entry(m, fc) / pf.entry(m - 1, fc)));
            t.columns.push_back(name);
            t.data.push_back(std::move(d));
        };
        for (std::size_t l = 0; l < ue.size(); ++l)
        {
            std::string base = "path" + std::to_string(l) + "_";
            add(ue[l], base + std::string(to_string(ue[l].model)));
            if (ue[l].model == WavefrontModel::SRM || ue[l].model == WavefrontModel::SPM)
            {
                // same geometry under the other hypothesis: the stored distance is re-used
                PathRecord alt = ue[l];
                alt.model = ue[l].model == WavefrontModel::SRM ? WavefrontModel::SPM : WavefrontModel::SRM;
                alt.aaf_override.reset();
                add(alt, base + std::string(to_string(alt.model)) + "_alt");
            }
            PathRecord ff = ue[l];
            ff.model = WavefrontModel::FF;
            ff.aaf_override.reset();
            add(ff, base + "FF");
        }
        t.meta = {{"quantity", "phase difference between adjacent elements at the carrier (rad)"},
                  {"carrier_hz", format_double(fc)}};
        save_csv(t, dir / "phase_diff.csv");
    }

    void write_capacity_cdfs(const fs::path &dir, const Evaluation &ev)
    {
        for (const auto &run : ev.runs)
            for (const auto &s : run.samples)
            {
                CsvTable t = cdf_table(s.values, std::string(to_string(s.metric)));
                t.meta = {{"run", run.label}, {"metric", std::string(to_string(s.metric))}};
                if (s.metric == Metric::correlation)
                {
                    t.columns = {"dx", "rho"};
                    t.data.assign(2, {});
                    for (std::size_t dx = 0; dx < run.correlation.size(); ++dx)
                    {
                        t.data[0].push_back(double(dx));
                        t.data[1].push_back(run.correlation[dx]);
                    }
                }
                save_csv(t, dir / (run.label + "_" + std::string(to_string(s.metric)) + ".csv"));
            }
    }

    void write_evaluation(const fs::path &dir, const Evaluation &ev, std::ostream &log)
    {
        write_capacity_cdfs(dir, ev);

        CsvTable summary;
        summary.columns = {"run", "metric", "count", "mean", "stddev", "median"};
        std::string text = "run,metric,count,mean,stddev,median\n";
        for (std::size_t r = 0; r < ev.runs.size(); ++r)
            for (const auto &s : ev.runs[r].samples)
            {
                std::vector<double> v;
                for (double x : s.values)
                    if (std::isfinite(x))
                        v.push_back(x);
                double mean = 0.0, var = 0.0, med = std::nan("");
                for (double x : v)
                    mean += x;
                mean = v.empty() ? std::nan("") : mean / double(v.size());
                for (double x : v)
                    var += (x - mean) * (x - mean);
                var = v.size() > 1 ? var / double(v.size() - 1) : 0.0;
                if (!v.empty())
                {
                    std::sort(v.begin(), v.end());
                    med = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
                }
                text += ev.runs[r].label + "," + std::string(to_string(s.metric)) + "," + std::to_string(v.size()) +
                        "," + format_double(mean) + "," + format_double(std::sqrt(var)) + "," + format_double(med) +
                        "\n";
                log << ev.runs[r].label << "  " << to_string(s.metric) << "  n=" << v.size() << "  mean="
                    << format_double(mean) << "  std=" << format_double(std::sqrt(var)) << "\n";
            }
        write_text(dir / "summary.csv", text);

        if (!ev.cvm.empty())
        {
            std::string cvm = "metric,run_a,run_b,cvm\n";
            for (const auto &c : ev.cvm)
            {
                cvm += std::string(to_string(c.metric)) + "," + ev.runs[c.a].label + "," + ev.runs[c.b].label + "," +
                       format_double(c.value) + "\n";
                log << "CvM " << to_string(c.metric) << "  " << ev.runs[c.a].label << " vs " << ev.runs[c.b].label
                    << "  " << format_double(c.value) << "\n";
            }
            write_text(dir / "cvm.csv", cvm);
        }
    }

    std::vector<Metric> parse_metrics(const std::vector<std::string> &names)
    {
        if (names.empty())
            return all_metrics();
        std::vector<Metric> m;
        for (const auto &n : names)
            m.push_back(metric_from_string(n));
        return m;
    }

    std::string sanitize(std::string s)
    {
        for (char &c : s)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
                c = '_';
        return s;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"xlchan - near-field, spatially non-stationary XL-MIMO channel synthesis"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed_value = 0;
    auto *seed_opt = app.add_option("--seed", seed_value, "Random seed (required for stochastic variants)");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--variant", g.variant, "Model variant: NF-SnS, NF-SS, FF-SnS, FF-SS or VR");
    app.add_option("--nlos-model", g.nlos_model, "Wavefront of NLoS paths: hybrid, srm or spm");
    app.add_option("--frequency-points", g.frequency_points, "Override the number of frequency points");
    app.fallthrough();

    // scenario
    auto *cmd_scn = app.add_subcommand("scenario", "Build the reference path list of a preset or config");
    std::string scn_source;
    bool list_presets = false;
    cmd_scn->add_option("source", scn_source, "Preset name or config JSON");
    cmd_scn->add_flag("--list", list_presets, "List preset names");

    // synthesize
    auto *cmd_syn = app.add_subcommand("synthesize", "Synthesize the channel tensor of a scenario");
    std::string syn_source, syn_paths;
    bool syn_plot = true;
    cmd_syn->add_option("source", syn_source, "Preset name or config JSON")->required();
    cmd_syn->add_option("--paths", syn_paths, "Path list file (default: built from the config)");
    cmd_syn->add_flag("!--no-plot-data", syn_plot, "Skip the phase-difference data");

    // generate-aaf
    auto *cmd_aaf = app.add_subcommand("generate-aaf", "Draw AAFs from the copula generator");
    std::size_t aaf_elements = 301, aaf_count = 1, aaf_bins = 20;
    std::optional<double> aaf_p, aaf_q, aaf_dcorr;
    cmd_aaf->add_option("--elements", aaf_elements, "Number of array elements")->check(CLI::PositiveNumber);
    cmd_aaf->add_option("--count", aaf_count, "Number of draws")->check(CLI::PositiveNumber);
    cmd_aaf->add_option("--p", aaf_p, "Beta shape p (sampled from the statistics when absent)");
    cmd_aaf->add_option("--q", aaf_q, "Beta shape q");
    cmd_aaf->add_option("--dcorr", aaf_dcorr, "Correlation decay per element");
    cmd_aaf->add_option("--bins", aaf_bins, "Histogram bins")->check(CLI::PositiveNumber);

    // evaluate
    auto *cmd_eval = app.add_subcommand("evaluate", "Metrics of one or more synthesized runs");
    std::vector<std::string> eval_dirs, eval_metrics, eval_labels;
    CapacityConfig cap;
    cmd_eval->add_option("runs", eval_dirs, "Run directories written by synthesize")->required();
    cmd_eval->add_option("--metrics", eval_metrics, "capacity, demmel, gain, kfactor, delay-spread, correlation")
        ->delimiter(',');
    cmd_eval->add_option("--labels", eval_labels, "Run labels")->delimiter(',');
    cmd_eval->add_option("--ues", cap.num_ues, "UEs per capacity trial");
    cmd_eval->add_option("--trials", cap.num_trials, "Capacity trials");
    cmd_eval->add_option("--snr", cap.snr_db, "SNR (dB)");

    // compare
    auto *cmd_cmp = app.add_subcommand("compare", "Synthesize and evaluate several model variants");
    std::string cmp_source;
    std::vector<std::string> cmp_variants{"NF-SnS", "FF-SnS", "NF-SS", "VR"}, cmp_metrics;
    bool cmp_reseed = false;
    CapacityConfig cmp_cap;
    cmd_cmp->add_option("source", cmp_source, "Preset name or config JSON")->required();
    cmd_cmp->add_option("--variants", cmp_variants, "Variants to compare")->delimiter(',');
    cmd_cmp->add_option("--metrics", cmp_metrics, "Metrics to evaluate")->delimiter(',');
    cmd_cmp->add_flag("--reseed", cmp_reseed, "Add the first variant again with seed + 1");
    cmd_cmp->add_option("--ues", cmp_cap.num_ues, "UEs per capacity trial");
    cmd_cmp->add_option("--trials", cmp_cap.num_trials, "Capacity trials");
    cmd_cmp->add_option("--snr", cmp_cap.snr_db, "SNR (dB)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }
    if (seed_opt->count())
        g.seed = seed_value;

    try
    {
        if (cmd_scn->parsed())
        {
            if (list_presets)
            {
                for (const auto &n : preset_names())
                    std::cout << n << "\n";
                return 0;
            }
            if (scn_source.empty())
                throw config_error("scenario: give a preset name or a config file (see --list)");
            ScenarioConfig c = resolve_config(scn_source, g);
            PathSet ps = build_paths(c);
            if (g.out.empty())
                std::cout << format_path_list(ps);
            else
            {
                fs::path d = out_dir(g);
                save_config(c, d / "config.json");
                save_path_list(ps, d / "paths.txt");
            }
        }
        else if (cmd_syn->parsed())
        {
            ScenarioConfig c = resolve_config(syn_source, g);
            PathSet ps = syn_paths.empty() ? build_paths(c) : load_path_list(syn_paths);
            SynthesisResult res = synthesize(c, ps);
            fs::path d = out_dir(g);
            save_run(d, c, ps, res);
            if (syn_plot)
                write_phase_data(d, c, ps);
            std::cout << "synthesized " << res.channel.num_ues() << " x " << res.channel.num_elements() << " x "
                      << res.channel.num_frequencies() << " (" << to_string(c.variant) << ", config "
                      << res.channel.meta.config_hash << ") into " << d.string() << "\n";
        }
        else if (cmd_aaf->parsed())
        {
            if (!g.seed)
                throw config_error("generate-aaf: --seed is required");
            AAFStatParams stats;
            fs::path d = out_dir(g);
            CsvTable draws, params, acf_tab, hist;
            draws.columns = {"draw", "element", "aaf"};
            draws.data.resize(3);
            params.columns = {"draw", "p", "q", "d_corr", "d_corr_fit"};
            params.data.resize(5);
            const std::size_t max_lag = default_max_lag(aaf_elements);
            std::vector<double> acf_mean(max_lag + 1, 0.0);
            std::vector<double> counts(aaf_bins, 0.0);
            double dcorr_sum = 0.0;
            for (std::size_t r = 0; r < aaf_count; ++r)
            {
                Rng rng = derive_rng(*g.seed, r);
                AAFParams prm = sample_aaf_params(stats, rng);
                if (aaf_p)
                    prm.p = *aaf_p;
                if (aaf_q)
                    prm.q = *aaf_q;
                else if (aaf_p)
                    prm.q = stats.xi * std::log(prm.p) + stats.gamma;
                if (aaf_dcorr)
                    prm.d_corr = *aaf_dcorr;
                auto s = generate_aaf(aaf_elements, prm.p, prm.q, prm.d_corr, rng);
                for (std::size_t m = 0; m < s.size(); ++m)
                {
                    draws.data[0].push_back(double(r));
                    draws.data[1].push_back(double(m));
                    draws.data[2].push_back(s[m]);
                    counts[std::min(aaf_bins - 1, std::size_t(s[m] * double(aaf_bins)))] += 1.0;
                }
                double fit = std::nan("");
                if (max_lag >= 2)
                {
                    ACFSeries rho = acf(s);
                    for (std::size_t k = 0; k <= max_lag; ++k)
                        acf_mean[k] += rho[k] / double(aaf_count);
                    fit = fit_dcorr(rho, max_lag);
                    dcorr_sum += fit;
                }
                params.data[0].push_back(double(r));
                params.data[1].push_back(prm.p);
                params.data[2].push_back(prm.q);
                params.data[3].push_back(prm.d_corr);
                params.data[4].push_back(fit);
            }
            hist.columns = {"bin_center", "density"};
            hist.data.resize(2);
            const double total = double(aaf_count * aaf_elements);
            for (std::size_t b = 0; b < aaf_bins; ++b)
            {
                hist.data[0].push_back((double(b) + 0.5) / double(aaf_bins));
                hist.data[1].push_back(counts[b] / total * double(aaf_bins));
            }
            acf_tab.columns = {"lag", "acf_mean"};
            acf_tab.data.resize(2);
            for (std::size_t k = 0; k <= max_lag; ++k)
            {
                acf_tab.data[0].push_back(double(k));
                acf_tab.data[1].push_back(acf_mean[k]);
            }
            std::vector<std::pair<std::string, std::string>> meta = {{"seed", std::to_string(*g.seed)},
                                                                     {"elements", std::to_string(aaf_elements)}};
            draws.meta = params.meta = hist.meta = acf_tab.meta = meta;
            save_csv(draws, d / "aaf.csv");
            save_csv(params, d / "aaf_params.csv");
            save_csv(hist, d / "aaf_hist.csv");
            save_csv(acf_tab, d / "acf.csv");
            std::cout << "generated " << aaf_count << " AAF draws of " << aaf_elements << " elements";
            if (max_lag >= 2)
                std::cout << ", mean fitted d_corr " << format_double(dcorr_sum / double(aaf_count));
            std::cout << "\n";
        }
        else if (cmd_eval->parsed())
        {
            if (!eval_labels.empty() && eval_labels.size() != eval_dirs.size())
                throw config_error("evaluate: --labels needs one label per run");
            std::vector<RunData> runs;
            for (std::size_t i = 0; i < eval_dirs.size(); ++i)
            {
                std::string label = eval_labels.empty() ? sanitize(fs::path(eval_dirs[i]).filename().string())
                                                        : sanitize(eval_labels[i]);
                if (label.empty())
                    label = "run" + std::to_string(i);
                runs.push_back(load_run(eval_dirs[i], label));
            }
            EvaluateOptions opt;
            opt.metrics = parse_metrics(eval_metrics);
            opt.capacity = cap;
            opt.seed = g.seed.value_or(0);
            Evaluation ev = evaluate(runs, opt);
            write_evaluation(out_dir(g), ev, std::cout);
        }
        else if (cmd_cmp->parsed())
        {
            ScenarioConfig base = resolve_config(cmp_source, g);
            if (!base.seed)
                throw config_error("compare: --seed is required");
            PathSet ps = build_paths(base);
            fs::path d = out_dir(g);
            std::vector<RunData> runs;
            auto run_one = [&](ScenarioConfig c, const std::string &label)
            {
                SynthesisResult res = synthesize(c, ps);
                save_run(d / label, c, ps, res);
                runs.push_back(make_run_data(label, res, ps));
            };
            for (const auto &v : cmp_variants)
            {
                ScenarioConfig c = base;
                c.variant = model_variant_from_string(v);
                run_one(c, v);
            }
            if (cmp_reseed && !cmp_variants.empty())
            {
                ScenarioConfig c = base;
                c.variant = model_variant_from_string(cmp_variants.front());
                c.seed = *base.seed + 1;
                run_one(c, cmp_variants.front() + "-reseeded");
            }
            EvaluateOptions opt;
            opt.metrics = parse_metrics(cmp_metrics);
            opt.capacity = cmp_cap;
            opt.seed = *base.seed;
            Evaluation ev = evaluate(runs, opt);
            write_evaluation(d, ev, std::cout);
        }
    }
    catch (const config_error &e)
    {
        std::cerr << "xlchan: configuration error: " << e.what() << "\n";
        return 2;
    }
    catch (const numeric_error &e)
    {
        std::cerr << "xlchan: numeric failure: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "xlchan: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
