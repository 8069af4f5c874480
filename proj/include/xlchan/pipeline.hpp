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

#ifndef XLCHAN_PIPELINE_HPP
#define XLCHAN_PIPELINE_HPP

#include "xlchan/channel.hpp"
#include "xlchan/metrics.hpp"
#include "xlchan/nearfield.hpp"
#include "xlchan/sns.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xlchan
{
    struct ArraySpec
    {
        std::size_t num_elements = 301;
        double spacing = 1.364e-3;
        Vec3 axis = Vec3::UnitX();
        std::size_t reference_index = 0;
        Vec3 origin = Vec3::Zero();

        ArrayGeometry geometry() const { return {num_elements, spacing, axis, reference_index, origin}; }
    };

    // Large flat surface; specular paths are built from the mirror image of the receiver
    struct Reflector
    {
        std::string name;
        Plane plane;
        double loss_db = 6.0;
        double phase = pi; // interaction phase
        Stationarity stationarity = Stationarity::SnS;
    };

    // Small object acting as a point source
    struct Scatterer
    {
        std::string name;
        Vec3 position = Vec3::Zero();
        double loss_db = 10.0;
        double phase = 0.0;
        Stationarity stationarity = Stationarity::SnS;
    };

    // Which wavefront model NLoS paths get. "hybrid" keeps SRM for reflectors and SPM for scatterers.
    enum class NlosModel
    {
        hybrid,
        srm,
        spm
    };

    std::string_view to_string(NlosModel m);
    NlosModel nlos_model_from_string(std::string_view s);

    // Visibility intervals of the VR baseline cover a uniform fraction of the array
    struct VrSettings
    {
        double min_fraction = 0.25;
        double max_fraction = 0.75;
    };

    struct ScenarioConfig
    {
        std::string name = "custom";
        ArraySpec array;
        FrequencyGrid grid;
        std::optional<double> carrier_hz; // grid center when absent
        AntennaPatterns patterns;
        std::vector<Vec3> receivers;
        bool include_los = true;
        Stationarity los_stationarity = Stationarity::SS;
        std::vector<Reflector> reflectors;
        std::vector<Scatterer> scatterers;
        AAFStatParams aaf_stats;
        VrSettings vr;
        ModelVariant variant = ModelVariant::NF_SnS;
        NlosModel nlos_model = NlosModel::hybrid;
        std::optional<std::uint64_t> seed;

        double carrier() const { return carrier_hz ? *carrier_hz : grid.center(); }
        void validate() const;
    };

    // Reference-element paths for every receiver (the content of a path-list file)
    struct PathSet
    {
        std::vector<std::vector<PathRecord>> ues;

        bool operator==(const PathSet &) const = default;
    };

    std::vector<std::string> preset_names();
    ScenarioConfig preset(std::string_view name); // throws config_error for unknown names

    // LoS from geometry, one SRM path per reflector and one SPM path per scatterer, per receiver.
    // Throws geometry_error naming the offending path when a ray is blocked or degenerate.
    PathSet build_paths(const ScenarioConfig &config);

    struct SynthesisResult
    {
        ChannelTensor channel;             // N x M x K
        std::vector<AAFMatrix> aaf;        // per UE, M x L
        std::vector<PathDomain> paths;     // per UE ground truth
        std::vector<AAFParams> aaf_params; // generator parameters of every SnS path, UE-major
    };

    // Reference response, A(f), AAFs and the Hadamard assembly for every receiver.
    // Stochastic variants need a seed; the stream of (UE n, path l) is derive_rng(seed, n, l).
    SynthesisResult synthesize(const ScenarioConfig &config, const PathSet &paths);

    // Inputs of the metric engine for one model run
    struct RunData
    {
        std::string label;
        ChannelTensor channel;
        std::vector<PathDomain> paths; // optional, enables K-factor and delay spread
        std::vector<AAFMatrix> aaf;    // optional, enables spatial correlation
        std::vector<std::vector<double>> path_amplitudes;
    };

    enum class Metric
    {
        capacity,
        demmel,
        gain,
        kfactor,
        delay_spread,
        correlation
    };

    std::string_view to_string(Metric m);
    Metric metric_from_string(std::string_view s);
    std::vector<Metric> all_metrics();

    struct EvaluateOptions
    {
        std::vector<Metric> metrics = all_metrics();
        CapacityConfig capacity;
        std::uint64_t seed = 0;
        std::size_t max_correlation_lag = 100;
        double dynamic_range_db = 40.0;
    };

    struct MetricSamples
    {
        Metric metric = Metric::capacity;
        std::vector<double> values;
    };

    struct RunMetrics
    {
        std::string label;
        std::vector<MetricSamples> samples;
        std::vector<double> correlation; // rho(dx), dx = 0..max lag, averaged over UEs

        const std::vector<double> *find(Metric m) const;
    };

    struct PairwiseCvm
    {
        Metric metric = Metric::capacity;
        std::size_t a = 0;
        std::size_t b = 0;
        double value = 0.0;
    };

    struct Evaluation
    {
        std::vector<RunMetrics> runs;
        std::vector<PairwiseCvm> cvm; // all pairs of runs, per metric
    };

    // Metric samples per run (capacity/Demmel per trial, others per element pooled over UEs)
    // and pairwise CvM distances. Runs must share the array size and frequency grid.
    // Gain is the wideband sum of path powers when path data are present, otherwise the
    // frequency-averaged |H|^2.
    Evaluation evaluate(const std::vector<RunData> &runs, const EvaluateOptions &options);

    RunData make_run_data(std::string label, const SynthesisResult &result, const PathSet &paths);
}

#endif
