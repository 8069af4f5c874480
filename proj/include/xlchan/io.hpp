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

#ifndef XLCHAN_IO_HPP
#define XLCHAN_IO_HPP

#include "xlchan/pipeline.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// File formats. Every format carries a format_version field.
//   config      JSON, unknown keys rejected, SI units
//   path list   text, one "path" record per line
//   channel     JSON header + raw little-endian complex64 in (n, m, k) order
//   tables      CSV with a JSON sidecar (<file>.json)

namespace xlchan
{
    constexpr int format_version = 1;

    // Scenario configuration
    std::string config_to_json(const ScenarioConfig &config);
    ScenarioConfig config_from_json(std::string_view text); // throws config_error
    ScenarioConfig load_config(const std::filesystem::path &file);
    void save_config(const ScenarioConfig &config, const std::filesystem::path &file);

    // FNV-1a 64 of the canonical JSON, as 16 hex digits
    std::string config_hash(const ScenarioConfig &config);

    // Path list
    std::string format_path_list(const PathSet &paths);
    PathSet parse_path_list(std::string_view text); // throws config_error naming the line
    PathSet load_path_list(const std::filesystem::path &file);
    void save_path_list(const PathSet &paths, const std::filesystem::path &file);

    // Channel tensor; the binary payload sits next to the header with extension ".bin"
    void save_channel(const ChannelTensor &channel, const std::filesystem::path &header_file);
    ChannelTensor load_channel(const std::filesystem::path &header_file);

    // Shortest decimal form that parses back to the same double
    std::string format_double(double v);

    // Column-oriented CSV plus a JSON sidecar with the column names, the row count and extra fields
    struct CsvTable
    {
        std::vector<std::string> columns;
        std::vector<std::vector<double>> data; // one vector per column
        std::vector<std::pair<std::string, std::string>> meta;
    };

    void save_csv(const CsvTable &table, const std::filesystem::path &file);
    CsvTable load_csv(const std::filesystem::path &file);

    // Run directory written by "synthesize": config.json, paths.txt, channel.json/.bin, aaf.csv
    void save_run(const std::filesystem::path &dir, const ScenarioConfig &config, const PathSet &paths,
                  const SynthesisResult &result);

    // Reloads a run directory; path-domain data are recomputed from the stored config, paths and AAFs
    RunData load_run(const std::filesystem::path &dir, std::string label);

    std::string read_text(const std::filesystem::path &file);
    void write_text(const std::filesystem::path &file, std::string_view text);
}

#endif
