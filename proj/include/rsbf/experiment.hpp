// SPDX-License-Identifier: Apache-2.0
//
// rsbf - robust rate-splitting beamforming for short-packet downlink MISO
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

// Batch experiments: convergence traces, robustness counts and the blocklength,
// BLER and SNR sweeps, written as one CSV of per-run rows, a JSON summary and a
// JSON file with every design.

#pragma once

#include "rsbf/core.hpp"
#include "rsbf/schemes.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsbf::experiment
{

enum class Kind
{
    Convergence,       // grid: delta
    Robustness,        // grid: delta^2
    SweepBlocklength,  // grid: L
    SweepBler,         // grid: epsilon
    SweepSnr,          // grid: SNR in dB with sigma^2 = 1; one series per alpha
    SingleSolve,       // no grid
};

std::string_view to_string(Kind kind);
Kind parse_kind(std::string_view name);  // throws ConfigError("experiment", ...)

enum class ChannelModel
{
    Rayleigh,    // fresh CN(0, I) draw per realization
    Correlated,  // the deterministic (gamma, theta) pair
    Given,       // estimates listed in the config
};

struct ExperimentConfig
{
    Kind kind = Kind::SingleSolve;
    SystemConfig system;
    std::vector<double> grid;
    std::vector<double> alphas;           // sweep-snr only
    std::vector<SchemeId> schemes;        // defaults per experiment when empty in the file
    ChannelModel channel_model = ChannelModel::Rayleigh;
    double gamma = 0.9;
    double theta = 0.0;
    std::vector<CVec> given_channels;     // ChannelModel::Given
    int n_realizations = 20;
    int n_starts = 1;
    std::uint64_t seed = 1;
    std::string output_path = ".";
    bool continuation = false;            // seed each grid point with the previous design
    bool record_timing = false;           // fill solve_ms (breaks byte-identical output)
    algo::CccpSettings cccp;
};

/// Parses and validates a config document. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json &doc);

/// Reads a config file. Syntax errors are reported with their line number.
ExperimentConfig load_config(const std::string &path);

struct Row
{
    std::string experiment;
    SchemeId scheme = SchemeId::RbRsFbl;
    int realization = 0;
    std::uint64_t seed = 0;
    SystemConfig system;  // the configuration this row was solved under
    double delta = 0.0;
    double alpha = 0.0;
    double grid_value = 0.0;
    SchemeResult result;
    double relaxation_gap = 0.0;  // min_rate - relaxation_objective
    bool failed = false;          // an exception escaped the scheme
    std::string error;
    ChannelSet channels;          // estimates and radii the row was evaluated under
};

struct Output
{
    std::vector<Row> rows;
    nlohmann::json summary;
    int failures = 0;
};

/// Number of worker threads: RSBF_WORKERS if set and positive, else the hardware count.
int worker_count();

Output run_experiment(const ExperimentConfig &config, int workers);

/// The fixed CSV header.
std::string csv_header();
std::string csv_line(const Row &row, bool record_timing);
std::string to_csv(const Output &out, bool record_timing);

nlohmann::json design_to_json(const BeamformerSet &b);
BeamformerSet design_from_json(const nlohmann::json &doc);
nlohmann::json designs_document(const Output &out);

/// Per-iteration objective rows of every run (convergence experiment).
std::string traces_csv(const Output &out);

struct WrittenFiles
{
    std::string csv, summary, designs, traces;  // traces empty unless convergence
};

/// Writes <dir>/<experiment>.csv, <experiment>_summary.json and <experiment>_designs.json,
/// plus <experiment>_traces.csv for the convergence experiment.
WrittenFiles write_outputs(const Output &out, const ExperimentConfig &config, const std::string &dir);

}  // namespace rsbf::experiment
