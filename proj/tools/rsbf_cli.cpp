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

// rsbf <experiment> --config PATH [--seed N] [--out DIR] [--realizations N]
//
// Exit codes: 0 success, 1 configuration error, 2 some realization failed.

#include "rsbf/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>

namespace ex = rsbf::experiment;

namespace
{

struct Options
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> realizations;
};

int run(const std::string &name, const Options &opt)
{
    ex::ExperimentConfig cfg;
    try
    {
        cfg = ex::load_config(opt.config);
        if (ex::to_string(cfg.kind) != name)
            throw rsbf::ConfigError("experiment", "config is for '" + std::string(ex::to_string(cfg.kind)) +
                                                      "' but the subcommand is '" + name + "'");
        if (opt.seed)
            cfg.seed = *opt.seed;
        if (opt.realizations)
        {
            if (*opt.realizations < 1)
                throw rsbf::ConfigError("--realizations", "must be >= 1");
            cfg.n_realizations = *opt.realizations;
        }
        if (opt.out)
            cfg.output_path = *opt.out;
    }
    catch (const rsbf::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    const int workers = ex::worker_count();
    const ex::Output out = ex::run_experiment(cfg, workers);
    try
    {
        const auto files = ex::write_outputs(out, cfg, cfg.output_path);
        std::cout << "wrote " << files.csv << "\n" << "wrote " << files.summary << "\n" << "wrote " << files.designs
                  << "\n";
        if (!files.traces.empty())
            std::cout << "wrote " << files.traces << "\n";
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    for (const auto &row : out.rows)
        if (row.failed)
            std::cerr << "realization " << row.realization << " " << rsbf::to_string(row.scheme) << " grid "
                      << row.grid_value << " failed: " << row.error << "\n";
    return out.failures > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Robust rate-splitting beamforming experiments"};
    app.require_subcommand(1);
    Options opt;
    for (const char *name :
         {"convergence", "robustness", "sweep-blocklength", "sweep-bler", "sweep-snr", "single-solve"})
    {
        auto *sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--realizations", opt.realizations, "override n_realizations");
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return run(app.get_subcommands().front()->get_name(), opt);
}
