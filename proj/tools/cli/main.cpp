// Copyright 2026 The Subgrape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_common_options(CLI::App *cmd, subgrape::cli::Overrides &o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration");
    cmd->add_option("--scenario", o.scenario, "Built-in scenario: example1, example2, example3");
    cmd->add_option("--out", o.out, "Output directory (created if missing)");
    cmd->add_option("--seed", o.seed, "Base seed for random starts");
    cmd->add_option("--refinement", o.refinement, "Sub-pixel refinement of the fine-grid evaluation");
    cmd->add_option("--restarts", o.restarts, "Number of random restarts");
    cmd->add_flag("--sample-at-left-edge", o.sample_at_left_edge, "Sample sub-pixels at their left edge");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sub-pixel GRAPE pulse optimizer"};
    app.require_subcommand(1);
    subgrape::cli::Overrides o;

    auto *optimize = app.add_subcommand("optimize", "Optimize one pulse and write the result bundle");
    auto *evaluate = app.add_subcommand("evaluate", "Evaluate a stored pulse, possibly under another transfer");
    auto *sweep = app.add_subcommand("sweep", "Optimize over a gate-time or n_sub sweep");
    auto *validate = app.add_subcommand("validate-config", "Check a configuration and print it resolved");
    for (auto *cmd : {optimize, evaluate, sweep, validate}) {
        add_common_options(cmd, o);
    }
    evaluate->add_option("--pulse", o.pulse, "Pulse CSV written by optimize or sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return subgrape::cli::kExitConfig;
    }

    if (optimize->parsed()) {
        return subgrape::cli::command_optimize(o, std::cout, std::cerr);
    }
    if (evaluate->parsed()) {
        return subgrape::cli::command_evaluate(o, std::cout, std::cerr);
    }
    if (sweep->parsed()) {
        return subgrape::cli::command_sweep(o, std::cout, std::cerr);
    }
    return subgrape::cli::command_validate(o, std::cout, std::cerr);
}
