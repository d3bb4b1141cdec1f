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


#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"
#include "subgrape/error.hpp"

using namespace subgrape;
using namespace subgrape::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("subgrape_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_path(const json &j) {
    try {
        parse_config(j);
    } catch (const ConfigError &e) {
        return e.path();
    }
    return "<accepted>";
}

}  // namespace

TEST(cli, config_errors_name_the_field) {
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"optimizer", {{"max_iterations", -1}}}}),
              "/optimizer/max_iterations");
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"optimizer", {{"max_iteration", 5}}}}), "/optimizer/max_iteration");
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"grid", {{"n_sub", "four"}}}}), "/grid/n_sub");
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"sweep", {{"axis", "n_sub"}, {"values", {1, 5, 5}}}}}),
              "/sweep/values/2");
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"transfer", {{"kind", "gaussian_filter"}}}}), "/transfer");
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"transfers", json::array({json::object(), json::object(),
                                                                                json::object()})}}),
              "/transfers");
    EXPECT_EQ(error_path(json::object()), "/");
    EXPECT_EQ(error_path({{"scenario", "example1"}, {"grid", {{"gate_time_ns", 4.5}}}}), "/grid/gate_time_ns");
}

TEST(cli, gaussian_omega0_is_taken_as_angular) {
    RunConfig c = parse_config(
        {{"scenario", "example1"}, {"transfer", {{"kind", "gaussian_filter"}, {"omega0_rad_per_ns", 2.5}}}});
    EXPECT_DOUBLE_EQ(c.transfers[0].to_spec().omega0, 2.5);
    RunConfig b = parse_config(
        {{"scenario", "example1"}, {"transfer", {{"kind", "gaussian_filter"}, {"bandwidth_ghz", 0.25}}}});
    EXPECT_DOUBLE_EQ(b.transfers[0].to_spec().omega0, gaussian_omega0_from_bandwidth(0.25));
    EXPECT_EQ(error_path({{"scenario", "example1"},
                          {"transfer", {{"kind", "gaussian_filter"}, {"bandwidth_ghz", 0.25}, {"omega0_rad_per_ns", 2.5}}}}),
              "/transfer");
}

TEST(cli, inline_problem_converts_ghz_and_reports_problem_fields) {
    json j = {{"problem",
               {{"drift_ghz", {{1, 0}, {0, -1}}},
                {"controls", {{{0, 0.5}, {0.5, 0}}}},
                {"target", {{0, 1}, {1, 0}}}}},
              {"grid", {{"gate_time_ns", 2}, {"pixel_ns", 1}}}};
    RunConfig c = parse_config(j);
    ControlProblem p = build_problem(c);
    EXPECT_NEAR(p.drift(0.0, 0.0)(0, 0).real(), 2.0 * std::numbers::pi, 1e-15);
    EXPECT_EQ(p.grid.pixels, 2);

    json bad = j;
    bad["problem"]["controls"] = {{{0, 1}, {0, 0}}};
    EXPECT_EQ(error_path(bad), "/problem/controls[0]");
}

TEST(cli, resolved_config_round_trips) {
    json j = {{"scenario", "example1"},
              {"transfer", {{"kind", "gaussian_filter"}, {"bandwidth_ghz", 0.25}}},
              {"evaluation_transfer", {{"kind", "cubic_spline"}}},
              {"optimizer", {{"seed", 77}, {"amplitude_bound", 3.0}}},
              {"sweep", {{"axis", "gate_time"}, {"values", {4, 5}}}}};
    RunConfig c = parse_config(j);
    json echo = to_json(c);
    EXPECT_EQ(to_json(parse_config(echo)), echo);
    EXPECT_EQ(echo["optimizer"]["seed"], 77);
    EXPECT_TRUE(echo["sweep"]["warm_start"].get<bool>());
    EXPECT_EQ(build_problem(c).padding, 4);
}

TEST(cli, pulse_file_round_trips_bit_identically) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> dist(0.0, 3.0);
    Pulse p;
    p.padding = 2;
    p.values = Eigen::MatrixXd::Zero(3, 9);
    for (int k = 0; k < 3; k++) {
        for (int j = 2; j < 7; j++) {
            p.values(k, j) = dist(rng) * std::pow(10.0, k * 7 - 7);
        }
    }
    fs::path dir = scratch("roundtrip");
    ensure_output_dir(dir);
    write_pulse(dir / "p.csv", p, 0.125);
    Pulse q = read_pulse(dir / "p.csv");
    EXPECT_EQ(q.padding, 2);
    ASSERT_EQ(q.values.rows(), 3);
    ASSERT_EQ(q.values.cols(), 9);
    EXPECT_TRUE((q.values.array() == p.values.array()).all());
    EXPECT_EQ(slurp(dir / "p.csv").rfind("# subgrape pulse v1\n", 0), 0u);
}

TEST(cli, piecewise_fields_repeat_pixel_values) {
    RunConfig c = parse_config({{"scenario", "example1"}, {"grid", {{"n_sub", 3}}}});
    ControlProblem p = build_problem(c);
    Pulse pulse = Pulse::zeros(p);
    pulse.values << 1, 2, 3, 4, 5, 6, 7, 8;
    fs::path dir = scratch("fields");
    ensure_output_dir(dir);
    write_fields(dir / "f.csv", p, pulse, 0.0);
    std::istringstream in(slurp(dir / "f.csv"));
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        if (line[0] == '#' || line.rfind("sub_pixel", 0) == 0) {
            continue;
        }
        std::istringstream cells(line);
        std::string l, t, s0, s1;
        std::getline(cells, l, ',');
        std::getline(cells, t, ',');
        std::getline(cells, s0, ',');
        std::getline(cells, s1, ',');
        EXPECT_EQ(std::stod(s0), pulse.values(0, row / 3));
        EXPECT_EQ(std::stod(s1), pulse.values(1, row / 3));
        row++;
    }
    EXPECT_EQ(row, 12);
}

TEST(cli, spline_constant_pulse_gives_constant_interior_field) {
    RunConfig c = parse_config(
        {{"scenario", "example1"}, {"grid", {{"n_sub", 4}, {"gate_time_ns", 8}}}, {"transfer", {{"kind", "cubic_spline"}}}});
    ControlProblem p = build_problem(c);
    Pulse pulse = Pulse::zeros(p);
    pulse.values.middleCols(p.padding, p.free_pixels()).setConstant(0.9);
    SampledProblem sampled(p, 0.0);
    Eigen::MatrixXd s = sampled.fields(pulse);
    // Samples at least two pixels inside the free window see only 0.9s.
    for (int l = 0; l < p.grid.sub_pixels(); l++) {
        double x = p.grid.sample_time(l) / p.grid.pixel_width;
        if (x > p.padding + 2 && x < p.grid.pixels - p.padding - 2) {
            EXPECT_NEAR(s(0, l), 0.9, 1e-12);
        }
    }
}

TEST(cli, output_directory_is_created_or_rejected) {
    fs::path dir = scratch("nested") / "a" / "b";
    EXPECT_NO_THROW(ensure_output_dir(dir));
    EXPECT_TRUE(fs::is_directory(dir));
    fs::path file = scratch("file");
    std::ofstream(file) << "x";
    EXPECT_THROW(ensure_output_dir(file / "sub"), IoError);
}

TEST(cli, optimize_is_reproducible_and_evaluate_matches) {
    fs::path a = scratch("opt_a");
    fs::path b = scratch("opt_b");
    std::ostringstream out, err;
    Overrides o;
    o.scenario = "example1";
    o.seed = 5;
    o.restarts = 2;
    o.out = a.string();
    ASSERT_EQ(command_optimize(o, out, err), kExitOk) << err.str();
    o.out = b.string();
    ASSERT_EQ(command_optimize(o, out, err), kExitOk) << err.str();
    for (const char *f : {"pulse.csv", "fields.csv", "errors.csv", "progress.jsonl", "summary.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    json summary = json::parse(slurp(a / "summary.json"));

    // Re-running from the echoed config reproduces the bundle.
    fs::path c = scratch("opt_c");
    Overrides echo;
    echo.config_path = (a / "resolved_config.json").string();
    echo.out = c.string();
    ASSERT_EQ(command_optimize(echo, out, err), kExitOk) << err.str();
    EXPECT_EQ(slurp(a / "pulse.csv"), slurp(c / "pulse.csv"));

    RunConfig cfg = load_config(o);
    EvaluationReport rep = run_evaluate(cfg, read_pulse(a / "pulse.csv"), err);
    EXPECT_NEAR(rep.training_fidelity, summary["fidelity"].get<double>(), 1e-10);
    EXPECT_NEAR(rep.evaluation_fidelity, rep.training_fidelity, 1e-15);
}

TEST(cli, zero_pulse_has_zero_fidelity_for_x_target) {
    RunConfig c = parse_config({{"scenario", "example1"}});
    ControlProblem p = build_problem(c);
    EvaluationReport rep = run_evaluate(c, Pulse::zeros(p), std::cerr);
    EXPECT_NEAR(rep.evaluation_fidelity, 0.0, 1e-15);
    EXPECT_NEAR(rep.evaluation_fine_fidelity, 0.0, 1e-15);
}

TEST(cli, evaluate_rejects_mismatched_pulse) {
    RunConfig c = parse_config({{"scenario", "example1"}});
    Pulse p;
    p.values = Eigen::MatrixXd::Zero(2, 5);
    EXPECT_THROW(run_evaluate(c, p, std::cerr), ConfigError);
}

TEST(cli, exit_codes) {
    std::ostringstream out, err;
    Overrides none;
    EXPECT_EQ(command_validate(none, out, err), kExitConfig);
    Overrides ok;
    ok.scenario = "example3";
    EXPECT_EQ(command_validate(ok, out, err), kExitOk);
    Overrides bad_refinement = ok;
    bad_refinement.refinement = 1;
    err.str("");
    EXPECT_EQ(command_validate(bad_refinement, out, err), kExitConfig);
    EXPECT_EQ(json::parse(err.str())["path"], "/refinement");
}

TEST(cli, n_sub_sweep_writes_one_row_per_point) {
    fs::path dir = scratch("sweep");
    fs::path cfg = scratch("sweep_cfg.json");
    std::ofstream(cfg) << json{{"scenario", "example1"},
                               {"sweep", {{"axis", "n_sub"}, {"values", {1, 2}}}},
                               {"optimizer", {{"max_iterations", 20}}}}
                              .dump();
    Overrides o;
    o.config_path = cfg.string();
    o.out = dir.string();
    std::ostringstream out, err;
    ASSERT_EQ(command_sweep(o, out, err), kExitOk) << err.str();
    std::string table = slurp(dir / "errors.csv");
    EXPECT_NE(table.find("\n1,n_sub,2,4,2,"), std::string::npos) << table;
    EXPECT_TRUE(fs::exists(dir / "pulse_01.csv"));
    EXPECT_FALSE(json::parse(slurp(dir / "resolved_config.json"))["sweep"]["warm_start"].get<bool>());
}
