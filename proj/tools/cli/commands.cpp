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


#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>

#include "io.hpp"
#include "subgrape/error.hpp"

namespace subgrape::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Carries a shorter gate's optimum into a longer one: the old free
// amplitudes first, zeros after.
Pulse extend_pulse(const Pulse &prev, const ControlProblem &problem) {
    Pulse p = Pulse::zeros(problem);
    Eigen::MatrixXd old_free = prev.free_values();
    const Eigen::Index n = std::min<Eigen::Index>(old_free.cols(), problem.free_pixels());
    p.values.block(0, problem.padding, p.values.rows(), n) = old_free.leftCols(n);
    return p;
}

std::string progress_line(int point, int restart, const IterationRecord &r) {
    json j{{"point", point},
           {"restart", restart},
           {"iteration", r.iteration},
           {"fidelity", r.fidelity},
           {"infidelity", 1.0 - r.fidelity},
           {"step", r.step},
           {"gradient_norm", r.gradient_norm}};
    return j.dump() + "\n";
}

PointResult optimize_point(const RunConfig &c, int point, const std::optional<Pulse> &warm, std::string &progress) {
    PointResult pr;
    pr.problem = build_problem(c);
    pr.ensemble = resolved_ensemble(c, pr.problem);
    Objective objective(pr.problem, pr.ensemble);
    objective.set_parallel(c.parallel);
    int restart = -1;
    auto on_iteration = [&](const IterationRecord &r) {
        if (r.iteration == 0) {
            restart++;
        }
        progress += progress_line(point, restart, r);
    };
    std::optional<Pulse> start;
    if (warm) {
        start = extend_pulse(*warm, pr.problem);
    }
    pr.result = multistart(objective, c.optimizer, start, on_iteration);
    auto [fine, per_phase] = fine_grid_fidelity(pr.problem, pr.result.pulse, pr.ensemble, c.refinement);
    pr.fine_fidelity = fine;
    pr.fine_per_phase = std::move(per_phase);
    return pr;
}

RunConfig config_for_point(const RunConfig &c, double v) {
    RunConfig pc = c;
    if (c.sweep->axis == "gate_time") {
        pc.gate_time_ns = v;
    } else {
        pc.n_sub = static_cast<int>(v);
    }
    return pc;
}

// Gate-time continuation runs in order; independent points may run
// concurrently. Progress text is kept per point so output order is fixed.
std::vector<PointResult> sweep_points(const RunConfig &c, std::vector<std::string> &progress, std::ostream &log) {
    if (!c.sweep) {
        throw ConfigError("/sweep", "sweep command needs a 'sweep' section");
    }
    const auto &sw = *c.sweep;
    const size_t n = sw.values.size();
    progress.assign(n, "");
    std::vector<PointResult> points(n);
    if (sw.use_warm_start() || !c.parallel) {
        std::optional<Pulse> warm;
        for (size_t i = 0; i < n; i++) {
            points[i] = optimize_point(config_for_point(c, sw.values[i]), static_cast<int>(i), warm, progress[i]);
            if (sw.use_warm_start()) {
                warm = points[i].result.pulse;
            }
            log << "sweep " << sw.axis << "=" << format_double(sw.values[i]) << ": fine-grid infidelity "
                << format_double(1.0 - points[i].fine_fidelity) << "\n";
        }
    } else {
        std::vector<std::future<PointResult>> jobs;
        for (size_t i = 0; i < n; i++) {
            jobs.push_back(std::async(std::launch::async, [&, i] {
                return optimize_point(config_for_point(c, sw.values[i]), static_cast<int>(i), std::nullopt,
                                      progress[i]);
            }));
        }
        for (size_t i = 0; i < n; i++) {
            points[i] = jobs[i].get();
        }
    }
    for (size_t i = 0; i < n; i++) {
        points[i].axis = sw.axis;
        points[i].value = sw.values[i];
    }
    return points;
}

std::vector<std::string> error_columns(const PhaseEnsemble &e) {
    std::vector<std::string> cols{"point",          "axis",           "value",      "gate_time_ns",
                                  "n_sub",          "status",         "restarts_run", "optimized_fidelity",
                                  "fine_fidelity",  "fine_infidelity"};
    for (int i = 0; i < e.size(); i++) {
        cols.push_back("fine_fidelity_phase" + std::to_string(i));
    }
    return cols;
}

std::vector<std::string> error_row(int point, const PointResult &pr) {
    std::vector<std::string> row{std::to_string(point),
                                 pr.axis.empty() ? "none" : pr.axis,
                                 pr.axis.empty() ? "" : format_double(pr.value),
                                 format_double(pr.problem.free_pixels() * pr.problem.grid.pixel_width),
                                 std::to_string(pr.problem.grid.n_sub),
                                 to_string(pr.result.status),
                                 std::to_string(pr.result.runs.size()),
                                 format_double(pr.result.fidelity),
                                 format_double(pr.fine_fidelity),
                                 format_double(1.0 - pr.fine_fidelity)};
    for (double f : pr.fine_per_phase) {
        row.push_back(format_double(f));
    }
    return row;
}

std::string phases_comment(const PhaseEnsemble &e) {
    std::string s = "# phases=";
    for (int i = 0; i < e.size(); i++) {
        s += (i ? ";" : "") + format_double(e.phases[i]);
    }
    return s + "\n";
}

std::string with_meta(const std::string &table, const std::string &meta) {
    auto first = table.find('\n') + 1;
    return table.substr(0, first) + meta + table.substr(first);
}

json summary_json(const PointResult &pr) {
    json runs = json::array();
    for (const auto &r : pr.result.runs) {
        runs.push_back({{"seed", r.seed}, {"status", to_string(r.status)}, {"fidelity", r.fidelity},
                        {"iterations", r.iterations}});
    }
    return {{"status", to_string(pr.result.status)},
            {"fidelity", pr.result.fidelity},
            {"fine_fidelity", pr.fine_fidelity},
            {"fidelity_evaluations", pr.result.fidelity_evaluations},
            {"gradient_evaluations", pr.result.gradient_evaluations},
            {"runs", runs}};
}

void write_point_files(const fs::path &dir, const std::string &suffix, const PointResult &pr) {
    write_pulse(dir / ("pulse" + suffix + ".csv"), pr.result.pulse, pr.problem.grid.pixel_width);
    write_fields(dir / ("fields" + suffix + ".csv"), pr.problem, pr.result.pulse, pr.ensemble.phases.front());
}

json error_json(const std::string &kind, const std::string &message, const std::string &path = "") {
    json j{{"error", kind}, {"message", message}};
    if (!path.empty()) {
        j["path"] = path;
    }
    return j;
}

// Runs `body`, mapping failures to exit codes and machine-readable records.
template <typename F>
int guarded(const std::optional<fs::path> &out_dir, const double &pixel_ns, std::ostream &err, F &&body) {
    auto report = [&](const json &j, int code) {
        err << j.dump() << "\n";
        if (out_dir && fs::is_directory(*out_dir)) {
            try {
                write_text(*out_dir / "error.json", j.dump(2) + "\n");
            } catch (const IoError &) {
            }
        }
        return code;
    };
    try {
        return body();
    } catch (const ConfigError &e) {
        return report(error_json("config", e.message(), e.path()), kExitConfig);
    } catch (const OptimizationAborted &e) {
        if (out_dir && fs::is_directory(*out_dir)) {
            try {
                write_pulse(*out_dir / "pulse_partial.csv", e.partial().pulse, pixel_ns);
            } catch (const IoError &) {
            }
        }
        return report(error_json("numerical", e.what()), kExitNumerical);
    } catch (const NumericalError &e) {
        return report(error_json("numerical", e.what()), kExitNumerical);
    } catch (const InvalidArgument &e) {
        return report(error_json("config", e.message(), field_to_pointer(e.field())), kExitConfig);
    } catch (const IoError &e) {
        return report(error_json("io", e.what(), e.path().string()), kExitIo);
    }
}

}  // namespace

RunConfig load_config(const Overrides &o) {
    json j;
    if (o.config_path) {
        try {
            j = read_json(*o.config_path);
        } catch (const IoError &e) {
            throw ConfigError("/", e.what());
        }
        if (o.scenario) {
            if (j.contains("problem")) {
                throw ConfigError("/scenario", "--scenario conflicts with the config's inline problem");
            }
            j["scenario"] = *o.scenario;
        }
    } else if (o.scenario) {
        j = json{{"scenario", *o.scenario}};
    } else {
        throw ConfigError("/", "need --config or --scenario");
    }
    if (!j.is_object()) {
        throw ConfigError("/", "expected an object");
    }
    if (o.seed) {
        j["optimizer"]["seed"] = *o.seed;
    }
    if (o.restarts) {
        j["optimizer"]["restarts"] = *o.restarts;
    }
    if (o.refinement) {
        j["refinement"] = *o.refinement;
    }
    if (o.sample_at_left_edge) {
        j["grid"]["sample_at_left_edge"] = true;
    }
    if (o.out) {
        j["output_dir"] = *o.out;
    }
    if (o.pulse) {
        j["pulse_file"] = *o.pulse;
    }
    return parse_config(j);
}

std::pair<double, std::vector<double>> fine_grid_fidelity(const ControlProblem &problem, const Pulse &pulse,
                                                          const PhaseEnsemble &ensemble, int refinement) {
    std::vector<double> per_phase;
    double total = 0.0;
    for (int i = 0; i < ensemble.size(); i++) {
        double f = evaluate_on_fine_grid(problem, pulse, ensemble.phases[i], refinement);
        per_phase.push_back(f);
        total += ensemble.weights[i] * f;
    }
    return {total, per_phase};
}

PointResult run_optimize(const RunConfig &c, std::ostream &log) {
    std::string progress;
    PointResult pr = optimize_point(c, 0, std::nullopt, progress);
    log << "optimize: fidelity " << format_double(pr.result.fidelity) << ", fine-grid "
        << format_double(pr.fine_fidelity) << " (" << to_string(pr.result.status) << ")\n";
    return pr;
}

std::vector<PointResult> run_sweep(const RunConfig &c, std::ostream &log) {
    std::vector<std::string> progress;
    return sweep_points(c, progress, log);
}

EvaluationReport run_evaluate(const RunConfig &c, const Pulse &pulse, std::ostream &log) {
    EvaluationReport rep;
    ControlProblem train = build_problem(c);
    ControlProblem eval = build_problem(c, true);
    if (pulse.controls() != train.num_controls() || pulse.free_pixels() != train.free_pixels()) {
        throw ConfigError("/pulse_file", "pulse has " + std::to_string(pulse.controls()) + " controls x " +
                                             std::to_string(pulse.free_pixels()) + " free pixels; problem needs " +
                                             std::to_string(train.num_controls()) + " x " +
                                             std::to_string(train.free_pixels()));
    }
    Pulse train_pulse = pulse.repadded(train.padding);
    Pulse eval_pulse = pulse.repadded(eval.padding);
    rep.ensemble = resolved_ensemble(c, eval);
    PhaseEnsemble train_ensemble = resolved_ensemble(c, train);

    rep.training_fidelity = Objective(train, train_ensemble).fidelity(train_pulse);
    rep.training_fine_fidelity = fine_grid_fidelity(train, train_pulse, train_ensemble, c.refinement).first;
    rep.evaluation_fidelity = Objective(eval, rep.ensemble).fidelity(eval_pulse);
    auto [fine, per_phase] = fine_grid_fidelity(eval, eval_pulse, rep.ensemble, c.refinement);
    rep.evaluation_fine_fidelity = fine;
    rep.evaluation_fine_per_phase = std::move(per_phase);
    log << "evaluate: training-transfer fine-grid infidelity " << format_double(1.0 - rep.training_fine_fidelity)
        << ", evaluation-transfer " << format_double(1.0 - rep.evaluation_fine_fidelity) << "\n";
    return rep;
}

int command_validate(const Overrides &o, std::ostream &out, std::ostream &err) {
    double pixel_ns = 0.0;
    return guarded(std::nullopt, pixel_ns, err, [&] {
        RunConfig c = load_config(o);
        ControlProblem p = build_problem(c);
        auto d = validate_problem(p);
        json report = {{"valid", true},
                       {"dimension", p.dim()},
                       {"controls", p.num_controls()},
                       {"pixels", p.grid.pixels},
                       {"padding", p.padding},
                       {"sub_pixels", p.grid.sub_pixels()},
                       {"hermitian_residual", d.hermitian_residual},
                       {"projector_residual", d.projector_residual},
                       {"resolved_config", to_json(c)}};
        out << report.dump(2) << "\n";
        return kExitOk;
    });
}

int command_optimize(const Overrides &o, std::ostream &out, std::ostream &err) {
    std::optional<fs::path> dir;
    double pixel_ns = 0.0;
    return guarded(dir, pixel_ns, err, [&] {
        RunConfig c = load_config(o);
        pixel_ns = c.pixel_ns;
        dir = c.output_dir;
        ensure_output_dir(*dir);
        write_text(*dir / "resolved_config.json", to_json(c).dump(2) + "\n");

        std::string progress;
        PointResult pr;
        try {
            pr = optimize_point(c, 0, std::nullopt, progress);
        } catch (...) {
            write_text(*dir / "progress.jsonl", progress);
            throw;
        }
        write_text(*dir / "progress.jsonl", progress);
        write_point_files(*dir, "", pr);
        CsvTable table("errors", error_columns(pr.ensemble));
        table.add_row(error_row(0, pr));
        write_text(*dir / "errors.csv", with_meta(table.str(), phases_comment(pr.ensemble)));
        write_text(*dir / "summary.json", summary_json(pr).dump(2) + "\n");
        out << "fidelity " << format_double(pr.result.fidelity) << " fine_fidelity " << format_double(pr.fine_fidelity)
            << " status " << to_string(pr.result.status) << "\n";
        return kExitOk;
    });
}

int command_sweep(const Overrides &o, std::ostream &out, std::ostream &err) {
    std::optional<fs::path> dir;
    double pixel_ns = 0.0;
    return guarded(dir, pixel_ns, err, [&] {
        RunConfig c = load_config(o);
        pixel_ns = c.pixel_ns;
        if (!c.sweep) {
            throw ConfigError("/sweep", "sweep command needs a 'sweep' section");
        }
        dir = c.output_dir;
        ensure_output_dir(*dir);
        write_text(*dir / "resolved_config.json", to_json(c).dump(2) + "\n");

        const auto &sw = *c.sweep;
        std::vector<std::string> progress;
        std::vector<PointResult> points;
        auto flush_progress = [&] {
            std::string all;
            for (const auto &p : progress) {
                all += p;
            }
            write_text(*dir / "progress.jsonl", all);
        };
        try {
            points = sweep_points(c, progress, err);
        } catch (...) {
            flush_progress();
            throw;
        }
        flush_progress();

        CsvTable table("errors", error_columns(points.front().ensemble));
        json summaries = json::array();
        for (size_t i = 0; i < points.size(); i++) {
            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "_%02zu", i);
            write_point_files(*dir, suffix, points[i]);
            table.add_row(error_row(static_cast<int>(i), points[i]));
            summaries.push_back(summary_json(points[i]));
            out << sw.axis << " " << format_double(sw.values[i]) << " fine_infidelity "
                << format_double(1.0 - points[i].fine_fidelity) << "\n";
        }
        write_text(*dir / "errors.csv", with_meta(table.str(), phases_comment(points.front().ensemble)));
        write_text(*dir / "summary.json", summaries.dump(2) + "\n");
        return kExitOk;
    });
}

int command_evaluate(const Overrides &o, std::ostream &out, std::ostream &err) {
    std::optional<fs::path> dir;
    double pixel_ns = 0.0;
    return guarded(dir, pixel_ns, err, [&] {
        RunConfig c = load_config(o);
        pixel_ns = c.pixel_ns;
        if (!c.pulse_file) {
            throw ConfigError("/pulse_file", "evaluate needs --pulse or 'pulse_file'");
        }
        Pulse pulse;
        try {
            pulse = read_pulse(*c.pulse_file);
        } catch (const IoError &e) {
            throw ConfigError("/pulse_file", e.what());
        }
        dir = c.output_dir;
        ensure_output_dir(*dir);
        write_text(*dir / "resolved_config.json", to_json(c).dump(2) + "\n");
        EvaluationReport rep = run_evaluate(c, pulse, err);

        std::vector<std::string> cols{"transfer", "fidelity", "fine_fidelity", "fine_infidelity"};
        CsvTable table("evaluation", cols);
        table.add_row({"training", format_double(rep.training_fidelity), format_double(rep.training_fine_fidelity),
                       format_double(1.0 - rep.training_fine_fidelity)});
        table.add_row({"evaluation", format_double(rep.evaluation_fidelity),
                       format_double(rep.evaluation_fine_fidelity),
                       format_double(1.0 - rep.evaluation_fine_fidelity)});
        write_text(*dir / "evaluation.csv", table.str());

        CsvTable phases("evaluation_phases", {"phase", "psi", "fine_fidelity"});
        for (int i = 0; i < rep.ensemble.size(); i++) {
            phases.add_row({std::to_string(i), format_double(rep.ensemble.phases[i]),
                            format_double(rep.evaluation_fine_per_phase[i])});
        }
        write_text(*dir / "evaluation_phases.csv", phases.str());
        out << "training_fidelity " << format_double(rep.training_fidelity) << " training_fine_fidelity "
            << format_double(rep.training_fine_fidelity) << "\n"
            << "evaluation_fidelity " << format_double(rep.evaluation_fidelity) << " evaluation_fine_fidelity "
            << format_double(rep.evaluation_fine_fidelity) << "\n";
        return kExitOk;
    });
}

}  // namespace subgrape::cli
