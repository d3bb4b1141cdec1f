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


#include "config.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "subgrape/error.hpp"
#include "subgrape/scenarios.hpp"

namespace subgrape::cli {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Typed, path-aware view of one JSON object. Unknown keys are rejected by
// finish() so that typos do not silently fall back to defaults.
class Node {
   public:
    Node(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
        }
    }

    std::string at(const std::string &key) const { return path_ + "/" + key; }

    bool has(const std::string &key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json &raw(const std::string &key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string &key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError(at(key), "expected a number");
        }
        double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw ConfigError(at(key), "must be finite");
        }
        return x;
    }

    int integer(const std::string &key, int fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = j_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(at(key), "expected an integer");
        }
        return v.get<int>();
    }

    uint64_t unsigned_integer(const std::string &key, uint64_t fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
            throw ConfigError(at(key), "expected a non-negative integer");
        }
        return v.get<uint64_t>();
    }

    bool boolean(const std::string &key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = j_.at(key);
        if (!v.is_boolean()) {
            throw ConfigError(at(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::string string(const std::string &key, const std::string &fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = j_.at(key);
        if (!v.is_string()) {
            throw ConfigError(at(key), "expected a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string &key) {
        if (!has(key)) {
            return {};
        }
        const json &v = j_.at(key);
        if (!v.is_array()) {
            throw ConfigError(at(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (size_t i = 0; i < v.size(); i++) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                throw ConfigError(at(key) + "/" + std::to_string(i), "expected a finite number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto &item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(at(item.key()), "unknown key");
            }
        }
    }

   private:
    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

// Entries are numbers or [re, im] pairs.
Matrix parse_matrix(const json &j, const std::string &path) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(path, "expected a non-empty array of rows");
    }
    const size_t n = j.size();
    Matrix m(n, n);
    for (size_t r = 0; r < n; r++) {
        const json &row = j[r];
        std::string rpath = path + "/" + std::to_string(r);
        if (!row.is_array() || row.size() != n) {
            throw ConfigError(rpath, "expected a row of length " + std::to_string(n));
        }
        for (size_t c = 0; c < n; c++) {
            const json &e = row[c];
            std::string epath = rpath + "/" + std::to_string(c);
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError(epath, "expected a number or a [re, im] pair");
            }
        }
    }
    return m;
}

json matrix_to_json(const Matrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

TransferConfig parse_transfer(const json &j, const std::string &path) {
    Node n(j, path);
    TransferConfig t;
    t.kind = n.string("kind", t.kind);
    if (n.has("bandwidth_ghz")) {
        t.bandwidth_ghz = n.number("bandwidth_ghz", 0.0);
    }
    if (n.has("omega0_rad_per_ns")) {
        t.omega0_rad_per_ns = n.number("omega0_rad_per_ns", 0.0);
    }
    t.response = n.string("response", t.response);
    t.order = n.integer("order", t.order);
    t.frequencies_ghz = n.numbers("frequencies_ghz");
    t.carrier_ghz = n.number("carrier_ghz", t.carrier_ghz);
    if (n.has("base")) {
        t.base = std::make_shared<TransferConfig>(parse_transfer(n.raw("base"), n.at("base")));
    }
    n.finish();

    if (t.kind == "gaussian_filter") {
        if (t.bandwidth_ghz.has_value() == t.omega0_rad_per_ns.has_value()) {
            throw ConfigError(path, "gaussian_filter needs exactly one of bandwidth_ghz, omega0_rad_per_ns");
        }
    } else if (t.kind == "general_filter") {
        if (t.response != "all_pass" && !t.bandwidth_ghz) {
            throw ConfigError(path + "/bandwidth_ghz", "required for this filter response");
        }
        if (t.response != "butterworth" && t.response != "gaussian" && t.response != "all_pass") {
            throw ConfigError(path + "/response", "expected butterworth, gaussian or all_pass");
        }
    } else if (t.kind == "carrier") {
        if (!t.base) {
            t.base = std::make_shared<TransferConfig>();
        }
    } else if (t.kind == "fourier") {
        if (t.frequencies_ghz.empty()) {
            throw ConfigError(path + "/frequencies_ghz", "fourier transfer needs at least one frequency");
        }
    } else if (t.kind != "piecewise_constant" && t.kind != "cubic_spline") {
        throw ConfigError(path + "/kind", "unknown transfer kind '" + t.kind + "'");
    }
    try {
        t.to_spec().validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError(field_to_pointer(e.field(), path), e.message());
    }
    return t;
}

json transfer_to_json(const TransferConfig &t) {
    json j;
    j["kind"] = t.kind;
    if (t.kind == "gaussian_filter") {
        if (t.bandwidth_ghz) {
            j["bandwidth_ghz"] = *t.bandwidth_ghz;
        } else {
            j["omega0_rad_per_ns"] = *t.omega0_rad_per_ns;
        }
    } else if (t.kind == "general_filter") {
        j["response"] = t.response;
        if (t.bandwidth_ghz) {
            j["bandwidth_ghz"] = *t.bandwidth_ghz;
        }
        if (t.response == "butterworth") {
            j["order"] = t.order;
        }
    } else if (t.kind == "carrier") {
        j["carrier_ghz"] = t.carrier_ghz;
        j["base"] = transfer_to_json(*t.base);
    } else if (t.kind == "fourier") {
        j["frequencies_ghz"] = t.frequencies_ghz;
    }
    return j;
}

std::vector<TransferConfig> parse_transfers(Node &n, const std::string &single, const std::string &list) {
    if (n.has(single) && n.has(list)) {
        throw ConfigError(n.at(list), "give either '" + single + "' or '" + list + "', not both");
    }
    if (n.has(single)) {
        return {parse_transfer(n.raw(single), n.at(single))};
    }
    std::vector<TransferConfig> out;
    if (n.has(list)) {
        const json &arr = n.raw(list);
        if (!arr.is_array() || arr.empty()) {
            throw ConfigError(n.at(list), "expected a non-empty array");
        }
        for (size_t i = 0; i < arr.size(); i++) {
            out.push_back(parse_transfer(arr[i], n.at(list) + "/" + std::to_string(i)));
        }
    }
    return out;
}

Method parse_method(const std::string &s, const std::string &path) {
    if (s == "steepest") {
        return Method::steepest;
    }
    if (s == "quasi_newton") {
        return Method::quasi_newton;
    }
    throw ConfigError(path, "expected 'steepest' or 'quasi_newton'");
}

void parse_optimizer(const json &j, OptimizerConfig &o) {
    Node n(j, "/optimizer");
    o.method = parse_method(n.string("method", to_string(o.method)), n.at("method"));
    o.initial_step = n.number("initial_step", o.initial_step);
    o.grow = n.number("grow", o.grow);
    o.shrink = n.number("shrink", o.shrink);
    o.max_iterations = n.integer("max_iterations", o.max_iterations);
    o.target_infidelity = n.number("target_infidelity", o.target_infidelity);
    o.gradient_norm_tolerance = n.number("gradient_norm_tolerance", o.gradient_norm_tolerance);
    o.max_line_search_steps = n.integer("max_line_search_steps", o.max_line_search_steps);
    o.sufficient_increase = n.number("sufficient_increase", o.sufficient_increase);
    o.restarts = n.integer("restarts", o.restarts);
    o.seed = n.unsigned_integer("seed", o.seed);
    o.initial_amplitude = n.number("initial_amplitude", o.initial_amplitude);
    if (n.has("amplitude_bound")) {
        o.amplitude_bound = n.number("amplitude_bound", 0.0);
    }
    o.memory = n.integer("memory", o.memory);
    o.stop_at_target = n.boolean("stop_at_target", o.stop_at_target);
    n.finish();
}

json optimizer_to_json(const OptimizerConfig &o) {
    json j;
    j["method"] = to_string(o.method);
    j["initial_step"] = o.initial_step;
    j["grow"] = o.grow;
    j["shrink"] = o.shrink;
    j["max_iterations"] = o.max_iterations;
    j["target_infidelity"] = o.target_infidelity;
    j["gradient_norm_tolerance"] = o.gradient_norm_tolerance;
    j["max_line_search_steps"] = o.max_line_search_steps;
    j["sufficient_increase"] = o.sufficient_increase;
    j["restarts"] = o.restarts;
    j["seed"] = o.seed;
    j["initial_amplitude"] = o.initial_amplitude;
    j["amplitude_bound"] = o.amplitude_bound ? json(*o.amplitude_bound) : json(nullptr);
    j["memory"] = o.memory;
    j["stop_at_target"] = o.stop_at_target;
    return j;
}

InlineProblem parse_inline_problem(const json &j) {
    Node n(j, "/problem");
    InlineProblem p;
    if (!n.has("drift_ghz")) {
        throw ConfigError(n.at("drift_ghz"), "required");
    }
    p.drift_ghz = parse_matrix(n.raw("drift_ghz"), n.at("drift_ghz"));
    if (!n.has("controls") || !n.raw("controls").is_array() || n.raw("controls").empty()) {
        throw ConfigError(n.at("controls"), "expected a non-empty array of matrices");
    }
    const json &controls = n.raw("controls");
    for (size_t i = 0; i < controls.size(); i++) {
        p.controls.push_back(parse_matrix(controls[i], n.at("controls") + "/" + std::to_string(i)));
    }
    if (!n.has("target")) {
        throw ConfigError(n.at("target"), "required");
    }
    p.target = parse_matrix(n.raw("target"), n.at("target"));
    const Eigen::Index d = p.target.rows();
    p.projector = n.has("projector") ? parse_matrix(n.raw("projector"), n.at("projector")) : Matrix::Identity(d, d);
    p.subspace_dim = n.integer("subspace_dim", static_cast<int>(d));
    n.finish();

    auto check_dim = [d](const Matrix &m, const std::string &path) {
        if (m.rows() != d) {
            throw ConfigError(path, "dimension differs from target (" + std::to_string(d) + ")");
        }
    };
    check_dim(p.drift_ghz, "/problem/drift_ghz");
    check_dim(p.projector, "/problem/projector");
    for (size_t i = 0; i < p.controls.size(); i++) {
        check_dim(p.controls[i], "/problem/controls/" + std::to_string(i));
    }
    return p;
}

}  // namespace

TransferSpec TransferConfig::to_spec() const {
    if (kind == "cubic_spline") {
        return TransferSpec::cubic_spline();
    }
    if (kind == "gaussian_filter") {
        return bandwidth_ghz ? TransferSpec::gaussian_filter_bandwidth(*bandwidth_ghz)
                             : TransferSpec::gaussian_filter(omega0_rad_per_ns.value_or(0.0));
    }
    if (kind == "general_filter") {
        if (response == "all_pass") {
            return TransferSpec::general_filter(FilterResponse::all_pass());
        }
        double wb = kTwoPi * bandwidth_ghz.value_or(0.0);
        if (response == "gaussian") {
            auto f = FilterResponse::gaussian(wb / kGaussianThreeDbRatio);
            f.bandwidth.reset();  // located numerically, like any measured response
            return TransferSpec::general_filter(f);
        }
        return TransferSpec::general_filter(FilterResponse::butterworth(wb, order));
    }
    if (kind == "carrier") {
        return TransferSpec::cosine_carrier(kTwoPi * carrier_ghz, base ? base->to_spec() : TransferSpec{});
    }
    if (kind == "fourier") {
        std::vector<double> w;
        for (double f : frequencies_ghz) {
            w.push_back(kTwoPi * f);
        }
        return TransferSpec::fourier(std::move(w));
    }
    return TransferSpec::piecewise_constant();
}

RunConfig scenario_defaults(const std::string &name) {
    RunConfig c;
    c.scenario = name;
    if (name == "example1") {
        Example1Params p;
        c.delta_ghz = p.delta_ghz;
        c.gate_time_ns = p.gate_time_ns;
        c.pixel_ns = p.pixel_ns;
        c.n_sub = p.n_sub;
    } else if (name == "example2") {
        Example2Params p;
        c.delta_ghz = p.delta_ghz;
        c.omega1_ghz = p.omega1_ghz;
        c.gate_time_ns = p.gate_time_ns;
        c.pixel_ns = p.pixel_ns;
        c.n_sub = p.n_sub;
    } else if (name == "example3") {
        Example3Params p;
        c.delta_ghz = p.delta_ghz;
        c.coupling_ghz = p.coupling_ghz;
        c.gate_time_ns = p.gate_time_ns;
        c.pixel_ns = p.pixel_ns;
        c.n_sub = p.n_sub;
    } else {
        throw ConfigError("/scenario", "unknown scenario '" + name + "' (expected example1, example2 or example3)");
    }
    c.transfers = {TransferConfig{}};
    return c;
}

RunConfig parse_config(const json &j) {
    Node n(j, "");
    int version = n.integer("schema_version", kSchemaVersion);
    if (version != kSchemaVersion) {
        throw ConfigError("/schema_version", "unsupported version " + std::to_string(version));
    }
    if (n.has("scenario") == n.has("problem")) {
        throw ConfigError("/", "give exactly one of 'scenario' and 'problem'");
    }

    RunConfig c;
    if (n.has("scenario")) {
        c = scenario_defaults(n.string("scenario", ""));
    } else {
        c.problem = parse_inline_problem(n.raw("problem"));
        c.transfers = {TransferConfig{}};
        c.gate_time_ns = 0.0;
        c.pixel_ns = 1.0;
    }

    if (n.has("physics")) {
        if (!c.scenario) {
            throw ConfigError("/physics", "only applies to named scenarios");
        }
        Node ph(n.raw("physics"), "/physics");
        c.delta_ghz = ph.number("delta_ghz", c.delta_ghz);
        if (*c.scenario == "example2") {
            c.omega1_ghz = ph.number("omega1_ghz", c.omega1_ghz);
        }
        if (*c.scenario == "example3") {
            c.coupling_ghz = ph.number("coupling_ghz", c.coupling_ghz);
        }
        ph.finish();
    }

    if (n.has("grid")) {
        Node g(n.raw("grid"), "/grid");
        c.gate_time_ns = g.number("gate_time_ns", c.gate_time_ns);
        c.pixel_ns = g.number("pixel_ns", c.pixel_ns);
        c.n_sub = g.integer("n_sub", c.n_sub);
        c.sample_at_left_edge = g.boolean("sample_at_left_edge", c.sample_at_left_edge);
        g.finish();
    }
    if (!(c.pixel_ns > 0.0)) {
        throw ConfigError("/grid/pixel_ns", "must be positive");
    }
    if (!(c.gate_time_ns > 0.0)) {
        throw ConfigError("/grid/gate_time_ns", "must be positive");
    }
    if (c.n_sub < 1) {
        throw ConfigError("/grid/n_sub", "must be at least 1");
    }
    try {
        pixels_for_gate_time(c.gate_time_ns, c.pixel_ns);
    } catch (const InvalidArgument &e) {
        throw ConfigError("/grid/gate_time_ns", e.message());
    }

    auto transfers = parse_transfers(n, "transfer", "transfers");
    if (!transfers.empty()) {
        c.transfers = std::move(transfers);
    }
    auto evaluation = parse_transfers(n, "evaluation_transfer", "evaluation_transfers");
    if (!evaluation.empty()) {
        c.evaluation_transfers = std::move(evaluation);
    }

    if (n.has("optimizer")) {
        parse_optimizer(n.raw("optimizer"), c.optimizer);
    }
    try {
        c.optimizer.validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError(field_to_pointer(e.field()), e.message());
    }

    if (n.has("ensemble")) {
        Node e(n.raw("ensemble"), "/ensemble");
        c.ensemble_size = e.integer("size", c.ensemble_size);
        c.ensemble_phases = e.numbers("phases");
        c.ensemble_weights = e.numbers("weights");
        e.finish();
        if (c.ensemble_size < 1) {
            throw ConfigError("/ensemble/size", "must be at least 1");
        }
        if (!c.ensemble_weights.empty() && c.ensemble_weights.size() != c.ensemble_phases.size()) {
            throw ConfigError("/ensemble/weights", "need one weight per phase");
        }
    }

    if (n.has("sweep")) {
        Node s(n.raw("sweep"), "/sweep");
        SweepConfig sw;
        sw.axis = s.string("axis", "");
        if (sw.axis != "gate_time" && sw.axis != "n_sub") {
            throw ConfigError("/sweep/axis", "expected 'gate_time' or 'n_sub'");
        }
        sw.values = s.numbers("values");
        if (sw.values.empty()) {
            throw ConfigError("/sweep/values", "need at least one value");
        }
        for (size_t i = 0; i < sw.values.size(); i++) {
            std::string vpath = "/sweep/values/" + std::to_string(i);
            if (i > 0 && !(sw.values[i] > sw.values[i - 1])) {
                throw ConfigError(vpath, "values must be strictly increasing");
            }
            if (sw.axis == "n_sub" && (sw.values[i] < 1 || sw.values[i] != std::floor(sw.values[i]))) {
                throw ConfigError(vpath, "n_sub values must be positive integers");
            }
            if (sw.axis == "gate_time") {
                try {
                    pixels_for_gate_time(sw.values[i], c.pixel_ns);
                } catch (const InvalidArgument &e) {
                    throw ConfigError(vpath, e.message());
                }
            }
        }
        if (s.has("warm_start")) {
            sw.warm_start = s.boolean("warm_start", false);
        }
        s.finish();
        c.sweep = std::move(sw);
    }

    c.refinement = n.integer("refinement", c.refinement);
    if (c.refinement < 2) {
        throw ConfigError("/refinement", "must be at least 2");
    }
    c.output_dir = n.string("output_dir", c.output_dir);
    if (n.has("pulse_file")) {
        c.pulse_file = n.string("pulse_file", "");
    }
    c.parallel = n.boolean("parallel", c.parallel);
    n.finish();

    // Catch transfer/control count mismatches and invalid operators early.
    ControlProblem p = build_problem(c);
    auto diag = validate_problem(p);
    if (!diag.ok()) {
        throw ConfigError(field_to_pointer(diag.issues[0].field, "/problem"), diag.issues[0].message);
    }
    if (c.evaluation_transfers) {
        build_problem(c, true);
    }
    return c;
}

json to_json(const RunConfig &c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (c.scenario) {
        j["scenario"] = *c.scenario;
        json ph;
        ph["delta_ghz"] = c.delta_ghz;
        if (*c.scenario == "example2") {
            ph["omega1_ghz"] = c.omega1_ghz;
        }
        if (*c.scenario == "example3") {
            ph["coupling_ghz"] = c.coupling_ghz;
        }
        j["physics"] = ph;
    } else {
        const auto &p = *c.problem;
        json pj;
        pj["drift_ghz"] = matrix_to_json(p.drift_ghz);
        pj["controls"] = json::array();
        for (const auto &m : p.controls) {
            pj["controls"].push_back(matrix_to_json(m));
        }
        pj["target"] = matrix_to_json(p.target);
        pj["projector"] = matrix_to_json(p.projector);
        pj["subspace_dim"] = p.subspace_dim;
        j["problem"] = pj;
    }
    j["grid"] = {{"gate_time_ns", c.gate_time_ns},
                 {"pixel_ns", c.pixel_ns},
                 {"n_sub", c.n_sub},
                 {"sample_at_left_edge", c.sample_at_left_edge}};
    j["transfers"] = json::array();
    for (const auto &t : c.transfers) {
        j["transfers"].push_back(transfer_to_json(t));
    }
    if (c.evaluation_transfers) {
        j["evaluation_transfers"] = json::array();
        for (const auto &t : *c.evaluation_transfers) {
            j["evaluation_transfers"].push_back(transfer_to_json(t));
        }
    }
    j["optimizer"] = optimizer_to_json(c.optimizer);
    json e;
    e["size"] = c.ensemble_size;
    if (!c.ensemble_phases.empty()) {
        e["phases"] = c.ensemble_phases;
        if (!c.ensemble_weights.empty()) {
            e["weights"] = c.ensemble_weights;
        }
    }
    j["ensemble"] = e;
    if (c.sweep) {
        j["sweep"] = {{"axis", c.sweep->axis},
                      {"values", c.sweep->values},
                      {"warm_start", c.sweep->use_warm_start()}};
    }
    j["refinement"] = c.refinement;
    j["output_dir"] = c.output_dir;
    if (c.pulse_file) {
        j["pulse_file"] = *c.pulse_file;
    }
    j["parallel"] = c.parallel;
    return j;
}

ControlProblem build_problem(const RunConfig &c, bool evaluation_transfers) {
    ControlProblem p;
    if (c.scenario) {
        const std::string &s = *c.scenario;
        if (s == "example1") {
            p = build_example1_rwa(Example1Params{.delta_ghz = c.delta_ghz,
                                                  .pixel_ns = c.pixel_ns,
                                                  .gate_time_ns = c.gate_time_ns,
                                                  .n_sub = c.n_sub,
                                                  .sample_at_left_edge = c.sample_at_left_edge});
        } else if (s == "example2") {
            p = build_example2_nonrwa(Example2Params{.delta_ghz = c.delta_ghz,
                                                     .omega1_ghz = c.omega1_ghz,
                                                     .pixel_ns = c.pixel_ns,
                                                     .gate_time_ns = c.gate_time_ns,
                                                     .n_sub = c.n_sub,
                                                     .sample_at_left_edge = c.sample_at_left_edge});
        } else {
            p = build_example3_multitone(Example3Params{.coupling_ghz = c.coupling_ghz,
                                                        .delta_ghz = c.delta_ghz,
                                                        .gate_time_ns = c.gate_time_ns,
                                                        .pixel_ns = c.pixel_ns,
                                                        .n_sub = c.n_sub,
                                                        .sample_at_left_edge = c.sample_at_left_edge});
        }
    } else {
        const auto &ip = *c.problem;
        p.drift = GeneratorSampler::constant(kTwoPi * ip.drift_ghz);
        for (const auto &m : ip.controls) {
            p.controls.push_back(GeneratorSampler::constant(m));
        }
        p.target = ip.target;
        p.projector = ip.projector;
        p.subspace_dim = ip.subspace_dim;
        p.grid.pixel_width = c.pixel_ns;
        p.grid.n_sub = c.n_sub;
        p.grid.sample_at_left_edge = c.sample_at_left_edge;
    }

    const auto &configs = evaluation_transfers && c.evaluation_transfers ? *c.evaluation_transfers : c.transfers;
    const std::string where = evaluation_transfers && c.evaluation_transfers ? "/evaluation_transfers" : "/transfers";
    const size_t k = p.controls.size();
    if (configs.size() != 1 && configs.size() != k) {
        throw ConfigError(where, "expected 1 or " + std::to_string(k) + " entries, got " +
                                     std::to_string(configs.size()));
    }
    p.transfers.clear();
    for (size_t i = 0; i < k; i++) {
        p.transfers.push_back(configs[configs.size() == 1 ? 0 : i].to_spec());
    }
    for (const auto &t : p.transfers) {
        if (t.phase_dependent() && !p.phase_period) {
            p.phase_period = 2.0 * std::numbers::pi;
        }
    }
    p.padding = p.required_padding();
    p.grid.pixels = pixels_for_gate_time(c.gate_time_ns, c.pixel_ns) + 2 * p.padding;
    return p;
}

PhaseEnsemble resolved_ensemble(const RunConfig &c, const ControlProblem &problem) {
    if (!problem.phase_dependent()) {
        return PhaseEnsemble::single(0.0);
    }
    const double period = problem.phase_period.value_or(2.0 * std::numbers::pi);
    PhaseEnsemble e;
    if (c.ensemble_phases.empty()) {
        e = PhaseEnsemble::uniform(c.ensemble_size, period);
    } else {
        e.period = period;
        e.phases = c.ensemble_phases;
        e.weights = c.ensemble_weights;
        if (e.weights.empty()) {
            e.weights.assign(e.phases.size(), 1.0 / static_cast<double>(e.phases.size()));
        }
    }
    try {
        e.validate();
    } catch (const InvalidArgument &err) {
        throw ConfigError(field_to_pointer(err.field()), err.message());
    }
    return e;
}

std::string field_to_pointer(const std::string &field, const std::string &prefix) {
    std::string out = prefix + "/";
    for (char ch : field) {
        out += ch == '.' ? '/' : ch;
    }
    return out;
}

}  // namespace subgrape::cli
