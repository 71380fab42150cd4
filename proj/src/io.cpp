// Copyright 2026 The UQI Authors
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

#include "uqi/io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "uqi/controllability.hpp"
#include "uqi/measurement.hpp"
#include "uqi/network.hpp"
#include "uqi/synthesis.hpp"

namespace uqi::io {

namespace {

const std::set<std::string> kCommands{"analyze", "bridge", "synthesize", "measure", "scan", "transfer", "compile-run"};
const std::set<std::string> kStochastic{"synthesize", "measure", "scan", "transfer", "compile-run"};

const Json &require(const Json &obj, const std::string &key, const std::string &field) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(field + ": missing required key");
    return obj.at(key);
}

template <typename T>
T get_as(const Json &j, const std::string &field) {
    try {
        return j.get<T>();
    } catch (const Json::exception &) {
        throw ParseError(field + ": wrong type");
    }
}

template <typename T>
T get_or(const Json &obj, const std::string &key, T fallback, const std::string &field) {
    if (!obj.contains(key)) return fallback;
    return get_as<T>(obj.at(key), field);
}

std::string join(const std::string &prefix, const std::string &key) { return prefix.empty() ? key : prefix + "." + key; }

std::string indexed(const std::string &prefix, std::size_t i) { return prefix + "[" + std::to_string(i) + "]"; }

Complex complex_from_json(const Json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(field + ": entries must be [re, im] number pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

HermitianOperator hermitian_field(const Json &obj, const std::string &key, const std::string &prefix) {
    const auto field = join(prefix, key);
    return HermitianOperator(matrix_from_json(require(obj, key, field), field), field);
}

InterfaceSystem interface_from(const Json &obj, const std::string &prefix) {
    const auto h = hermitian_field(obj, "H", prefix);
    const auto a = hermitian_field(obj, "A", prefix);
    if (a.dim() != h.dim()) throw InvariantError(join(prefix, "A"), "must have the same dimension as H");
    return InterfaceSystem(h, a);
}

ClosureOptions closure_from(const Json &doc) {
    ClosureOptions opts;
    opts.tol = get_or<double>(doc, "tol", opts.tol, "tol");
    opts.max_depth = get_or<int>(doc, "max_depth", opts.max_depth, "max_depth");
    if (!(opts.tol > 0.0)) throw InvariantError("tol", "must be positive");
    if (opts.max_depth < 1) throw InvariantError("max_depth", "must be at least 1");
    return opts;
}

SynthesisConfig synthesis_from(const Json &doc, SynthesisConfig cfg, std::uint64_t seed) {
    if (doc.contains("synthesis")) {
        const Json &s = doc.at("synthesis");
        if (!s.is_object()) throw ParseError("synthesis: must be an object");
        cfg.n_slices = get_or<int>(s, "n_slices", cfg.n_slices, "synthesis.n_slices");
        cfg.dt = get_or<double>(s, "dt", cfg.dt, "synthesis.dt");
        cfg.amp_bound = get_or<double>(s, "amp_bound", cfg.amp_bound, "synthesis.amp_bound");
        cfg.max_iters = get_or<int>(s, "max_iters", cfg.max_iters, "synthesis.max_iters");
        cfg.target_infidelity = get_or<double>(s, "target_infidelity", cfg.target_infidelity, "synthesis.target_infidelity");
        cfg.learning_rate = get_or<double>(s, "learning_rate", cfg.learning_rate, "synthesis.learning_rate");
    }
    cfg.seed = seed;
    try {
        cfg.validate();
    } catch (const InvariantError &e) {
        throw InvariantError("synthesis." + e.field(), e.what());
    }
    return cfg;
}

// Network commands default to the longer, faster-stepping pairwise setting.
SynthesisConfig pairwise_defaults() {
    SynthesisConfig cfg;
    cfg.n_slices = 120;
    cfg.learning_rate = 2.0;
    return cfg;
}

NetworkSpec network_from(const Json &doc) {
    const Json &net = require(doc, "network", "network");
    const Json &subs = require(net, "subsystems", "network.subsystems");
    const Json &links = require(net, "links", "network.links");
    if (!subs.is_array() || !links.is_array()) throw ParseError("network: subsystems and links must be arrays");
    std::vector<Subsystem> subsystems;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        subsystems.push_back({hermitian_field(subs[i], "H", indexed("network.subsystems", i))});
    }
    std::vector<InterfaceLink> out;
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto p = indexed("network.links", i);
        const int a = get_as<int>(require(links[i], "a", join(p, "a")), join(p, "a"));
        const int b = get_as<int>(require(links[i], "b", join(p, "b")), join(p, "b"));
        out.push_back({a, b, hermitian_field(links[i], "A_a", p), hermitian_field(links[i], "A_b", p)});
    }
    return NetworkSpec(std::move(subsystems), std::move(out));
}

RunOptions run_options_from(const Json &doc, std::uint64_t seed) {
    RunOptions opts;
    opts.seed = seed;
    const auto mode = get_or<std::string>(doc, "mode", "pulses", "mode");
    if (mode == "pulses") {
        opts.mode = ExecutionMode::Pulses;
    } else if (mode == "exact") {
        opts.mode = ExecutionMode::Exact;
    } else {
        throw InvariantError("mode", "must be \"pulses\" or \"exact\"");
    }
    opts.min_pairwise_fidelity = get_or<double>(doc, "min_pairwise_fidelity", opts.min_pairwise_fidelity,
                                                "min_pairwise_fidelity");
    return opts;
}

Json pulse_to_json(const PulseSequence &p) {
    Json amps = Json::array();
    for (const auto &s : p.amps) amps.push_back(Json::array({s[0], s[1], s[2]}));
    return {{"dt", p.dt}, {"amp_bound", p.amp_bound}, {"n_slices", p.n_slices()}, {"duration", p.duration()},
            {"amps", amps}};
}

Json synthesis_to_json(const SynthesisResult &r) {
    return {{"fidelity", r.fidelity},     {"iterations", r.iterations}, {"converged", r.converged},
            {"history", r.history},       {"pulse", pulse_to_json(r.pulse)}};
}

Json report_to_json(const ControllabilityReport &r) {
    return {{"algebra_dim", r.algebra_dim}, {"traceless_dim", r.traceless_dim}, {"required_dim", r.required_dim},
            {"controllable", r.controllable}, {"depth_reached", r.depth_reached}, {"saturated", r.saturated},
            {"inconclusive", r.inconclusive()}};
}

Json record_to_json(const MeasurementRecord &r) {
    return {{"outcome", r.outcome}, {"label", r.label}, {"probability", r.probability},
            {"post_state", matrix_to_json(r.post_state.matrix())}};
}

std::uint64_t seed_of(const Json &doc) { return get_as<std::uint64_t>(doc.at("seed"), "seed"); }

// ---------------------------------------------------------------------------
// Per-command preparation. Everything that can fail validation happens
// before the returned closure runs.

std::function<Json()> prepare_analyze(const Json &doc) {
    const auto sys = interface_from(doc, "");
    const auto opts = closure_from(doc);
    return [sys, opts] { return report_to_json(is_controllable(sys, opts)); };
}

std::function<Json()> prepare_bridge(const Json &doc) {
    const BridgeSystem bridge{interface_from(require(doc, "left", "left"), "left"),
                              interface_from(require(doc, "right", "right"), "right")};
    const auto opts = closure_from(doc);
    return [bridge, opts] {
        Json out = report_to_json(is_bridge_controllable(bridge, opts));
        out["left"] = report_to_json(is_controllable(bridge.left, opts));
        out["right"] = report_to_json(is_controllable(bridge.right, opts));
        return out;
    };
}

std::function<Json()> prepare_synthesize(const Json &doc) {
    const auto sys = interface_from(doc, "");
    const auto cfg = synthesis_from(doc, SynthesisConfig{}, seed_of(doc));
    if (doc.contains("target") == doc.contains("measurement")) {
        throw ParseError("target: exactly one of \"target\" or \"measurement\" is required");
    }
    if (doc.contains("target")) {
        const UnitaryOperator target(matrix_from_json(doc.at("target"), "target"), "target");
        if (target.dim() != sys.joint_dim()) throw InvariantError("target", "must act on system ⊗ interface");
        return [sys, target, cfg] { return synthesis_to_json(grape_optimize(sys, target, cfg)); };
    }
    const Json &m = doc.at("measurement");
    const auto g = hermitian_field(m, "G", "measurement");
    if (g.dim() != sys.dim()) throw InvariantError("measurement.G", "must act on the system");
    const double theta = get_as<double>(require(m, "theta", "measurement.theta"), "measurement.theta");
    return [sys, g, theta, cfg] { return synthesis_to_json(synthesize_measurement_unitary(sys, g, theta, cfg)); };
}

std::function<Json()> prepare_measure(const Json &doc) {
    const DensityMatrix rho(matrix_from_json(require(doc, "rho", "rho"), "rho"), "rho");
    const auto seed = seed_of(doc);
    if (doc.contains("instrument") == doc.contains("kraus")) {
        throw ParseError("instrument: exactly one of \"instrument\" or \"kraus\" is required");
    }
    if (doc.contains("instrument")) {
        const Json &inst = doc.at("instrument");
        const auto g = hermitian_field(inst, "G", "instrument");
        if (g.dim() != rho.dim()) throw InvariantError("instrument.G", "must match the state dimension");
        const double theta = get_as<double>(require(inst, "theta", "instrument.theta"), "instrument.theta");
        const YesNoInstrument instrument(g, theta);
        return [rho, instrument, seed] {
            const auto p = yes_no_probabilities(rho, instrument);
            Json out = record_to_json(yes_no_measure(rho, instrument, seed));
            out["kind"] = "yes_no";
            out["p_plus"] = p.p_plus;
            out["p_minus"] = p.p_minus;
            return out;
        };
    }
    const Json &list = doc.at("kraus");
    if (!list.is_array()) throw ParseError("kraus: must be a list of matrices");
    std::vector<Matrix> ops;
    for (std::size_t i = 0; i < list.size(); ++i) ops.push_back(matrix_from_json(list[i], indexed("kraus", i)));
    const KrausSet ks(std::move(ops), get_or<bool>(doc, "commuting_hermitian", true, "commuting_hermitian"));
    if (ks.dim() != rho.dim()) throw InvariantError("kraus", "must match the state dimension");
    return [rho, ks, seed] {
        Json out = record_to_json(sequential_generalized_measure(rho, ks, seed));
        out["kind"] = "sequential";
        out["probabilities"] = sequential_probabilities(rho, ks);
        return out;
    };
}

std::function<Json()> prepare_scan(const Json &doc) {
    const auto sys = interface_from(doc, "");
    const auto cfg = synthesis_from(doc, SynthesisConfig{}, seed_of(doc));
    const auto durations = get_as<std::vector<double>>(require(doc, "durations", "durations"), "durations");
    if (durations.empty()) throw InvariantError("durations", "must not be empty");
    for (double t : durations) {
        if (!(t > 0.0)) throw InvariantError("durations", "must be positive");
    }
    for (std::size_t i = 1; i < durations.size(); ++i) {
        if (!(durations[i] > durations[i - 1])) throw InvariantError("durations", "must be strictly increasing");
    }
    const int trials = get_as<int>(require(doc, "trials", "trials"), "trials");
    if (trials < 1) throw InvariantError("trials", "must be at least 1");
    const auto seed = seed_of(doc);
    return [sys, cfg, durations, trials, seed] {
        const auto res = reachability_scan(sys, durations, trials, cfg, seed);
        Json points = Json::array();
        for (const auto &p : res.points) {
            points.push_back({{"duration", p.duration}, {"median_infidelity", p.median_infidelity}});
        }
        Json out{{"points", points}, {"trials", trials}};
        out["fitted_tau"] = res.fitted_tau ? Json(*res.fitted_tau) : Json(nullptr);
        return out;
    };
}

std::function<Json()> prepare_transfer(const Json &doc) {
    auto net = std::make_shared<const NetworkSpec>(network_from(doc));
    const auto seed = seed_of(doc);
    const auto cfg = synthesis_from(doc, pairwise_defaults(), seed);
    const auto opts = run_options_from(doc, seed);
    const int from = get_as<int>(require(doc, "from", "from"), "from");
    const int to = get_as<int>(require(doc, "to", "to"), "to");
    if (from < 0 || from >= net->n()) throw InvariantError("from", "subsystem index out of range");
    if (to < 0 || to >= net->n()) throw InvariantError("to", "subsystem index out of range");
    if (net->subsystem_dim(from) != net->subsystem_dim(to)) throw InvariantError("to", "endpoint dimensions differ");
    const DensityMatrix state(matrix_from_json(require(doc, "state", "state"), "state"), "state");
    if (state.dim() != net->subsystem_dim(from)) throw InvariantError("state", "must match the source dimension");
    return [net, cfg, opts, from, to, state] {
        const auto res = state_transfer(*net, from, to, state, cfg, opts);
        return Json{{"fidelity", res.fidelity},
                    {"schedule_length", res.schedule_length},
                    {"output_state", matrix_to_json(res.output.matrix())}};
    };
}

std::function<Json()> prepare_compile_run(const Json &doc) {
    auto net = std::make_shared<const NetworkSpec>(network_from(doc));
    const auto seed = seed_of(doc);
    const auto cfg = synthesis_from(doc, pairwise_defaults(), seed);
    const auto opts = run_options_from(doc, seed);
    const Json &list = require(doc, "gates", "gates");
    if (!list.is_array()) throw ParseError("gates: must be a list");
    std::vector<CircuitGate> gates;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto p = indexed("gates", i);
        const int j = get_as<int>(require(list[i], "j", join(p, "j")), join(p, "j"));
        const int k = get_as<int>(require(list[i], "k", join(p, "k")), join(p, "k"));
        const auto field = join(p, "unitary");
        gates.push_back({j, k, UnitaryOperator(matrix_from_json(require(list[i], "unitary", field), field), field)});
    }
    auto report = std::make_shared<const CompilationReport>(compile_circuit(*net, gates));

    std::vector<Vector> initial;
    if (doc.contains("initial")) {
        const Json &states = doc.at("initial");
        if (!states.is_array()) throw ParseError("initial: must be a list of vectors");
        if (static_cast<int>(states.size()) != net->n()) throw InvariantError("initial", "one state per subsystem required");
        for (std::size_t j = 0; j < states.size(); ++j) {
            const auto field = indexed("initial", j);
            Vector v = vector_from_json(states[j], field);
            if (v.size() != net->subsystem_dim(static_cast<int>(j))) throw InvariantError(field, "wrong dimension");
            if (!(v.norm() > 0.0)) throw InvariantError(field, "must be non-zero");
            initial.push_back(v / v.norm());
        }
    } else {
        for (int j = 0; j < net->n(); ++j) initial.push_back(Vector::Unit(net->subsystem_dim(j), 0));
    }

    return [net, report, cfg, opts, initial] {
        const auto res = run_circuit(*net, *report, cfg, initial, opts);
        Json schedule = Json::array();
        for (const auto &op : report->schedule) {
            Json e{{"kind", to_string(op.kind)}};
            if (op.kind == OpKind::IdleFrame) {
                e["idle"] = op.idle;
            } else {
                e["j"] = op.j;
                e["k"] = op.k;
                e["link"] = op.link;
                if (op.kind == OpKind::Gate) e["gate_index"] = op.gate_index;
            }
            schedule.push_back(std::move(e));
        }
        return Json{{"n", report->n},
                    {"gate_count", report->gate_count},
                    {"pairwise_op_count", report->pairwise_op_count},
                    {"schedule", schedule},
                    {"fidelity_vs_ideal", res.fidelity_vs_ideal},
                    {"total_duration", res.total_duration},
                    {"synthesized_pulses", res.synthesized_pulses},
                    {"pairwise_fidelities", res.pairwise_fidelities}};
    };
}

void apply_overrides(const std::string &command, Json &doc, const Overrides &o) {
    if (o.seed) doc["seed"] = *o.seed;
    const bool closure = command == "analyze" || command == "bridge";
    if (o.max_iters) {
        if (closure) {
            doc["max_depth"] = *o.max_iters;
        } else if (command != "measure") {
            doc["synthesis"]["max_iters"] = *o.max_iters;
        }
    }
    if (o.tol) {
        if (closure) {
            doc["tol"] = *o.tol;
        } else if (command != "measure") {
            doc["synthesis"]["target_infidelity"] = *o.tol;
        }
    }
}

}  // namespace

Matrix matrix_from_json(const Json &j, const std::string &field) {
    if (!j.is_array() || j.empty()) throw ParseError(field + ": matrix must be a non-empty list of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array()) throw ParseError(field + ": matrix rows must be lists");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ParseError(field + ": rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], field);
    }
    if (rows != cols) throw InvariantError(field, "matrix must be square");
    return m;
}

Json matrix_to_json(const Matrix &m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

Vector vector_from_json(const Json &j, const std::string &field) {
    if (!j.is_array() || j.empty()) throw ParseError(field + ": vector must be a non-empty list of [re, im] pairs");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], field);
    return v;
}

Json vector_to_json(const Vector &v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

bool is_known_command(const std::string &command) { return kCommands.count(command) > 0; }

PreparedRun prepare(const std::string &command, Json config, const Overrides &overrides) {
    if (!is_known_command(command)) throw ParseError("command: unknown command \"" + command + "\"");
    if (!config.is_object()) throw ParseError("config: top level must be an object");
    const auto declared = get_as<std::string>(require(config, "command", "command"), "command");
    if (declared != command) {
        throw InvariantError("command", "config declares \"" + declared + "\" but \"" + command + "\" was requested");
    }
    apply_overrides(command, config, overrides);
    if (kStochastic.count(command) && !config.contains("seed")) {
        throw InvariantError("seed", "required for command \"" + command + "\"");
    }
    if (config.contains("seed")) seed_of(config);

    PreparedRun run{command, config, {}};
    if (command == "analyze") {
        run.execute = prepare_analyze(config);
    } else if (command == "bridge") {
        run.execute = prepare_bridge(config);
    } else if (command == "synthesize") {
        run.execute = prepare_synthesize(config);
    } else if (command == "measure") {
        run.execute = prepare_measure(config);
    } else if (command == "scan") {
        run.execute = prepare_scan(config);
    } else if (command == "transfer") {
        run.execute = prepare_transfer(config);
    } else {
        run.execute = prepare_compile_run(config);
    }
    return run;
}

Json make_report(const PreparedRun &run, const Json &results, double wall_time_s) {
    return {{"command", run.command},
            {"config", run.config},
            {"results", results},
            {"artifact_version", kArtifactVersion},
            {"wall_time", wall_time_s}};
}

std::string scan_csv(const Json &results) {
    std::ostringstream out;
    out << "duration,median_infidelity\n";
    for (const auto &p : results.at("points")) {
        out << Json(p.at("duration").get<double>()).dump() << ',' << Json(p.at("median_infidelity").get<double>()).dump()
            << '\n';
    }
    return out.str();
}

void write_atomic(const std::filesystem::path &path, const std::string &contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f << contents;
        f.flush();
        if (!f) {
            f.close();
            std::filesystem::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename into " + path.string() + ": " + ec.message());
    }
}

Json read_json_file(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("input: cannot open " + path.string());
    try {
        return Json::parse(f);
    } catch (const Json::parse_error &e) {
        throw ParseError(std::string("input: ") + e.what());
    }
}

}  // namespace uqi::io
