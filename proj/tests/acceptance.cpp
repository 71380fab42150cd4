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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqi/controllability.hpp"
#include "uqi/measurement.hpp"
#include "uqi/network.hpp"
#include "uqi/synthesis.hpp"

using namespace uqi;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Matrix &X() { return Pauli::x().matrix(); }
const Matrix &Y() { return Pauli::y().matrix(); }
const Matrix &Z() { return Pauli::z().matrix(); }

SynthesisConfig pairwise_config() {
    SynthesisConfig cfg;
    cfg.n_slices = 120;
    cfg.learning_rate = 2.0;
    return cfg;
}

NetworkSpec qubit_chain(const std::vector<Matrix> &h, const Matrix &coupling) {
    std::vector<Subsystem> subs;
    for (const auto &m : h) subs.push_back({HermitianOperator(m)});
    std::vector<InterfaceLink> links;
    for (int j = 0; j + 1 < static_cast<int>(h.size()); ++j) {
        links.push_back({j, j + 1, HermitianOperator(coupling), HermitianOperator(coupling)});
    }
    return NetworkSpec(subs, links);
}

bool connected(int n, const std::vector<std::pair<int, int>> &edges) {
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comp[i] = i;
    std::function<int(int)> find = [&](int v) { return comp[v] == v ? v : comp[v] = find(comp[v]); };
    for (auto [a, b] : edges) comp[find(a)] = find(b);
    for (int i = 1; i < n; ++i) {
        if (find(i) != find(0)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    int d2 = 0, d3 = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto r = is_controllable(InterfaceSystem(random_hermitian(2, 1000 + s), random_hermitian(2, 2000 + s)));
        d2 += r.controllable && r.traceless_dim == 15;
    }
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto r = is_controllable(InterfaceSystem(random_hermitian(3, 3000 + s), random_hermitian(3, 4000 + s)));
        d3 += r.controllable && r.traceless_dim == 35;
    }
    const auto zz = is_controllable(InterfaceSystem(Pauli::z(), Pauli::z()));
    const double secs = seconds_since(t0);
    const bool pass = d2 >= 49 && d3 == 20 && !zz.controllable && zz.traceless_dim == 7 && secs < 60.0;
    return {pass, "d=2 " + std::to_string(d2) + "/50, d=3 " + std::to_string(d3) + "/20, σz/σz traceless_dim " +
                      std::to_string(zz.traceless_dim) + ", " + fmt("%.1f s", secs)};
}

Outcome criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_p = 0.0, worst_state = 0.0, worst_sum = 0.0;
    Rng rng(2024);
    for (int c = 0; c < 100; ++c) {
        const int d = 2 + c % 3;
        const auto rho = random_density(d, 500 + c);
        const YesNoInstrument inst(random_hermitian(d, 700 + c), rng.uniform(0.0, 2.0 * std::numbers::pi));
        const auto p = yes_no_probabilities(rho, inst);
        const auto o = joint_oracle_measure(rho, inst);
        worst_p = std::max({worst_p, std::abs(p.p_plus - o.p_plus), std::abs(p.p_minus - o.p_minus)});
        worst_sum = std::max(worst_sum, std::abs(p.p_plus + p.p_minus - 1.0));
        const Matrix &r = rho.matrix();
        if (o.post_plus) {
            const Matrix post = inst.cos_op() * r * inst.cos_op() / p.p_plus;
            worst_state = std::max(worst_state, (post - o.post_plus->matrix()).norm());
        }
        if (o.post_minus) {
            const Matrix post = inst.sin_op() * r * inst.sin_op() / p.p_minus;
            worst_state = std::max(worst_state, (post - o.post_minus->matrix()).norm());
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_p <= 1e-10 && worst_state <= 1e-10 && worst_sum <= 1e-9 && secs < 10.0;
    return {pass, "max |Δp| " + fmt("%.2e", worst_p) + ", max ‖Δρ‖ " + fmt("%.2e", worst_state) + ", max |p₊+p₋−1| " +
                      fmt("%.2e", worst_sum) + ", " + fmt("%.2f s", secs)};
}

Outcome criterion_3() {
    double worst_mix = 0.0, worst_trace = 0.0;
    Rng rng(77);
    for (int c = 0; c < 50; ++c) {
        const int d = 2 + c % 3;
        const auto rho = random_density(d, 900 + c);
        const YesNoInstrument inst(random_hermitian(d, 1100 + c), rng.uniform(0.0, 3.0));
        const auto o = joint_oracle_measure(rho, inst);
        Matrix mix = Matrix::Zero(d, d);
        if (o.post_plus) mix += o.p_plus * o.post_plus->matrix();
        if (o.post_minus) mix += o.p_minus * o.post_minus->matrix();
        const Matrix out = yes_no_channel(rho, inst).matrix();
        worst_mix = std::max(worst_mix, (out - mix).norm());
        worst_trace = std::max(worst_trace, std::abs(out.trace().real() - 1.0));
    }
    return {worst_mix <= 1e-10 && worst_trace <= 1e-10,
            "max ‖channel − mixture‖ " + fmt("%.2e", worst_mix) + ", max |tr − 1| " + fmt("%.2e", worst_trace)};
}

Outcome criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    auto diag = [](double a, double b) {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = a;
        m(1, 1) = b;
        return m;
    };
    const KrausSet ks({diag(std::sqrt(0.5), std::sqrt(0.2)), diag(std::sqrt(0.3), std::sqrt(0.3)),
                       diag(std::sqrt(0.2), std::sqrt(0.5))},
                      true);
    const DensityMatrix rho(Matrix::Identity(2, 2) / 2.0);
    const int n = 10000;
    std::vector<int> counts(3, 0);
    for (int s = 0; s < n; ++s) ++counts[static_cast<std::size_t>(sequential_generalized_measure(rho, ks, s).outcome)];
    const std::vector<double> expected{0.35, 0.30, 0.35};
    double worst_sigma = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double p = expected[k];
        const double sigma = std::sqrt(n * p * (1.0 - p));
        worst_sigma = std::max(worst_sigma, std::abs(counts[k] - n * p) / sigma);
    }
    const double secs = seconds_since(t0);
    return {worst_sigma <= 5.0 && secs < 10.0, "counts (" + std::to_string(counts[0]) + ", " + std::to_string(counts[1]) +
                                                   ", " + std::to_string(counts[2]) + "), worst " +
                                                   fmt("%.2f σ", worst_sigma) + ", " + fmt("%.2f s", secs)};
}

Outcome criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    const InterfaceSystem sys(Pauli::x(), Pauli::z());
    const auto meas = synthesize_measurement_unitary(sys, Pauli::z(), std::numbers::pi / 4, SynthesisConfig{});

    Rng rng(21);
    auto pulse = PulseSequence::zeros(60, 0.1, 10.0);
    for (auto &s : pulse.amps) {
        for (double &a : s) a = rng.uniform(-1.0, 1.0);
    }
    SynthesisConfig cfg;
    cfg.target_infidelity = 1e-4;
    const auto self = grape_optimize(sys, propagate(sys, pulse), cfg);
    const double secs = seconds_since(t0);
    const bool pass = meas.fidelity >= 0.999 && self.fidelity >= 0.9999 && secs < 120.0;
    return {pass, "measurement unitary F " + fmt("%.6f", meas.fidelity) + " (" + std::to_string(meas.iterations) +
                      " it), realizable target F " + fmt("%.6f", self.fidelity) + " (" +
                      std::to_string(self.iterations) + " it), " + fmt("%.1f s", secs)};
}

Outcome criterion_6() {
    const InterfaceSystem sys(random_hermitian(2, 61), random_hermitian(2, 62));
    const auto model = ControlModel::for_interface(sys);
    Rng rng(6);
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
        const Matrix t = random_unitary(4, 600 + point).matrix();
        const Objective f = [t](const Matrix &u) { return gate_fidelity(t, u); };
        auto p = PulseSequence::zeros(30, 0.1, 10.0);
        for (auto &s : p.amps) {
            for (double &a : s) a = rng.uniform(-3.0, 3.0);
        }
        std::vector<double> v(90);
        for (double &x : v) x = rng.normal();
        const double d5 = directional_derivative(model, f, p, v, 1e-5);
        const double d6 = directional_derivative(model, f, p, v, 1e-6);
        worst = std::max(worst, std::abs(d5 - d6) / std::abs(d5));
    }
    return {worst <= 0.01, "max relative difference " + fmt("%.2e", worst) + " over 10 points"};
}

Outcome criterion_7() {
    std::vector<Subsystem> subs{{random_hermitian(2, 71)}, {random_hermitian(3, 72)}, {random_hermitian(2, 73)}};
    std::vector<InterfaceLink> links{{0, 1, random_hermitian(2, 74), random_hermitian(3, 75)},
                                     {1, 2, random_hermitian(3, 76), random_hermitian(2, 77)}};
    const NetworkSpec net(subs, links);
    double worst = 0.0;
    for (double t : {0.1, 1.0, 5.0}) worst = std::max(worst, verify_decoupling(net, t, 7));
    return {worst <= 1e-9, "max residual " + fmt("%.2e", worst) + " at t ∈ {0.1, 1, 5}"};
}

Outcome criterion_8() {
    int graphs = 0, worst_route = 0;
    bool route_ok = true;
    for (int n = 1; n <= 5; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
        for (unsigned mask = 0; mask < (1U << pairs.size()); ++mask) {
            std::vector<std::pair<int, int>> edges;
            for (std::size_t e = 0; e < pairs.size(); ++e) {
                if (mask & (1U << e)) edges.push_back(pairs[e]);
            }
            if (!connected(n, edges)) continue;
            ++graphs;
            std::vector<Subsystem> subs(static_cast<std::size_t>(n), Subsystem{HermitianOperator::zero(1)});
            std::vector<InterfaceLink> links;
            for (auto [a, b] : edges) links.push_back({a, b, HermitianOperator::zero(1), HermitianOperator::zero(1)});
            const NetworkSpec net(subs, links);
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    const int len = static_cast<int>(route(net, j, k).size()) - 1;
                    worst_route = std::max(worst_route, len);
                    route_ok = route_ok && len <= n - 1;
                }
            }
        }
    }

    Rng rng(8);
    bool count_ok = true;
    for (int c = 0; c < 20; ++c) {
        const int n = 2 + c % 4;
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng.uniform() * v), v);
        std::vector<Subsystem> subs;
        for (int j = 0; j < n; ++j) subs.push_back({random_hermitian(2, 800 + 10 * c + j)});
        std::vector<InterfaceLink> links;
        for (auto [a, b] : edges) links.push_back({a, b, Pauli::z(), Pauli::z()});
        const NetworkSpec net(subs, links);
        const int gates_n = 1 + static_cast<int>(rng.uniform() * 8);
        std::vector<CircuitGate> gates;
        for (int g = 0; g < gates_n; ++g) {
            const int j = static_cast<int>(rng.uniform() * n);
            const int k = (j + 1 + static_cast<int>(rng.uniform() * (n - 1))) % n;
            gates.push_back({j, k, random_unitary(4, 900 + 10 * c + g)});
        }
        const auto rep = compile_circuit(net, gates);
        count_ok = count_ok && rep.pairwise_op_count <= (2 * (n - 1) + 1) * gates_n;
    }
    return {route_ok && count_ok, std::to_string(graphs) + " connected graphs, longest route " +
                                      std::to_string(worst_route) + ", 20 circuits within (2(n−1)+1)·N: " +
                                      (count_ok ? "yes" : "no")};
}

Outcome criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = pairwise_config();
    const auto pair = qubit_chain({X(), X() + Y()}, X() + Z());
    const auto chain = qubit_chain({X(), X() + Y(), X()}, X() + Z());
    PulseCache pair_cache, chain_cache;
    Rng rng(9);
    double worst_adj = 1.0, worst_chain = 1.0;
    bool lengths_ok = true;
    for (int s = 0; s < 5; ++s) {
        const auto rho = DensityMatrix::pure(random_state(2, rng));
        const auto a = state_transfer(pair, 0, 1, rho, cfg, {}, &pair_cache);
        const auto c = state_transfer(chain, 0, 2, rho, cfg, {}, &chain_cache);
        worst_adj = std::min(worst_adj, a.fidelity);
        worst_chain = std::min(worst_chain, c.fidelity);
        lengths_ok = lengths_ok && a.schedule_length == 1 && c.schedule_length == 2;
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_adj >= 0.99 && worst_chain >= 0.98 && lengths_ok && secs < 600.0;
    return {pass, "min adjacent F " + fmt("%.5f", worst_adj) + ", min 3-chain F " + fmt("%.5f", worst_chain) + ", " +
                      fmt("%.1f s", secs)};
}

Outcome criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    const InterfaceSystem sys(Pauli::x(), HermitianOperator(X() + Z()));
    const std::vector<double> durations{0.5, 1.0, 2.0, 4.0};
    const auto res = reachability_scan(sys, durations, 5, SynthesisConfig{}, 42);
    int inversions = 0;
    bool small = true;
    std::string medians;
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        medians += (i ? ", " : "") + fmt("%.3g", res.points[i].median_infidelity);
        if (i == 0) continue;
        const double prev = res.points[i - 1].median_infidelity, cur = res.points[i].median_infidelity;
        if (cur > prev) {
            ++inversions;
            small = small && (cur - prev) <= 0.1 * prev;
        }
    }
    const bool pass = inversions == 0 || (inversions == 1 && small);
    return {pass, "medians [" + medians + "], inversions " + std::to_string(inversions) + ", " +
                      fmt("%.1f s", seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Criterion 11: CLI reruns.

Json mat(const Matrix &m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        out.push_back(row);
    }
    return out;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_cli(const std::string &command, const fs::path &in, const fs::path &out) {
    const std::string cmd = std::string("\"") + UQI_CLI_PATH + "\" " + command + " --input \"" + in.string() +
                            "\" --output \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion_11() {
    const fs::path dir = fs::temp_directory_path() / "uqi_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const Json network{{"subsystems", Json::array({{{"H", mat(X())}}, {{"H", mat(X() + Y())}}, {{"H", mat(X())}}})},
                       {"links", Json::array({{{"a", 0}, {"b", 1}, {"A_a", mat(X() + Z())}, {"A_b", mat(X() + Z())}},
                                              {{"a", 1}, {"b", 2}, {"A_a", mat(X() + Z())}, {"A_b", mat(X() + Z())}}})}};
    const Json quick{{"max_iters", 5}, {"n_slices", 20}};
    Matrix cnot = Matrix::Identity(4, 4);
    cnot.block(2, 2, 2, 2) = X();
    const Matrix rho = random_density(2, 11).matrix();

    const std::vector<std::pair<std::string, Json>> configs{
        {"synthesize", {{"command", "synthesize"}, {"seed", 11}, {"H", mat(X())}, {"A", mat(Z())},
                        {"measurement", {{"G", mat(Z())}, {"theta", 0.785}}}, {"synthesis", {{"max_iters", 50}}}}},
        {"measure", {{"command", "measure"}, {"seed", 11}, {"rho", mat(rho)},
                     {"instrument", {{"G", mat(X() + Z())}, {"theta", 0.4}}}}},
        {"scan", {{"command", "scan"}, {"seed", 11}, {"H", mat(X())}, {"A", mat(X() + Z())},
                  {"durations", {0.5, 1.0}}, {"trials", 1}, {"synthesis", {{"max_iters", 20}}}}},
        {"transfer", {{"command", "transfer"}, {"seed", 11}, {"network", network}, {"from", 0}, {"to", 2},
                      {"state", mat(rho)}, {"synthesis", quick}, {"min_pairwise_fidelity", 0.0}}},
        {"compile-run", {{"command", "compile-run"}, {"seed", 11}, {"network", network},
                         {"gates", Json::array({{{"j", 0}, {"k", 2}, {"unitary", mat(cnot)}}})},
                         {"synthesis", quick}, {"min_pairwise_fidelity", 0.0}}},
    };

    int identical = 0;
    std::string failed;
    for (const auto &[command, cfg] : configs) {
        const auto in = dir / (command + ".json");
        std::ofstream(in, std::ios::binary) << cfg.dump();
        const auto o1 = dir / (command + ".1.json"), o2 = dir / (command + ".2.json");
        bool same = run_cli(command, in, o1) == 0 && run_cli(command, in, o2) == 0;
        if (same) same = Json::parse(slurp(o1))["results"].dump() == Json::parse(slurp(o2))["results"].dump();
        if (same && command == "scan") same = slurp(dir / "scan.1.csv") == slurp(dir / "scan.2.csv");
        if (same) {
            ++identical;
        } else {
            failed += " " + command;
        }
    }
    fs::remove_all(dir);
    return {identical == static_cast<int>(configs.size()),
            std::to_string(identical) + "/" + std::to_string(configs.size()) +
                " stochastic commands byte-identical on rerun" + (failed.empty() ? "" : " (failed:" + failed + ")")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"controllability genericity", criterion_1},
        {"measurement oracle equivalence", criterion_2},
        {"channel consistency", criterion_3},
        {"sequential measurement statistics", criterion_4},
        {"synthesis capability", criterion_5},
        {"gradient sanity", criterion_6},
        {"decoupling identity", criterion_7},
        {"routing and counting bounds", criterion_8},
        {"state transfer", criterion_9},
        {"reachability trend", criterion_10},
        {"determinism", criterion_11},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
