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

#include "uqi/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace uqi {

namespace {

std::vector<int> single(int f) { return {f}; }
std::vector<int> pair_of(int a, int b) { return {a, b}; }

Vector qubit_state(int sign) { return sign >= 0 ? Pauli::plus_one() : Pauli::minus_one(); }

Vector product_state(const std::vector<Vector> &factors) {
    Vector out = Vector::Ones(1);
    for (const auto &f : factors) {
        Vector next(out.size() * f.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out(i) * f;
        out = std::move(next);
    }
    return out;
}

constexpr double kNegligible = 1e-12;

std::string matrix_key(const Matrix &m) {
    std::string key;
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12e,%.12e;", m(i, j).real(), m(i, j).imag());
            key += buf;
        }
    }
    return key;
}

void check_subsystem(const NetworkSpec &net, int j, const char *what) {
    if (j < 0 || j >= net.n()) throw DimensionError(std::string(what) + ": subsystem index out of range");
}

// Target re-expressed in the (link.a, link.b) factor order.
Matrix oriented_target(const NetworkSpec &net, const ScheduledOp &op) {
    const auto &l = net.links()[static_cast<std::size_t>(op.link)];
    if (l.a == op.j) return op.unitary;
    return reorder_pair(op.unitary, net.subsystem_dim(op.j), net.subsystem_dim(op.k));
}

// Full-space propagator of a link pulse under the complete network Hamiltonian.
Matrix full_space_propagator(const NetworkSpec &net, const Matrix &h_net, int link, const PulseSequence &pulse) {
    const auto dims = net.tensor_dims();
    const auto q = single(net.qubit_factor(link));
    const std::array<Matrix, 3> controls{embed(Pauli::x().matrix(), dims, q), embed(Pauli::y().matrix(), dims, q),
                                         embed(Pauli::z().matrix(), dims, q)};
    Matrix u = Matrix::Identity(h_net.rows(), h_net.cols());
    for (const auto &a : pulse.amps) {
        Matrix h = h_net;
        for (int c = 0; c < 3; ++c) h += a[c] * controls[c];
        u = expm_unitary(HermitianOperator(h), pulse.dt).matrix() * u;
    }
    return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// NetworkSpec

NetworkSpec::NetworkSpec(std::vector<Subsystem> subsystems, std::vector<InterfaceLink> links)
    : subsystems_(std::move(subsystems)), links_(std::move(links)) {
    if (subsystems_.empty()) throw InvariantError("subsystems", "network needs at least one subsystem");
    const int n = this->n();
    adjacency_.assign(static_cast<std::size_t>(n), {});
    for (const auto &l : links_) {
        if (l.a < 0 || l.a >= n || l.b < 0 || l.b >= n) throw InvariantError("links", "link endpoint out of range");
        if (l.a == l.b) throw InvariantError("links", "link endpoints must differ");
        if (l.coupling_a.dim() != subsystem_dim(l.a) || l.coupling_b.dim() != subsystem_dim(l.b)) {
            throw InvariantError("links", "coupling dimension does not match its subsystem");
        }
        adjacency_[static_cast<std::size_t>(l.a)].push_back(l.b);
        adjacency_[static_cast<std::size_t>(l.b)].push_back(l.a);
    }
    for (auto &adj : adjacency_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }

    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<int> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : neighbors(v)) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                queue.push_back(w);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw InvariantError("links", "link graph is not connected");
    }

    double total = 1.0;
    for (int d : tensor_dims()) total *= d;
    if (total > static_cast<double>(kMaxNetworkDim)) {
        throw InvariantError("network", "total Hilbert dimension exceeds " + std::to_string(kMaxNetworkDim));
    }
}

std::vector<int> NetworkSpec::tensor_dims() const {
    std::vector<int> dims;
    for (const auto &s : subsystems_) dims.push_back(s.dim());
    dims.insert(dims.end(), links_.size(), 2);
    return dims;
}

Eigen::Index NetworkSpec::total_dim() const {
    Eigen::Index total = 1;
    for (int d : tensor_dims()) total *= d;
    return total;
}

std::vector<int> NetworkSpec::incident_links(int j) const {
    std::vector<int> out;
    for (int l = 0; l < static_cast<int>(links_.size()); ++l) {
        if (links_[static_cast<std::size_t>(l)].a == j || links_[static_cast<std::size_t>(l)].b == j) out.push_back(l);
    }
    return out;
}

std::optional<int> NetworkSpec::link_between(int j, int k) const {
    for (int l = 0; l < static_cast<int>(links_.size()); ++l) {
        const auto &x = links_[static_cast<std::size_t>(l)];
        if ((x.a == j && x.b == k) || (x.a == k && x.b == j)) return l;
    }
    return std::nullopt;
}

const HermitianOperator &NetworkSpec::coupling_on(int link, int j) const {
    const auto &l = links_.at(static_cast<std::size_t>(link));
    if (l.a == j) return l.coupling_a;
    if (l.b == j) return l.coupling_b;
    throw DimensionError("subsystem is not an endpoint of the link");
}

// ---------------------------------------------------------------------------
// Hamiltonians and decoupling

HermitianOperator network_hamiltonian(const NetworkSpec &net) {
    const auto dims = net.tensor_dims();
    const auto total = net.total_dim();
    Matrix h = Matrix::Zero(total, total);
    for (int j = 0; j < net.n(); ++j) h += embed(net.subsystems()[static_cast<std::size_t>(j)].h.matrix(), dims, single(j));
    const Matrix &z = Pauli::z().matrix();
    for (int l = 0; l < static_cast<int>(net.links().size()); ++l) {
        const auto &link = net.links()[static_cast<std::size_t>(l)];
        const int q = net.qubit_factor(l);
        h += embed(kron(link.coupling_a.matrix(), z), dims, pair_of(link.a, q));
        h += embed(kron(link.coupling_b.matrix(), z), dims, pair_of(link.b, q));
    }
    return HermitianOperator(h);
}

HermitianOperator sector_hamiltonian(const NetworkSpec &net, int j, std::span<const int> signs, int exclude_link) {
    check_subsystem(net, j, "sector_hamiltonian");
    if (!signs.empty() && signs.size() != net.links().size()) throw DimensionError("one sign per link required");
    Matrix h = net.subsystems()[static_cast<std::size_t>(j)].h.matrix();
    for (int l : net.incident_links(j)) {
        if (l == exclude_link) continue;
        const double s = signs.empty() ? 1.0 : (signs[static_cast<std::size_t>(l)] >= 0 ? 1.0 : -1.0);
        h += s * net.coupling_on(l, j).matrix();
    }
    return HermitianOperator(h);
}

HermitianOperator effective_decoupled_hamiltonian(const NetworkSpec &net, int j) {
    return sector_hamiltonian(net, j, {});
}

double verify_decoupling(const NetworkSpec &net, double t, std::uint64_t seed, std::span<const int> signs) {
    if (net.total_dim() > kMaxNetworkDim) throw InvariantError("network", "dimension cap exceeded");
    if (!signs.empty() && signs.size() != net.links().size()) throw DimensionError("one sign per link required");
    const Matrix u_full = expm_unitary(network_hamiltonian(net), t).matrix();
    std::vector<Matrix> local;
    for (int j = 0; j < net.n(); ++j) local.push_back(expm_unitary(sector_hamiltonian(net, j, signs), t).matrix());

    Rng rng(seed);
    double worst = 0.0;
    for (int sample = 0; sample < 10; ++sample) {
        std::vector<Vector> in, out;
        for (int j = 0; j < net.n(); ++j) {
            const Vector psi = random_state(net.subsystem_dim(j), rng);
            in.push_back(psi);
            out.push_back(local[static_cast<std::size_t>(j)] * psi);
        }
        for (std::size_t l = 0; l < net.links().size(); ++l) {
            const Vector q = qubit_state(signs.empty() ? 1 : signs[l]);
            in.push_back(q);
            out.push_back(q);
        }
        worst = std::max(worst, (u_full * product_state(in) - product_state(out)).norm());
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Pairwise synthesis

Matrix reorder_pair(const Matrix &u, int d_first, int d_second) {
    const Eigen::Index n = static_cast<Eigen::Index>(d_first) * d_second;
    if (u.rows() != n || u.cols() != n) throw DimensionError("reorder_pair: dimension mismatch");
    // P|x⟩|y⟩ = |y⟩|x⟩.
    Matrix p = Matrix::Zero(n, n);
    for (int x = 0; x < d_first; ++x) {
        for (int y = 0; y < d_second; ++y) p(y * d_first + x, x * d_second + y) = 1.0;
    }
    return p * u * p.adjoint();
}

Matrix swap_gate(int d) {
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    Matrix p = Matrix::Zero(n, n);
    for (int x = 0; x < d; ++x) {
        for (int y = 0; y < d; ++y) p(y * d + x, x * d + y) = 1.0;
    }
    return p;
}

ControlModel link_control_model(const NetworkSpec &net, int link) {
    if (link < 0 || link >= static_cast<int>(net.links().size())) throw DimensionError("link index out of range");
    const auto &l = net.links()[static_cast<std::size_t>(link)];
    const std::vector<int> dims{net.subsystem_dim(l.a), 2, net.subsystem_dim(l.b)};
    const Matrix &z = Pauli::z().matrix();
    const Matrix drift = embed(sector_hamiltonian(net, l.a, {}, link).matrix(), dims, single(0)) +
                         embed(sector_hamiltonian(net, l.b, {}, link).matrix(), dims, single(2)) +
                         embed(kron(l.coupling_a.matrix(), z), dims, pair_of(0, 1)) +
                         embed(kron(l.coupling_b.matrix(), z), dims, pair_of(2, 1));
    return ControlModel::with_qubit_controls(HermitianOperator(drift), dims, 1);
}

std::pair<double, double> sector_fidelity(const Matrix &target, const Matrix &v, int d_a, int d_b) {
    const Eigen::Index n = static_cast<Eigen::Index>(d_a) * d_b;
    if (target.rows() != n || v.rows() != 2 * n) throw DimensionError("sector_fidelity: dimension mismatch");
    std::vector<Eigen::Index> plus, minus;
    for (int x = 0; x < d_a; ++x) {
        for (int y = 0; y < d_b; ++y) {
            plus.push_back(static_cast<Eigen::Index>(x) * 2 * d_b + y);
            minus.push_back(static_cast<Eigen::Index>(x) * 2 * d_b + d_b + y);
        }
    }
    Complex overlap = 0.0;
    double leak = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            overlap += std::conj(target(r, c)) * v(plus[r], plus[c]);
            leak += std::norm(v(minus[r], plus[c]));
        }
    }
    return {std::abs(overlap) / static_cast<double>(n), std::sqrt(leak)};
}

PairwiseSynthesis pairwise_unitary(const NetworkSpec &net, int link, const UnitaryOperator &target,
                                   const SynthesisConfig &cfg) {
    const auto model = link_control_model(net, link);
    const auto &l = net.links()[static_cast<std::size_t>(link)];
    const int da = net.subsystem_dim(l.a), db = net.subsystem_dim(l.b);
    if (target.dim() != static_cast<Eigen::Index>(da) * db) throw DimensionError("pairwise target dimension mismatch");
    const Matrix t = target.matrix();
    const Objective objective = [t, da, db](const Matrix &v) {
        const auto [f, leak] = sector_fidelity(t, v, da, db);
        return f - leak * leak;
    };
    PairwiseSynthesis out;
    out.link = link;
    out.result = grape_optimize(model, objective, cfg);
    const auto [f, leak] = sector_fidelity(t, propagate_matrix(model, out.result.pulse), da, db);
    out.subspace_fidelity = f;
    out.leakage = leak;
    out.result.fidelity = f;
    return out;
}

// ---------------------------------------------------------------------------
// Routing and compilation

std::vector<int> route(const NetworkSpec &net, int j, int k) {
    check_subsystem(net, j, "route");
    check_subsystem(net, k, "route");
    std::vector<int> parent(static_cast<std::size_t>(net.n()), -1);
    parent[static_cast<std::size_t>(j)] = j;
    std::deque<int> queue{j};
    while (!queue.empty() && parent[static_cast<std::size_t>(k)] < 0) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : net.neighbors(v)) {
            if (parent[static_cast<std::size_t>(w)] < 0) {
                parent[static_cast<std::size_t>(w)] = v;
                queue.push_back(w);
            }
        }
    }
    std::vector<int> path{k};
    while (path.back() != j) path.push_back(parent[static_cast<std::size_t>(path.back())]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::string to_string(OpKind kind) {
    switch (kind) {
    case OpKind::RoutingSwap:
        return "routing-swap";
    case OpKind::Gate:
        return "gate";
    case OpKind::IdleFrame:
        return "idle-frame";
    }
    return "unknown";
}

namespace {

void push_pairwise(const NetworkSpec &net, CompilationReport &rep, OpKind kind, int j, int k, int gate_index,
                   const Matrix &unitary) {
    ScheduledOp op;
    op.kind = kind;
    op.j = j;
    op.k = k;
    op.link = *net.link_between(j, k);
    op.gate_index = gate_index;
    op.unitary = unitary;
    rep.schedule.push_back(std::move(op));
    ++rep.pairwise_op_count;

    ScheduledOp idle;
    idle.kind = OpKind::IdleFrame;
    for (int m = 0; m < net.n(); ++m) {
        if (m != j && m != k) idle.idle.push_back(m);
    }
    if (!idle.idle.empty()) rep.schedule.push_back(std::move(idle));
}

}  // namespace

CompilationReport compile_circuit(const NetworkSpec &net, const std::vector<CircuitGate> &gates) {
    CompilationReport rep;
    rep.n = net.n();
    rep.gate_count = static_cast<int>(gates.size());
    for (int g = 0; g < static_cast<int>(gates.size()); ++g) {
        const auto &gate = gates[static_cast<std::size_t>(g)];
        if (gate.j < 0 || gate.j >= net.n() || gate.k < 0 || gate.k >= net.n() || gate.j == gate.k) {
            throw InvariantError("gates", "gate " + std::to_string(g) + " references an invalid subsystem pair");
        }
        const Eigen::Index dim = static_cast<Eigen::Index>(net.subsystem_dim(gate.j)) * net.subsystem_dim(gate.k);
        if (gate.unitary.dim() != dim) {
            throw InvariantError("gates", "gate " + std::to_string(g) + " has the wrong dimension");
        }
        const auto path = route(net, gate.j, gate.k);
        const std::size_t hops = path.size() - 2;  // swaps needed to reach a neighbor of k
        for (std::size_t i = 0; i < hops; ++i) {
            if (net.subsystem_dim(path[i]) != net.subsystem_dim(path[i + 1])) {
                throw InvariantError("gates", "routing swap between subsystems of unequal dimension");
            }
        }
        for (std::size_t i = 0; i < hops; ++i) {
            push_pairwise(net, rep, OpKind::RoutingSwap, path[i], path[i + 1], -1, swap_gate(net.subsystem_dim(path[i])));
        }
        push_pairwise(net, rep, OpKind::Gate, path[hops], gate.k, g, gate.unitary.matrix());
        for (std::size_t i = hops; i-- > 0;) {
            push_pairwise(net, rep, OpKind::RoutingSwap, path[i], path[i + 1], -1, swap_gate(net.subsystem_dim(path[i])));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Execution

const PairwiseSynthesis &PulseCache::get(const NetworkSpec &net, int link, const Matrix &target,
                                         const SynthesisConfig &cfg) {
    auto key = std::make_pair(link, matrix_key(target));
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(std::move(key), pairwise_unitary(net, link, UnitaryOperator(target), cfg)).first;
    }
    return it->second;
}

Vector prepare_interfaces(const NetworkSpec &net, const Vector &state, std::uint64_t seed) {
    const auto dims = net.tensor_dims();
    const Matrix p_plus = Pauli::plus_one() * Pauli::plus_one().adjoint();
    const Matrix p_minus = Pauli::minus_one() * Pauli::minus_one().adjoint();
    Rng rng(seed);
    Vector psi = state / state.norm();
    for (int l = 0; l < static_cast<int>(net.links().size()); ++l) {
        const auto q = single(net.qubit_factor(l));
        const Vector plus = apply_local(p_plus, dims, q, psi);
        const double pp = plus.squaredNorm();
        const bool outcome_plus = pp >= 1.0 - kNegligible || (pp >= kNegligible && rng.uniform() < pp);
        if (outcome_plus) {
            psi = plus / std::sqrt(pp);
        } else {
            const Vector minus = apply_local(p_minus, dims, q, psi);
            psi = apply_local(Pauli::x().matrix(), dims, q, minus / minus.norm());
        }
    }
    return psi;
}

RunResult run_circuit(const NetworkSpec &net, const CompilationReport &report, const SynthesisConfig &cfg,
                      const std::vector<Vector> &initial, const RunOptions &opts, PulseCache *cache) {
    if (net.total_dim() > kMaxNetworkDim) throw InvariantError("network", "dimension cap exceeded");
    if (static_cast<int>(initial.size()) != net.n()) throw DimensionError("one initial state per subsystem required");
    std::vector<Vector> factors;
    for (int j = 0; j < net.n(); ++j) {
        const auto &v = initial[static_cast<std::size_t>(j)];
        if (v.size() != net.subsystem_dim(j) || v.norm() == 0.0) {
            throw DimensionError("initial state " + std::to_string(j) + " has the wrong dimension");
        }
        factors.push_back(v / v.norm());
    }
    Rng rng(opts.seed);
    for (std::size_t l = 0; l < net.links().size(); ++l) factors.push_back(random_state(2, rng));
    Vector psi = prepare_interfaces(net, product_state(factors), opts.seed + 1);
    Vector ideal = psi;

    PulseCache local;
    PulseCache &pulses = cache ? *cache : local;
    std::map<std::pair<int, std::string>, Matrix> full_ops;
    const auto dims = net.tensor_dims();
    const double slot = cfg.n_slices * cfg.dt;
    std::optional<Matrix> h_net;
    std::vector<std::optional<Matrix>> idle_ops(static_cast<std::size_t>(net.n()));
    auto idle_op = [&](int m) -> const Matrix & {
        auto &op = idle_ops[static_cast<std::size_t>(m)];
        if (!op) op = expm_unitary(effective_decoupled_hamiltonian(net, m), slot).matrix();
        return *op;
    };

    RunResult res;
    for (const auto &op : report.schedule) {
        if (op.kind == OpKind::IdleFrame) {
            for (int m : op.idle) {
                ideal = apply_local(idle_op(m), dims, single(m), ideal);
                if (opts.mode == ExecutionMode::Exact) psi = apply_local(idle_op(m), dims, single(m), psi);
            }
            continue;
        }
        const auto targets = pair_of(op.j, op.k);
        ideal = apply_local(op.unitary, dims, targets, ideal);
        res.total_duration += slot;
        if (opts.mode == ExecutionMode::Exact) {
            psi = apply_local(op.unitary, dims, targets, psi);
            continue;
        }

        const Matrix target = oriented_target(net, op);
        const std::size_t before = pulses.size();
        const auto &synth = pulses.get(net, op.link, target, cfg);
        if (pulses.size() != before) {
            ++res.synthesized_pulses;
            res.pairwise_fidelities.push_back(synth.subspace_fidelity);
        }
        if (synth.subspace_fidelity < opts.min_pairwise_fidelity) {
            throw SynthesisError("pairwise synthesis on link " + std::to_string(op.link) + " reached sector fidelity " +
                                 std::to_string(synth.subspace_fidelity) + " (< " +
                                 std::to_string(opts.min_pairwise_fidelity) + ") after " +
                                 std::to_string(synth.result.iterations) + " iterations");
        }
        auto key = std::make_pair(op.link, matrix_key(target));
        auto it = full_ops.find(key);
        if (it == full_ops.end()) {
            if (!h_net) h_net = network_hamiltonian(net).matrix();
            it = full_ops.emplace(std::move(key), full_space_propagator(net, *h_net, op.link, synth.result.pulse)).first;
        }
        psi = it->second * psi;
    }
    res.final_state = psi;
    res.fidelity_vs_ideal = std::clamp(std::norm(ideal.dot(psi)), 0.0, 1.0);
    return res;
}

TransferResult state_transfer(const NetworkSpec &net, int j, int k, const DensityMatrix &state,
                              const SynthesisConfig &cfg, const RunOptions &opts, PulseCache *cache) {
    check_subsystem(net, j, "state_transfer");
    check_subsystem(net, k, "state_transfer");
    if (net.subsystem_dim(j) != net.subsystem_dim(k)) throw DimensionError("state_transfer: endpoint dimensions differ");
    if (state.dim() != net.subsystem_dim(j)) throw DimensionError("state_transfer: state dimension mismatch");
    if (j == k) return {1.0, 0, state};

    const auto path = route(net, j, k);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (net.subsystem_dim(path[i]) != net.subsystem_dim(path[i + 1])) {
            throw DimensionError("state_transfer: route crosses a subsystem of different dimension");
        }
    }
    CompilationReport rep;
    rep.n = net.n();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        push_pairwise(net, rep, OpKind::RoutingSwap, path[i], path[i + 1], -1, swap_gate(net.subsystem_dim(path[i])));
    }

    PulseCache local;
    PulseCache &pulses = cache ? *cache : local;
    const auto dims = net.tensor_dims();
    const auto eig = hermitian_eig(HermitianOperator(state.matrix()));
    const int dk = net.subsystem_dim(k);
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index c = 0; c < eig.values.size(); ++c) {
        const double w = eig.values(c);
        if (w < kNegligible) continue;
        std::vector<Vector> initial;
        for (int m = 0; m < net.n(); ++m) initial.push_back(Vector::Unit(net.subsystem_dim(m), 0));
        initial[static_cast<std::size_t>(j)] = eig.vectors.col(c);
        const auto run = run_circuit(net, rep, cfg, initial, opts, &pulses);
        const Matrix full = run.final_state * run.final_state.adjoint();
        out += w * partial_trace(full, dims, single(k));
    }
    out /= out.trace().real();
    out = 0.5 * (out + out.adjoint()).eval();
    DensityMatrix output(out, "output");
    return {state_fidelity(state, output), rep.pairwise_op_count, output};
}

}  // namespace uqi
