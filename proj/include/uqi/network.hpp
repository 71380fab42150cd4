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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uqi/linalg.hpp"
#include "uqi/synthesis.hpp"

namespace uqi {

inline constexpr Eigen::Index kMaxNetworkDim = 4096;

struct Subsystem {
    HermitianOperator h;
    int dim() const { return static_cast<int>(h.dim()); }
};

/// Interface qubit joining subsystems a and b through
/// coupling_a⊗σz + coupling_b⊗σz.
struct InterfaceLink {
    int a = 0;
    int b = 0;
    HermitianOperator coupling_a;
    HermitianOperator coupling_b;
};

/// Subsystems joined by interface qubits. Tensor factor order: subsystems
/// 0..n−1, then one qubit per link in link order.
class NetworkSpec {
  public:
    NetworkSpec(std::vector<Subsystem> subsystems, std::vector<InterfaceLink> links);

    int n() const { return static_cast<int>(subsystems_.size()); }
    const std::vector<Subsystem> &subsystems() const { return subsystems_; }
    const std::vector<InterfaceLink> &links() const { return links_; }
    int subsystem_dim(int j) const { return subsystems_.at(static_cast<std::size_t>(j)).dim(); }
    int qubit_factor(int link) const { return n() + link; }

    /// Factor dimensions in tensor order.
    std::vector<int> tensor_dims() const;
    Eigen::Index total_dim() const;

    /// Sorted neighbor indices of subsystem j.
    const std::vector<int> &neighbors(int j) const { return adjacency_.at(static_cast<std::size_t>(j)); }
    std::vector<int> incident_links(int j) const;
    std::optional<int> link_between(int j, int k) const;
    /// Coupling operator that link ℓ applies to subsystem j.
    const HermitianOperator &coupling_on(int link, int j) const;

  private:
    std::vector<Subsystem> subsystems_;
    std::vector<InterfaceLink> links_;
    std::vector<std::vector<int>> adjacency_;
};

/// Σ_j H_j + Σ_links (A_a⊗σz + A_b⊗σz), lifted to the full space.
HermitianOperator network_hamiltonian(const NetworkSpec &net);

/// H_j + Σ_{links ℓ ∋ j} A_j(ℓ): the generator subsystem j sees while all of
/// its interfaces sit in |+1⟩.
HermitianOperator effective_decoupled_hamiltonian(const NetworkSpec &net, int j);

/// H_j + Σ_ℓ s_ℓ A_j(ℓ) for interface σz eigenvalues s_ℓ = ±1, skipping
/// `exclude_link`.
HermitianOperator sector_hamiltonian(const NetworkSpec &net, int j, std::span<const int> signs,
                                     int exclude_link = -1);

/// Max over 10 seeded product states of ‖U_full|ψ,s⟩ − (⊗_j e^{−i H_j^s t}|ψ_j⟩)|s⟩‖,
/// with every interface in the σz eigenstate given by `signs` (all +1 when
/// empty).
double verify_decoupling(const NetworkSpec &net, double t, std::uint64_t seed = 0, std::span<const int> signs = {});

/// Swaps the factor order of an operator on d_first ⊗ d_second.
Matrix reorder_pair(const Matrix &u, int d_first, int d_second);
Matrix swap_gate(int d);

struct PairwiseSynthesis {
    SynthesisResult result;
    int link = -1;
    /// |tr(T† V_{++})| / (d_a d_b) on the interface |+1⟩ sector.
    double subspace_fidelity = 0.0;
    /// ‖P_− V P_+‖_F.
    double leakage = 0.0;
};

/// Control model for the three-body space S_a ⊗ Q_ℓ ⊗ S_b. Each subsystem's
/// drift includes the couplings of its other links, whose qubits are in |+1⟩.
ControlModel link_control_model(const NetworkSpec &net, int link);

/// Evaluates the sector fidelity and leakage of a three-body propagator.
std::pair<double, double> sector_fidelity(const Matrix &target, const Matrix &v, int d_a, int d_b);

/// Synthesizes `target` (ordered as link.a ⊗ link.b) on the pair joined by
/// `link` while returning the interface to |+1⟩. Objective is
/// F_sub − ‖P_− V P_+‖_F².
PairwiseSynthesis pairwise_unitary(const NetworkSpec &net, int link, const UnitaryOperator &target,
                                   const SynthesisConfig &cfg);

/// Breadth-first shortest path; ties go to the lowest neighbor index.
std::vector<int> route(const NetworkSpec &net, int j, int k);

struct CircuitGate {
    int j = 0;
    int k = 0;
    /// Acts on d_j ⊗ d_k in that order.
    UnitaryOperator unitary;
};

enum class OpKind { RoutingSwap, Gate, IdleFrame };
std::string to_string(OpKind kind);

struct ScheduledOp {
    OpKind kind = OpKind::Gate;
    /// Subsystem pair, ordered as the factors of `unitary`.
    int j = -1;
    int k = -1;
    int link = -1;
    /// Index into the circuit; −1 for routing swaps and idle frames.
    int gate_index = -1;
    Matrix unitary;
    /// Subsystems idling during the preceding pairwise operation.
    std::vector<int> idle;
};

struct CompilationReport {
    std::vector<ScheduledOp> schedule;
    int pairwise_op_count = 0;
    int n = 0;
    int gate_count = 0;
};

CompilationReport compile_circuit(const NetworkSpec &net, const std::vector<CircuitGate> &gates);

class SynthesisError : public Error {
  public:
    using Error::Error;
};

/// How pairwise operations are carried out during execution.
enum class ExecutionMode {
    /// Synthesized interface pulses evolved under the full network Hamiltonian.
    Pulses,
    /// The target unitary applied directly, idle subsystems evolved exactly for
    /// one operation slot.
    Exact,
};

struct RunOptions {
    ExecutionMode mode = ExecutionMode::Pulses;
    /// Minimum sector fidelity a synthesized pulse must reach.
    double min_pairwise_fidelity = 0.99;
    /// Seeds interface preparation by measurement.
    std::uint64_t seed = 0;
};

struct RunResult {
    Vector final_state;
    double fidelity_vs_ideal = 1.0;
    double total_duration = 0.0;
    int synthesized_pulses = 0;
    /// Sector fidelity per distinct synthesized target.
    std::vector<double> pairwise_fidelities;
};

/// Caches synthesized pulses by (link, target).
class PulseCache {
  public:
    const PairwiseSynthesis &get(const NetworkSpec &net, int link, const Matrix &target, const SynthesisConfig &cfg);
    std::size_t size() const { return cache_.size(); }

  private:
    std::map<std::pair<int, std::string>, PairwiseSynthesis> cache_;
};

/// Projectively measures every interface qubit in the σz basis and flips
/// −1 outcomes with σx, leaving all interfaces in |+1⟩.
Vector prepare_interfaces(const NetworkSpec &net, const Vector &state, std::uint64_t seed);

/// Executes the schedule starting from the product of `initial` subsystem
/// states with freshly prepared interfaces, and compares with the
/// frame-corrected ideal (schedule targets plus idle evolution).
RunResult run_circuit(const NetworkSpec &net, const CompilationReport &report, const SynthesisConfig &cfg,
                      const std::vector<Vector> &initial, const RunOptions &opts = {}, PulseCache *cache = nullptr);

struct TransferResult {
    double fidelity = 1.0;
    int schedule_length = 0;
    DensityMatrix output;
};

/// Moves `state` from subsystem j to subsystem k with routed swaps; all other
/// subsystems start in their first basis state.
TransferResult state_transfer(const NetworkSpec &net, int j, int k, const DensityMatrix &state,
                              const SynthesisConfig &cfg, const RunOptions &opts = {}, PulseCache *cache = nullptr);

}  // namespace uqi
