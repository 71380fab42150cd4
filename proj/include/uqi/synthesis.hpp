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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "uqi/controllability.hpp"
#include "uqi/linalg.hpp"

namespace uqi {

/// Piecewise-constant interface controls. Slice k applies
/// γx·σx + γy·σy + γz·σz on the interface qubit for a time dt.
struct PulseSequence {
    double dt = 0.1;
    double amp_bound = 10.0;
    std::vector<std::array<double, 3>> amps;

    int n_slices() const { return static_cast<int>(amps.size()); }
    double duration() const { return dt * static_cast<double>(amps.size()); }
    /// Throws InvariantError if dt ≤ 0 or any amplitude exceeds the bound.
    void validate() const;

    static PulseSequence zeros(int n_slices, double dt, double amp_bound);
};

struct SynthesisConfig {
    int n_slices = 60;
    double dt = 0.1;
    double amp_bound = 10.0;
    int max_iters = 2000;
    double target_infidelity = 1e-3;
    double learning_rate = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthesisResult {
    PulseSequence pulse;
    double fidelity = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Objective after the initial evaluation and after every accepted step.
    std::vector<double> history;
};

struct ScanPoint {
    double duration = 0.0;
    double median_infidelity = 0.0;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    /// Heuristic decay time from a log-linear fit; absent when any median is
    /// zero or the fitted slope is not negative.
    std::optional<double> fitted_tau;
};

/// Drift plus three control Hamiltonians on a D-dimensional space. The
/// interface model uses drift H⊗I + A⊗σz and controls I⊗σ{x,y,z}; the network
/// module reuses it with the qubit in the middle of a three-body space.
struct ControlModel {
    Matrix drift;
    std::array<Matrix, 3> controls;

    Eigen::Index dim() const { return drift.rows(); }

    static ControlModel for_interface(const InterfaceSystem &sys);
    /// Controls act on factor `qubit` (dimension 2) of a tensor space.
    static ControlModel with_qubit_controls(const HermitianOperator &drift, std::span<const int> dims, int qubit);
};

/// Figure of merit to maximize; must not exceed 1.
using Objective = std::function<double(const Matrix &)>;

Matrix slice_propagator(const ControlModel &model, const std::array<double, 3> &amps, double dt);
Matrix propagate_matrix(const ControlModel &model, const PulseSequence &pulse);

/// U = U_n···U_1 with U_k = exp(−i(drift + Σ γ_k·σ)dt); slice 1 acts first.
UnitaryOperator propagate(const InterfaceSystem &sys, const PulseSequence &pulse);
UnitaryOperator propagate(const ControlModel &model, const PulseSequence &pulse);

/// Central-difference gradient of `objective(propagate(pulse))` with respect
/// to every amplitude, laid out slice-major (γx, γy, γz per slice).
std::vector<double> finite_difference_gradient(const ControlModel &model, const Objective &objective,
                                               const PulseSequence &pulse, double step = 1e-6);

/// (F(a + h·v) − F(a − h·v)) / 2h without amplitude clipping.
double directional_derivative(const ControlModel &model, const Objective &objective, const PulseSequence &pulse,
                              std::span<const double> direction, double step);

/// Gradient ascent on `objective` from seeded random amplitudes. The zero
/// pulse is evaluated first and returned as-is if it already meets the
/// target.
SynthesisResult grape_optimize(const ControlModel &model, const Objective &objective, const SynthesisConfig &cfg);

/// Maximizes gate_fidelity(target, propagate(sys, pulse)).
SynthesisResult grape_optimize(const InterfaceSystem &sys, const UnitaryOperator &target, const SynthesisConfig &cfg);

/// Targets exp(−iθ G⊗σx).
SynthesisResult synthesize_measurement_unitary(const InterfaceSystem &sys, const HermitianOperator &g, double theta,
                                               const SynthesisConfig &cfg);

/// Median infidelity against Haar-random targets as a function of pulse
/// duration. Trial i uses seed + i for both target and optimizer.
ScanResult reachability_scan(const InterfaceSystem &sys, std::span<const double> durations, int trials,
                             const SynthesisConfig &cfg, std::uint64_t seed);

}  // namespace uqi
