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

#include "uqi/synthesis.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

using namespace uqi;

namespace {

InterfaceSystem free_interface(int d) { return InterfaceSystem(HermitianOperator::zero(d), HermitianOperator::zero(d)); }

InterfaceSystem controllable_qubit() {
    return InterfaceSystem(Pauli::x(), HermitianOperator(Pauli::x().matrix() + Pauli::z().matrix()));
}

PulseSequence random_pulse(int n, double dt, double bound, std::uint64_t seed) {
    Rng rng(seed);
    auto p = PulseSequence::zeros(n, dt, bound);
    for (auto &s : p.amps) {
        for (double &a : s) a = rng.uniform(-bound, bound);
    }
    return p;
}

double max_unitarity_error(const Matrix &u) {
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(pulse_sequence, validation) {
    auto p = PulseSequence::zeros(4, 0.1, 1.0);
    EXPECT_EQ(p.n_slices(), 4);
    EXPECT_DOUBLE_EQ(p.duration(), 0.4);
    EXPECT_NO_THROW(p.validate());
    p.amps[2][1] = 1.5;
    EXPECT_THROW(p.validate(), InvariantError);
    p.amps[2][1] = 0.0;
    p.dt = 0.0;
    EXPECT_THROW(p.validate(), InvariantError);
    p.dt = 0.1;
    p.amps[0][0] = std::nan("");
    EXPECT_THROW(p.validate(), InvariantError);
}

TEST(synthesis_config, validation) {
    SynthesisConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.n_slices = 0;
    EXPECT_THROW(cfg.validate(), InvariantError);
    cfg = {};
    cfg.learning_rate = -1.0;
    EXPECT_THROW(cfg.validate(), InvariantError);
    cfg = {};
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), InvariantError);
}

TEST(propagate, pure_interface_rotation_closed_form) {
    const auto sys = free_interface(2);
    auto p = PulseSequence::zeros(7, 0.13, 10.0);
    const double g = 1.7;
    for (auto &s : p.amps) s = {g, 0.0, 0.0};
    const double phi = g * p.duration();
    const Matrix rot = std::cos(phi) * Matrix::Identity(2, 2) - Complex(0, std::sin(phi)) * Pauli::x().matrix();
    const Matrix expected = kron(Matrix::Identity(2, 2), rot);
    EXPECT_LT((propagate(sys, p).matrix() - expected).norm(), 1e-12);
}

TEST(propagate, half_slices_compose_to_full_slice) {
    const InterfaceSystem sys(random_hermitian(3, 1), random_hermitian(3, 2));
    const auto full = random_pulse(5, 0.2, 3.0, 4);
    auto half = PulseSequence::zeros(10, 0.1, 3.0);
    for (int k = 0; k < 5; ++k) half.amps[2 * k] = half.amps[2 * k + 1] = full.amps[static_cast<std::size_t>(k)];
    EXPECT_LT((propagate(sys, full).matrix() - propagate(sys, half).matrix()).norm(), 1e-11);
}

TEST(propagate, first_slice_acts_first) {
    const InterfaceSystem sys(random_hermitian(2, 5), random_hermitian(2, 6));
    const auto model = ControlModel::for_interface(sys);
    const auto p = random_pulse(2, 0.3, 2.0, 7);
    const Matrix expected = slice_propagator(model, p.amps[1], 0.3) * slice_propagator(model, p.amps[0], 0.3);
    EXPECT_LT((propagate(sys, p).matrix() - expected).norm(), 1e-12);
}

TEST(propagate, stays_unitary_over_many_slices) {
    for (int d : {2, 3}) {
        const InterfaceSystem sys(random_hermitian(d, 10 + d), random_hermitian(d, 20 + d));
        const Matrix u = propagate(sys, random_pulse(200, 0.1, 10.0, 30 + d)).matrix();
        EXPECT_LT(max_unitarity_error(u), 1e-8 * static_cast<double>(2 * d));
    }
}

TEST(propagate, time_reversed_pulse_inverts_free_interface) {
    const auto sys = free_interface(2);
    const auto p = random_pulse(12, 0.1, 5.0, 3);
    auto back = p;
    for (std::size_t k = 0; k < p.amps.size(); ++k) {
        for (int c = 0; c < 3; ++c) back.amps[k][c] = -p.amps[p.amps.size() - 1 - k][c];
    }
    const Matrix u = propagate(sys, back).matrix() * propagate(sys, p).matrix();
    EXPECT_LT((u - Matrix::Identity(4, 4)).norm(), 1e-11);
}

TEST(propagate, rejects_out_of_bound_amplitudes) {
    auto p = PulseSequence::zeros(3, 0.1, 1.0);
    p.amps[1][2] = 2.0;
    EXPECT_THROW(propagate(free_interface(2), p), InvariantError);
}

TEST(finite_difference_gradient, matches_closed_form_rotation) {
    // One slice, target I⊗e^{−iφσx}: F(γ) = |cos(γ·dt − φ)|.
    const auto sys = free_interface(2);
    const auto model = ControlModel::for_interface(sys);
    const double dt = 0.25, phi = 0.4;
    const Matrix t = kron(Matrix::Identity(2, 2), expm_unitary(Pauli::x(), phi).matrix());
    const Objective f = [t](const Matrix &u) { return gate_fidelity(t, u); };
    auto p = PulseSequence::zeros(1, dt, 10.0);
    for (double g : {-2.0, 0.3, 1.1, 4.0}) {
        p.amps[0] = {g, 0.0, 0.0};
        const auto grad = finite_difference_gradient(model, f, p);
        const double c = std::cos(g * dt - phi);
        const double expected = -dt * std::sin(g * dt - phi) * (c >= 0 ? 1.0 : -1.0);
        EXPECT_NEAR(grad[0], expected, 1e-8);
    }
}

TEST(finite_difference_gradient, step_sizes_agree_and_match_directional_derivative) {
    const auto sys = controllable_qubit();
    const auto model = ControlModel::for_interface(sys);
    const Matrix t = random_unitary(4, 9).matrix();
    const Objective f = [t](const Matrix &u) { return gate_fidelity(t, u); };
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = random_pulse(20, 0.1, 3.0, 100 + trial);
        std::vector<double> v(60);
        for (double &x : v) x = rng.normal();
        const double d5 = directional_derivative(model, f, p, v, 1e-5);
        const double d6 = directional_derivative(model, f, p, v, 1e-6);
        EXPECT_LE(std::abs(d5 - d6), 0.01 * std::abs(d5));

        const auto grad = finite_difference_gradient(model, f, p);
        double dot = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += grad[i] * v[i];
        EXPECT_NEAR(dot, d6, 1e-6 * (1.0 + std::abs(d6)));
    }
}

TEST(grape_optimize, identity_target_on_free_interface_converges_immediately) {
    const auto res = grape_optimize(free_interface(2), UnitaryOperator::identity(4), SynthesisConfig{});
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 0);
    EXPECT_NEAR(res.fidelity, 1.0, 1e-12);
    for (const auto &s : res.pulse.amps) {
        for (double a : s) EXPECT_EQ(a, 0.0);
    }
}

TEST(grape_optimize, history_is_non_decreasing_and_bounded) {
    SynthesisConfig cfg;
    cfg.max_iters = 60;
    const auto res = grape_optimize(controllable_qubit(), random_unitary(4, 5), cfg);
    ASSERT_GE(res.history.size(), 2U);
    for (std::size_t i = 1; i < res.history.size(); ++i) EXPECT_GE(res.history[i], res.history[i - 1]);
    EXPECT_LE(res.fidelity, 1.0);
    for (const auto &s : res.pulse.amps) {
        for (double a : s) EXPECT_LE(std::abs(a), cfg.amp_bound);
    }
}

TEST(grape_optimize, deterministic_for_fixed_seed) {
    SynthesisConfig cfg;
    cfg.max_iters = 20;
    cfg.seed = 17;
    const auto a = grape_optimize(controllable_qubit(), random_unitary(4, 1), cfg);
    const auto b = grape_optimize(controllable_qubit(), random_unitary(4, 1), cfg);
    EXPECT_EQ(a.history, b.history);
    EXPECT_EQ(a.pulse.amps, b.pulse.amps);
}

TEST(grape_optimize, recovers_realizable_target) {
    const InterfaceSystem sys(Pauli::x(), Pauli::z());
    const auto target = propagate(sys, random_pulse(60, 0.1, 1.0, 21));
    SynthesisConfig cfg;
    cfg.target_infidelity = 1e-4;
    const auto res = grape_optimize(sys, target, cfg);
    EXPECT_TRUE(res.converged);
    EXPECT_GE(res.fidelity, 0.9999);
    EXPECT_NEAR(gate_fidelity(target, propagate(sys, res.pulse)), res.fidelity, 1e-12);
}

TEST(grape_optimize, rejects_wrong_target_dimension) {
    EXPECT_THROW(grape_optimize(controllable_qubit(), random_unitary(2, 1), SynthesisConfig{}), DimensionError);
}

TEST(synthesize_measurement_unitary, qubit_reference_case) {
    const InterfaceSystem sys(Pauli::x(), Pauli::z());
    const auto res = synthesize_measurement_unitary(sys, Pauli::z(), std::numbers::pi / 4, SynthesisConfig{});
    EXPECT_GE(res.fidelity, 0.999);
    const auto target = expm_unitary(HermitianOperator(kron(Pauli::z().matrix(), Pauli::x().matrix())), std::numbers::pi / 4);
    EXPECT_NEAR(gate_fidelity(target, propagate(sys, res.pulse)), res.fidelity, 1e-12);
}

TEST(synthesize_measurement_unitary, trivial_generators_on_free_interface) {
    const auto sys = free_interface(2);
    const auto a = synthesize_measurement_unitary(sys, Pauli::z(), 0.0, SynthesisConfig{});
    const auto b = synthesize_measurement_unitary(sys, HermitianOperator::zero(2), 1.3, SynthesisConfig{});
    for (const auto &r : {a, b}) {
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.iterations, 0);
    }
    EXPECT_THROW(synthesize_measurement_unitary(sys, HermitianOperator::zero(3), 1.0, SynthesisConfig{}),
                 DimensionError);
}

TEST(reachability_scan, deterministic_and_shaped) {
    SynthesisConfig cfg;
    cfg.max_iters = 30;
    const std::vector<double> durations{0.5, 1.0};
    const auto a = reachability_scan(controllable_qubit(), durations, 2, cfg, 5);
    const auto b = reachability_scan(controllable_qubit(), durations, 2, cfg, 5);
    ASSERT_EQ(a.points.size(), 2U);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_DOUBLE_EQ(a.points[i].duration, durations[i]);
        EXPECT_EQ(a.points[i].median_infidelity, b.points[i].median_infidelity);
        EXPECT_GE(a.points[i].median_infidelity, 0.0);
        EXPECT_LE(a.points[i].median_infidelity, 1.0);
    }
    EXPECT_EQ(a.fitted_tau, b.fitted_tau);
}

TEST(reachability_scan, long_duration_reaches_haar_targets) {
    const std::vector<double> durations{6.0};
    const auto res = reachability_scan(controllable_qubit(), durations, 3, SynthesisConfig{}, 42);
    ASSERT_EQ(res.points.size(), 1U);
    EXPECT_LT(res.points[0].median_infidelity, 1e-3);
    EXPECT_FALSE(res.fitted_tau.has_value());
}

TEST(reachability_scan, rejects_bad_arguments) {
    const std::vector<double> unsorted{1.0, 0.5};
    EXPECT_THROW(reachability_scan(controllable_qubit(), unsorted, 2, SynthesisConfig{}, 0), InvariantError);
    const std::vector<double> ok{1.0};
    EXPECT_THROW(reachability_scan(controllable_qubit(), ok, 0, SynthesisConfig{}, 0), InvariantError);
}
