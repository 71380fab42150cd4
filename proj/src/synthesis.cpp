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

#include <algorithm>
#include <cmath>

namespace uqi {

namespace {

constexpr int kMaxHalvings = 20;
constexpr double kGradientStep = 1e-6;

// Forward and backward cumulative products of the slice propagators:
// prefix[k] = U_k···U_1 (prefix[0] = I), suffix[k] = U_n···U_{k+1}.
struct Cumulative {
    std::vector<Matrix> slices;
    std::vector<Matrix> prefix;
    std::vector<Matrix> suffix;
};

Cumulative cumulative_products(const ControlModel &model, const PulseSequence &pulse) {
    const auto n = static_cast<std::size_t>(pulse.n_slices());
    const auto d = model.dim();
    Cumulative c;
    c.slices.reserve(n);
    for (const auto &a : pulse.amps) c.slices.push_back(slice_propagator(model, a, pulse.dt));
    c.prefix.assign(n + 1, Matrix::Identity(d, d));
    for (std::size_t k = 0; k < n; ++k) c.prefix[k + 1] = c.slices[k] * c.prefix[k];
    c.suffix.assign(n + 1, Matrix::Identity(d, d));
    for (std::size_t k = n; k-- > 0;) c.suffix[k] = c.suffix[k + 1] * c.slices[k];
    return c;
}

double evaluate(const ControlModel &model, const Objective &objective, const PulseSequence &pulse) {
    return objective(propagate_matrix(model, pulse));
}

void clip(PulseSequence &pulse) {
    for (auto &slice : pulse.amps) {
        for (double &a : slice) a = std::clamp(a, -pulse.amp_bound, pulse.amp_bound);
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void PulseSequence::validate() const {
    if (!(dt > 0.0)) throw InvariantError("dt", "slice duration must be positive");
    if (!(amp_bound > 0.0)) throw InvariantError("amp_bound", "amplitude bound must be positive");
    for (const auto &slice : amps) {
        for (double a : slice) {
            if (!std::isfinite(a) || std::abs(a) > amp_bound) {
                throw InvariantError("amps", "amplitude outside the bound");
            }
        }
    }
}

PulseSequence PulseSequence::zeros(int n_slices, double dt, double amp_bound) {
    PulseSequence p;
    p.dt = dt;
    p.amp_bound = amp_bound;
    p.amps.assign(static_cast<std::size_t>(n_slices), {0.0, 0.0, 0.0});
    return p;
}

void SynthesisConfig::validate() const {
    if (n_slices <= 0) throw InvariantError("n_slices", "must be positive");
    if (!(dt > 0.0)) throw InvariantError("dt", "must be positive");
    if (!(amp_bound > 0.0)) throw InvariantError("amp_bound", "must be positive");
    if (max_iters < 0) throw InvariantError("max_iters", "must be non-negative");
    if (!(target_infidelity > 0.0 && target_infidelity < 1.0)) {
        throw InvariantError("target_infidelity", "must lie in (0, 1)");
    }
    if (!(learning_rate > 0.0)) throw InvariantError("learning_rate", "must be positive");
}

ControlModel ControlModel::for_interface(const InterfaceSystem &sys) {
    const Matrix id = Matrix::Identity(sys.dim(), sys.dim());
    return {sys.drift().matrix(),
            {kron(id, Pauli::x().matrix()), kron(id, Pauli::y().matrix()), kron(id, Pauli::z().matrix())}};
}

ControlModel ControlModel::with_qubit_controls(const HermitianOperator &drift, std::span<const int> dims, int qubit) {
    if (qubit < 0 || qubit >= static_cast<int>(dims.size()) || dims[static_cast<std::size_t>(qubit)] != 2) {
        throw DimensionError("control factor must be a qubit");
    }
    const std::vector<int> target{qubit};
    ControlModel m{drift.matrix(),
                   {embed(Pauli::x().matrix(), dims, target), embed(Pauli::y().matrix(), dims, target),
                    embed(Pauli::z().matrix(), dims, target)}};
    if (m.controls[0].rows() != drift.dim()) throw DimensionError("drift does not match the tensor dims");
    return m;
}

Matrix slice_propagator(const ControlModel &model, const std::array<double, 3> &amps, double dt) {
    Matrix h = model.drift;
    for (int c = 0; c < 3; ++c) {
        if (amps[c] != 0.0) h += amps[c] * model.controls[c];
    }
    return expm_unitary(HermitianOperator(h), dt).matrix();
}

Matrix propagate_matrix(const ControlModel &model, const PulseSequence &pulse) {
    Matrix u = Matrix::Identity(model.dim(), model.dim());
    for (const auto &a : pulse.amps) u = slice_propagator(model, a, pulse.dt) * u;
    return u;
}

UnitaryOperator propagate(const ControlModel &model, const PulseSequence &pulse) {
    pulse.validate();
    return UnitaryOperator(propagate_matrix(model, pulse), "propagator");
}

UnitaryOperator propagate(const InterfaceSystem &sys, const PulseSequence &pulse) {
    return propagate(ControlModel::for_interface(sys), pulse);
}

std::vector<double> finite_difference_gradient(const ControlModel &model, const Objective &objective,
                                               const PulseSequence &pulse, double step) {
    const auto c = cumulative_products(model, pulse);
    std::vector<double> grad(3 * pulse.amps.size());
    for (std::size_t k = 0; k < pulse.amps.size(); ++k) {
        for (int ch = 0; ch < 3; ++ch) {
            auto plus = pulse.amps[k], minus = pulse.amps[k];
            plus[ch] += step;
            minus[ch] -= step;
            const double fp = objective(c.suffix[k + 1] * slice_propagator(model, plus, pulse.dt) * c.prefix[k]);
            const double fm = objective(c.suffix[k + 1] * slice_propagator(model, minus, pulse.dt) * c.prefix[k]);
            grad[3 * k + ch] = (fp - fm) / (2.0 * step);
        }
    }
    return grad;
}

double directional_derivative(const ControlModel &model, const Objective &objective, const PulseSequence &pulse,
                              std::span<const double> direction, double step) {
    if (direction.size() != 3 * pulse.amps.size()) throw DimensionError("direction length mismatch");
    PulseSequence plus = pulse, minus = pulse;
    for (std::size_t k = 0; k < pulse.amps.size(); ++k) {
        for (int ch = 0; ch < 3; ++ch) {
            plus.amps[k][ch] += step * direction[3 * k + ch];
            minus.amps[k][ch] -= step * direction[3 * k + ch];
        }
    }
    return (evaluate(model, objective, plus) - evaluate(model, objective, minus)) / (2.0 * step);
}

SynthesisResult grape_optimize(const ControlModel &model, const Objective &objective, const SynthesisConfig &cfg) {
    cfg.validate();
    SynthesisResult res;
    res.pulse = PulseSequence::zeros(cfg.n_slices, cfg.dt, cfg.amp_bound);
    double f = evaluate(model, objective, res.pulse);
    if (1.0 - f <= cfg.target_infidelity) {
        res.fidelity = std::clamp(f, 0.0, 1.0);
        res.converged = true;
        res.history.push_back(f);
        return res;
    }

    Rng rng(cfg.seed);
    const double init = cfg.amp_bound / 10.0;
    for (auto &slice : res.pulse.amps) {
        for (double &a : slice) a = rng.uniform(-init, init);
    }
    f = evaluate(model, objective, res.pulse);
    res.history.push_back(f);

    int iter = 0;
    while (iter < cfg.max_iters && 1.0 - f > cfg.target_infidelity) {
        const auto grad = finite_difference_gradient(model, objective, res.pulse, kGradientStep);
        double rate = cfg.learning_rate;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h, rate *= 0.5) {
            PulseSequence trial = res.pulse;
            for (std::size_t k = 0; k < trial.amps.size(); ++k) {
                for (int ch = 0; ch < 3; ++ch) trial.amps[k][ch] += rate * grad[3 * k + ch];
            }
            clip(trial);
            const double ft = evaluate(model, objective, trial);
            if (ft > f) {
                res.pulse = std::move(trial);
                f = ft;
                res.history.push_back(f);
                accepted = true;
                break;
            }
        }
        ++iter;
        if (!accepted) break;
    }
    res.iterations = iter;
    res.fidelity = std::clamp(f, 0.0, 1.0);
    res.converged = 1.0 - f <= cfg.target_infidelity;
    return res;
}

SynthesisResult grape_optimize(const InterfaceSystem &sys, const UnitaryOperator &target, const SynthesisConfig &cfg) {
    if (target.dim() != sys.joint_dim()) throw DimensionError("target must act on system ⊗ interface");
    const Matrix t = target.matrix();
    return grape_optimize(ControlModel::for_interface(sys), [t](const Matrix &u) { return gate_fidelity(t, u); }, cfg);
}

SynthesisResult synthesize_measurement_unitary(const InterfaceSystem &sys, const HermitianOperator &g, double theta,
                                               const SynthesisConfig &cfg) {
    if (g.dim() != sys.dim()) throw DimensionError("G must act on the system");
    const HermitianOperator generator(kron(g.matrix(), Pauli::x().matrix()));
    return grape_optimize(sys, expm_unitary(generator, theta), cfg);
}

ScanResult reachability_scan(const InterfaceSystem &sys, std::span<const double> durations, int trials,
                             const SynthesisConfig &cfg, std::uint64_t seed) {
    if (trials < 1) throw InvariantError("trials", "must be at least 1");
    for (std::size_t i = 1; i < durations.size(); ++i) {
        if (!(durations[i] > durations[i - 1])) throw InvariantError("durations", "must be strictly increasing");
    }
    const auto dim = sys.joint_dim();
    ScanResult out;
    for (double t : durations) {
        SynthesisConfig c = cfg;
        c.n_slices = std::max(1, static_cast<int>(std::lround(t / cfg.dt)));
        std::vector<double> infid;
        for (int i = 0; i < trials; ++i) {
            const auto trial_seed = seed + static_cast<std::uint64_t>(i);
            c.seed = trial_seed;
            const auto target = random_unitary(dim, trial_seed);
            infid.push_back(1.0 - grape_optimize(sys, target, c).fidelity);
        }
        out.points.push_back({t, median(std::move(infid))});
    }

    const bool positive = std::all_of(out.points.begin(), out.points.end(),
                                      [](const ScanPoint &p) { return p.median_infidelity > 0.0; });
    if (positive && out.points.size() >= 2) {
        double mt = 0.0, my = 0.0;
        for (const auto &p : out.points) {
            mt += p.duration;
            my += std::log(p.median_infidelity);
        }
        const double n = static_cast<double>(out.points.size());
        mt /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (const auto &p : out.points) {
            sxy += (p.duration - mt) * (std::log(p.median_infidelity) - my);
            sxx += (p.duration - mt) * (p.duration - mt);
        }
        const double slope = sxy / sxx;
        if (slope < 0.0) out.fitted_tau = -1.0 / (slope * static_cast<double>(dim * dim));
    }
    return out;
}

}  // namespace uqi
