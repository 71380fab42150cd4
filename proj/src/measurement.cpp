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

#include "uqi/measurement.hpp"

#include <algorithm>
#include <cmath>

namespace uqi {

namespace {

constexpr double kSupportCutoff = 1e-10;
constexpr double kClusterGap = 1e-8;

Matrix hermitize(const Matrix &m) { return 0.5 * (m + m.adjoint()); }

void check_dims(const DensityMatrix &rho, Eigen::Index d) {
    if (rho.dim() != d) throw DimensionError("state and instrument dimensions differ");
}

DensityMatrix branch_state(const Matrix &k, const Matrix &rho, double p) {
    return DensityMatrix(hermitize(k * rho * k.adjoint() / p), "post_state");
}

// Common eigenbasis of a commuting Hermitian family: diagonalize each member
// inside the degenerate eigenspaces left by the previous ones.
Matrix joint_eigenbasis(const std::vector<Matrix> &ops) {
    const auto d = ops.front().rows();
    Matrix v = Matrix::Identity(d, d);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> groups{{0, d}};  // (start, size)
    for (const auto &op : ops) {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> refined;
        for (const auto &[start, size] : groups) {
            const Matrix block = v.middleCols(start, size);
            const auto eig = hermitian_eig(HermitianOperator(hermitize(block.adjoint() * op * block)));
            v.middleCols(start, size) = block * eig.vectors;
            Eigen::Index s = 0;
            for (Eigen::Index i = 1; i <= size; ++i) {
                if (i == size || eig.values(i) - eig.values(i - 1) > kClusterGap) {
                    refined.emplace_back(start + s, i - s);
                    s = i;
                }
            }
        }
        groups = std::move(refined);
    }
    return v;
}

bool draw_plus(const YesNoProbabilities &p, Rng &rng) {
    if (p.p_plus < kMinBranchProbability) return false;
    if (p.p_minus < kMinBranchProbability) return true;
    return rng.uniform() < p.p_plus;
}

}  // namespace

YesNoInstrument::YesNoInstrument(HermitianOperator g, double theta) : g_(std::move(g)), theta_(theta) {
    if (!std::isfinite(theta)) throw InvariantError("theta", "must be finite");
    const auto eig = hermitian_eig(g_);
    cos_ = hermitize(hermitian_function(eig, [theta](double l) { return std::cos(theta * l); }));
    sin_ = hermitize(hermitian_function(eig, [theta](double l) { return std::sin(theta * l); }));
}

KrausSet::KrausSet(std::vector<Matrix> operators, bool commuting_hermitian)
    : ops_(std::move(operators)), commuting_hermitian_(commuting_hermitian) {
    if (ops_.empty()) throw InvariantError("kraus", "Kraus set is empty");
    const auto d = ops_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto &a : ops_) {
        if (a.rows() != d || a.cols() != d) throw InvariantError("kraus", "Kraus operators must be square and equal-sized");
        if (!all_finite(a)) throw InvariantError("kraus", "non-finite entry");
        sum += a.adjoint() * a;
    }
    if ((sum - Matrix::Identity(d, d)).norm() > tol::kValidity) {
        throw InvariantError("kraus", "completeness Σ A_k†A_k = I violated");
    }
    if (!commuting_hermitian_) return;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const auto &a = ops_[i];
        if ((a - a.adjoint()).norm() > tol::kValidity) throw InvariantError("kraus", "operator is not Hermitian");
        if (hermitian_eig(HermitianOperator(hermitize(a))).values(0) < -tol::kValidity) {
            throw InvariantError("kraus", "operator is not positive semidefinite");
        }
        for (std::size_t j = i + 1; j < ops_.size(); ++j) {
            if ((a * ops_[j] - ops_[j] * a).norm() > tol::kValidity) {
                throw InvariantError("kraus", "operators do not commute");
            }
        }
    }
}

YesNoProbabilities yes_no_probabilities(const DensityMatrix &rho, const YesNoInstrument &inst) {
    check_dims(rho, inst.dim());
    const Matrix &c = inst.cos_op();
    const Matrix &s = inst.sin_op();
    const double pp = (c * rho.matrix() * c).trace().real();
    const double pm = (s * rho.matrix() * s).trace().real();
    return {std::clamp(pp, 0.0, 1.0), std::clamp(pm, 0.0, 1.0)};
}

MeasurementRecord yes_no_measure(const DensityMatrix &rho, const YesNoInstrument &inst, std::uint64_t seed) {
    const auto p = yes_no_probabilities(rho, inst);
    Rng rng(seed);
    if (draw_plus(p, rng)) return {0, "plus", p.p_plus, branch_state(inst.cos_op(), rho.matrix(), p.p_plus)};
    return {1, "minus", p.p_minus, branch_state(inst.sin_op(), rho.matrix(), p.p_minus)};
}

OracleMeasurement joint_oracle_measure(const DensityMatrix &rho, const YesNoInstrument &inst) {
    check_dims(rho, inst.dim());
    const auto d = inst.dim();
    const Matrix plus = Pauli::plus_one() * Pauli::plus_one().adjoint();
    const Matrix minus = Pauli::minus_one() * Pauli::minus_one().adjoint();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix joint = kron(rho.matrix(), plus);
    const Matrix u = expm_unitary(HermitianOperator(kron(inst.g().matrix(), Pauli::x().matrix())), inst.theta()).matrix();
    const Matrix evolved = u * joint * u.adjoint();

    const std::vector<int> dims{static_cast<int>(d), 2};
    const std::vector<int> keep{0};
    OracleMeasurement out;
    auto branch = [&](const Matrix &proj, double &p, std::optional<DensityMatrix> &post) {
        const Matrix pk = kron(id, proj);
        const Matrix projected = pk * evolved * pk;
        p = std::clamp(projected.trace().real(), 0.0, 1.0);
        if (p >= kMinBranchProbability) {
            post.emplace(hermitize(partial_trace(projected, dims, keep) / p), "post_state");
        }
    };
    branch(plus, out.p_plus, out.post_plus);
    branch(minus, out.p_minus, out.post_minus);
    return out;
}

DensityMatrix yes_no_channel(const DensityMatrix &rho, const YesNoInstrument &inst) {
    check_dims(rho, inst.dim());
    const Matrix &c = inst.cos_op();
    const Matrix &s = inst.sin_op();
    return DensityMatrix(hermitize(c * rho.matrix() * c + s * rho.matrix() * s));
}

DensityMatrix apply_kraus_channel(const DensityMatrix &rho, const KrausSet &ks) {
    check_dims(rho, ks.dim());
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const auto &a : ks.operators()) out += a * rho.matrix() * a.adjoint();
    return DensityMatrix(hermitize(out));
}

std::vector<YesNoInstrument> sequential_instruments(const KrausSet &ks) {
    if (!ks.commuting_hermitian()) {
        throw UnsupportedKrausSetError("sequential measurement requires a commuting Hermitian Kraus set");
    }
    const auto &ops = ks.operators();
    const auto d = ks.dim();
    const Matrix v = joint_eigenbasis(ops);

    // Diagonal of each A_k in the shared basis.
    std::vector<RealVector> diag;
    for (const auto &a : ops) {
        const Matrix m = v.adjoint() * a * v;
        diag.push_back(m.diagonal().real().cwiseMax(0.0));
    }

    std::vector<YesNoInstrument> steps;
    RealVector remaining = RealVector::Ones(d);
    for (std::size_t k = 0; k + 1 < ops.size(); ++k) {
        Vector angles(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double r = remaining(i);
            const double b = r > kSupportCutoff ? std::clamp(diag[k](i) / std::sqrt(r), 0.0, 1.0) : 0.0;
            angles(i) = std::acos(b);
        }
        const Matrix g = hermitize(v * angles.asDiagonal() * v.adjoint());
        steps.emplace_back(HermitianOperator(g), 1.0);
        remaining = (remaining - diag[k].cwiseAbs2()).cwiseMax(0.0);
    }
    return steps;
}

std::vector<double> sequential_probabilities(const DensityMatrix &rho, const KrausSet &ks) {
    check_dims(rho, ks.dim());
    const auto steps = sequential_instruments(ks);
    std::vector<double> probs;
    double survive = 1.0;
    Matrix state = rho.matrix();
    for (const auto &step : steps) {
        const auto p = yes_no_probabilities(DensityMatrix(state), step);
        probs.push_back(survive * p.p_plus);
        survive *= p.p_minus;
        if (p.p_minus < kMinBranchProbability) {
            // No probability left to carry forward.
            probs.resize(ks.size(), 0.0);
            return probs;
        }
        state = hermitize(step.sin_op() * state * step.sin_op() / p.p_minus);
    }
    probs.push_back(survive);
    return probs;
}

MeasurementRecord sequential_generalized_measure(const DensityMatrix &rho, const KrausSet &ks, std::uint64_t seed) {
    check_dims(rho, ks.dim());
    const auto steps = sequential_instruments(ks);
    Rng rng(seed);
    double probability = 1.0;
    Matrix state = rho.matrix();
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto p = yes_no_probabilities(DensityMatrix(state), steps[k]);
        if (draw_plus(p, rng)) {
            const auto idx = static_cast<int>(k);
            return {idx, std::to_string(idx), probability * p.p_plus, branch_state(steps[k].cos_op(), state, p.p_plus)};
        }
        probability *= p.p_minus;
        state = hermitize(steps[k].sin_op() * state * steps[k].sin_op() / p.p_minus);
    }
    const auto last = static_cast<int>(steps.size());
    return {last, std::to_string(last), probability, DensityMatrix(state, "post_state")};
}

}  // namespace uqi
