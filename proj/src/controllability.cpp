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

#include "uqi/controllability.hpp"

#include <cmath>

namespace uqi {

namespace {

double hs_inner(const Matrix &x, const Matrix &y) {
    // Re tr(X†Y); real for Hermitian arguments.
    return (x.array().conjugate() * y.array()).sum().real();
}

// Removes the projection on `basis` twice (classical Gram–Schmidt with one
// re-orthogonalization pass).
Matrix orthogonal_part(const std::vector<Matrix> &basis, const Matrix &x) {
    Matrix r = x;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto &b : basis) r -= hs_inner(b, r) * b;
    }
    return r;
}

// Appends the normalized remainder of `candidate` when it is independent of
// the span. Candidates below the absolute noise floor `tol` are zero
// commutators and are dropped before the relative test.
bool try_extend(std::vector<Matrix> &basis, const Matrix &candidate, double tol) {
    const double norm = candidate.norm();
    if (norm <= tol) return false;
    Matrix r = orthogonal_part(basis, candidate);
    r = 0.5 * (r + r.adjoint()).eval();
    const double rn = r.norm();
    if (rn <= tol * norm) return false;
    basis.push_back(r / rn);
    return true;
}

}  // namespace

InterfaceSystem::InterfaceSystem(HermitianOperator h, HermitianOperator a) : h_(std::move(h)), a_(std::move(a)) {
    if (h_.dim() != a_.dim()) throw InvariantError("A", "coupling operator must match the system dimension");
}

HermitianOperator InterfaceSystem::drift() const {
    const Matrix i2 = Matrix::Identity(2, 2);
    return HermitianOperator(kron(h_.matrix(), i2) + kron(a_.matrix(), Pauli::z().matrix()));
}

HermitianOperator BridgeSystem::drift() const {
    const Matrix i2 = Matrix::Identity(2, 2);
    const Matrix il = Matrix::Identity(left.dim(), left.dim());
    const Matrix ir = Matrix::Identity(right.dim(), right.dim());
    const Matrix &z = Pauli::z().matrix();
    const Matrix m = kron(kron(left.h().matrix(), i2), ir) + kron(kron(left.a().matrix(), z), ir) +
                     kron(kron(il, i2), right.h().matrix()) + kron(kron(il, z), right.a().matrix());
    return HermitianOperator(m);
}

GeneratorSet &GeneratorSet::add(std::string label, HermitianOperator op) {
    if (op.dim() != dim_) throw DimensionError("generator '" + label + "' has the wrong dimension");
    gens_.push_back({std::move(label), std::move(op)});
    return *this;
}

Matrix commutator(const Matrix &x, const Matrix &y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("commutator: dimension mismatch");
    return Complex(0.0, 1.0) * (x * y - y * x);
}

HermitianOperator commutator(const HermitianOperator &x, const HermitianOperator &y) {
    return HermitianOperator(commutator(x.matrix(), y.matrix()));
}

double span_residual(const std::vector<Matrix> &basis, const Matrix &x) {
    return orthogonal_part(basis, x).norm();
}

LieAlgebraBasis generate_dla(const GeneratorSet &gens, const ClosureOptions &opts) {
    if (gens.empty()) throw InvariantError("generators", "generator set is empty");
    const auto dim = gens.dim();
    const auto full = static_cast<std::size_t>(dim * dim);

    LieAlgebraBasis out;
    out.dim = dim;
    std::vector<std::size_t> frontier;
    for (const auto &g : gens.generators()) {
        if (out.basis.size() == full) break;
        if (try_extend(out.basis, g.op.matrix(), opts.tol)) frontier.push_back(out.basis.size() - 1);
    }

    int depth = 0;
    while (!frontier.empty() && out.basis.size() < full) {
        if (depth == opts.max_depth) {
            out.saturated = false;
            break;
        }
        ++depth;
        const std::size_t existing = out.basis.size();
        std::vector<std::size_t> next;
        for (std::size_t f : frontier) {
            for (std::size_t b = 0; b < existing && out.basis.size() < full; ++b) {
                if (b == f) continue;
                const Matrix c = commutator(out.basis[b], out.basis[f]);
                if (try_extend(out.basis, c, opts.tol)) next.push_back(out.basis.size() - 1);
            }
        }
        frontier = std::move(next);
    }
    out.depth_reached = depth;
    return out;
}

std::size_t traceless_dimension(const LieAlgebraBasis &algebra, double tol) {
    const auto d = algebra.dim;
    const Matrix id = Matrix::Identity(d, d);
    std::vector<Matrix> projected;
    for (const auto &b : algebra.basis) {
        const Matrix t = b - (b.trace() / static_cast<double>(d)) * id;
        // Basis elements are unit norm, so the absolute floor doubles as the
        // relative threshold here.
        const Matrix r = orthogonal_part(projected, t);
        const double rn = r.norm();
        if (rn > tol) projected.push_back(r / rn);
    }
    return projected.size();
}

ControllabilityReport analyze_generators(const GeneratorSet &gens, const ClosureOptions &opts) {
    const auto algebra = generate_dla(gens, opts);
    ControllabilityReport rep;
    rep.algebra_dim = algebra.size();
    rep.traceless_dim = traceless_dimension(algebra, opts.tol);
    rep.required_dim = static_cast<std::size_t>(gens.dim() * gens.dim() - 1);
    rep.controllable = rep.traceless_dim == rep.required_dim;
    rep.depth_reached = algebra.depth_reached;
    rep.saturated = algebra.saturated;
    return rep;
}

GeneratorSet interface_generators(const InterfaceSystem &sys) {
    const auto d = sys.dim();
    const Matrix id = Matrix::Identity(d, d);
    GeneratorSet gens(sys.joint_dim());
    gens.add("drift", sys.drift());
    gens.add("qx", HermitianOperator(kron(id, Pauli::x().matrix())));
    gens.add("qy", HermitianOperator(kron(id, Pauli::y().matrix())));
    gens.add("qz", HermitianOperator(kron(id, Pauli::z().matrix())));
    return gens;
}

GeneratorSet bridge_generators(const BridgeSystem &bridge) {
    const Matrix il = Matrix::Identity(bridge.left.dim(), bridge.left.dim());
    const Matrix ir = Matrix::Identity(bridge.right.dim(), bridge.right.dim());
    GeneratorSet gens(bridge.joint_dim());
    gens.add("drift", bridge.drift());
    gens.add("qx", HermitianOperator(kron(kron(il, Pauli::x().matrix()), ir)));
    gens.add("qy", HermitianOperator(kron(kron(il, Pauli::y().matrix()), ir)));
    gens.add("qz", HermitianOperator(kron(kron(il, Pauli::z().matrix()), ir)));
    return gens;
}

ControllabilityReport is_controllable(const InterfaceSystem &sys, const ClosureOptions &opts) {
    return analyze_generators(interface_generators(sys), opts);
}

ControllabilityReport is_bridge_controllable(const BridgeSystem &bridge, const ClosureOptions &opts) {
    return analyze_generators(bridge_generators(bridge), opts);
}

}  // namespace uqi
