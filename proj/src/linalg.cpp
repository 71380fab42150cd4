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

#include "uqi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uqi {

namespace {

void require_square(const Matrix &m, const std::string &field) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvariantError(field, "matrix must be square and non-empty");
    }
    if (!all_finite(m)) throw InvariantError(field, "matrix has non-finite entries");
}

// Offsets of every multi-index over `factors` (first listed factor most
// significant) inside the full row-major tensor index space.
std::vector<Eigen::Index> factor_offsets(std::span<const int> dims, std::span<const int> factors) {
    std::vector<Eigen::Index> strides(dims.size());
    Eigen::Index s = 1;
    for (std::size_t i = dims.size(); i-- > 0;) {
        strides[i] = s;
        s *= dims[i];
    }
    std::vector<Eigen::Index> out{0};
    for (int f : factors) {
        std::vector<Eigen::Index> next;
        next.reserve(out.size() * static_cast<std::size_t>(dims[f]));
        for (Eigen::Index base : out) {
            for (int k = 0; k < dims[f]; ++k) next.push_back(base + k * strides[f]);
        }
        out = std::move(next);
    }
    return out;
}

Eigen::Index checked_total(std::span<const int> dims) {
    Eigen::Index total = 1;
    for (int d : dims) {
        if (d <= 0) throw DimensionError("factor dimensions must be positive");
        total *= d;
    }
    return total;
}

std::vector<int> validated_targets(std::span<const int> dims, std::span<const int> targets) {
    std::vector<int> t(targets.begin(), targets.end());
    std::vector<int> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DimensionError("repeated factor index");
    }
    for (int f : t) {
        if (f < 0 || f >= static_cast<int>(dims.size())) throw DimensionError("factor index out of range");
    }
    return t;
}

std::vector<int> complement(std::size_t n, std::span<const int> factors) {
    std::vector<int> rest;
    for (int i = 0; i < static_cast<int>(n); ++i) {
        if (std::find(factors.begin(), factors.end(), i) == factors.end()) rest.push_back(i);
    }
    return rest;
}

}  // namespace

bool all_finite(const Matrix &m) {
    return m.array().real().allFinite() && m.array().imag().allFinite();
}

bool is_hermitian(const Matrix &m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= rel_tol * std::max(1.0, m.norm());
}

double frobenius(const Matrix &m) { return m.norm(); }

// ---------------------------------------------------------------------------
// Operator types

HermitianOperator::HermitianOperator(Matrix m, const std::string &field) : m_(std::move(m)) {
    require_square(m_, field);
    if (!is_hermitian(m_)) throw InvariantError(field, "matrix is not Hermitian");
}

HermitianOperator HermitianOperator::zero(Eigen::Index d) {
    return HermitianOperator(Matrix::Zero(d, d));
}

HermitianOperator HermitianOperator::identity(Eigen::Index d) {
    return HermitianOperator(Matrix::Identity(d, d));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator &o) const {
    if (dim() != o.dim()) throw DimensionError("Hermitian sum of unequal dimensions");
    return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator &o) const {
    if (dim() != o.dim()) throw DimensionError("Hermitian difference of unequal dimensions");
    return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s); }

UnitaryOperator::UnitaryOperator(Matrix m, const std::string &field) : m_(std::move(m)) {
    require_square(m_, field);
    const auto d = m_.rows();
    const double residual = (m_.adjoint() * m_ - Matrix::Identity(d, d)).norm();
    if (residual > tol::kValidity * static_cast<double>(d)) {
        throw InvariantError(field, "matrix is not unitary (residual " + std::to_string(residual) + ")");
    }
}

UnitaryOperator UnitaryOperator::identity(Eigen::Index d) {
    return UnitaryOperator(Matrix::Identity(d, d));
}

UnitaryOperator UnitaryOperator::adjoint() const { return UnitaryOperator(m_.adjoint()); }

UnitaryOperator UnitaryOperator::operator*(const UnitaryOperator &o) const {
    if (dim() != o.dim()) throw DimensionError("unitary product of unequal dimensions");
    return UnitaryOperator(m_ * o.m_);
}

DensityMatrix::DensityMatrix(Matrix m, const std::string &field) : m_(std::move(m)) {
    require_square(m_, field);
    if (!is_hermitian(m_)) throw InvariantError(field, "density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > tol::kValidity) {
        throw InvariantError(field, "density matrix trace is not 1");
    }
    const auto eig = hermitian_eig(HermitianOperator(m_, field));
    if (eig.values(0) < -tol::kValidity) {
        throw InvariantError(field, "density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::pure(const Vector &psi) {
    const double n = psi.norm();
    if (n == 0.0) throw InvariantError("psi", "zero state vector");
    const Vector v = psi / n;
    return DensityMatrix(v * v.adjoint());
}

const HermitianOperator &Pauli::x() {
    static const HermitianOperator m = [] {
        Matrix s(2, 2);
        s << 0, 1, 1, 0;
        return HermitianOperator(s);
    }();
    return m;
}

const HermitianOperator &Pauli::y() {
    static const HermitianOperator m = [] {
        Matrix s(2, 2);
        s << 0, Complex(0, -1), Complex(0, 1), 0;
        return HermitianOperator(s);
    }();
    return m;
}

const HermitianOperator &Pauli::z() {
    static const HermitianOperator m = [] {
        Matrix s(2, 2);
        s << 1, 0, 0, -1;
        return HermitianOperator(s);
    }();
    return m;
}

const HermitianOperator &Pauli::id() {
    static const HermitianOperator m = HermitianOperator::identity(2);
    return m;
}

const Vector &Pauli::plus_one() {
    static const Vector v = Vector::Unit(2, 0);
    return v;
}

const Vector &Pauli::minus_one() {
    static const Vector v = Vector::Unit(2, 1);
    return v;
}

// ---------------------------------------------------------------------------
// Tensor utilities

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix kron(std::span<const Matrix> factors) {
    if (factors.empty()) return Matrix::Identity(1, 1);
    Matrix out = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

Matrix partial_trace(const Matrix &m, std::span<const int> dims, std::span<const int> keep) {
    const auto total = checked_total(dims);
    if (m.rows() != total || m.cols() != total) {
        throw DimensionError("partial_trace: product of dims does not match matrix dimension");
    }
    std::vector<int> kept = validated_targets(dims, keep);
    std::sort(kept.begin(), kept.end());
    const auto traced = complement(dims.size(), kept);
    const auto off_keep = factor_offsets(dims, kept);
    const auto off_trace = factor_offsets(dims, traced);

    const auto n = static_cast<Eigen::Index>(off_keep.size());
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            Complex acc = 0.0;
            for (Eigen::Index t : off_trace) acc += m(off_keep[r] + t, off_keep[c] + t);
            out(r, c) = acc;
        }
    }
    return out;
}

Matrix embed(const Matrix &op, std::span<const int> dims, std::span<const int> targets) {
    const auto total = checked_total(dims);
    const auto t = validated_targets(dims, targets);
    const auto off_t = factor_offsets(dims, t);
    const auto off_r = factor_offsets(dims, complement(dims.size(), t));
    const auto n = static_cast<Eigen::Index>(off_t.size());
    if (op.rows() != n || op.cols() != n) throw DimensionError("embed: operator does not match target dims");

    Matrix out = Matrix::Zero(total, total);
    for (Eigen::Index r : off_r) {
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = 0; b < n; ++b) out(off_t[a] + r, off_t[b] + r) = op(a, b);
        }
    }
    return out;
}

Vector apply_local(const Matrix &op, std::span<const int> dims, std::span<const int> targets,
                   const Vector &psi) {
    const auto total = checked_total(dims);
    if (psi.size() != total) throw DimensionError("apply_local: state dimension mismatch");
    const auto t = validated_targets(dims, targets);
    const auto off_t = factor_offsets(dims, t);
    const auto off_r = factor_offsets(dims, complement(dims.size(), t));
    const auto n = static_cast<Eigen::Index>(off_t.size());
    if (op.rows() != n || op.cols() != n) throw DimensionError("apply_local: operator does not match target dims");

    Vector out(total);
    Vector chunk(n);
    for (Eigen::Index r : off_r) {
        for (Eigen::Index a = 0; a < n; ++a) chunk(a) = psi(off_t[a] + r);
        const Vector mapped = op * chunk;
        for (Eigen::Index a = 0; a < n; ++a) out(off_t[a] + r) = mapped(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectral routines

EigenDecomposition hermitian_eig(const HermitianOperator &h) {
    constexpr int kMaxSweeps = 100;
    const auto n = h.dim();
    Matrix a = h.matrix();
    Matrix v = Matrix::Identity(n, n);
    const double threshold = tol::kConvergence * std::max(1.0, a.norm());

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j) s += std::norm(a(i, j));
            }
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < kMaxSweeps && off_norm() > threshold; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double mag = std::abs(b);
                if (mag < 1e-300) continue;
                const Complex e = b / mag;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex jpq = s * e;
                const Complex jqp = -s * std::conj(e);

                // a <- a J
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + jqp * akq;
                    a(k, q) = jpq * akp + c * akq;
                }
                // a <- J† a
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + jqp * vkq;
                    v(k, q) = jpq * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
    EigenDecomposition out{RealVector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[k], order[k]).real();
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

UnitaryOperator expm_unitary(const HermitianOperator &h, double t) {
    const auto eig = hermitian_eig(h);
    return UnitaryOperator(hermitian_function(eig, [t](double lambda) {
        return std::exp(Complex(0.0, -lambda * t));
    }));
}

double gate_fidelity(const Matrix &u, const Matrix &v) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) throw DimensionError("gate_fidelity: dimension mismatch");
    const double f = std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
    return std::clamp(f, 0.0, 1.0);
}

double gate_fidelity(const UnitaryOperator &u, const UnitaryOperator &v) {
    return gate_fidelity(u.matrix(), v.matrix());
}

Matrix psd_sqrt(const Matrix &m) {
    const auto eig = hermitian_eig(HermitianOperator(m));
    // Spectrum below the rounding floor is treated as an exact zero; its
    // square root would otherwise inject O(1e-8) noise.
    const double floor = 1e-13 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    return hermitian_function(eig, [floor](double lambda) { return lambda > floor ? std::sqrt(lambda) : 0.0; });
}

double state_fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("state_fidelity: dimension mismatch");
    const Matrix root = psd_sqrt(rho.matrix());
    Matrix inner = root * sigma.matrix() * root;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    const auto eig = hermitian_eig(HermitianOperator(inner));
    double tr = 0.0;
    const double floor = 1e-13 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) > floor) tr += std::sqrt(eig.values(i));
    }
    return std::clamp(tr * tr, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Random ensembles

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
}

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    Matrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
    }
    return g;
}

HermitianOperator random_hermitian(Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    const Matrix x = ginibre(d, d, rng);
    return HermitianOperator(0.5 * (x + x.adjoint()));
}

DensityMatrix random_density(Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    const Matrix g = ginibre(d, d, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(rho);
}

UnitaryOperator random_unitary(Eigen::Index d, Rng &rng) {
    const Matrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < d; ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) q.col(k) *= diag / mag;
    }
    return UnitaryOperator(q);
}

UnitaryOperator random_unitary(Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    return random_unitary(d, rng);
}

Vector random_state(Eigen::Index d, Rng &rng) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
    return v / v.norm();
}

}  // namespace uqi
