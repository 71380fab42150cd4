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

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uqi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not fit together.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A value violates a type invariant. `field()` names the offending input
/// so front ends can report it.
class InvariantError : public Error {
  public:
    InvariantError(std::string field, const std::string &what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

namespace tol {
/// Validity checks on states and operators.
inline constexpr double kValidity = 1e-9;
/// Internal convergence (eigensolver, orthogonalization noise floor).
inline constexpr double kConvergence = 1e-12;
/// Relative Hermiticity tolerance.
inline constexpr double kHermitian = 1e-10;
}  // namespace tol

bool all_finite(const Matrix &m);
bool is_hermitian(const Matrix &m, double rel_tol = tol::kHermitian);

/// Square matrix with m == m† (relative Frobenius tolerance 1e-10).
class HermitianOperator {
  public:
    HermitianOperator() = default;
    explicit HermitianOperator(Matrix m, const std::string &field = "hermitian");

    static HermitianOperator zero(Eigen::Index d);
    static HermitianOperator identity(Eigen::Index d);

    const Matrix &matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

    HermitianOperator operator+(const HermitianOperator &o) const;
    HermitianOperator operator-(const HermitianOperator &o) const;
    HermitianOperator operator*(double s) const;

  private:
    Matrix m_;
};

/// Square matrix with ‖U†U − I‖_F ≤ 1e-9·d.
class UnitaryOperator {
  public:
    UnitaryOperator() = default;
    explicit UnitaryOperator(Matrix m, const std::string &field = "unitary");

    static UnitaryOperator identity(Eigen::Index d);

    const Matrix &matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    UnitaryOperator adjoint() const;
    UnitaryOperator operator*(const UnitaryOperator &o) const;

  private:
    Matrix m_;
};

/// Hermitian, unit trace, positive semidefinite (to 1e-9).
class DensityMatrix {
  public:
    DensityMatrix() = default;
    explicit DensityMatrix(Matrix m, const std::string &field = "rho");

    static DensityMatrix pure(const Vector &psi);

    const Matrix &matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

  private:
    Matrix m_;
};

/// Pauli matrices and the σz eigenbasis |+1⟩ = (1,0), |−1⟩ = (0,1).
struct Pauli {
    static const HermitianOperator &x();
    static const HermitianOperator &y();
    static const HermitianOperator &z();
    static const HermitianOperator &id();
    static const Vector &plus_one();
    static const Vector &minus_one();
};

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // columns are eigenvectors
};

Matrix kron(const Matrix &a, const Matrix &b);
Matrix kron(std::span<const Matrix> factors);

/// Traces out every factor not listed in `keep`. `dims` gives the factor
/// dimensions in tensor order; the kept factors stay in their original order.
Matrix partial_trace(const Matrix &m, std::span<const int> dims, std::span<const int> keep);

/// Lifts `op`, acting on the listed factors (in the order given), to the full
/// tensor product space described by `dims`.
Matrix embed(const Matrix &op, std::span<const int> dims, std::span<const int> targets);

/// Applies `op` on the listed factors of a state vector without forming the
/// full operator.
Vector apply_local(const Matrix &op, std::span<const int> dims, std::span<const int> targets,
                   const Vector &psi);

/// Cyclic Jacobi eigensolver for Hermitian matrices. Stops once the
/// off-diagonal Frobenius norm drops below 1e-12·max(1, ‖h‖_F) or after 100
/// sweeps.
EigenDecomposition hermitian_eig(const HermitianOperator &h);

/// V f(Λ) V† for a real function f applied to the spectrum.
template <typename F>
Matrix hermitian_function(const EigenDecomposition &eig, F &&f) {
    const auto n = eig.values.size();
    Vector fv(n);
    for (Eigen::Index i = 0; i < n; ++i) fv(i) = f(eig.values(i));
    return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

/// e^{−iht}.
UnitaryOperator expm_unitary(const HermitianOperator &h, double t);

/// |tr(U†V)|/d.
double gate_fidelity(const UnitaryOperator &u, const UnitaryOperator &v);
double gate_fidelity(const Matrix &u, const Matrix &v);

/// Uhlmann fidelity (tr √(√ρ σ √ρ))².
double state_fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative rounding noise in the spectrum is clamped to zero.
Matrix psd_sqrt(const Matrix &m);

double frobenius(const Matrix &m);

/// Seeded generator used by every stochastic routine: std::mt19937_64 with
/// std::normal_distribution / std::uniform_real_distribution on top.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Complex Gaussian with E|z|² = 1.
    Complex complex_normal();
    std::mt19937_64 &engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng);
HermitianOperator random_hermitian(Eigen::Index d, std::uint64_t seed);
DensityMatrix random_density(Eigen::Index d, std::uint64_t seed);
UnitaryOperator random_unitary(Eigen::Index d, std::uint64_t seed);
UnitaryOperator random_unitary(Eigen::Index d, Rng &rng);
/// Haar-random unit vector.
Vector random_state(Eigen::Index d, Rng &rng);

}  // namespace uqi
