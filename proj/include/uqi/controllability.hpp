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

#include <string>
#include <vector>

#include "uqi/linalg.hpp"

namespace uqi {

/// A d-dimensional system with Hamiltonian H, coupled to one interface qubit
/// through the fixed interaction A⊗σz.
class InterfaceSystem {
  public:
    InterfaceSystem(HermitianOperator h, HermitianOperator a);

    const HermitianOperator &h() const { return h_; }
    const HermitianOperator &a() const { return a_; }
    Eigen::Index dim() const { return h_.dim(); }
    /// Dimension of system ⊗ qubit.
    Eigen::Index joint_dim() const { return 2 * h_.dim(); }

    /// H⊗I + A⊗σz on system ⊗ qubit.
    HermitianOperator drift() const;

  private:
    HermitianOperator h_;
    HermitianOperator a_;
};

/// Two systems sharing one interface qubit, ordered S ⊗ Q ⊗ S′.
struct BridgeSystem {
    InterfaceSystem left;
    InterfaceSystem right;

    Eigen::Index joint_dim() const { return left.dim() * 2 * right.dim(); }
    /// H⊗I⊗I + A⊗σz⊗I + I⊗I⊗H′ + I⊗σz⊗A′.
    HermitianOperator drift() const;
};

struct LabeledGenerator {
    std::string label;
    HermitianOperator op;
};

class GeneratorSet {
  public:
    explicit GeneratorSet(Eigen::Index dim) : dim_(dim) {}
    GeneratorSet &add(std::string label, HermitianOperator op);

    Eigen::Index dim() const { return dim_; }
    const std::vector<LabeledGenerator> &generators() const { return gens_; }
    bool empty() const { return gens_.empty(); }

  private:
    Eigen::Index dim_;
    std::vector<LabeledGenerator> gens_;
};

/// Real span of Hermitian matrices, orthonormal under ⟨X,Y⟩ = tr(X†Y).
struct LieAlgebraBasis {
    Eigen::Index dim = 0;
    std::vector<Matrix> basis;
    int depth_reached = 0;
    bool saturated = true;

    std::size_t size() const { return basis.size(); }
};

struct ClosureOptions {
    /// Gram–Schmidt rank threshold, relative to the candidate norm.
    double tol = 1e-8;
    int max_depth = 12;
};

struct ControllabilityReport {
    std::size_t algebra_dim = 0;
    std::size_t traceless_dim = 0;
    std::size_t required_dim = 0;
    bool controllable = false;
    int depth_reached = 0;
    /// False when the depth cutoff stopped the closure; the verdict is then
    /// inconclusive rather than a proof of non-controllability.
    bool saturated = true;

    bool inconclusive() const { return !saturated && !controllable; }
};

/// i[x, y] = i(xy − yx).
HermitianOperator commutator(const HermitianOperator &x, const HermitianOperator &y);
Matrix commutator(const Matrix &x, const Matrix &y);

/// Breadth-first commutator closure of the generator set.
LieAlgebraBasis generate_dla(const GeneratorSet &gens, const ClosureOptions &opts = {});

/// Norm of the component of `x` orthogonal to the span of `basis`.
double span_residual(const std::vector<Matrix> &basis, const Matrix &x);

/// Dimension of the algebra after projecting onto the traceless subspace.
std::size_t traceless_dimension(const LieAlgebraBasis &algebra, double tol);

ControllabilityReport is_controllable(const InterfaceSystem &sys, const ClosureOptions &opts = {});
ControllabilityReport is_bridge_controllable(const BridgeSystem &bridge, const ClosureOptions &opts = {});

/// Controllability verdict for an arbitrary generator set.
ControllabilityReport analyze_generators(const GeneratorSet &gens, const ClosureOptions &opts = {});

/// Generators {drift, I⊗σx, I⊗σy, I⊗σz} for a single interface.
GeneratorSet interface_generators(const InterfaceSystem &sys);
/// Generators {drift, I⊗σx⊗I, I⊗σy⊗I, I⊗σz⊗I} for a bridge.
GeneratorSet bridge_generators(const BridgeSystem &bridge);

}  // namespace uqi
