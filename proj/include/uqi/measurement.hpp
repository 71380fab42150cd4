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
#include <optional>
#include <string>
#include <vector>

#include "uqi/linalg.hpp"

namespace uqi {

/// Two-outcome instrument with Hermitian Kraus operators cos(θG), sin(θG),
/// realized by coupling the system to an interface prepared in |+1⟩,
/// evolving under exp(−iθ G⊗σx) and reading the interface in the σz basis.
class YesNoInstrument {
  public:
    YesNoInstrument(HermitianOperator g, double theta);

    const HermitianOperator &g() const { return g_; }
    double theta() const { return theta_; }
    Eigen::Index dim() const { return g_.dim(); }
    const Matrix &cos_op() const { return cos_; }
    const Matrix &sin_op() const { return sin_; }

  private:
    HermitianOperator g_;
    double theta_;
    Matrix cos_;
    Matrix sin_;
};

/// Branch probabilities below this are never drawn.
inline constexpr double kMinBranchProbability = 1e-12;

struct YesNoProbabilities {
    double p_plus = 0.0;
    double p_minus = 0.0;
};

struct MeasurementRecord {
    /// 0 = plus, 1 = minus for yes-no measurements; the Kraus index otherwise.
    int outcome = 0;
    std::string label;
    double probability = 0.0;
    DensityMatrix post_state;
};

/// Branch data from the explicit system ⊗ interface simulation. A branch
/// with probability below kMinBranchProbability has no post-state.
struct OracleMeasurement {
    double p_plus = 0.0;
    double p_minus = 0.0;
    std::optional<DensityMatrix> post_plus;
    std::optional<DensityMatrix> post_minus;
};

class UnsupportedKrausSetError : public Error {
  public:
    using Error::Error;
};

/// Kraus family {A_k} with Σ A_k†A_k = I (1e-9). With `commuting_hermitian`
/// set, every A_k must also be Hermitian PSD and the family pairwise
/// commuting (1e-9).
class KrausSet {
  public:
    KrausSet(std::vector<Matrix> operators, bool commuting_hermitian);

    const std::vector<Matrix> &operators() const { return ops_; }
    bool commuting_hermitian() const { return commuting_hermitian_; }
    Eigen::Index dim() const { return ops_.front().rows(); }
    std::size_t size() const { return ops_.size(); }

  private:
    std::vector<Matrix> ops_;
    bool commuting_hermitian_;
};

YesNoProbabilities yes_no_probabilities(const DensityMatrix &rho, const YesNoInstrument &inst);
MeasurementRecord yes_no_measure(const DensityMatrix &rho, const YesNoInstrument &inst, std::uint64_t seed);
OracleMeasurement joint_oracle_measure(const DensityMatrix &rho, const YesNoInstrument &inst);
DensityMatrix yes_no_channel(const DensityMatrix &rho, const YesNoInstrument &inst);

DensityMatrix apply_kraus_channel(const DensityMatrix &rho, const KrausSet &ks);

/// Binary instruments that realize a commuting Hermitian Kraus family as a
/// chain: step k answers "outcome k?" with yes-operator B_k = A_k·R_k^{-1/2},
/// R_k = I − Σ_{j<k} A_j² on its support. Each step is returned as a
/// YesNoInstrument with θ = 1 and G = arccos(B_k).
std::vector<YesNoInstrument> sequential_instruments(const KrausSet &ks);

/// Outcome distribution produced by the chain (products of branch
/// probabilities), without sampling.
std::vector<double> sequential_probabilities(const DensityMatrix &rho, const KrausSet &ks);

MeasurementRecord sequential_generalized_measure(const DensityMatrix &rho, const KrausSet &ks, std::uint64_t seed);

}  // namespace uqi
