// Copyright 2026 The weakval Authors
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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "weakval/qstate.hpp"

namespace weakval {

/// Overlaps below this fraction of the norm product count as orthogonal.
inline constexpr double kOverlapThreshold = 1e-14;

/// Pre-selected and post-selected kets of one system.
class TwoStateVector {
   public:
    /// Throws ConfigError on dims mismatch and DegeneratePostselection when
    /// |<post|pre>| < kOverlapThreshold * |pre| * |post|.
    TwoStateVector(Ket pre, Ket post);

    const Ket& pre() const { return pre_; }
    const Ket& post() const { return post_; }
    const Dims& dims() const { return pre_.dims(); }
    /// <post|pre>
    Complex overlap() const { return overlap_; }

   private:
    Ket pre_;
    Ket post_;
    Complex overlap_;
};

/// <post|O|pre> / <post|pre>
Complex weak_value(const TwoStateVector& tsv, const Operator& op);

/// ABL outcome distribution for an intermediate projective measurement.
/// Throws InconsistentSelection when every <post|P_j|pre> vanishes.
std::map<double, double> abl_probabilities(const TwoStateVector& tsv, const SpectralDecomposition& decomp);

/// Sum over eigenvalues of eigenvalue * ABL probability.
double strong_expectation(const TwoStateVector& tsv, const SpectralDecomposition& decomp);

/// An operator acting on one site of a composite system.
struct LocalObservable {
    Operator op;
    std::size_t site;
};

enum class Combine { Sum, Product };

double combine_outcomes(Combine combine, const std::vector<double>& outcomes);

struct JointOutcome {
    std::vector<double> eigenvalues;  // one per local observable
    double probability;
};

/// ABL distribution over the fine-grained joint decomposition built from
/// products of local eigenprojectors.
std::vector<JointOutcome> joint_abl_probabilities(const TwoStateVector& tsv,
                                                  const std::vector<LocalObservable>& locals);

/// Expectation of combine(outcomes) over joint_abl_probabilities.
double joint_strong_expectation(const TwoStateVector& tsv, const std::vector<LocalObservable>& locals,
                                Combine combine);

struct ModsumRow {
    std::string label;
    double sum;         // eigenvalue of sz_A + sz_B
    double product;     // eigenvalue of sz_A sz_B
    double mod_form;    // ((sum) mod 4) - 1
    double product_mod_form;  // ((product) mod 4) - 1, the literal printed reading
};

/// Eigenvalue table for ((sz_A + sz_B) mod 4) - 1 against sz_A sz_B on the
/// two-qubit product basis.
std::vector<ModsumRow> modsum_identity_table();

/// True when ((sz_A + sz_B) mod 4) - 1 equals sz_A sz_B on every basis state.
bool modsum_identity_check();

/// Non-negative remainder, so -2 mod 4 is 2.
double floor_mod(double value, double modulus);

}  // namespace weakval
