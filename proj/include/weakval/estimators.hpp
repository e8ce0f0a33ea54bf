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
#include <string>
#include <string_view>
#include <vector>

#include "weakval/pointer.hpp"
#include "weakval/qstate.hpp"

namespace weakval {

enum class Estimator { Direct, SumRule, ReschSteinberg, ReschLundeen };

std::string to_string(Estimator e);
/// Accepts direct | sum-rule | resch-steinberg | resch-lundeen.
Estimator parse_estimator(std::string_view name);

struct EstimateReport {
    std::string estimator;
    double value = 0.0;
    Complex target;
    /// |value - Re(target)| / |Re(target)|, or the absolute error when Re(target) = 0.
    double deviation = 0.0;
    double delta = 0.0;
    std::vector<std::string> inputs;
};

double relative_deviation(double value, Complex target);

/// Sum of meanQ over the selected coordinates (all coordinates when empty).
double estimate_direct(const MomentSet& m, const std::vector<std::size_t>& coordinates = {});

/// meanQ_A + meanQ_B + ..., i.e. (A + B)_w read off independent local pointers.
double estimate_sum_rule(const MomentSet& m);

/// 2 <Q_A Q_B> - Re(conj(A_w) B_w). Throws ConfigError for the entangled-sum
/// topology or fewer than two coordinates.
double estimate_resch_steinberg(const MomentSet& m, Topology topology, Complex a_w, Complex b_w);

/// Coefficient of <P_A P_B> for the adopted Gaussian convention: delta^4,
/// the same as 4 sigma^4 with sigma = delta / sqrt(2) the position spread.
double resch_lundeen_prefactor(double delta);

/// <Q_A Q_B> - resch_lundeen_prefactor(delta) <P_A P_B>.
double estimate_resch_lundeen(const MomentSet& m, Topology topology, double delta);

/// Complex local weak value from a single pointer: meanQ + i delta^2 meanP.
Complex estimate_local_weak_value(const MomentSet& m, std::size_t coordinate, double delta);

/// Resch-Steinberg with A_w and B_w reconstructed from the same moments.
double estimate_resch_steinberg_measured(const MomentSet& m, Topology topology, double delta);

/// Dispatches by estimator; `a_w`/`b_w` are used by Resch-Steinberg only.
EstimateReport estimate(Estimator e, const MomentSet& m, Topology topology, double delta, Complex target,
                        Complex a_w = 0.0, Complex b_w = 0.0);

}  // namespace weakval
