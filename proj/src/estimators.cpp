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

#include "weakval/estimators.hpp"

#include <cmath>

#include "weakval/errors.hpp"

namespace weakval {

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::Direct:
            return "direct";
        case Estimator::SumRule:
            return "sum-rule";
        case Estimator::ReschSteinberg:
            return "resch-steinberg";
        case Estimator::ReschLundeen:
            return "resch-lundeen";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "direct") {
        return Estimator::Direct;
    }
    if (name == "sum-rule") {
        return Estimator::SumRule;
    }
    if (name == "resch-steinberg") {
        return Estimator::ReschSteinberg;
    }
    if (name == "resch-lundeen") {
        return Estimator::ReschLundeen;
    }
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

double relative_deviation(double value, Complex target) {
    const double t = target.real();
    if (t == 0.0) {
        return std::abs(value);
    }
    return std::abs(value - t) / std::abs(t);
}

double estimate_direct(const MomentSet& m, const std::vector<std::size_t>& coordinates) {
    if (coordinates.empty()) {
        return m.meanQ.sum();
    }
    double s = 0.0;
    for (std::size_t c : coordinates) {
        if (c >= static_cast<std::size_t>(m.meanQ.size())) {
            throw ConfigError("coordinate index out of range");
        }
        s += m.meanQ[static_cast<Eigen::Index>(c)];
    }
    return s;
}

double estimate_sum_rule(const MomentSet& m) { return m.meanQ.sum(); }

namespace {

void require_joint(const MomentSet& m, Topology topology) {
    if (topology == Topology::EntangledSum) {
        throw ConfigError("joint weak-value estimators need independent local pointers");
    }
    if (m.meanQ.size() < 2) {
        throw ConfigError("joint weak-value estimators need two pointer coordinates");
    }
}

}  // namespace

double estimate_resch_steinberg(const MomentSet& m, Topology topology, Complex a_w, Complex b_w) {
    require_joint(m, topology);
    return 2.0 * m.corrQQ(0, 1) - (std::conj(a_w) * b_w).real();
}

double resch_lundeen_prefactor(double delta) {
    const double d2 = delta * delta;
    return d2 * d2;
}

double estimate_resch_lundeen(const MomentSet& m, Topology topology, double delta) {
    require_joint(m, topology);
    return m.corrQQ(0, 1) - resch_lundeen_prefactor(delta) * m.corrPP(0, 1);
}

Complex estimate_local_weak_value(const MomentSet& m, std::size_t coordinate, double delta) {
    const auto c = static_cast<Eigen::Index>(coordinate);
    if (c >= m.meanQ.size()) {
        throw ConfigError("coordinate index out of range");
    }
    return {m.meanQ[c], delta * delta * m.meanP[c]};
}

double estimate_resch_steinberg_measured(const MomentSet& m, Topology topology, double delta) {
    require_joint(m, topology);
    return estimate_resch_steinberg(m, topology, estimate_local_weak_value(m, 0, delta),
                                    estimate_local_weak_value(m, 1, delta));
}

EstimateReport estimate(Estimator e, const MomentSet& m, Topology topology, double delta, Complex target,
                        Complex a_w, Complex b_w) {
    EstimateReport r;
    r.estimator = to_string(e);
    r.target = target;
    r.delta = delta;
    switch (e) {
        case Estimator::Direct:
            r.value = estimate_direct(m);
            r.inputs = {"meanQ"};
            break;
        case Estimator::SumRule:
            if (topology != Topology::LocalProduct) {
                throw ConfigError("sum-rule estimator reads separate local pointers");
            }
            r.value = estimate_sum_rule(m);
            r.inputs = {"meanQ"};
            break;
        case Estimator::ReschSteinberg:
            r.value = estimate_resch_steinberg(m, topology, a_w, b_w);
            r.inputs = {"corrQQ", "A_w", "B_w"};
            break;
        case Estimator::ReschLundeen:
            r.value = estimate_resch_lundeen(m, topology, delta);
            r.inputs = {"corrQQ", "corrPP"};
            break;
    }
    r.deviation = relative_deviation(r.value, target);
    return r;
}

}  // namespace weakval
