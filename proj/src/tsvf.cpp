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

#include "weakval/tsvf.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "weakval/errors.hpp"

namespace weakval {

TwoStateVector::TwoStateVector(Ket pre, Ket post) : pre_(std::move(pre)), post_(std::move(post)) {
    if (pre_.dims() != post_.dims()) {
        throw ConfigError("pre- and post-selected states have different dims");
    }
    overlap_ = inner(post_, pre_);
    if (std::abs(overlap_) < kOverlapThreshold * pre_.norm() * post_.norm()) {
        throw DegeneratePostselection("pre- and post-selected states are orthogonal; weak values diverge");
    }
}

Complex weak_value(const TwoStateVector& tsv, const Operator& op) {
    return op.matrix_element(tsv.post(), tsv.pre()) / tsv.overlap();
}

std::map<double, double> abl_probabilities(const TwoStateVector& tsv, const SpectralDecomposition& decomp) {
    std::vector<double> weights;
    weights.reserve(decomp.size());
    double total = 0.0;
    for (const auto& c : decomp.components()) {
        const double w = std::norm(c.projector.matrix_element(tsv.post(), tsv.pre()));
        weights.push_back(w);
        total += w;
    }
    if (total <= 0.0) {
        throw InconsistentSelection("no outcome is compatible with both pre- and post-selection");
    }
    std::map<double, double> out;
    for (std::size_t i = 0; i < decomp.size(); ++i) {
        out[decomp[i].eigenvalue] = weights[i] / total;
    }
    return out;
}

double strong_expectation(const TwoStateVector& tsv, const SpectralDecomposition& decomp) {
    double e = 0.0;
    for (const auto& [value, prob] : abl_probabilities(tsv, decomp)) {
        e += value * prob;
    }
    return e;
}

double combine_outcomes(Combine combine, const std::vector<double>& outcomes) {
    if (combine == Combine::Sum) {
        double s = 0.0;
        for (double v : outcomes) {
            s += v;
        }
        return s;
    }
    double p = 1.0;
    for (double v : outcomes) {
        p *= v;
    }
    return p;
}

std::vector<JointOutcome> joint_abl_probabilities(const TwoStateVector& tsv,
                                                  const std::vector<LocalObservable>& locals) {
    if (locals.empty()) {
        throw ConfigError("joint measurement needs at least one local observable");
    }
    const Dims& dims = tsv.dims();
    std::set<std::size_t> sites;
    std::vector<SpectralDecomposition> decomps;
    for (const auto& l : locals) {
        if (!sites.insert(l.site).second) {
            throw ConfigError("joint measurement observables must act on distinct sites");
        }
        decomps.push_back(eigendecompose(embed(l.op, l.site, dims)));
    }

    std::size_t count = 1;
    for (const auto& d : decomps) {
        count *= d.size();
    }
    std::vector<JointOutcome> outcomes;
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t flat = 0; flat < count; ++flat) {
        // Mixed-radix decode, last observable fastest.
        std::vector<std::size_t> idx(locals.size());
        std::size_t rest = flat;
        for (std::size_t k = locals.size(); k-- > 0;) {
            idx[k] = rest % decomps[k].size();
            rest /= decomps[k].size();
        }
        Eigen::VectorXcd v = tsv.pre().amplitudes();
        std::vector<double> values;
        for (std::size_t k = 0; k < locals.size(); ++k) {
            v = decomps[k][idx[k]].projector.apply(v);
            values.push_back(decomps[k][idx[k]].eigenvalue);
        }
        const double w = std::norm(tsv.post().amplitudes().dot(v));
        outcomes.push_back({std::move(values), 0.0});
        weights.push_back(w);
        total += w;
    }
    if (total <= 0.0) {
        throw InconsistentSelection("no joint outcome is compatible with both pre- and post-selection");
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        outcomes[i].probability = weights[i] / total;
    }
    return outcomes;
}

double joint_strong_expectation(const TwoStateVector& tsv, const std::vector<LocalObservable>& locals,
                                Combine combine) {
    double e = 0.0;
    for (const auto& o : joint_abl_probabilities(tsv, locals)) {
        e += o.probability * combine_outcomes(combine, o.eigenvalues);
    }
    return e;
}

double floor_mod(double value, double modulus) {
    double r = std::fmod(value, modulus);
    if (r < 0.0) {
        r += modulus;
    }
    return r;
}

std::vector<ModsumRow> modsum_identity_table() {
    const Dims dims{2, 2};
    const Operator za = embed(ops::sigma_z(), 0, dims);
    const Operator zb = embed(ops::sigma_z(), 1, dims);
    const Operator sum = za + zb;
    const Operator prod = za * zb;
    const char* labels[] = {"up,up", "up,down", "down,up", "down,down"};

    std::vector<ModsumRow> rows;
    for (std::size_t i = 0; i < 4; ++i) {
        const Ket b = Ket::basis(dims, i);
        const double s = sum.matrix_element(b, b).real();
        const double p = prod.matrix_element(b, b).real();
        rows.push_back({labels[i], s, p, floor_mod(s, 4.0) - 1.0, floor_mod(p, 4.0) - 1.0});
    }
    return rows;
}

bool modsum_identity_check() {
    for (const auto& r : modsum_identity_table()) {
        if (r.mod_form != r.product) {
            return false;
        }
    }
    return true;
}

}  // namespace weakval
