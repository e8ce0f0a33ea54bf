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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "weakval/errors.hpp"
#include "weakval/tsvf.hpp"

namespace weakval {
namespace {

using testing::naive_weak_value;
using testing::random_hermitian;
using testing::random_ket;

const Dims kQubits{2, 2};

Operator sz(std::size_t site) { return embed(ops::sigma_z(), site, kQubits); }

// Pre (eps uu + ud + du), post (eps uu + ud - du).
TwoStateVector epsilon_tsv(double e) {
    return {Ket(std::vector<Complex>{e, 1.0, 1.0, 0.0}, kQubits), Ket(std::vector<Complex>{e, 1.0, -1.0, 0.0}, kQubits)};
}

// |<post|P_S|pre>|^2 for the basis-index set S.
double branch_weight(const TwoStateVector& t, std::initializer_list<std::size_t> indices) {
    Complex a = 0.0;
    for (std::size_t i : indices) {
        a += std::conj(t.post()[i]) * t.pre()[i];
    }
    return std::norm(a);
}

TEST(TwoStateVector, RejectsOrthogonalSelection) {
    const Ket up = Ket::basis({2}, 0);
    const Ket dn = Ket::basis({2}, 1);
    EXPECT_THROW(TwoStateVector(up, dn), DegeneratePostselection);
    EXPECT_THROW(TwoStateVector(epsilon_tsv(0.0)), DegeneratePostselection);
}

TEST(TwoStateVector, RejectsDimsMismatch) {
    EXPECT_THROW(TwoStateVector(Ket::basis({4}, 0), Ket::basis({2, 2}, 0)), ConfigError);
}

TEST(WeakValue, MatchesComponentSums) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Dims dims{2, 3};
        const Ket pre = random_ket(rng, dims);
        const Ket post = random_ket(rng, dims);
        const Eigen::MatrixXcd h = random_hermitian(rng, 6);
        const Complex w = weak_value(TwoStateVector(pre, post), Operator(h, dims, true));
        const Complex oracle = naive_weak_value(pre, post, h);
        EXPECT_NEAR(std::abs(w - oracle), 0.0, 1e-10 * std::max(1.0, std::abs(oracle)));
    }
}

TEST(WeakValue, InvariantUnderRescaling) {
    std::mt19937_64 rng(8);
    const Ket pre = random_ket(rng, kQubits);
    const Ket post = random_ket(rng, kQubits);
    const Operator op = sz(0) * sz(1);
    const Complex a = weak_value(TwoStateVector(pre, post), op);
    const Complex b = weak_value(TwoStateVector(pre.scaled(Complex(3.0, -2.0)), post.scaled(0.01)), op);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12 * std::abs(a));
}

TEST(WeakValue, EigenstateGivesEigenvalue) {
    const Ket ud = Ket::basis(kQubits, 1);
    std::mt19937_64 rng(9);
    const Ket post = random_ket(rng, kQubits);
    const TwoStateVector t(ud, post);
    EXPECT_NEAR(std::abs(weak_value(t, sz(0)) - 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(weak_value(t, sz(1)) + 1.0), 0.0, 1e-13);
}

TEST(WeakValue, SumRuleOnRandomStates) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const TwoStateVector t(random_ket(rng, kQubits), random_ket(rng, kQubits));
        const Complex lhs = weak_value(t, sz(0) + sz(1));
        const Complex rhs = weak_value(t, sz(0)) + weak_value(t, sz(1));
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(WeakValue, ProductRuleFailsForCorrelatedSelection) {
    const TwoStateVector t(Ket(std::vector<Complex>{0.11, 0.95, -1.05, 0.0}, kQubits),
                           Ket(std::vector<Complex>{1.0, 1.0, 1.0, 1.0}, kQubits));
    const Complex ab = weak_value(t, sz(0) * sz(1));
    const Complex a = weak_value(t, sz(0));
    const Complex b = weak_value(t, sz(1));
    EXPECT_NEAR(ab.real(), 21.0, 1e-10);
    EXPECT_GE(std::abs(ab - a * b), 0.1);
}

class EpsilonStrong : public ::testing::TestWithParam<double> {};

TEST_P(EpsilonStrong, IdealSumMeasurement) {
    const double e = GetParam();
    const TwoStateVector t = epsilon_tsv(e);
    // Only the uu branch survives among the outcomes +-2 and the zero block cancels.
    const double w2 = branch_weight(t, {0});
    const double w0 = branch_weight(t, {1, 2});
    const double wm2 = branch_weight(t, {3});
    const double oracle = (2 * w2 - 2 * wm2) / (w2 + w0 + wm2);
    const double got = strong_expectation(t, eigendecompose(sz(0) + sz(1)));
    EXPECT_NEAR(got, oracle, 1e-12);
    EXPECT_NEAR(got, 2.0, 1e-12);
}

TEST_P(EpsilonStrong, LocalMeasurementsAlone) {
    const double e = GetParam();
    const double e2 = e * e;
    const double e4 = e2 * e2;
    const TwoStateVector t = epsilon_tsv(e);
    EXPECT_NEAR(strong_expectation(t, eigendecompose(sz(0))), (2 * e2 + e4) / (2 + e4 + 2 * e2), 1e-12);
    EXPECT_NEAR(strong_expectation(t, eigendecompose(sz(1))), (-2 * e2 + e4) / (2 + e4 - 2 * e2), 1e-12);
}

TEST_P(EpsilonStrong, SimultaneousLocalMeasurements) {
    const double e = GetParam();
    const double e4 = std::pow(e, 4);
    const TwoStateVector t = epsilon_tsv(e);
    const std::vector<LocalObservable> locals{{ops::sigma_z(), 0}, {ops::sigma_z(), 1}};
    const double w_uu = branch_weight(t, {0});
    const double w_ud = branch_weight(t, {1});
    const double w_du = branch_weight(t, {2});
    const double oracle = 2 * w_uu / (w_uu + w_ud + w_du);
    const double got = joint_strong_expectation(t, locals, Combine::Sum);
    EXPECT_NEAR(got, oracle, 1e-12);
    EXPECT_NEAR(got, 2 * e4 / (2 + e4), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Epsilons, EpsilonStrong, ::testing::Values(0.05, 0.1, 0.3, 0.5, 1.0));

TEST(Abl, ThreeStrongSumsAreDistinct) {
    const TwoStateVector t = epsilon_tsv(0.1);
    const double nonlocal = strong_expectation(t, eigendecompose(sz(0) + sz(1)));
    const double separate = strong_expectation(t, eigendecompose(sz(0))) + strong_expectation(t, eigendecompose(sz(1)));
    const std::vector<LocalObservable> locals{{ops::sigma_z(), 0}, {ops::sigma_z(), 1}};
    const double simultaneous = joint_strong_expectation(t, locals, Combine::Sum);
    EXPECT_GT(std::abs(nonlocal - separate), 1.0);
    EXPECT_GT(std::abs(nonlocal - simultaneous), 1.0);
    EXPECT_GT(std::abs(separate - simultaneous), 1e-4);
}

TEST(Abl, ProbabilitiesFormDistribution) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const TwoStateVector t(random_ket(rng, {3, 3}), random_ket(rng, {3, 3}));
        const Operator zz = embed(ops::spin1_z(), 0, {3, 3}) * embed(ops::spin1_z(), 1, {3, 3});
        double total = 0.0;
        for (const auto& [v, p] : abl_probabilities(t, eigendecompose(zz))) {
            EXPECT_GE(p, 0.0);
            total += p;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        double joint_total = 0.0;
        const auto joint = joint_abl_probabilities(t, {{ops::spin1_z(), 0}, {ops::spin1_z(), 1}});
        EXPECT_EQ(joint.size(), 9u);
        for (const auto& o : joint) {
            joint_total += o.probability;
        }
        EXPECT_NEAR(joint_total, 1.0, 1e-12);
    }
}

TEST(Abl, JointRejectsRepeatedSite) {
    const TwoStateVector t = epsilon_tsv(0.1);
    EXPECT_THROW(joint_abl_probabilities(t, {{ops::sigma_z(), 0}, {ops::sigma_x(), 0}}), ConfigError);
    EXPECT_THROW(joint_abl_probabilities(t, {}), ConfigError);
}

TEST(Abl, JointOrderLastObservableFastest) {
    const Ket ud = Ket::basis(kQubits, 1);
    const auto joint = joint_abl_probabilities(TwoStateVector(ud, ud), {{ops::sigma_z(), 0}, {ops::sigma_z(), 1}});
    double p_ud = 0.0;
    for (const auto& o : joint) {
        if (o.eigenvalues == std::vector<double>{1.0, -1.0}) {
            p_ud = o.probability;
        }
    }
    EXPECT_DOUBLE_EQ(p_ud, 1.0);
}

TEST(Combine, SumAndProduct) {
    EXPECT_EQ(combine_outcomes(Combine::Sum, {1.0, -1.0, 1.0}), 1.0);
    EXPECT_EQ(combine_outcomes(Combine::Product, {1.0, -1.0, 1.0}), -1.0);
}

TEST(Modsum, SumInsideModHolds) {
    EXPECT_TRUE(modsum_identity_check());
    const auto table = modsum_identity_table();
    ASSERT_EQ(table.size(), 4u);
    bool product_reading_fails = false;
    for (const auto& row : table) {
        EXPECT_EQ(row.mod_form, row.product);
        product_reading_fails |= row.product_mod_form != row.product;
    }
    EXPECT_TRUE(product_reading_fails);
}

TEST(Modsum, FloorModIsNonNegative) {
    EXPECT_EQ(floor_mod(-2.0, 4.0), 2.0);
    EXPECT_EQ(floor_mod(2.0, 4.0), 2.0);
    EXPECT_EQ(floor_mod(-1.0, 4.0), 3.0);
    EXPECT_EQ(floor_mod(0.0, 4.0), 0.0);
}

}  // namespace
}  // namespace weakval
