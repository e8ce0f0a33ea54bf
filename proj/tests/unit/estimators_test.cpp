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
#include "weakval/estimators.hpp"
#include "weakval/tsvf.hpp"

namespace weakval {
namespace {

using testing::random_ket;

const Dims kQubits{2, 2};
const Complex kI{0.0, 1.0};

std::vector<Coupling> local_sz() { return {{ops::sigma_z(), 0, "A"}, {ops::sigma_z(), 1, "B"}}; }

Ket plus_plus() { return Ket(std::vector<Complex>{0.5, 0.5, 0.5, 0.5}, kQubits); }
Ket phi() { return Ket(std::vector<Complex>{0.5, 0.5 * kI, -0.5 * kI, 0.5}, kQubits); }
Ket phi_prime() { return Ket(std::vector<Complex>{0.5, 0.5 * kI, 0.5 * kI, -0.5}, kQubits); }

MomentSet moments(const Ket& pre, const Ket& post, double delta, Topology t = Topology::LocalProduct,
                  double g = 1.0) {
    PointerConfig c;
    c.topology = t;
    c.delta = delta;
    c.coupling = g;
    return moments_closed_form(postselect(couple(pre, local_sz(), c), post));
}

Complex wv(const Ket& pre, const Ket& post, const Operator& op) { return weak_value(TwoStateVector(pre, post), op); }

Operator sz(std::size_t site) { return embed(ops::sigma_z(), site, kQubits); }

TEST(Estimator, Names) {
    for (Estimator e : {Estimator::Direct, Estimator::SumRule, Estimator::ReschSteinberg, Estimator::ReschLundeen}) {
        EXPECT_EQ(parse_estimator(to_string(e)), e);
    }
    EXPECT_THROW(parse_estimator("lundeen"), ConfigError);
}

TEST(Estimator, RelativeDeviationFallsBackToAbsolute) {
    EXPECT_DOUBLE_EQ(relative_deviation(1.1, 1.0), 0.10000000000000009);
    EXPECT_DOUBLE_EQ(relative_deviation(0.25, 0.0), 0.25);
    EXPECT_DOUBLE_EQ(relative_deviation(-3.0, -2.0), 0.5);
}

TEST(ProductPhase, ClosedFormMomentumCorrelation) {
    for (double d : {0.7, 1.0, 3.0, 100.0}) {
        const MomentSet m = moments(plus_plus(), phi(), d);
        const MomentSet mp = moments(plus_plus(), phi_prime(), d);
        const double x = std::exp(-2.0 / (d * d));
        EXPECT_NEAR(m.corrQQ(0, 1), 0.0, 1e-14 * d * d);
        EXPECT_NEAR(mp.corrQQ(0, 1), 0.0, 1e-14 * d * d);
        EXPECT_NEAR(m.corrPP(0, 1), -x / std::pow(d, 4), 1e-12 / std::pow(d, 4));
        EXPECT_NEAR(mp.corrPP(0, 1), x / std::pow(d, 4), 1e-12 / std::pow(d, 4));
    }
}

TEST(ProductPhase, ReschSteinbergExactAtAnyWidth) {
    const Complex a = wv(plus_plus(), phi(), sz(0));
    const Complex b = wv(plus_plus(), phi(), sz(1));
    EXPECT_NEAR(std::abs(a + kI), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(b - kI), 0.0, 1e-14);
    for (double d : {0.5, 1.0, 10.0, 100.0}) {
        EXPECT_NEAR(estimate_resch_steinberg(moments(plus_plus(), phi(), d), Topology::LocalProduct, a, b), 1.0, 1e-12);
        const Complex ap = wv(plus_plus(), phi_prime(), sz(0));
        const Complex bp = wv(plus_plus(), phi_prime(), sz(1));
        EXPECT_NEAR(estimate_resch_steinberg(moments(plus_plus(), phi_prime(), d), Topology::LocalProduct, ap, bp), -1.0,
                    1e-12);
    }
}

TEST(ProductPhase, ReschLundeenWithinOnePercentAtHundred) {
    const double d = 100.0;
    const double x = std::exp(-2.0 / (d * d));
    EXPECT_NEAR(estimate_resch_lundeen(moments(plus_plus(), phi(), d), Topology::LocalProduct, d), x, 1e-10);
    EXPECT_NEAR(estimate_resch_lundeen(moments(plus_plus(), phi_prime(), d), Topology::LocalProduct, d), -x, 1e-10);
    EXPECT_LT(std::abs(x - 1.0), 0.01);
}

TEST(Prefactor, PositionSpreadConvention) {
    // sigma = delta / sqrt(2) is the position spread of |G|^2, so 4 sigma^4 = delta^4.
    const double d = 3.0;
    const double sigma = d / std::sqrt(2.0);
    EXPECT_NEAR(resch_lundeen_prefactor(d), 4.0 * std::pow(sigma, 4), 1e-12);
}

TEST(Joint, EstimatorsConvergeOnRandomSelections) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Ket pre = random_ket(rng, kQubits);
        const Ket post = random_ket(rng, kQubits);
        const double target = wv(pre, post, sz(0) * sz(1)).real();
        const Complex a = wv(pre, post, sz(0));
        const Complex b = wv(pre, post, sz(1));
        double prev_rl = 0.0;
        double prev_gap = 0.0;
        for (double d : {1e3, 2e3}) {
            const MomentSet m = moments(pre, post, d);
            const double rl = estimate_resch_lundeen(m, Topology::LocalProduct, d) - target;
            const double rs = estimate_resch_steinberg(m, Topology::LocalProduct, a, b) - target;
            const double scale = 1.0 + std::abs(target) + std::norm(a) + std::norm(b);
            EXPECT_LT(std::abs(rl), 1e2 * scale * scale / (d * d)) << trial;
            EXPECT_LT(std::abs(rs - rl), 1e2 * scale * scale / (d * d)) << trial;
            if (d > 1e3 && std::abs(prev_rl) > 1e-9) {
                EXPECT_NEAR(prev_rl / rl, 4.0, 0.4) << trial;
                EXPECT_NEAR(prev_gap / (rs - rl), 4.0, 0.4) << trial;
            }
            prev_rl = rl;
            prev_gap = rs - rl;
        }
    }
}

TEST(LocalWeakValue, RecoversComplexWeakValue) {
    std::mt19937_64 rng(22);
    const Ket pre = random_ket(rng, kQubits);
    const Ket post = random_ket(rng, kQubits);
    const double d = 1e4;
    const MomentSet m = moments(pre, post, d);
    for (std::size_t c = 0; c < 2; ++c) {
        const Complex expected = wv(pre, post, sz(c));
        const Complex got = estimate_local_weak_value(m, c, d);
        EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-4 * (1.0 + std::norm(expected))) << c;
    }
    EXPECT_THROW(estimate_local_weak_value(m, 2, d), ConfigError);
    const double measured = estimate_resch_steinberg_measured(m, Topology::LocalProduct, d);
    EXPECT_NEAR(measured, wv(pre, post, sz(0) * sz(1)).real(), 1e-3);
}

TEST(Direct, SumAndCoordinateSelection) {
    const MomentSet m = moments(plus_plus(), phi(), 50.0);
    EXPECT_DOUBLE_EQ(estimate_direct(m), m.meanQ[0] + m.meanQ[1]);
    EXPECT_DOUBLE_EQ(estimate_direct(m, {1}), m.meanQ[1]);
    EXPECT_DOUBLE_EQ(estimate_sum_rule(m), estimate_direct(m));
    EXPECT_THROW(estimate_direct(m, {5}), ConfigError);
}

TEST(Direct, ZeroCouplingReadsZero) {
    const MomentSet m = moments(plus_plus(), phi(), 2.0, Topology::LocalProduct, 0.0);
    EXPECT_EQ(estimate_direct(m), 0.0);
}

TEST(Joint, RejectEntangledTopology) {
    const Ket pre(std::vector<Complex>{0.11, 0.95, -1.05, 0.0}, kQubits);
    const Ket post(std::vector<Complex>{1.0, 1.0, 1.0, 1.0}, kQubits);
    const MomentSet m = moments(pre, post, 10.0, Topology::EntangledSum);
    EXPECT_THROW(estimate_resch_steinberg(m, Topology::EntangledSum, 0.0, 0.0), ConfigError);
    EXPECT_THROW(estimate_resch_lundeen(m, Topology::EntangledSum, 10.0), ConfigError);
    EXPECT_THROW(estimate_resch_lundeen(m, Topology::LocalProduct, 10.0), ConfigError);
}

TEST(Dispatch, FillsReport) {
    const MomentSet m = moments(plus_plus(), phi(), 100.0);
    const EstimateReport r = estimate(Estimator::ReschLundeen, m, Topology::LocalProduct, 100.0, 1.0);
    EXPECT_EQ(r.estimator, "resch-lundeen");
    EXPECT_NEAR(r.value, std::exp(-2e-4), 1e-10);
    EXPECT_NEAR(r.deviation, 1.0 - std::exp(-2e-4), 1e-10);
    EXPECT_EQ(r.inputs.size(), 2u);
    EXPECT_EQ(r.delta, 100.0);
}

}  // namespace
}  // namespace weakval
