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
#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "weakval/errors.hpp"
#include "weakval/scenarios.hpp"

namespace weakval {
namespace {

Complex wv(const ScenarioSpec& s, const std::string& label) {
    for (const auto& o : s.observables) {
        if (o.label == label) {
            return weak_value(s.two_state_vector(), o.resolve(s.dims));
        }
    }
    ADD_FAILURE() << "no observable " << label;
    return 0.0;
}

TEST(Builtin, AllNamesResolve) {
    const auto names = builtin_names();
    EXPECT_EQ(names.size(), 7u);
    for (const auto& n : names) {
        const ScenarioSpec s = builtin(n);
        EXPECT_EQ(s.name, n);
        EXPECT_NO_THROW(s.validate());
        EXPECT_FALSE(s.observables.empty());
    }
    EXPECT_THROW(builtin("bell_pair"), ConfigError);
}

TEST(Builtin, TwoState22WeakValues) {
    const ScenarioSpec s = builtin("two_state_22");
    EXPECT_NEAR(wv(s, "sz_A+sz_B").real(), 22.0, 22.0 * 1e-10);
    EXPECT_NEAR(wv(s, "sz_A").real(), 211.0, 211.0 * 1e-10);
    EXPECT_NEAR(wv(s, "sz_B").real(), -189.0, 189.0 * 1e-10);
    EXPECT_NEAR(wv(s, "sz_A*sz_B").real(), 21.0, 21.0 * 1e-10);
    EXPECT_EQ(s.topology, Topology::EntangledSum);
}

TEST(Builtin, ProductPhasePair) {
    EXPECT_NEAR(std::abs(wv(builtin("product_phase"), "sz_A*sz_B") - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(wv(builtin("product_phase_prime"), "sz_A*sz_B") + 1.0), 0.0, 1e-12);
}

TEST(Builtin, EpsilonParameter) {
    const ScenarioSpec s = builtin("epsilon_sum");
    ASSERT_TRUE(s.epsilon.has_value());
    EXPECT_EQ(*s.epsilon, 0.1);
    EXPECT_EQ(builtin("epsilon_sum", 0.3).pre[0], Complex(0.3));
    EXPECT_THROW(builtin("epsilon_sum", 0.0), DegeneratePostselection);
    // Weak value of the sum is 2 for every nonzero epsilon.
    EXPECT_NEAR(wv(builtin("epsilon_sum", 0.37), "sz_A+sz_B").real(), 2.0, 1e-12);
}

TEST(Builtin, SingletIsEigenstateOfSum) {
    const ScenarioSpec s = builtin("singlet_sum");
    EXPECT_NEAR(std::abs(wv(s, "sz_A+sz_B")), 0.0, 1e-14);
    EXPECT_NEAR(wv(s, "sz_A*sz_B").real(), -1.0, 1e-14);
}

TEST(Serialization, EveryBuiltinRoundTrips) {
    for (const auto& n : builtin_names()) {
        const ScenarioSpec s = builtin(n);
        const std::string text = scenario_to_json(s);
        const ScenarioSpec back = scenario_from_json(text);
        EXPECT_TRUE(back == s) << n;
        EXPECT_EQ(scenario_to_json(back), text) << n;
    }
}

TEST(Serialization, NamedOperatorsAndFiles) {
    const std::string text = R"({
      "name": "custom", "dims": [2],
      "pre": [[1, 0], [0, 1]], "post": [1, 1],
      "observables": [{"label": "x", "terms": [{"site": 0, "named": "sigma_x"}]}],
      "couplings": [{"label": "x", "site": 0, "named": "sigma_x"}],
      "parameters": {"delta": 4}
    })";
    const ScenarioSpec s = scenario_from_json(text);
    EXPECT_EQ(s.delta, 4.0);
    EXPECT_EQ(s.pre[1], Complex(0.0, 1.0));
    EXPECT_NEAR(std::abs(wv(s, "x") - Complex(1.0, 0.0) * weak_value(s.two_state_vector(), ops::sigma_x())), 0.0,
                1e-15);
    const std::string path = ::testing::TempDir() + "weakval_custom.json";
    std::ofstream(path) << text;
    EXPECT_TRUE(load_scenario(path) == s);
    std::remove(path.c_str());
}

TEST(Serialization, MalformedInputIsConfigError) {
    EXPECT_THROW(scenario_from_json("{"), ConfigError);
    EXPECT_THROW(scenario_from_json(R"({"name": "x"})"), ConfigError);
    EXPECT_THROW(scenario_from_json(R"({"name": "x", "dims": [2], "pre": [1, 0, 0], "post": [1, 0]})"), ConfigError);
    EXPECT_THROW(scenario_from_json(R"({"name": "x", "dims": [2], "pre": [[1, 2, 3], 0], "post": [1, 0]})"),
                 ConfigError);
    EXPECT_THROW(scenario_from_json(R"({"name": "x", "dims": [2], "pre": [1, 0], "post": [1, 0],
        "couplings": [{"site": 0, "named": "spin1_z"}]})"),
                 ConfigError);
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(Serialization, OrthogonalSelectionIsPhysicsError) {
    EXPECT_THROW(scenario_from_json(R"({"name": "x", "dims": [2], "pre": [1, 0], "post": [0, 1]})"),
                 DegeneratePostselection);
}

TEST(Causality, BobSignalsThroughIdealProductMeasurement) {
    EXPECT_NEAR(spin1_causality(BobAction::Nothing), 1.0, 1e-15);
    EXPECT_NEAR(spin1_causality(BobAction::FlipToOne), 0.5, 1e-15);
    EXPECT_NEAR(spin1_causality(BobAction::FlipToOne, false), 1.0, 1e-15);
    EXPECT_NEAR(spin1_causality(BobAction::Nothing, false), 1.0, 1e-15);
    EXPECT_NEAR(spin1_causality(BobAction::Nothing) - spin1_causality(BobAction::FlipToOne), 0.5, 1e-15);
}

TEST(Causality, BuiltinStateMatchesProtocol) {
    const ScenarioSpec s = builtin("spin1_causality");
    EXPECT_EQ(s.protocol, "spin1_causality");
    EXPECT_EQ(s.dims, (Dims{3, 3}));
    // (|0> + |-1>)_A |0>_B occupies flat indices 4 and 7.
    EXPECT_NE(s.pre[4], Complex(0.0));
    EXPECT_NE(s.pre[7], Complex(0.0));
    EXPECT_NEAR(s.pre_ket().squared_norm(), 1.0, 1e-15);
}

}  // namespace
}  // namespace weakval
