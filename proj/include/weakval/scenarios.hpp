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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weakval/pointer.hpp"
#include "weakval/qstate.hpp"
#include "weakval/tsvf.hpp"

namespace weakval {

/// Observable built from local terms (combined by sum or product), or given
/// directly as a full-system matrix.
struct ObservableSpec {
    std::string label;
    std::vector<LocalObservable> terms;
    Combine combine = Combine::Sum;
    std::optional<Operator> full;

    Operator resolve(const Dims& dims) const;
};

struct ScenarioSpec {
    std::string name;
    std::string description;
    /// "tsv" for plain pre/post-selected runs; the causality and modular-sum
    /// builtins carry their own protocol names.
    std::string protocol = "tsv";
    Dims dims;
    std::vector<Complex> pre;
    std::vector<Complex> post;
    std::vector<ObservableSpec> observables;
    /// Observables the measuring device couples to.
    std::vector<Coupling> couplings;
    Topology topology = Topology::LocalProduct;
    std::optional<double> epsilon;
    double delta = 1.0;
    double coupling = 1.0;

    Ket pre_ket() const { return Ket(pre, dims); }
    Ket post_ket() const { return Ket(post, dims); }
    /// Throws DegeneratePostselection when pre and post are orthogonal.
    TwoStateVector two_state_vector() const;
    PointerConfig pointer_config(std::optional<double> delta_override = std::nullopt,
                                 std::optional<Topology> topology_override = std::nullopt) const;
    /// Throws unless the spec resolves into a valid two-state vector and device.
    void validate() const;
};

bool operator==(const ScenarioSpec& a, const ScenarioSpec& b);

std::vector<std::string> builtin_names();

/// Named scenario from the built-in catalogue; epsilon applies to
/// epsilon_sum only (default 0.1). Throws ConfigError for unknown names.
ScenarioSpec builtin(std::string_view name, std::optional<double> epsilon = std::nullopt);

/// Builtin name, or path to a JSON scenario file.
ScenarioSpec load_scenario(const std::string& name_or_path);

std::string scenario_to_json(const ScenarioSpec& spec, int indent = 2);
ScenarioSpec scenario_from_json(std::string_view text);

enum class BobAction { Nothing, FlipToOne };

/// Probability that Alice's projection onto (|-1> + |0>)/sqrt(2) succeeds after
/// an ideal non-demolition measurement of sz_A sz_B on two spin-1 particles.
double spin1_causality(BobAction action, bool nonlocal_measurement = true);

}  // namespace weakval
