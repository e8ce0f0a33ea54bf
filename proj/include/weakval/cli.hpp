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
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "weakval/estimators.hpp"
#include "weakval/pointer.hpp"
#include "weakval/sweep.hpp"

namespace weakval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPhysics = 3;

struct RunConfig {
    std::string command;
    std::string subcommand;  // list | export for the scenario command
    std::string scenario;
    std::optional<double> epsilon;
    Estimator estimator = Estimator::Direct;
    bool estimator_set = false;
    std::optional<double> delta;
    SweepSpec sweep;
    std::size_t shots = 0;
    std::uint64_t seed = 1;
    Basis basis = Basis::Position;
    std::optional<Topology> topology;
    std::string out;
    std::string format;
    bool oracle = false;

    /// Throws ConfigError for inconsistent settings of the chosen command.
    void validate() const;
};

/// Parses argv-style arguments (without the program name) and runs the
/// command. Returns the process exit code; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weakval
