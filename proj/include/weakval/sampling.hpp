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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "weakval/estimators.hpp"
#include "weakval/pointer.hpp"
#include "weakval/scenarios.hpp"

namespace weakval {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so shots can be produced in any order.
class CounterRng {
   public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + mix(counter + 1)); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const { return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53; }
    std::uint64_t key() const { return key_; }

    static std::uint64_t mix(std::uint64_t x);

   private:
    std::uint64_t key_;
};

struct ShotRecord {
    std::size_t index = 0;
    bool postselected = false;
    /// One reading per pointer coordinate, empty unless post-selected.
    std::vector<double> readings;
    std::uint64_t shot_seed = 0;
};

struct EnsembleStats {
    std::string estimator;
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_total = 0;
    std::size_t n_postselected = 0;
    double estimate = 0.0;
    /// Standard error of the estimate, Delta_n-style.
    double std_error = 0.0;
    Complex target;
    double deviation = 0.0;
};

/// Inverse-CDF sampler over a tabulated density with at most two coordinates.
/// The first coordinate is drawn from its marginal, the second from the
/// conditional row; readings are jittered uniformly inside the chosen cell.
class GridSampler {
   public:
    explicit GridSampler(GridDensity density);

    std::size_t coordinates() const { return axes_.size(); }
    /// Maps uniforms in [0, 1) to one reading per coordinate.
    void draw(std::span<const double> u, std::span<double> out) const;

   private:
    std::vector<std::vector<double>> axes_;
    std::vector<double> spacing_;
    std::vector<double> marginal_cdf_;
    std::vector<double> conditional_cdf_;  // row-major, one CDF per first-axis cell
};

/// Builds a sampler for the position or Fourier-side density of `state`,
/// refining the grid to 1/32 of the pointer width when the point budget allows.
GridSampler make_sampler(const BranchedPointerState& state, Basis basis);

/// Bernoulli post-selection with p_postselect, then a reading from the
/// normalized conditional density. Deterministic given seed; shots run on
/// worker threads.
std::vector<ShotRecord> sample_shots(const BranchedPointerState& state, Basis basis, std::size_t n,
                                     std::uint64_t seed);

/// Exactly n post-selected readings drawn from the conditional density.
std::vector<ShotRecord> sample_postselected(const BranchedPointerState& state, Basis basis, std::size_t n,
                                            std::uint64_t seed);

/// Rejection sampler over the Gaussian-mixture envelope; a slow cross-check
/// of the grid path for states without strong cancellation.
std::vector<ShotRecord> sample_postselected_rejection(const BranchedPointerState& state, Basis basis,
                                                      std::size_t n, std::uint64_t seed);

/// Shot dump with columns shot_index, postselected, then Q_A,Q_B (or S), or
/// P_A,P_B (or P_S) in the momentum basis.
void write_shots_csv(std::ostream& os, const std::vector<ShotRecord>& shots, Basis basis, Topology topology,
                     std::size_t coordinates);

/// Sum with pairwise reduction; result independent of thread layout.
double pairwise_sum(std::span<const double> values);

struct EnsembleRequirement {
    double per_shot_std = 0.0;
    double p_postselect = 0.0;
    double n_postselected = 0.0;
    double n_total = 0.0;
};

/// Per-shot standard deviation of the estimator's statistic, from closed-form
/// second and fourth moments. Resch-Lundeen assumes the shots are split
/// evenly between position and momentum readout.
double per_shot_std(const BranchedPointerState& state, Estimator estimator);

/// Same quantity from a pilot Monte Carlo run.
double pilot_per_shot_std(const BranchedPointerState& state, Estimator estimator, std::size_t n_pilot,
                          std::uint64_t seed);

/// Ensemble needed for rel_uncertainty * |target| standard error.
/// Throws ConfigError for a zero target or non-positive uncertainty.
EnsembleRequirement required_ensemble(const BranchedPointerState& state, Estimator estimator, double target,
                                      double rel_uncertainty);

/// Device state for a scenario at pointer width delta.
BranchedPointerState prepare_device(const ScenarioSpec& scenario, double delta,
                                    std::optional<Topology> topology = std::nullopt);

/// Weak value the estimator targets: the sum of the coupled observables for
/// direct readout, their product for the joint estimators.
Complex estimator_target(const ScenarioSpec& scenario, Estimator estimator);

/// Couples, post-selects, samples n trials and estimates. Throws
/// InsufficientStatistics when fewer than two trials per readout basis survive.
EnsembleStats run_experiment(const ScenarioSpec& scenario, Estimator estimator, double delta, std::size_t n,
                             std::uint64_t seed, std::optional<Topology> topology = std::nullopt);

}  // namespace weakval
