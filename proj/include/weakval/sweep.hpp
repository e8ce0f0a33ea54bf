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
#include <string>
#include <vector>

#include "weakval/estimators.hpp"
#include "weakval/scenarios.hpp"

namespace weakval {

struct SweepSpec {
    double delta_min = 1.0;
    double delta_max = 1000.0;
    std::size_t points = 50;
    bool log_spaced = true;

    /// Throws ConfigError unless 0 < min < max and points >= 2.
    void validate() const;
    std::vector<double> grid() const;
};

enum class Device {
    EntangledSum,     // correlated pointers reading the sum directly
    LocalProduct,     // one pointer per particle
    NonlocalProduct,  // single pointer coupled to the product observable
};

std::string to_string(Device d);

struct SweepRow {
    double delta = 0.0;
    Device device = Device::LocalProduct;
    std::string estimator;
    /// Closed-form expectation of the estimator.
    double analytic = 0.0;
    /// Sampled estimate when shots were requested, otherwise the analytic value.
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    /// Relative deviation of the analytic value from Re(target).
    double deviation = 0.0;
};

/// Devices compared for an estimator: entangled vs local for sums, nonlocal
/// product pointer vs local pair for the joint estimators.
std::vector<Device> sweep_devices(Estimator estimator);

/// Closed-form expectation of the estimator on one device at width delta.
double device_expectation(const ScenarioSpec& scenario, Estimator estimator, Device device, double delta);

/// Target weak value for the estimator, independent of device.
Complex device_target(const ScenarioSpec& scenario, Estimator estimator);

/// One row per grid point per device. shots = 0 skips sampling.
std::vector<SweepRow> run_sweep(const ScenarioSpec& scenario, Estimator estimator, const SweepSpec& spec,
                                std::size_t shots = 0, std::uint64_t seed = 1);

/// Header plus rows: delta,device,estimator,analytic,estimate,stderr,target,deviation
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Largest delta in [lo, hi] at which the analytic deviation still equals
/// `threshold`; above it the device stays within threshold. Found by a
/// descending log scan then bisection. Throws ConfigError when deviation at
/// hi already exceeds threshold or never reaches it in the range.
double deviation_crossing(const ScenarioSpec& scenario, Estimator estimator, Device device, double threshold,
                          double lo, double hi);

}  // namespace weakval
