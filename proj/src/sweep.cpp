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

#include "weakval/sweep.hpp"

#include <cmath>

#include <fmt/format.h>

#include "weakval/errors.hpp"
#include "weakval/pointer.hpp"
#include "weakval/sampling.hpp"
#include "weakval/tsvf.hpp"

namespace weakval {

void SweepSpec::validate() const {
    if (!(delta_min > 0.0) || !(delta_max > delta_min) || !std::isfinite(delta_max)) {
        throw ConfigError("sweep needs 0 < delta-min < delta-max");
    }
    if (points < 2) {
        throw ConfigError("sweep needs at least two points");
    }
}

std::vector<double> SweepSpec::grid() const {
    validate();
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        g[i] = log_spaced ? delta_min * std::pow(delta_max / delta_min, t) : delta_min + t * (delta_max - delta_min);
    }
    g.back() = delta_max;
    return g;
}

std::string to_string(Device d) {
    switch (d) {
        case Device::EntangledSum:
            return "entangled-sum";
        case Device::LocalProduct:
            return "local-product";
        case Device::NonlocalProduct:
            return "nonlocal-product";
    }
    return "unknown";
}

namespace {

bool is_joint(Estimator e) { return e == Estimator::ReschSteinberg || e == Estimator::ReschLundeen; }

ScenarioSpec device_scenario(const ScenarioSpec& scenario, Device device) {
    ScenarioSpec s = scenario;
    switch (device) {
        case Device::EntangledSum:
            s.topology = Topology::EntangledSum;
            break;
        case Device::LocalProduct:
            s.topology = Topology::LocalProduct;
            break;
        case Device::NonlocalProduct: {
            if (scenario.couplings.size() < 2) {
                throw ConfigError("nonlocal product device needs two coupled observables");
            }
            Operator prod = full_operator(scenario.couplings[0], scenario.dims);
            std::string label = scenario.couplings[0].label;
            for (std::size_t k = 1; k < scenario.couplings.size(); ++k) {
                prod = prod * full_operator(scenario.couplings[k], scenario.dims);
                label += "*" + scenario.couplings[k].label;
            }
            s.couplings = {Coupling{prod, std::nullopt, label}};
            s.topology = Topology::LocalProduct;
            break;
        }
    }
    return s;
}

// Estimator actually applied on the device: a single product pointer is read directly.
Estimator device_estimator(Estimator e, Device device) {
    return device == Device::NonlocalProduct ? Estimator::Direct : e;
}

double analytic_value(const ScenarioSpec& s, Estimator e, double delta, Complex a_w, Complex b_w) {
    const BranchedPointerState state = prepare_device(s, delta);
    const MomentSet m = moments_closed_form(state);
    return estimate(e, m, state.config().topology, delta, 0.0, a_w, b_w).value;
}

std::pair<Complex, Complex> local_weak_values(const ScenarioSpec& s) {
    const TwoStateVector tsv = s.two_state_vector();
    return {weak_value(tsv, full_operator(s.couplings.at(0), s.dims)),
            weak_value(tsv, full_operator(s.couplings.at(1), s.dims))};
}

}  // namespace

std::vector<Device> sweep_devices(Estimator estimator) {
    if (is_joint(estimator)) {
        return {Device::NonlocalProduct, Device::LocalProduct};
    }
    return {Device::EntangledSum, Device::LocalProduct};
}

Complex device_target(const ScenarioSpec& scenario, Estimator estimator) { return estimator_target(scenario, estimator); }

double device_expectation(const ScenarioSpec& scenario, Estimator estimator, Device device, double delta) {
    const ScenarioSpec s = device_scenario(scenario, device);
    const Estimator e = device_estimator(estimator, device);
    Complex a_w = 0.0;
    Complex b_w = 0.0;
    if (e == Estimator::ReschSteinberg) {
        std::tie(a_w, b_w) = local_weak_values(s);
    }
    return analytic_value(s, e, delta, a_w, b_w);
}

std::vector<SweepRow> run_sweep(const ScenarioSpec& scenario, Estimator estimator, const SweepSpec& spec,
                                std::size_t shots, std::uint64_t seed) {
    const std::vector<double> grid = spec.grid();
    const Complex target = device_target(scenario, estimator);
    std::vector<SweepRow> rows;
    for (Device device : sweep_devices(estimator)) {
        const ScenarioSpec s = device_scenario(scenario, device);
        const Estimator e = device_estimator(estimator, device);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            SweepRow r;
            r.delta = grid[i];
            r.device = device;
            r.estimator = to_string(e);
            r.analytic = device_expectation(scenario, estimator, device, r.delta);
            r.estimate = r.analytic;
            r.target = target.real();
            r.deviation = relative_deviation(r.analytic, target);
            if (shots > 0) {
                const EnsembleStats st = run_experiment(s, e, r.delta, shots, seed + i);
                r.estimate = st.estimate;
                r.std_error = st.std_error;
            }
            rows.push_back(r);
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "delta,device,estimator,analytic,estimate,stderr,target,deviation\n";
    for (const auto& r : rows) {
        os << fmt::format("{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.delta, to_string(r.device),
                          r.estimator, r.analytic, r.estimate, r.std_error, r.target, r.deviation);
    }
}

double deviation_crossing(const ScenarioSpec& scenario, Estimator estimator, Device device, double threshold,
                          double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo) || !(threshold > 0.0)) {
        throw ConfigError("crossing search needs 0 < lo < hi and a positive threshold");
    }
    const Complex target = device_target(scenario, estimator);
    auto excess = [&](double delta) {
        return relative_deviation(device_expectation(scenario, estimator, device, delta), target) - threshold;
    };
    if (excess(hi) > 0.0) {
        throw ConfigError(fmt::format("deviation still above {} at delta = {}", threshold, hi));
    }
    constexpr int kScan = 400;
    const double ratio = std::pow(hi / lo, 1.0 / kScan);
    double upper = hi;
    double lower = hi;
    bool found = false;
    for (int i = 1; i <= kScan; ++i) {
        lower = hi / std::pow(ratio, i);
        if (excess(lower) >= 0.0) {
            found = true;
            break;
        }
        upper = lower;
    }
    if (!found) {
        throw ConfigError(fmt::format("deviation stays below {} over [{}, {}]", threshold, lo, hi));
    }
    for (int it = 0; it < 200 && upper - lower > 1e-12 * upper; ++it) {
        const double mid = std::sqrt(lower * upper);
        (excess(mid) >= 0.0 ? lower : upper) = mid;
    }
    return 0.5 * (lower + upper);
}

}  // namespace weakval
