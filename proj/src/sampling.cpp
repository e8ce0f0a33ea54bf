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

#include "weakval/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "weakval/errors.hpp"
#include "weakval/tsvf.hpp"

namespace weakval {

std::uint64_t CounterRng::mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 64) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Normalized running CDF; returns false when the mass is zero.
bool to_cdf(std::span<double> v) {
    double acc = 0.0;
    for (double& x : v) {
        acc += std::max(x, 0.0);
        x = acc;
    }
    if (!(acc > 0.0)) {
        return false;
    }
    for (double& x : v) {
        x /= acc;
    }
    return true;
}

std::size_t pick(std::span<const double> cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

GridSampler::GridSampler(GridDensity density) : axes_(std::move(density.axes)) {
    if (axes_.empty() || axes_.size() > 2) {
        throw ConfigError("grid sampler supports one or two pointer coordinates");
    }
    for (const auto& a : axes_) {
        spacing_.push_back(a.size() > 1 ? a[1] - a[0] : 0.0);
    }
    auto& v = density.values;
    const std::size_t rows = axes_[0].size();
    const std::size_t cols = axes_.size() == 2 ? axes_[1].size() : 1;
    marginal_cdf_.assign(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        marginal_cdf_[i] = pairwise_sum(std::span<const double>(v).subspan(i * cols, cols));
    }
    if (!to_cdf(marginal_cdf_)) {
        throw InconsistentSelection("conditional pointer density vanishes on the grid");
    }
    if (cols > 1) {
        conditional_cdf_ = std::move(v);
        for (std::size_t i = 0; i < rows; ++i) {
            to_cdf(std::span<double>(conditional_cdf_).subspan(i * cols, cols));
        }
    }
}

void GridSampler::draw(std::span<const double> u, std::span<double> out) const {
    const std::size_t i = pick(marginal_cdf_, u[0]);
    out[0] = axes_[0][i] + (u[1] - 0.5) * spacing_[0];
    if (axes_.size() == 2) {
        const std::size_t cols = axes_[1].size();
        const std::size_t j = pick(std::span<const double>(conditional_cdf_).subspan(i * cols, cols), u[2]);
        out[1] = axes_[1][j] + (u[3] - 0.5) * spacing_[1];
    }
}

GridSampler make_sampler(const BranchedPointerState& state, Basis basis) {
    GridSpec spec;
    spec.max_points = 4'000'000;
    for (double spacing : {1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0}) {
        spec.spacing = spacing;
        try {
            return GridSampler(basis == Basis::Position ? tabulate_position_density(state, spec)
                                                        : tabulate_momentum_density(state, spec));
        } catch (const ConfigError&) {
            // grid too large at this spacing; coarsen
        }
    }
    throw ConfigError("pointer shifts span too many widths for the sampling grid");
}

namespace {

// Counters used within one shot's stream.
constexpr std::uint64_t kPostselectCounter = 0;
constexpr std::uint64_t kReadingCounter = 1;

template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, n / 4096 + 1);
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo < hi) {
            pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
        }
    }
    for (auto& t : pool) {
        t.join();
    }
}

std::vector<ShotRecord> run_shots(const BranchedPointerState& state, Basis basis, std::size_t n,
                                  std::uint64_t seed, std::size_t first_index, double p_accept) {
    const GridSampler sampler = make_sampler(state, basis);
    const std::size_t dim = sampler.coordinates();
    std::vector<ShotRecord> shots(n);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        double u[4];
        for (std::size_t s = lo; s < hi; ++s) {
            const std::size_t index = first_index + s;
            const CounterRng rng(seed, index);
            ShotRecord& r = shots[s];
            r.index = index;
            r.shot_seed = rng.key();
            r.postselected = rng.uniform(kPostselectCounter) < p_accept;
            if (!r.postselected) {
                continue;
            }
            for (std::uint64_t c = 0; c < 4; ++c) {
                u[c] = rng.uniform(kReadingCounter + c);
            }
            r.readings.assign(dim, 0.0);
            sampler.draw(u, r.readings);
        }
    });
    return shots;
}

}  // namespace

std::vector<ShotRecord> sample_shots(const BranchedPointerState& state, Basis basis, std::size_t n,
                                     std::uint64_t seed) {
    if (n == 0) {
        throw ConfigError("number of shots must be at least 1");
    }
    return run_shots(state, basis, n, seed, 0, state.p_postselect());
}

std::vector<ShotRecord> sample_postselected(const BranchedPointerState& state, Basis basis, std::size_t n,
                                            std::uint64_t seed) {
    if (n == 0) {
        throw ConfigError("number of shots must be at least 1");
    }
    return run_shots(state, basis, n, seed, 0, 1.0);
}

std::vector<ShotRecord> sample_postselected_rejection(const BranchedPointerState& state, Basis basis,
                                                      std::size_t n, std::uint64_t seed) {
    const auto& br = state.branches();
    const std::size_t dim = state.coordinates();
    const double d = state.delta();
    std::vector<double> weights;
    double a_sum = 0.0;
    for (const auto& b : br) {
        weights.push_back(std::abs(b.amplitude));
        a_sum += std::abs(b.amplitude);
    }
    std::vector<double> branch_cdf = weights;
    to_cdf(branch_cdf);
    // |sum a_k f_k|^2 <= (sum |a_k|) sum |a_k| |f_k|^2 in position space, and
    // <= (sum |a_k|)^2 |f_0|^2 in momentum space, with |f|^2 Gaussian.
    const double sigma = basis == Basis::Position ? d / std::numbers::sqrt2 : 1.0 / (std::numbers::sqrt2 * d);
    auto gauss2 = [&](std::span<const double> x, const std::vector<double>* centre) {
        double e = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double u = x[c] - (centre ? (*centre)[c] : 0.0);
            e += u * u;
        }
        return std::exp(-e / (2.0 * sigma * sigma)) / std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * dim);
    };

    std::vector<ShotRecord> shots;
    shots.reserve(n);
    std::vector<double> x(dim);
    const std::size_t max_tries = 10'000 * n + 1'000'000;
    for (std::uint64_t trial = 0; shots.size() < n; ++trial) {
        if (trial > max_tries) {
            throw InsufficientStatistics("rejection sampler acceptance too low for this state");
        }
        const CounterRng rng(seed, trial);
        std::uint64_t ctr = 0;
        const std::size_t k = basis == Basis::Position ? pick(branch_cdf, rng.uniform(ctr++)) : 0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double u1 = 1.0 - rng.uniform(ctr++);
            const double u2 = rng.uniform(ctr++);
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            x[c] = (basis == Basis::Position ? br[k].shifts[c] : 0.0) + sigma * z;
        }
        double rho;
        double env;
        if (basis == Basis::Position) {
            rho = std::norm(state.position_amplitude(x));
            env = 0.0;
            for (std::size_t j = 0; j < br.size(); ++j) {
                env += weights[j] * gauss2(x, &br[j].shifts);
            }
            env *= a_sum;
        } else {
            rho = std::norm(state.momentum_amplitude(x));
            env = a_sum * a_sum * gauss2(x, nullptr);
        }
        if (rng.uniform(ctr++) * env < rho) {
            shots.push_back({shots.size(), true, x, rng.key()});
        }
    }
    return shots;
}

void write_shots_csv(std::ostream& os, const std::vector<ShotRecord>& shots, Basis basis, Topology topology,
                     std::size_t coordinates) {
    const bool q = basis == Basis::Position;
    const std::size_t dim = coordinates;
    os << "shot_index,postselected";
    if (topology == Topology::EntangledSum && dim == 1) {
        os << (q ? ",S" : ",P_S");
    } else {
        for (std::size_t c = 0; c < dim; ++c) {
            const std::string site = dim == 2 ? std::string(1, static_cast<char>('A' + c)) : std::to_string(c);
            os << (q ? ",Q_" : ",P_") << site;
        }
    }
    os << '\n';
    for (const auto& s : shots) {
        os << s.index << ',' << (s.postselected ? 1 : 0);
        for (std::size_t c = 0; c < dim; ++c) {
            os << ',';
            if (c < s.readings.size()) {
                os << fmt::format("{:.17g}", s.readings[c]);
            }
        }
        os << '\n';
    }
}

namespace {

struct SampleMoments {
    std::size_t n = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd corr;
};

SampleMoments sample_moments(const std::vector<ShotRecord>& shots) {
    SampleMoments m;
    std::size_t dim = 0;
    for (const auto& s : shots) {
        if (s.postselected) {
            dim = s.readings.size();
            ++m.n;
        }
    }
    const auto d = static_cast<Eigen::Index>(dim);
    m.mean = Eigen::VectorXd::Zero(d);
    m.corr = Eigen::MatrixXd::Zero(d, d);
    if (m.n == 0) {
        return m;
    }
    std::vector<double> buf;
    buf.reserve(m.n);
    auto average = [&](auto term) {
        buf.clear();
        for (const auto& s : shots) {
            if (s.postselected) {
                buf.push_back(term(s.readings));
            }
        }
        return pairwise_sum(buf) / static_cast<double>(buf.size());
    };
    for (Eigen::Index i = 0; i < d; ++i) {
        m.mean[i] = average([i](const std::vector<double>& r) { return r[static_cast<std::size_t>(i)]; });
        for (Eigen::Index j = 0; j <= i; ++j) {
            m.corr(i, j) = average([i, j](const std::vector<double>& r) {
                return r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)];
            });
            m.corr(j, i) = m.corr(i, j);
        }
    }
    return m;
}

// Sample mean and unbiased variance of a per-shot statistic.
std::pair<double, double> statistic(const std::vector<ShotRecord>& shots,
                                    const std::function<double(const std::vector<double>&)>& f) {
    std::vector<double> v;
    for (const auto& s : shots) {
        if (s.postselected) {
            v.push_back(f(s.readings));
        }
    }
    const double n = static_cast<double>(v.size());
    const double mean = pairwise_sum(v) / n;
    for (double& x : v) {
        x = (x - mean) * (x - mean);
    }
    return {mean, v.size() > 1 ? pairwise_sum(v) / (n - 1.0) : 0.0};
}

double sum_readings(const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) {
        s += x;
    }
    return s;
}

double pair_product(const std::vector<double>& r) { return r.at(0) * r.at(1); }

void require_pair(const BranchedPointerState& state, Estimator e) {
    if (state.coordinates() < 2 || state.config().topology == Topology::EntangledSum) {
        throw ConfigError(to_string(e) + " needs two independent local pointers");
    }
}

}  // namespace

double per_shot_std(const BranchedPointerState& state, Estimator estimator) {
    const MomentSet m = moments_closed_form(state);
    switch (estimator) {
        case Estimator::Direct:
        case Estimator::SumRule: {
            const Eigen::MatrixXd cov = m.corrQQ - m.meanQ * m.meanQ.transpose();
            return std::sqrt(std::max(cov.sum(), 0.0));
        }
        case Estimator::ReschSteinberg: {
            require_pair(state, estimator);
            const double c = m.corrQQ(0, 1);
            return 2.0 * std::sqrt(std::max(cross_square_moment(state, Basis::Position, 0, 1) - c * c, 0.0));
        }
        case Estimator::ReschLundeen: {
            require_pair(state, estimator);
            const double cq = m.corrQQ(0, 1);
            const double cp = m.corrPP(0, 1);
            const double k = resch_lundeen_prefactor(state.delta());
            const double vq = cross_square_moment(state, Basis::Position, 0, 1) - cq * cq;
            const double vp = cross_square_moment(state, Basis::Momentum, 0, 1) - cp * cp;
            return std::sqrt(std::max(2.0 * (vq + k * k * vp), 0.0));
        }
    }
    return 0.0;
}

double pilot_per_shot_std(const BranchedPointerState& state, Estimator estimator, std::size_t n_pilot,
                          std::uint64_t seed) {
    if (n_pilot < 2) {
        throw ConfigError("pilot run needs at least two shots");
    }
    switch (estimator) {
        case Estimator::Direct:
        case Estimator::SumRule:
            return std::sqrt(statistic(sample_postselected(state, Basis::Position, n_pilot, seed), sum_readings).second);
        case Estimator::ReschSteinberg:
            require_pair(state, estimator);
            return 2.0 *
                   std::sqrt(statistic(sample_postselected(state, Basis::Position, n_pilot, seed), pair_product).second);
        case Estimator::ReschLundeen: {
            require_pair(state, estimator);
            const double k = resch_lundeen_prefactor(state.delta());
            const double vq = statistic(sample_postselected(state, Basis::Position, n_pilot, seed), pair_product).second;
            const double vp =
                statistic(sample_postselected(state, Basis::Momentum, n_pilot, seed + 1), pair_product).second;
            return std::sqrt(2.0 * (vq + k * k * vp));
        }
    }
    return 0.0;
}

EnsembleRequirement required_ensemble(const BranchedPointerState& state, Estimator estimator, double target,
                                      double rel_uncertainty) {
    if (target == 0.0) {
        throw ConfigError("relative uncertainty is undefined for a zero target");
    }
    if (!(rel_uncertainty > 0.0)) {
        throw ConfigError("relative uncertainty must be positive");
    }
    EnsembleRequirement r;
    r.per_shot_std = per_shot_std(state, estimator);
    r.p_postselect = state.p_postselect();
    const double ratio = r.per_shot_std / (rel_uncertainty * std::abs(target));
    r.n_postselected = std::max(1.0, std::ceil(ratio * ratio));
    r.n_total = std::ceil(r.n_postselected / r.p_postselect);
    return r;
}

BranchedPointerState prepare_device(const ScenarioSpec& scenario, double delta, std::optional<Topology> topology) {
    const CoupledState coupled = couple(scenario.pre_ket(), scenario.couplings, scenario.pointer_config(delta, topology));
    return postselect(coupled, scenario.post_ket());
}

Complex estimator_target(const ScenarioSpec& scenario, Estimator estimator) {
    if (scenario.couplings.empty()) {
        throw ConfigError("scenario '" + scenario.name + "' has no coupled observables");
    }
    const TwoStateVector tsv = scenario.two_state_vector();
    const bool joint = estimator == Estimator::ReschSteinberg || estimator == Estimator::ReschLundeen;
    Operator acc = full_operator(scenario.couplings.front(), scenario.dims);
    for (std::size_t k = 1; k < scenario.couplings.size(); ++k) {
        const Operator next = full_operator(scenario.couplings[k], scenario.dims);
        acc = joint ? acc * next : acc + next;
    }
    return weak_value(tsv, acc);
}

EnsembleStats run_experiment(const ScenarioSpec& scenario, Estimator estimator, double delta, std::size_t n,
                             std::uint64_t seed, std::optional<Topology> topology) {
    if (n == 0) {
        throw ConfigError("number of shots must be at least 1");
    }
    const BranchedPointerState state = prepare_device(scenario, delta, topology);
    const Topology topo = state.config().topology;
    const Complex target = estimator_target(scenario, estimator);
    const bool joint = estimator == Estimator::ReschSteinberg || estimator == Estimator::ReschLundeen;
    if (joint) {
        require_pair(state, estimator);
    }

    EnsembleStats st;
    st.estimator = to_string(estimator);
    st.delta = delta;
    st.seed = seed;
    st.n_total = n;
    st.target = target;

    auto count = [](const std::vector<ShotRecord>& shots) {
        return static_cast<std::size_t>(
            std::count_if(shots.begin(), shots.end(), [](const ShotRecord& s) { return s.postselected; }));
    };
    auto need = [](std::size_t got, const char* what) {
        if (got < 2) {
            throw InsufficientStatistics(fmt::format("only {} post-selected {} trials; increase --shots", got, what));
        }
    };

    const std::size_t n_q = estimator == Estimator::ReschLundeen ? n - n / 2 : n;
    const double p = state.p_postselect();
    const std::vector<ShotRecord> q_shots = run_shots(state, Basis::Position, n_q, seed, 0, p);
    st.n_postselected = count(q_shots);
    need(st.n_postselected, "position");

    MomentSet m;
    m.p_postselect = static_cast<double>(st.n_postselected) / static_cast<double>(n_q);
    const SampleMoments sq = sample_moments(q_shots);
    m.meanQ = sq.mean;
    m.corrQQ = sq.corr;
    m.meanP = Eigen::VectorXd::Zero(sq.mean.size());
    m.corrPP = Eigen::MatrixXd::Zero(sq.mean.size(), sq.mean.size());

    double variance_of_estimate = 0.0;
    Complex a_w = 0.0;
    Complex b_w = 0.0;
    switch (estimator) {
        case Estimator::Direct:
        case Estimator::SumRule: {
            const auto [mean, var] = statistic(q_shots, sum_readings);
            (void)mean;
            variance_of_estimate = var / static_cast<double>(st.n_postselected);
            break;
        }
        case Estimator::ReschSteinberg: {
            const TwoStateVector tsv = scenario.two_state_vector();
            a_w = weak_value(tsv, full_operator(scenario.couplings.at(0), scenario.dims));
            b_w = weak_value(tsv, full_operator(scenario.couplings.at(1), scenario.dims));
            const auto [mean, var] = statistic(q_shots, pair_product);
            (void)mean;
            variance_of_estimate = 4.0 * var / static_cast<double>(st.n_postselected);
            break;
        }
        case Estimator::ReschLundeen: {
            const std::vector<ShotRecord> p_shots = run_shots(state, Basis::Momentum, n - n_q, seed, n_q, p);
            const std::size_t n_p = count(p_shots);
            need(n_p, "momentum");
            st.n_postselected += n_p;
            const SampleMoments sp = sample_moments(p_shots);
            m.meanP = sp.mean;
            m.corrPP = sp.corr;
            const double k = resch_lundeen_prefactor(delta);
            const double vq = statistic(q_shots, pair_product).second;
            const double vp = statistic(p_shots, pair_product).second;
            variance_of_estimate = vq / static_cast<double>(st.n_postselected - n_p) + k * k * vp / static_cast<double>(n_p);
            break;
        }
    }
    const EstimateReport rep = estimate(estimator, m, topo, delta, target, a_w, b_w);
    st.estimate = rep.value;
    st.deviation = rep.deviation;
    st.std_error = std::sqrt(variance_of_estimate);
    return st;
}

}  // namespace weakval
