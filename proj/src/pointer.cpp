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

#include "weakval/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "weakval/errors.hpp"

namespace weakval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

// Mass of the density |G(q - center)|^2 inside (lo, hi].
double cell_mass(double center, double lo, double hi, double delta) {
    auto above = [&](double x) { return x == kInf ? 0.0 : 0.5 * std::erfc((x - center) / delta); };
    auto below = [&](double x) { return x == -kInf ? 0.0 : 0.5 * std::erfc((center - x) / delta); };
    if (center < lo) {
        return above(lo) - above(hi);
    }
    if (center > hi) {
        return below(hi) - below(lo);
    }
    return 1.0 - below(lo) - above(hi);
}

std::vector<double> distinct_eigenvalues(const Operator& op) {
    return eigendecompose(op).eigenvalues();
}

}  // namespace

std::string to_string(Topology t) { return t == Topology::LocalProduct ? "local-product" : "entangled-sum"; }

Topology parse_topology(std::string_view name) {
    if (name == "local-product" || name == "local") {
        return Topology::LocalProduct;
    }
    if (name == "entangled-sum" || name == "entangled") {
        return Topology::EntangledSum;
    }
    throw ConfigError("unknown pointer topology '" + std::string(name) + "'");
}

std::string to_string(Basis b) { return b == Basis::Position ? "position" : "momentum"; }

Basis parse_basis(std::string_view name) {
    if (name == "position" || name == "q") {
        return Basis::Position;
    }
    if (name == "momentum" || name == "p") {
        return Basis::Momentum;
    }
    throw ConfigError("unknown basis '" + std::string(name) + "'");
}

void PointerConfig::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ConfigError("pointer width delta must be positive and finite");
    }
    if (!std::isfinite(coupling)) {
        throw ConfigError("coupling strength must be finite");
    }
}

Operator full_operator(const Coupling& c, const Dims& dims) {
    if (c.site) {
        return embed(c.op, *c.site, dims);
    }
    if (c.op.dims() != dims) {
        throw ConfigError("full-system coupling '" + c.label + "' has mismatched dims");
    }
    return c.op;
}

double overlap_kernel(std::span<const double> a, std::span<const double> b, double delta) {
    return std::exp(-squared_distance(a, b) / (4.0 * delta * delta));
}

BranchedPointerState::BranchedPointerState(std::vector<Branch> branches, PointerConfig config,
                                           std::optional<double> reference_norm2)
    : branches_(std::move(branches)), config_(config) {
    config_.validate();
    if (branches_.empty()) {
        throw ConfigError("branched pointer state needs at least one branch");
    }
    coordinates_ = branches_.front().shifts.size();
    if (coordinates_ == 0) {
        throw ConfigError("branch shift vectors must be nonempty");
    }
    double l1 = 0.0;
    for (const auto& b : branches_) {
        if (b.shifts.size() != coordinates_) {
            throw ConfigError("all branch shift vectors must have equal length");
        }
        if (!std::isfinite(std::abs(b.amplitude))) {
            throw ConfigError("branch amplitude must be finite");
        }
        l1 += std::abs(b.amplitude);
    }
    if (l1 == 0.0) {
        throw ConfigError("branched pointer state has no nonzero amplitude");
    }
    reference_norm2_ = reference_norm2.value_or(l1 * l1);
    if (!(reference_norm2_ > 0.0) || !std::isfinite(reference_norm2_)) {
        throw ConfigError("reference norm must be positive and finite");
    }
}

double BranchedPointerState::gram_norm2() const {
    Complex sum = 0.0;
    for (const auto& b : branches_) {
        sum += b.amplitude;
    }
    double gram = std::norm(sum);
    const double denom = 4.0 * delta() * delta();
    for (const auto& bk : branches_) {
        for (const auto& bl : branches_) {
            const double e = std::expm1(-squared_distance(bk.shifts, bl.shifts) / denom);
            gram += (std::conj(bk.amplitude) * bl.amplitude).real() * e;
        }
    }
    return gram;
}

Complex BranchedPointerState::position_amplitude(std::span<const double> q) const {
    if (q.size() != coordinates_) {
        throw ConfigError("coordinate count mismatch");
    }
    const double d = delta();
    const double norm = std::pow(std::numbers::pi * d * d, -0.25 * static_cast<double>(coordinates_));
    Complex psi = 0.0;
    for (const auto& b : branches_) {
        psi += b.amplitude * std::exp(-squared_distance(q, b.shifts) / (2.0 * d * d));
    }
    return norm * psi;
}

Complex BranchedPointerState::momentum_amplitude(std::span<const double> p) const {
    if (p.size() != coordinates_) {
        throw ConfigError("coordinate count mismatch");
    }
    const double d = delta();
    const double norm = std::pow(d * d / std::numbers::pi, 0.25 * static_cast<double>(coordinates_));
    double p2 = 0.0;
    for (double x : p) {
        p2 += x * x;
    }
    Complex phi = 0.0;
    for (const auto& b : branches_) {
        double phase = 0.0;
        for (std::size_t c = 0; c < coordinates_; ++c) {
            phase -= p[c] * b.shifts[c];
        }
        phi += b.amplitude * std::polar(1.0, phase);
    }
    return norm * std::exp(-p2 * d * d / 2.0) * phi;
}

CoupledState couple(const Ket& pre, const std::vector<Coupling>& couplings, PointerConfig config) {
    config.validate();
    if (couplings.empty()) {
        throw ConfigError("at least one observable must be coupled");
    }
    const Dims& dims = pre.dims();
    std::set<std::size_t> sites;
    bool has_global = false;
    for (const auto& c : couplings) {
        if (!c.op.is_hermitian()) {
            throw ConfigError("coupled observable '" + c.label + "' is not hermitian");
        }
        if (c.site) {
            if (!sites.insert(*c.site).second) {
                throw ConfigError("two observables are coupled on the same site");
            }
        } else {
            has_global = true;
        }
    }
    if (has_global && couplings.size() > 1) {
        throw ConfigError("a full-system observable must be the only coupled observable");
    }
    if (config.topology == Topology::EntangledSum) {
        if (couplings.size() < 2) {
            throw ConfigError("entangled-sum device needs at least two pointers");
        }
        if (has_global) {
            throw ConfigError("entangled-sum device couples local observables only");
        }
    }
    if (config.n_pointers != 0 && config.n_pointers != couplings.size()) {
        throw ConfigError("pointer count does not match number of coupled observables");
    }
    config.n_pointers = couplings.size();

    std::vector<SpectralDecomposition> decomps;
    for (const auto& c : couplings) {
        decomps.push_back(eigendecompose(full_operator(c, dims)));
    }
    std::size_t count = 1;
    for (const auto& d : decomps) {
        count *= d.size();
    }

    CoupledState out;
    out.dims = dims;
    out.config = config;
    out.pre_norm2 = pre.squared_norm();
    out.coordinates = config.topology == Topology::LocalProduct ? couplings.size() : 1;
    const double drop = 1e-28 * out.pre_norm2;
    const double g = config.coupling;

    for (std::size_t flat = 0; flat < count; ++flat) {
        std::vector<std::size_t> idx(decomps.size());
        std::size_t rest = flat;
        for (std::size_t k = decomps.size(); k-- > 0;) {
            idx[k] = rest % decomps[k].size();
            rest /= decomps[k].size();
        }
        Eigen::VectorXcd v = pre.amplitudes();
        std::vector<double> eig;
        for (std::size_t k = 0; k < decomps.size(); ++k) {
            v = decomps[k][idx[k]].projector.apply(v);
            eig.push_back(decomps[k][idx[k]].eigenvalue);
        }
        if (v.squaredNorm() <= drop) {
            continue;
        }
        if (config.topology == Topology::LocalProduct) {
            std::vector<double> shifts;
            for (double e : eig) {
                shifts.push_back(g * e);
            }
            out.branches.push_back({std::move(v), std::move(eig), std::move(shifts)});
            continue;
        }
        double total = 0.0;
        for (double e : eig) {
            total += e;
        }
        auto same = std::find_if(out.branches.begin(), out.branches.end(), [&](const SystemBranch& b) {
            return std::abs(b.eigenvalues.front() - total) <= kDegeneracyTolerance;
        });
        if (same != out.branches.end()) {
            same->component += v;
        } else {
            out.branches.push_back({std::move(v), {total}, {g * total}});
        }
    }
    if (out.branches.empty()) {
        throw ConfigError("pre-selected state has no support on any eigen-branch");
    }
    return out;
}

BranchedPointerState postselect(const CoupledState& coupled, const Ket& post) {
    if (post.dims() != coupled.dims) {
        throw ConfigError("post-selected state dims do not match the system");
    }
    const double reference = coupled.pre_norm2 * post.squared_norm();
    const double drop = 1e-14 * std::sqrt(reference);
    std::vector<Branch> branches;
    for (const auto& sb : coupled.branches) {
        const Complex amp = post.amplitudes().dot(sb.component);
        if (std::abs(amp) <= drop) {
            continue;
        }
        auto same = std::find_if(branches.begin(), branches.end(), [&](const Branch& b) {
            return squared_distance(b.shifts, sb.shifts) <= 1e-24;
        });
        if (same != branches.end()) {
            same->amplitude += amp;
        } else {
            branches.push_back({amp, sb.shifts});
        }
    }
    std::erase_if(branches, [&](const Branch& b) { return std::abs(b.amplitude) <= drop; });
    if (branches.empty()) {
        throw InconsistentSelection("post-selection annihilates every branch of the coupled state");
    }
    return BranchedPointerState(std::move(branches), coupled.config, reference);
}

MomentSet moments_closed_form(const BranchedPointerState& state) {
    const auto& br = state.branches();
    const auto n = static_cast<Eigen::Index>(state.coordinates());
    const double d = state.delta();
    const double d2 = d * d;
    const double d4 = d2 * d2;

    // Unit-overlap part of the Gram sums in factorized form; the
    // (Omega - 1) remainder is added pairwise below with expm1.
    Complex a_sum = 0.0;
    Eigen::VectorXcd b_sum = Eigen::VectorXcd::Zero(n);
    Eigen::MatrixXcd c_sum = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& b : br) {
        const Eigen::Map<const Eigen::VectorXd> s(b.shifts.data(), n);
        a_sum += b.amplitude;
        b_sum += b.amplitude * s.cast<Complex>();
        c_sum += b.amplitude * (s * s.transpose()).cast<Complex>();
    }
    const double a2 = std::norm(a_sum);
    const Eigen::MatrixXd bb = (b_sum.conjugate() * b_sum.transpose()).real();
    const Eigen::MatrixXd ac = (std::conj(a_sum) * c_sum).real();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    double gram = a2;
    Eigen::VectorXd num_q = (std::conj(a_sum) * b_sum).real();
    Eigen::MatrixXd num_qq = 0.5 * (ac + bb) + eye * (d2 / 2.0) * a2;
    Eigen::VectorXd num_p = (std::conj(a_sum) * b_sum).imag() / d2;
    Eigen::MatrixXd num_pp = eye * a2 / (2.0 * d2) - (ac - bb) / (2.0 * d4);

    for (const auto& bk : br) {
        const Eigen::Map<const Eigen::VectorXd> sk(bk.shifts.data(), n);
        for (const auto& bl : br) {
            const Eigen::Map<const Eigen::VectorXd> sl(bl.shifts.data(), n);
            const Eigen::VectorXd diff = sk - sl;
            const double e = std::expm1(-diff.squaredNorm() / (4.0 * d2));
            if (e == 0.0) {
                continue;
            }
            const Complex w = std::conj(bk.amplitude) * bl.amplitude;
            const Eigen::VectorXd mid = 0.5 * (sk + sl);
            gram += w.real() * e;
            num_q += w.real() * e * mid;
            num_qq += w.real() * e * (mid * mid.transpose() + eye * (d2 / 2.0));
            num_p -= w.imag() * e * diff / (2.0 * d2);
            num_pp += w.real() * e * (eye / (2.0 * d2) - diff * diff.transpose() / (4.0 * d4));
        }
    }

    MomentSet m;
    m.p_postselect = gram / state.reference_norm2();
    m.meanQ = num_q / gram;
    m.corrQQ = num_qq / gram;
    m.meanP = num_p / gram;
    m.corrPP = num_pp / gram;
    return m;
}

double cross_square_moment(const BranchedPointerState& state, Basis basis, std::size_t i, std::size_t j) {
    if (i == j || i >= state.coordinates() || j >= state.coordinates()) {
        throw ConfigError("cross_square_moment needs two distinct valid coordinates");
    }
    const double d2 = state.delta() * state.delta();
    double num = 0.0;
    for (const auto& bk : state.branches()) {
        for (const auto& bl : state.branches()) {
            const double w = (std::conj(bk.amplitude) * bl.amplitude).real();
            const double omega = overlap_kernel(bk.shifts, bl.shifts, state.delta());
            double term = 1.0;
            for (std::size_t c : {i, j}) {
                if (basis == Basis::Position) {
                    const double mid = 0.5 * (bk.shifts[c] + bl.shifts[c]);
                    term *= mid * mid + d2 / 2.0;
                } else {
                    const double diff = bk.shifts[c] - bl.shifts[c];
                    term *= 1.0 / (2.0 * d2) - diff * diff / (4.0 * d2 * d2);
                }
            }
            num += w * omega * term;
        }
    }
    return num / state.gram_norm2();
}

double GridDensity::integral() const {
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s * cell_volume;
}

namespace {

void check_grid_spec(const GridSpec& spec) {
    if (!(spec.spacing > 0.0)) {
        throw ConfigError("grid spacing must be positive");
    }
    if (spec.extent < kMinGridExtent) {
        throw ConfigError("grid too small: extent must cover the shifts by at least 8 pointer widths");
    }
}

std::vector<double> make_axis(double lo, double hi, double h) {
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
    const double mid = 0.5 * (lo + hi);
    const double start = mid - 0.5 * h * static_cast<double>(n - 1);
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) {
        axis[i] = start + h * static_cast<double>(i);
    }
    return axis;
}

// factors[k][c][i]: contribution of branch k along coordinate c at axis point i.
GridDensity tabulate(const BranchedPointerState& state, std::vector<std::vector<double>> axes,
                     const std::vector<std::vector<std::vector<Complex>>>& factors, std::size_t max_points) {
    GridDensity g;
    std::size_t total = 1;
    g.cell_volume = 1.0;
    for (const auto& a : axes) {
        total *= a.size();
        g.cell_volume *= a[1] - a[0];
    }
    if (total > max_points) {
        throw ConfigError("grid has " + std::to_string(total) + " points, above the configured maximum");
    }
    const std::size_t n = axes.size();
    const auto& br = state.branches();
    g.values.resize(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t c = n; c-- > 0;) {
            idx[c] = rest % axes[c].size();
            rest /= axes[c].size();
        }
        Complex psi = 0.0;
        for (std::size_t k = 0; k < br.size(); ++k) {
            Complex term = br[k].amplitude;
            for (std::size_t c = 0; c < n; ++c) {
                term *= factors[k][c][idx[c]];
            }
            psi += term;
        }
        g.values[flat] = std::norm(psi);
    }
    g.axes = std::move(axes);
    return g;
}

}  // namespace

GridDensity tabulate_position_density(const BranchedPointerState& state, const GridSpec& spec) {
    check_grid_spec(spec);
    const double d = state.delta();
    const std::size_t n = state.coordinates();
    const auto& br = state.branches();
    std::vector<std::vector<double>> axes;
    for (std::size_t c = 0; c < n; ++c) {
        double lo = kInf;
        double hi = -kInf;
        for (const auto& b : br) {
            lo = std::min(lo, b.shifts[c]);
            hi = std::max(hi, b.shifts[c]);
        }
        axes.push_back(make_axis(lo - spec.extent * d, hi + spec.extent * d, spec.spacing * d));
    }
    const double norm = std::pow(std::numbers::pi * d * d, -0.25);
    std::vector<std::vector<std::vector<Complex>>> factors(br.size(), std::vector<std::vector<Complex>>(n));
    for (std::size_t k = 0; k < br.size(); ++k) {
        for (std::size_t c = 0; c < n; ++c) {
            for (double x : axes[c]) {
                const double u = x - br[k].shifts[c];
                factors[k][c].push_back(norm * std::exp(-u * u / (2.0 * d * d)));
            }
        }
    }
    return tabulate(state, std::move(axes), factors, spec.max_points);
}

GridDensity tabulate_momentum_density(const BranchedPointerState& state, const GridSpec& spec) {
    check_grid_spec(spec);
    const double d = state.delta();
    const std::size_t n = state.coordinates();
    const auto& br = state.branches();
    std::vector<std::vector<double>> axes;
    for (std::size_t c = 0; c < n; ++c) {
        double max_diff = 0.0;
        for (const auto& bk : br) {
            for (const auto& bl : br) {
                max_diff = std::max(max_diff, std::abs(bk.shifts[c] - bl.shifts[c]));
            }
        }
        // Interference terms oscillate as exp(i p diff); keep aliasing far out.
        const double h = std::min(spec.spacing / d, 2.0 * std::numbers::pi / (max_diff + 16.0 * d));
        axes.push_back(make_axis(-spec.extent / d, spec.extent / d, h));
    }
    const double norm = std::pow(d * d / std::numbers::pi, 0.25);
    std::vector<std::vector<std::vector<Complex>>> factors(br.size(), std::vector<std::vector<Complex>>(n));
    for (std::size_t k = 0; k < br.size(); ++k) {
        for (std::size_t c = 0; c < n; ++c) {
            for (double p : axes[c]) {
                factors[k][c].push_back(norm * std::exp(-p * p * d * d / 2.0) * std::polar(1.0, -p * br[k].shifts[c]));
            }
        }
    }
    return tabulate(state, std::move(axes), factors, spec.max_points);
}

namespace {

void grid_moments(const GridDensity& g, Eigen::VectorXd& mean, Eigen::MatrixXd& corr, double& mass) {
    const std::size_t n = g.axes.size();
    mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    corr = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double z = 0.0;
    std::vector<std::size_t> idx(n, 0);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        std::size_t rest = flat;
        for (std::size_t c = n; c-- > 0;) {
            idx[c] = rest % g.axes[c].size();
            rest /= g.axes[c].size();
            x[static_cast<Eigen::Index>(c)] = g.axes[c][idx[c]];
        }
        const double rho = g.values[flat];
        z += rho;
        mean += rho * x;
        corr += rho * (x * x.transpose());
    }
    mean /= z;
    corr /= z;
    mass = z * g.cell_volume;
}

}  // namespace

MomentSet moments_grid_oracle(const BranchedPointerState& state, const GridSpec& spec) {
    MomentSet m;
    double q_mass = 0.0;
    double p_mass = 0.0;
    grid_moments(tabulate_position_density(state, spec), m.meanQ, m.corrQQ, q_mass);
    grid_moments(tabulate_momentum_density(state, spec), m.meanP, m.corrPP, p_mass);
    m.p_postselect = q_mass / state.reference_norm2();
    return m;
}

StrongMeasurement measure_strong(const Ket& pre, const std::vector<Coupling>& couplings, PointerConfig config) {
    const CoupledState cs = couple(pre, couplings, config);
    const double g = cs.config.coupling;
    const double delta = cs.config.delta;

    std::vector<std::vector<double>> candidates;
    if (cs.config.topology == Topology::LocalProduct) {
        for (const auto& c : couplings) {
            candidates.push_back(distinct_eigenvalues(full_operator(c, cs.dims)));
        }
    } else {
        Operator total = full_operator(couplings.front(), cs.dims);
        for (std::size_t k = 1; k < couplings.size(); ++k) {
            total = total + full_operator(couplings[k], cs.dims);
        }
        candidates.push_back(distinct_eigenvalues(total));
    }
    for (auto& cand : candidates) {
        for (double& v : cand) {
            v *= g;
        }
        std::sort(cand.begin(), cand.end());
        for (std::size_t i = 1; i < cand.size(); ++i) {
            if ((cand[i] - cand[i - 1]) / delta < kStrongRegimeRatio) {
                throw RegimeError("pointer width too large for a strong measurement (gap/delta < 10)");
            }
        }
    }

    auto cell_of = [&](std::size_t c, double x) {
        const auto& cand = candidates[c];
        std::size_t best = 0;
        for (std::size_t i = 1; i < cand.size(); ++i) {
            if (std::abs(cand[i] - x) < std::abs(cand[best] - x)) {
                best = i;
            }
        }
        return best;
    };
    auto cell_bounds = [&](std::size_t c, std::size_t j) {
        const auto& cand = candidates[c];
        const double lo = j == 0 ? -kInf : 0.5 * (cand[j - 1] + cand[j]);
        const double hi = j + 1 == cand.size() ? kInf : 0.5 * (cand[j] + cand[j + 1]);
        return std::pair{lo, hi};
    };

    StrongMeasurement out;
    for (const auto& target : cs.branches) {
        std::vector<double> reading;
        double prob = 0.0;
        for (const auto& source : cs.branches) {
            double mass = source.component.squaredNorm() / cs.pre_norm2;
            for (std::size_t c = 0; c < cs.coordinates; ++c) {
                const auto [lo, hi] = cell_bounds(c, cell_of(c, target.shifts[c]));
                mass *= cell_mass(source.shifts[c], lo, hi, delta);
            }
            prob += mass;
        }
        for (std::size_t c = 0; c < cs.coordinates; ++c) {
            reading.push_back(candidates[c][cell_of(c, target.shifts[c])] / (g == 0.0 ? 1.0 : g));
        }
        out.outcomes.push_back({std::move(reading), prob, Ket(target.component, cs.dims).normalized()});
    }
    return out;
}

}  // namespace weakval
