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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "weakval/qstate.hpp"

namespace weakval {

// Gaussian convention used everywhere: each pointer coordinate starts in
//
//     G(q) = (pi delta^2)^(-1/4) exp(-q^2 / (2 delta^2)),
//
// so the position density has variance delta^2 / 2 and the overlap of two
// copies shifted by a and b is exp(-|a - b|^2 / (4 delta^2)). hbar = 1.

enum class Topology {
    LocalProduct,  // one independent pointer per coupled observable
    EntangledSum,  // correlated pointers; only S = sum Q_i is retained
};

std::string to_string(Topology t);
/// Accepts "local-product" / "entangled-sum". Throws ConfigError otherwise.
Topology parse_topology(std::string_view name);

struct PointerConfig {
    Topology topology = Topology::LocalProduct;
    double delta = 1.0;
    /// Impulse integral of g(t); a branch with eigenvalue l shifts by coupling * l.
    double coupling = 1.0;
    /// Number of physical pointers; filled by couple().
    std::size_t n_pointers = 0;

    void validate() const;
};

/// Observable coupled to one pointer. A missing site means the operator acts
/// on the whole system (the unphysical direct coupling to a nonlocal variable).
struct Coupling {
    Operator op;
    std::optional<std::size_t> site;
    std::string label;
};

/// Full-system operator of a coupling.
Operator full_operator(const Coupling& c, const Dims& dims);

/// System component of one eigen-branch after the impulsive coupling.
struct SystemBranch {
    Eigen::VectorXcd component;
    std::vector<double> eigenvalues;  // one per coupling
    std::vector<double> shifts;       // one per pointer coordinate
};

/// System (x) device state right after coupling, in branched form.
struct CoupledState {
    Dims dims;
    PointerConfig config;
    std::vector<SystemBranch> branches;
    double pre_norm2 = 0.0;
    std::size_t coordinates = 0;
};

struct Branch {
    Complex amplitude;
    std::vector<double> shifts;
};

/// Device-only state sum_k amplitude_k G(q - shift_k).
class BranchedPointerState {
   public:
    /// `reference_norm2` is the squared norm before post-selection; it defaults
    /// to (sum |amplitude_k|)^2, an upper bound of the Gram norm.
    BranchedPointerState(std::vector<Branch> branches, PointerConfig config,
                         std::optional<double> reference_norm2 = std::nullopt);

    const std::vector<Branch>& branches() const { return branches_; }
    const PointerConfig& config() const { return config_; }
    double delta() const { return config_.delta; }
    std::size_t coordinates() const { return coordinates_; }
    double reference_norm2() const { return reference_norm2_; }

    /// sum_{k,l} conj(a_k) a_l Omega(s_k, s_l)
    double gram_norm2() const;
    double p_postselect() const { return gram_norm2() / reference_norm2_; }

    /// Unnormalized wavefunction in position and momentum representation.
    Complex position_amplitude(std::span<const double> q) const;
    Complex momentum_amplitude(std::span<const double> p) const;

   private:
    std::vector<Branch> branches_;
    PointerConfig config_;
    std::size_t coordinates_;
    double reference_norm2_;
};

/// Gaussian overlap kernel for two shift vectors.
double overlap_kernel(std::span<const double> a, std::span<const double> b, double delta);

/// Post-selection probability plus raw first and second moments of the
/// normalized conditional device state.
struct MomentSet {
    double p_postselect = 0.0;
    Eigen::VectorXd meanQ;
    Eigen::MatrixXd corrQQ;
    Eigen::VectorXd meanP;
    Eigen::MatrixXd corrPP;
};

/// Impulsive von Neumann coupling of the listed observables.
CoupledState couple(const Ket& pre, const std::vector<Coupling>& couplings, PointerConfig config);

/// Projects the system onto `post`, leaving a device-only branched state.
BranchedPointerState postselect(const CoupledState& coupled, const Ket& post);

/// Exact evaluation from the Gaussian Gram form.
MomentSet moments_closed_form(const BranchedPointerState& state);

enum class Basis { Position, Momentum };

std::string to_string(Basis b);
Basis parse_basis(std::string_view name);

/// E[X_i^2 X_j^2] for i != j in the chosen basis, closed form.
double cross_square_moment(const BranchedPointerState& state, Basis basis, std::size_t i, std::size_t j);

/// Quadrature grid, expressed in units of the pointer width.
struct GridSpec {
    /// Position spacing in units of delta; momentum spacing in units of 1/delta.
    double spacing = 0.125;
    /// Margin beyond the outermost shift, in units of delta (1/delta for momentum).
    double extent = 10.0;
    std::size_t max_points = 20'000'000;
};

/// Minimum extent accepted by the oracle.
inline constexpr double kMinGridExtent = 8.0;

/// Density tabulated on a rectangular grid. Values are flattened with the last
/// coordinate varying fastest.
struct GridDensity {
    std::vector<std::vector<double>> axes;
    std::vector<double> values;
    double cell_volume = 0.0;

    double integral() const;
};

/// |psi(q)|^2 on the oracle grid (normalized Gaussians, unnormalized state).
GridDensity tabulate_position_density(const BranchedPointerState& state, const GridSpec& spec = {});
/// |phi(p)|^2 on the oracle grid.
GridDensity tabulate_momentum_density(const BranchedPointerState& state, const GridSpec& spec = {});

/// Independent moments by grid quadrature of |psi|^2 and of the Fourier-side
/// density. Throws ConfigError when the grid does not cover the shifts by
/// kMinGridExtent widths.
MomentSet moments_grid_oracle(const BranchedPointerState& state, const GridSpec& spec = {});

struct StrongOutcome {
    std::vector<double> reading;  // pointer values rounded to eigenvalues
    double probability;
    Ket post_state;
};

struct StrongMeasurement {
    std::vector<StrongOutcome> outcomes;
};

/// Minimum eigenvalue gap over delta accepted by measure_strong.
inline constexpr double kStrongRegimeRatio = 10.0;

/// Projective limit of the pointer model: Born probabilities of the rounded
/// pointer readings and the conditional system states. Throws RegimeError
/// when coupling * gap / delta < kStrongRegimeRatio.
StrongMeasurement measure_strong(const Ket& pre, const std::vector<Coupling>& couplings, PointerConfig config);

}  // namespace weakval
