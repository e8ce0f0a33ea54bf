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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace weakval {

using Complex = std::complex<double>;
using Dims = std::vector<std::size_t>;

/// Tolerance used to validate the hermitian flag of an Operator.
inline constexpr double kHermitianTolerance = 1e-12;
/// Eigenvalues closer than this are merged into one degenerate projector.
inline constexpr double kDegeneracyTolerance = 1e-9;

/// Product of subsystem dimensions; throws ConfigError on an empty or zero entry.
std::size_t total_dimension(const Dims& dims);

/// Pure state over a tensor-product basis. Kets need not be normalized, but
/// their norm must be finite and nonzero.
class Ket {
   public:
    Ket(Eigen::VectorXcd amplitudes, Dims dims);
    Ket(const std::vector<Complex>& amplitudes, Dims dims);

    /// Computational basis vector |index> over `dims`.
    static Ket basis(Dims dims, std::size_t index);

    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    const Dims& dims() const { return dims_; }
    std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }
    Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

    double norm() const { return amplitudes_.norm(); }
    double squared_norm() const { return amplitudes_.squaredNorm(); }
    Ket normalized() const;
    Ket scaled(Complex factor) const;
    std::vector<Complex> coefficients() const;

   private:
    Eigen::VectorXcd amplitudes_;
    Dims dims_;
};

/// Square operator over a tensor-product space.
class Operator {
   public:
    /// Throws ConfigError when `hermitian` is set but the matrix is not
    /// hermitian within kHermitianTolerance.
    Operator(Eigen::MatrixXcd entries, Dims dims, bool hermitian);

    /// Sets the hermitian flag from the entries.
    static Operator detect(Eigen::MatrixXcd entries, Dims dims);
    static Operator identity(Dims dims);

    const Eigen::MatrixXcd& entries() const { return entries_; }
    const Dims& dims() const { return dims_; }
    bool is_hermitian() const { return hermitian_; }
    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    Ket apply(const Ket& ket) const;
    /// <bra|O|ket> without normalization.
    Complex matrix_element(const Ket& bra, const Ket& ket) const;

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(double s, const Operator& a);

   private:
    Eigen::MatrixXcd entries_;
    Dims dims_;
    bool hermitian_;
};

bool is_hermitian(const Eigen::MatrixXcd& m, double tolerance = kHermitianTolerance);

struct SpectralComponent {
    double eigenvalue;
    Operator projector;
    std::size_t rank;
};

/// Eigenvalues sorted ascending, one projector per distinct eigenvalue.
class SpectralDecomposition {
   public:
    explicit SpectralDecomposition(std::vector<SpectralComponent> components);

    const std::vector<SpectralComponent>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    const SpectralComponent& operator[](std::size_t i) const { return components_[i]; }
    std::vector<double> eigenvalues() const;

    /// Sum of eigenvalue * projector.
    Operator reconstruct() const;

   private:
    std::vector<SpectralComponent> components_;
};

/// Kronecker product with concatenated dims.
Ket tensor(std::span<const Ket> factors);
Ket tensor(std::initializer_list<Ket> factors);
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Lifts `local` to the full space: identity on every site except `site`.
Operator embed(const Operator& local, std::size_t site, const Dims& dims);

/// Spectral decomposition of a hermitian operator. Throws ConfigError for
/// non-hermitian input.
SpectralDecomposition eigendecompose(const Operator& op);

/// <bra|ket>, conjugate-linear in `bra`.
Complex inner(const Ket& bra, const Ket& ket);

/// Standard single-site observables. Basis order is descending eigenvalue:
/// index 0 is spin up (+1).
namespace ops {
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
Operator spin1_z();
}  // namespace ops

}  // namespace weakval
