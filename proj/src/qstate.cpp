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

#include "weakval/qstate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "weakval/errors.hpp"

namespace weakval {

std::size_t total_dimension(const Dims& dims) {
    if (dims.empty()) {
        throw ConfigError("dims must list at least one subsystem");
    }
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) {
            throw ConfigError("subsystem dimension must be positive");
        }
        total *= d;
    }
    return total;
}

Ket::Ket(Eigen::VectorXcd amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (total_dimension(dims_) != size()) {
        throw ConfigError("ket length " + std::to_string(size()) + " does not match product of dims");
    }
    const double n = amplitudes_.norm();
    if (!std::isfinite(n) || n == 0.0) {
        throw ConfigError("ket norm must be finite and nonzero");
    }
}

Ket::Ket(const std::vector<Complex>& amplitudes, Dims dims)
    : Ket(Eigen::Map<const Eigen::VectorXcd>(amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size())),
          std::move(dims)) {}

Ket Ket::basis(Dims dims, std::size_t index) {
    const std::size_t n = total_dimension(dims);
    if (index >= n) {
        throw ConfigError("basis index out of range");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return Ket(std::move(v), std::move(dims));
}

Ket Ket::normalized() const { return Ket(amplitudes_ / amplitudes_.norm(), dims_); }

Ket Ket::scaled(Complex factor) const { return Ket(amplitudes_ * factor, dims_); }

std::vector<Complex> Ket::coefficients() const { return {amplitudes_.data(), amplitudes_.data() + amplitudes_.size()}; }

bool is_hermitian(const Eigen::MatrixXcd& m, double tolerance) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

Operator::Operator(Eigen::MatrixXcd entries, Dims dims, bool hermitian)
    : entries_(std::move(entries)), dims_(std::move(dims)), hermitian_(hermitian) {
    if (entries_.rows() != entries_.cols()) {
        throw ConfigError("operator matrix must be square");
    }
    if (total_dimension(dims_) != size()) {
        throw ConfigError("operator size " + std::to_string(size()) + " does not match product of dims");
    }
    if (hermitian_ && !weakval::is_hermitian(entries_)) {
        throw ConfigError("operator flagged hermitian but differs from its adjoint");
    }
}

Operator Operator::detect(Eigen::MatrixXcd entries, Dims dims) {
    const bool h = weakval::is_hermitian(entries);
    return Operator(std::move(entries), std::move(dims), h);
}

Operator Operator::identity(Dims dims) {
    const auto n = static_cast<Eigen::Index>(total_dimension(dims));
    return Operator(Eigen::MatrixXcd::Identity(n, n), std::move(dims), true);
}

Eigen::VectorXcd Operator::apply(const Eigen::VectorXcd& v) const {
    if (v.size() != entries_.cols()) {
        throw ConfigError("operator/vector dimension mismatch");
    }
    return entries_ * v;
}

Ket Operator::apply(const Ket& ket) const {
    if (ket.dims() != dims_) {
        throw ConfigError("operator/ket dims mismatch");
    }
    return Ket(entries_ * ket.amplitudes(), dims_);
}

Complex Operator::matrix_element(const Ket& bra, const Ket& ket) const {
    if (bra.dims() != dims_ || ket.dims() != dims_) {
        throw ConfigError("operator/ket dims mismatch");
    }
    return bra.amplitudes().dot(entries_ * ket.amplitudes());
}

namespace {

void require_same_dims(const Operator& a, const Operator& b) {
    if (a.dims() != b.dims()) {
        throw ConfigError("operator dims mismatch");
    }
}

}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
    require_same_dims(a, b);
    return Operator::detect(a.entries_ + b.entries_, a.dims_);
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_dims(a, b);
    return Operator::detect(a.entries_ - b.entries_, a.dims_);
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dims(a, b);
    return Operator::detect(a.entries_ * b.entries_, a.dims_);
}

Operator operator*(double s, const Operator& a) { return Operator(s * a.entries_, a.dims_, a.hermitian_); }

SpectralDecomposition::SpectralDecomposition(std::vector<SpectralComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw ConfigError("spectral decomposition needs at least one component");
    }
}

std::vector<double> SpectralDecomposition::eigenvalues() const {
    std::vector<double> out;
    out.reserve(components_.size());
    for (const auto& c : components_) {
        out.push_back(c.eigenvalue);
    }
    return out;
}

Operator SpectralDecomposition::reconstruct() const {
    const auto& first = components_.front().projector;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(first.entries().rows(), first.entries().cols());
    for (const auto& c : components_) {
        sum += c.eigenvalue * c.projector.entries();
    }
    return Operator::detect(std::move(sum), first.dims());
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Ket tensor(std::span<const Ket> factors) {
    if (factors.empty()) {
        throw ConfigError("tensor product of an empty factor list");
    }
    Eigen::VectorXcd acc = factors.front().amplitudes();
    Dims dims = factors.front().dims();
    for (const Ket& f : factors.subspan(1)) {
        acc = kron(acc, f.amplitudes());
        dims.insert(dims.end(), f.dims().begin(), f.dims().end());
    }
    return Ket(std::move(acc), std::move(dims));
}

Ket tensor(std::initializer_list<Ket> factors) { return tensor(std::span<const Ket>(factors.begin(), factors.size())); }

Operator embed(const Operator& local, std::size_t site, const Dims& dims) {
    if (site >= dims.size()) {
        throw ConfigError("site " + std::to_string(site) + " out of range");
    }
    if (local.size() != dims[site]) {
        throw ConfigError("local operator dimension does not match dims[site]");
    }
    std::size_t before = 1;
    std::size_t after = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i < site) {
            before *= dims[i];
        } else if (i > site) {
            after *= dims[i];
        }
    }
    const auto ib = static_cast<Eigen::Index>(before);
    const auto ia = static_cast<Eigen::Index>(after);
    Eigen::MatrixXcd full = kron(kron(Eigen::MatrixXcd::Identity(ib, ib), local.entries()),
                                 Eigen::MatrixXcd::Identity(ia, ia));
    return Operator(std::move(full), dims, local.is_hermitian());
}

SpectralDecomposition eigendecompose(const Operator& op) {
    if (!op.is_hermitian()) {
        throw ConfigError("eigendecompose requires a hermitian operator");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.entries());
    if (solver.info() != Eigen::Success) {
        throw Error("eigen solver failed to converge");
    }
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXcd& vectors = solver.eigenvectors();

    std::vector<SpectralComponent> components;
    Eigen::Index start = 0;
    const Eigen::Index n = values.size();
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && values[stop] - values[stop - 1] <= kDegeneracyTolerance) {
            ++stop;
        }
        const Eigen::Index rank = stop - start;
        const Eigen::MatrixXcd block = vectors.middleCols(start, rank);
        Eigen::MatrixXcd projector = block * block.adjoint();
        projector = 0.5 * (projector + projector.adjoint()).eval();
        const double eigenvalue = values.segment(start, rank).mean();
        components.push_back({eigenvalue, Operator(std::move(projector), op.dims(), true),
                              static_cast<std::size_t>(rank)});
        start = stop;
    }
    return SpectralDecomposition(std::move(components));
}

Complex inner(const Ket& bra, const Ket& ket) {
    if (bra.dims() != ket.dims()) {
        throw ConfigError("inner product dims mismatch");
    }
    return bra.amplitudes().dot(ket.amplitudes());
}

namespace ops {

Operator sigma_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(m, {2}, true);
}

Operator sigma_y() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator(m, {2}, true);
}

Operator sigma_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(m, {2}, true);
}

Operator spin1_z() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
    m(0, 0) = 1.0;
    m(2, 2) = -1.0;
    return Operator(m, {3}, true);
}

}  // namespace ops

}  // namespace weakval
