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
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "weakval/qstate.hpp"

namespace weakval::testing {

inline Eigen::VectorXcd random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = Complex(g(rng), g(rng));
    }
    return v;
}

inline Ket random_ket(std::mt19937_64& rng, const Dims& dims) {
    return Ket(random_vector(rng, total_dimension(dims)), dims);
}

inline Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    return 0.5 * (a + a.adjoint());
}

// Plain-loop Kronecker product, independent of the library routine.
inline Eigen::MatrixXcd naive_kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (Eigen::Index k = 0; k < b.rows(); ++k) {
                for (Eigen::Index l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

// Weak value written out as explicit sums over components.
inline Complex naive_weak_value(const Ket& pre, const Ket& post, const Eigen::MatrixXcd& op) {
    Complex num = 0.0;
    Complex den = 0.0;
    for (std::size_t i = 0; i < pre.size(); ++i) {
        den += std::conj(post[i]) * pre[i];
        for (std::size_t j = 0; j < pre.size(); ++j) {
            num += std::conj(post[i]) * op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * pre[j];
        }
    }
    return num / den;
}

}  // namespace weakval::testing
