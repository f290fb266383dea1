// Copyright 2026 The mphd Authors
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

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mphd/matcore.hpp"

namespace mphd {

/// Real symmetric graph weights with zero diagonal.
class AdjacencyMatrix {
   public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(RealMatrix v, double tol = 1e-12);

    static AdjacencyMatrix from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges,
                                      double weight = 1.0);
    static AdjacencyMatrix empty(std::size_t n);
    static AdjacencyMatrix path(std::size_t n);
    static AdjacencyMatrix cycle(std::size_t n);
    static AdjacencyMatrix star(std::size_t n);

    std::size_t size() const { return static_cast<std::size_t>(v_.rows()); }
    const RealMatrix &matrix() const { return v_; }

   private:
    RealMatrix v_;
};

/// Symmetric PSD solution of V A V = I - A. The system is solved in its
/// vectorized form (V (x) V + I) vec(A) = vec(I) by minimum-norm least squares.
RealMatrix solve_A(const AdjacencyMatrix &v);

/// Principal square root of a symmetric PSD matrix.
RealMatrix symmetric_X(const RealMatrix &a, double tol = 1e-10);

struct ClusterSolution {
    AdjacencyMatrix v;
    RealMatrix a;
    RealMatrix x_s;
    RealMatrix x;
    RealMatrix y;
    ComplexMatrix u;
    RealOrthogonal freedom;
};

/// U = (I + iV) X_s O for an orthogonal freedom O (identity by default).
ClusterSolution cluster_unitary(const AdjacencyMatrix &v);
ClusterSolution cluster_unitary(const AdjacencyMatrix &v, const RealOrthogonal &freedom);

/// Rz(psi) Ry(theta) Rz(phi).
RealOrthogonal euler_orthogonal(double psi, double theta, double phi);

struct ClusterValidation {
    // residuals in the order: U = X + iY, Y = VX, XX^T + YY^T = I,
    // X^T Y = Y^T X, X Y^T = Y X^T
    static constexpr std::array<const char *, 5> kNames = {"u_split", "y_eq_vx", "xxt_plus_yyt", "xty_symmetric",
                                                           "xyt_symmetric"};
    std::array<double, 5> residuals{};
    double tol = kDefaultTol;
    bool passed = false;
};

ClusterValidation validate_cluster(const ComplexMatrix &u, const AdjacencyMatrix &v, double tol = kDefaultTol);
ClusterValidation validate_cluster(const ClusterSolution &sol, double tol = kDefaultTol);

/// Freedom O recovered from a cluster unitary: X_s^-1 (I + iV)^-1 U.
ComplexMatrix recover_freedom(const ComplexMatrix &u, const AdjacencyMatrix &v);

/// Four-mode linear cluster unitary (path graph 1-2-3-4).
ComplexMatrix linear_cluster_4();

/// A three-mode linear cluster unitary (path graph 1-2-3) with real/imaginary
/// block structure suited to the Fourier gate example.
ComplexMatrix three_mode_cluster();

}  // namespace mphd
