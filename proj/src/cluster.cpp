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

#include "mphd/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace mphd {

AdjacencyMatrix::AdjacencyMatrix(RealMatrix v, double tol) : v_(std::move(v)) {
    if (v_.rows() != v_.cols() || v_.rows() == 0) {
        std::ostringstream msg;
        msg << "adjacency matrix must be square and non-empty, got " << v_.rows() << "x" << v_.cols();
        throw Error(ErrorCode::Dimension, msg.str());
    }
    if (!v_.allFinite()) {
        throw Error(ErrorCode::Validation, "adjacency matrix has non-finite entries");
    }
    const double asym = (v_ - v_.transpose()).cwiseAbs().maxCoeff();
    const double diag = v_.diagonal().cwiseAbs().maxCoeff();
    if (asym > tol || diag > tol) {
        std::ostringstream msg;
        msg << "adjacency matrix must be symmetric with zero diagonal (asymmetry " << asym << ", diagonal " << diag
            << ")";
        throw Error(ErrorCode::Validation, msg.str());
    }
}

AdjacencyMatrix AdjacencyMatrix::from_edges(std::size_t n,
                                            const std::vector<std::pair<std::size_t, std::size_t>> &edges,
                                            double weight) {
    RealMatrix v = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto &[a, b] : edges) {
        if (a >= n || b >= n || a == b) {
            std::ostringstream msg;
            msg << "invalid edge (" << a << ", " << b << ") for a graph with " << n << " nodes";
            throw Error(ErrorCode::Validation, msg.str());
        }
        const auto i = static_cast<Eigen::Index>(a);
        const auto j = static_cast<Eigen::Index>(b);
        v(i, j) = weight;
        v(j, i) = weight;
    }
    return AdjacencyMatrix(std::move(v));
}

AdjacencyMatrix AdjacencyMatrix::empty(std::size_t n) { return from_edges(n, {}); }

AdjacencyMatrix AdjacencyMatrix::path(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return from_edges(n, edges);
}

AdjacencyMatrix AdjacencyMatrix::cycle(std::size_t n) {
    if (n < 3) {
        throw Error(ErrorCode::Validation, "a cycle needs at least 3 nodes");
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n);
    }
    return from_edges(n, edges);
}

AdjacencyMatrix AdjacencyMatrix::star(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 1; i < n; ++i) {
        edges.emplace_back(0, i);
    }
    return from_edges(n, edges);
}

RealMatrix solve_A(const AdjacencyMatrix &adj) {
    const RealMatrix &v = adj.matrix();
    const Eigen::Index n = v.rows();
    const Eigen::Index n2 = n * n;

    // Column-major vec: vec(V A V) = (V^T (x) V) vec(A), and V is symmetric.
    RealMatrix k(n2, n2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            k.block(i * n, j * n, n, n) = v(i, j) * v;
        }
    }
    k += RealMatrix::Identity(n2, n2);
    const RealMatrix identity = RealMatrix::Identity(n, n);
    const RealVector rhs = Eigen::Map<const RealVector>(identity.data(), n2);

    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(k);
    const RealVector sol = cod.solve(rhs);
    RealMatrix a = Eigen::Map<const RealMatrix>(sol.data(), n, n);
    a = 0.5 * (a + a.transpose());

    const double residual = (v * a * v - (RealMatrix::Identity(n, n) - a)).norm();
    const double min_eig = Eigen::SelfAdjointEigenSolver<RealMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(residual <= 1e-10) || !(min_eig >= -1e-10)) {
        std::ostringstream msg;
        msg << "no positive semidefinite solution of V A V = I - A: residual " << residual
            << ", smallest eigenvalue " << min_eig;
        throw Error(ErrorCode::Infeasible, msg.str());
    }
    return a;
}

RealMatrix symmetric_X(const RealMatrix &a, double tol) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::Dimension, "symmetric_X: matrix must be square");
    }
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorCode::Validation, "symmetric_X: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::Numerical, "symmetric_X: eigendecomposition failed");
    }
    RealVector lambda = es.eigenvalues();
    if (lambda(0) < -tol) {
        std::ostringstream msg;
        msg << "symmetric_X: matrix is not positive semidefinite (eigenvalue " << lambda(0) << ")";
        throw Error(ErrorCode::NotPsd, msg.str());
    }
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    const RealMatrix &q = es.eigenvectors();
    RealMatrix x = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (x + x.transpose());
}

ClusterSolution cluster_unitary(const AdjacencyMatrix &v) {
    return cluster_unitary(v, RealOrthogonal::identity(v.size()));
}

ClusterSolution cluster_unitary(const AdjacencyMatrix &v, const RealOrthogonal &freedom) {
    if (freedom.size() != v.size()) {
        throw Error(ErrorCode::Dimension, "cluster_unitary: freedom size does not match the graph");
    }
    ClusterSolution s;
    s.v = v;
    s.a = solve_A(v);
    s.x_s = symmetric_X(s.a);
    s.x = s.x_s * freedom.matrix();
    s.y = v.matrix() * s.x;
    s.u = s.x.cast<Complex>() + Complex(0, 1) * s.y.cast<Complex>();
    s.freedom = freedom;
    return s;
}

RealOrthogonal euler_orthogonal(double psi, double theta, double phi) {
    auto rz = [](double a) {
        RealMatrix r = RealMatrix::Identity(3, 3);
        r(0, 0) = std::cos(a);
        r(0, 1) = std::sin(a);
        r(1, 0) = -std::sin(a);
        r(1, 1) = std::cos(a);
        return r;
    };
    RealMatrix ry = RealMatrix::Identity(3, 3);
    ry(0, 0) = std::cos(theta);
    ry(0, 2) = std::sin(theta);
    ry(2, 0) = -std::sin(theta);
    ry(2, 2) = std::cos(theta);
    return RealOrthogonal(rz(psi) * ry * rz(phi), 1e-12);
}

ClusterValidation validate_cluster(const ComplexMatrix &u, const AdjacencyMatrix &v, double tol) {
    require_square(u, "U");
    if (static_cast<std::size_t>(u.rows()) != v.size()) {
        throw Error(ErrorCode::Dimension, "validate_cluster: U and V sizes differ");
    }
    const RealMatrix x = u.real();
    const RealMatrix y = u.imag();
    const auto n = x.rows();
    ClusterValidation r;
    r.tol = tol;
    ComplexMatrix recombined = x.cast<Complex>() + Complex(0, 1) * y.cast<Complex>();
    r.residuals[0] = (recombined - u).norm();
    r.residuals[1] = (y - v.matrix() * x).norm();
    r.residuals[2] = (x * x.transpose() + y * y.transpose() - RealMatrix::Identity(n, n)).norm();
    r.residuals[3] = (x.transpose() * y - y.transpose() * x).norm();
    r.residuals[4] = (x * y.transpose() - y * x.transpose()).norm();
    r.passed = std::all_of(r.residuals.begin(), r.residuals.end(), [tol](double e) { return e <= tol; });
    return r;
}

ClusterValidation validate_cluster(const ClusterSolution &sol, double tol) {
    return validate_cluster(sol.u, sol.v, tol);
}

ComplexMatrix recover_freedom(const ComplexMatrix &u, const AdjacencyMatrix &v) {
    require_square(u, "U");
    const auto n = static_cast<Eigen::Index>(v.size());
    if (u.rows() != n) {
        throw Error(ErrorCode::Dimension, "recover_freedom: U and V sizes differ");
    }
    const RealMatrix x_s = symmetric_X(solve_A(v));
    const ComplexMatrix left =
        (ComplexMatrix::Identity(n, n) + Complex(0, 1) * v.matrix().cast<Complex>()) * x_s.cast<Complex>();
    return left.partialPivLu().solve(u);
}

ComplexMatrix linear_cluster_4() {
    const double a = 1 / std::sqrt(2.0);
    const double b = 1 / std::sqrt(10.0);
    const Complex i(0, 1);
    ComplexMatrix u(4, 4);
    u << a, b, 2.0 * i * b, 0,   //
        i * a, -i * b, 2 * b, 0,  //
        0, -2 * b, i * b, i * a,  //
        0, -2.0 * i * b, -b, a;
    return u;
}

ComplexMatrix three_mode_cluster() {
    const double r2 = 1 / std::sqrt(2.0);
    const double r3 = 1 / std::sqrt(3.0);
    const double r6 = 1 / std::sqrt(6.0);
    const Complex i(0, 1);
    ComplexMatrix u(3, 3);
    u << 0, -std::sqrt(2.0 / 3.0), -i * r3,  //
        -i * r2, -i * r6, -r3,              //
        -r2, r6, -i * r3;
    return u;
}

}  // namespace mphd
