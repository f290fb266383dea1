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

#include "mphd/matcore.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mphd {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Dimension: return "dimension";
        case ErrorCode::Resolution: return "resolution";
        case ErrorCode::SingularPixel: return "singular-pixel";
        case ErrorCode::Validation: return "validation";
        case ErrorCode::Feasibility: return "feasibility";
        case ErrorCode::InternalConsistency: return "internal-consistency";
        case ErrorCode::Capacity: return "capacity";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::NotPsd: return "not-psd";
        case ErrorCode::Singularity: return "singularity";
        case ErrorCode::Numerical: return "numerical";
        case ErrorCode::Config: return "config";
    }
    return "unknown";
}

double wrap_phase(double angle) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double w = std::remainder(angle, two_pi);  // [-pi, pi]
    if (w <= -std::numbers::pi) {
        w += two_pi;
    }
    return w;
}

DiagonalUnitary::DiagonalUnitary(std::vector<double> phases) : phases_(std::move(phases)) {
    for (double p : phases_) {
        if (!std::isfinite(p)) {
            throw Error(ErrorCode::Validation, "DiagonalUnitary: non-finite phase");
        }
    }
}

DiagonalUnitary DiagonalUnitary::identity(std::size_t n) {
    return DiagonalUnitary(std::vector<double>(n, 0.0));
}

DiagonalUnitary DiagonalUnitary::from_entries(const Eigen::VectorXcd &entries, double tol) {
    std::vector<double> phases(entries.size());
    for (Eigen::Index k = 0; k < entries.size(); ++k) {
        if (std::abs(std::abs(entries[k]) - 1.0) > tol) {
            std::ostringstream msg;
            msg << "diagonal entry " << k << " has modulus " << std::abs(entries[k]) << ", expected 1";
            throw Error(ErrorCode::Validation, msg.str());
        }
        phases[k] = std::arg(entries[k]);
    }
    return DiagonalUnitary(std::move(phases));
}

Eigen::VectorXcd DiagonalUnitary::diagonal() const {
    Eigen::VectorXcd d(phases_.size());
    for (std::size_t k = 0; k < phases_.size(); ++k) {
        d[k] = std::polar(1.0, phases_[k]);
    }
    return d;
}

ComplexMatrix DiagonalUnitary::matrix() const { return diagonal().asDiagonal(); }

DiagonalUnitary DiagonalUnitary::conj() const {
    std::vector<double> p(phases_.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = -phases_[k];
    }
    return DiagonalUnitary(std::move(p));
}

RealOrthogonal::RealOrthogonal(RealMatrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw Error(ErrorCode::Dimension, "RealOrthogonal: matrix is not square");
    }
    if (!m_.allFinite()) {
        throw Error(ErrorCode::Validation, "RealOrthogonal: non-finite entry");
    }
    const double err = (m_.transpose() * m_ - RealMatrix::Identity(m_.rows(), m_.cols())).norm();
    if (err > tol) {
        std::ostringstream msg;
        msg << "RealOrthogonal: ||O^T O - I||_F = " << err << " exceeds " << tol;
        throw Error(ErrorCode::Validation, msg.str());
    }
}

RealOrthogonal RealOrthogonal::identity(std::size_t n) {
    return RealOrthogonal(RealMatrix::Identity(n, n));
}

BranchId BranchId::from_index(std::uint64_t index, std::size_t n) {
    std::vector<bool> flips(n);
    for (std::size_t k = 0; k < n; ++k) {
        flips[k] = ((index >> k) & 1u) != 0;
    }
    return BranchId(std::move(flips));
}

BranchId BranchId::parse(const std::string &bits) {
    std::vector<bool> flips;
    flips.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw Error(ErrorCode::Config, "branch must be a string of 0/1 characters, got '" + bits + "'");
        }
        flips.push_back(c == '1');
    }
    return BranchId(std::move(flips));
}

std::uint64_t BranchId::index() const {
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < flips_.size() && k < 64; ++k) {
        if (flips_[k]) {
            idx |= std::uint64_t{1} << k;
        }
    }
    return idx;
}

std::string BranchId::str() const {
    std::string s;
    s.reserve(flips_.size());
    for (bool f : flips_) {
        s.push_back(f ? '1' : '0');
    }
    return s;
}

void require_square(const ComplexMatrix &m, const char *name) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        std::ostringstream msg;
        msg << name << " must be square and non-empty, got " << m.rows() << "x" << m.cols();
        throw Error(ErrorCode::Dimension, msg.str());
    }
}

bool is_unitary(const ComplexMatrix &m, double tol) {
    require_square(m, "is_unitary: matrix");
    const auto n = m.rows();
    return (m.adjoint() * m - ComplexMatrix::Identity(n, n)).norm() <= tol;
}

bool is_real_orthogonal(const ComplexMatrix &m, double tol) {
    require_square(m, "is_real_orthogonal: matrix");
    if (m.imag().cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    const RealMatrix re = m.real();
    const auto n = m.rows();
    return (re.transpose() * re - RealMatrix::Identity(n, n)).norm() <= tol;
}

double frobenius_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream msg;
        msg << "frobenius_distance: " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
        throw Error(ErrorCode::Dimension, msg.str());
    }
    return (a - b).norm();
}

DiagonalUnitary diag_sqrt_branch(const DiagonalUnitary &d, const BranchId &selector) {
    if (selector.size() != d.size()) {
        throw Error(ErrorCode::Dimension, "diag_sqrt_branch: selector length " + std::to_string(selector.size()) +
                                              " does not match " + std::to_string(d.size()));
    }
    std::vector<double> half(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        // principal half-angle lies in (-pi/2, pi/2]
        half[k] = wrap_phase(d.phases()[k]) / 2;
        if (selector.flipped(k)) {
            half[k] += std::numbers::pi;
        }
    }
    return DiagonalUnitary(std::move(half));
}

DiagonalUnitary diag_sqrt_principal(const DiagonalUnitary &d) {
    return diag_sqrt_branch(d, BranchId::principal(d.size()));
}

std::vector<DiagonalUnitary> diag_sqrt_branches(const DiagonalUnitary &d) {
    if (d.size() > 20) {
        throw Error(ErrorCode::Capacity, "diag_sqrt_branches: 2^" + std::to_string(d.size()) +
                                             " branches requested; select a single branch instead");
    }
    const std::uint64_t count = std::uint64_t{1} << d.size();
    std::vector<DiagonalUnitary> out;
    out.reserve(count);
    for (std::uint64_t b = 0; b < count; ++b) {
        out.push_back(diag_sqrt_branch(d, BranchId::from_index(b, d.size())));
    }
    return out;
}

RealOrthogonal procrustes_best_orthogonal(const RealMatrix &b) {
    if (b.rows() != b.cols() || b.rows() == 0) {
        throw Error(ErrorCode::Dimension, "procrustes_best_orthogonal: B must be square");
    }
    if (!b.allFinite()) {
        throw Error(ErrorCode::Numerical, "procrustes_best_orthogonal: B has non-finite entries");
    }
    Eigen::JacobiSVD<RealMatrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
        throw Error(ErrorCode::Numerical, "procrustes_best_orthogonal: SVD failed");
    }
    RealMatrix o = svd.matrixV() * svd.matrixU().transpose();
    return RealOrthogonal(std::move(o), 1e-10);
}

}  // namespace mphd
