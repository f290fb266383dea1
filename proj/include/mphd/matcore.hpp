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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mphd/error.hpp"

namespace mphd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Tolerance used for structure checks on analytically exact inputs.
inline constexpr double kDefaultTol = 1e-9;

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// diag(e^{i phi_1}, ..., e^{i phi_N}). Stored as angles so every entry has
/// unit modulus by construction.
class DiagonalUnitary {
   public:
    DiagonalUnitary() = default;
    explicit DiagonalUnitary(std::vector<double> phases);

    static DiagonalUnitary identity(std::size_t n);
    /// Builds from complex diagonal entries; throws Validation if any entry is
    /// off the unit circle by more than tol.
    static DiagonalUnitary from_entries(const Eigen::VectorXcd &entries, double tol = kDefaultTol);

    std::size_t size() const { return phases_.size(); }
    const std::vector<double> &phases() const { return phases_; }
    Complex entry(std::size_t k) const { return std::polar(1.0, phases_.at(k)); }
    Eigen::VectorXcd diagonal() const;
    ComplexMatrix matrix() const;
    DiagonalUnitary conj() const;
    DiagonalUnitary inverse() const { return conj(); }

   private:
    std::vector<double> phases_;
};

/// Real N x N matrix with O^T O = I, checked on construction.
class RealOrthogonal {
   public:
    RealOrthogonal() = default;
    explicit RealOrthogonal(RealMatrix m, double tol = kDefaultTol);

    static RealOrthogonal identity(std::size_t n);

    std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
    const RealMatrix &matrix() const { return m_; }
    ComplexMatrix complex_matrix() const { return m_.cast<Complex>(); }
    double determinant() const { return m_.determinant(); }

   private:
    RealMatrix m_;
};

/// Selects one of the 2^N square roots of a DiagonalUnitary: bit k set means
/// the principal root of entry k is negated.
class BranchId {
   public:
    BranchId() = default;
    explicit BranchId(std::vector<bool> flips) : flips_(std::move(flips)) {}

    static BranchId principal(std::size_t n) { return BranchId(std::vector<bool>(n, false)); }
    /// Bit k of index selects the flip for entry k.
    static BranchId from_index(std::uint64_t index, std::size_t n);
    /// Parses "0110" (character k is entry k).
    static BranchId parse(const std::string &bits);

    std::size_t size() const { return flips_.size(); }
    bool flipped(std::size_t k) const { return flips_.at(k); }
    std::uint64_t index() const;
    std::string str() const;

    friend bool operator==(const BranchId &, const BranchId &) = default;

   private:
    std::vector<bool> flips_;
};

void require_square(const ComplexMatrix &m, const char *name);

/// ||M^dagger M - I||_F <= tol.
bool is_unitary(const ComplexMatrix &m, double tol = kDefaultTol);
/// Entrywise |Im| <= tol and ||Re(M)^T Re(M) - I||_F <= tol.
bool is_real_orthogonal(const ComplexMatrix &m, double tol = kDefaultTol);

double frobenius_distance(const ComplexMatrix &a, const ComplexMatrix &b);

DiagonalUnitary diag_sqrt_branch(const DiagonalUnitary &d, const BranchId &selector);
DiagonalUnitary diag_sqrt_principal(const DiagonalUnitary &d);
/// All 2^N roots, ordered by BranchId::index. Throws Capacity for N > 20.
std::vector<DiagonalUnitary> diag_sqrt_branches(const DiagonalUnitary &d);

/// argmax over orthogonal O of trace(O B), i.e. Q P^T for B = P S Q^T.
RealOrthogonal procrustes_best_orthogonal(const RealMatrix &b);

}  // namespace mphd
