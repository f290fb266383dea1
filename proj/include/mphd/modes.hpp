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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mphd/matcore.hpp"

namespace mphd {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

/// N mode functions sampled at the midpoints of a uniform grid of M cells.
/// Real and imaginary parts are stored separately per mode so quadrature
/// sums run over contiguous arrays.
class ModeBasis {
   public:
    ModeBasis(Interval domain, std::size_t grid_points, std::vector<std::vector<Complex>> modes);

    std::size_t mode_count() const { return re_.size(); }
    std::size_t grid_points() const { return grid_points_; }
    Interval domain() const { return domain_; }
    double cell_width() const { return domain_.length() / static_cast<double>(grid_points_); }
    double sample_point(std::size_t k) const { return domain_.lo + (static_cast<double>(k) + 0.5) * cell_width(); }

    std::span<const double> real(std::size_t mode) const { return re_.at(mode); }
    std::span<const double> imag(std::size_t mode) const { return im_.at(mode); }
    Complex value(std::size_t mode, std::size_t k) const { return {re_.at(mode)[k], im_.at(mode)[k]}; }

    /// Midpoint-rule inner product <u_a | u_b> = h * sum conj(u_a) u_b.
    Complex inner(std::size_t a, std::size_t b) const;
    ComplexMatrix gram() const;
    /// ||gram - I||_max.
    double orthonormality_error() const;

    /// Real orthogonal recombination: mode i of the result is sum_j R_ij u_j.
    ModeBasis mixed(const RealOrthogonal &r) const;

    /// Text format: first line "lo hi M", then M rows with one column per
    /// mode. Entries are real numbers or "(re,im)".
    static ModeBasis read(std::istream &in);
    static ModeBasis read_file(const std::string &path);
    void write(std::ostream &out) const;

   private:
    Interval domain_;
    std::size_t grid_points_;
    std::vector<std::vector<double>> re_;
    std::vector<std::vector<double>> im_;
};

enum class FlipLayout {
    /// Sequency-ordered Walsh functions: flips on dyadic points.
    Dyadic,
    /// Mode n flips at k/n of the domain, k = 1..n-1. For n >= 3 these
    /// profiles are not mutually orthogonal (e.g. <u_1|u_3> = 1/3), so the
    /// result describes shapes only; check orthonormality_error() before
    /// using it as a detection basis.
    Equispaced,
};

/// Square flip modes: mode n (1-based) has constant magnitude and n-1 sign
/// flips; mode 1 is flat. Flip positions are snapped to cell boundaries.
/// `signs` (+1/-1 per mode) overrides the default all-positive first cell.
ModeBasis flip_mode_basis(std::size_t n, std::size_t grid_points = 4096, Interval domain = {},
                          FlipLayout layout = FlipLayout::Dyadic, std::span<const int> signs = {});

/// Positions (fractions of the domain) where mode `mode` (0-based) changes sign.
std::vector<double> flip_positions(std::size_t mode, std::size_t n, FlipLayout layout);

class PixelPartition {
   public:
    explicit PixelPartition(std::vector<double> boundaries);
    static PixelPartition equal(std::size_t pixels, Interval domain = {});

    std::size_t pixel_count() const { return boundaries_.size() - 1; }
    const std::vector<double> &boundaries() const { return boundaries_; }
    /// Cells [first, second) whose midpoints lie in pixel i of the given grid.
    std::pair<std::size_t, std::size_t> cell_range(std::size_t pixel, const ModeBasis &basis) const;

   private:
    std::vector<double> boundaries_;
};

struct PixelModes {
    ModeBasis modes;
    std::vector<double> kappa;
};

/// v_i = kappa_i u_LO on pixel i, zero elsewhere, with kappa_i chosen so
/// ||v_i|| = 1. Throws SingularPixel when the LO carries no power on a pixel.
PixelModes pixel_modes(const ModeBasis &basis, std::size_t lo_index, const PixelPartition &partition);

/// U_T[i][j] = kappa_i * integral over pixel i of conj(u_LO) u_j.
ComplexMatrix detection_matrix(const ModeBasis &basis, std::size_t lo_index, const PixelPartition &partition);

/// G = U_T conj(Delta_OPO).
ComplexMatrix build_G(const ComplexMatrix &ut, const DiagonalUnitary &opo);

struct DetectionSetup {
    ComplexMatrix ut;
    DiagonalUnitary opo;
    ComplexMatrix g;
    std::size_t lo_index = 0;
    std::vector<double> kappa;
};

DetectionSetup make_detection_setup(const ModeBasis &basis, std::size_t lo_index, const PixelPartition &partition,
                                    const DiagonalUnitary &opo);

}  // namespace mphd
