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

#include "mphd/modes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "mphd/kernels.hpp"

namespace mphd {

ModeBasis::ModeBasis(Interval domain, std::size_t grid_points, std::vector<std::vector<Complex>> modes)
    : domain_(domain), grid_points_(grid_points) {
    if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
        throw Error(ErrorCode::Validation, "ModeBasis: domain must satisfy lo < hi");
    }
    if (grid_points == 0) {
        throw Error(ErrorCode::Resolution, "ModeBasis: grid must have at least one point");
    }
    if (modes.empty()) {
        throw Error(ErrorCode::Dimension, "ModeBasis: at least one mode is required");
    }
    re_.resize(modes.size());
    im_.resize(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        if (modes[m].size() != grid_points) {
            throw Error(ErrorCode::Dimension, "ModeBasis: mode " + std::to_string(m) + " has " +
                                                  std::to_string(modes[m].size()) + " samples, expected " +
                                                  std::to_string(grid_points));
        }
        re_[m].resize(grid_points);
        im_[m].resize(grid_points);
        for (std::size_t k = 0; k < grid_points; ++k) {
            if (!std::isfinite(modes[m][k].real()) || !std::isfinite(modes[m][k].imag())) {
                throw Error(ErrorCode::Validation, "ModeBasis: non-finite sample in mode " + std::to_string(m));
            }
            re_[m][k] = modes[m][k].real();
            im_[m][k] = modes[m][k].imag();
        }
    }
}

Complex ModeBasis::inner(std::size_t a, std::size_t b) const {
    return cell_width() * kernels::cdot_conj(real(a), imag(a), real(b), imag(b));
}

ComplexMatrix ModeBasis::gram() const {
    const auto n = static_cast<Eigen::Index>(mode_count());
    ComplexMatrix g(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            g(a, b) = inner(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
    }
    return g;
}

double ModeBasis::orthonormality_error() const {
    const auto n = static_cast<Eigen::Index>(mode_count());
    return (gram() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

ModeBasis ModeBasis::mixed(const RealOrthogonal &r) const {
    if (r.size() != mode_count()) {
        throw Error(ErrorCode::Dimension, "ModeBasis::mixed: mixing matrix size does not match mode count");
    }
    std::vector<std::vector<Complex>> out(mode_count(), std::vector<Complex>(grid_points_));
    for (std::size_t i = 0; i < mode_count(); ++i) {
        for (std::size_t j = 0; j < mode_count(); ++j) {
            const double w = r.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            for (std::size_t k = 0; k < grid_points_; ++k) {
                out[i][k] += w * value(j, k);
            }
        }
    }
    return ModeBasis(domain_, grid_points_, std::move(out));
}

ModeBasis ModeBasis::read(std::istream &in) {
    std::string line;
    Interval domain;
    std::size_t grid = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos && line[line.find_first_not_of(" \t\r")] != '#') {
            break;
        }
    }
    {
        std::istringstream header(line);
        if (!(header >> domain.lo >> domain.hi >> grid)) {
            throw Error(ErrorCode::Config, "mode file: header must be 'lo hi grid_points'");
        }
    }
    std::vector<std::vector<Complex>> rows;
    rows.reserve(grid);
    while (rows.size() < grid && std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream row(line);
        std::vector<Complex> values;
        Complex v;
        while (row >> v) {
            values.push_back(v);
        }
        if (values.empty() || (!rows.empty() && values.size() != rows.front().size())) {
            throw Error(ErrorCode::Config, "mode file: row " + std::to_string(rows.size() + 1) +
                                               " has an inconsistent number of columns");
        }
        rows.push_back(std::move(values));
    }
    if (rows.size() != grid) {
        throw Error(ErrorCode::Config, "mode file: expected " + std::to_string(grid) + " sample rows, read " +
                                           std::to_string(rows.size()));
    }
    std::vector<std::vector<Complex>> modes(rows.front().size(), std::vector<Complex>(grid));
    for (std::size_t k = 0; k < grid; ++k) {
        for (std::size_t m = 0; m < modes.size(); ++m) {
            modes[m][k] = rows[k][m];
        }
    }
    return ModeBasis(domain, grid, std::move(modes));
}

ModeBasis ModeBasis::read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Config, "cannot open mode file '" + path + "'");
    }
    return read(in);
}

void ModeBasis::write(std::ostream &out) const {
    out << std::setprecision(17) << domain_.lo << ' ' << domain_.hi << ' ' << grid_points_ << '\n';
    for (std::size_t k = 0; k < grid_points_; ++k) {
        for (std::size_t m = 0; m < mode_count(); ++m) {
            if (m != 0) {
                out << ' ';
            }
            out << '(' << re_[m][k] << ',' << im_[m][k] << ')';
        }
        out << '\n';
    }
}

std::vector<double> flip_positions(std::size_t mode, std::size_t n, FlipLayout layout) {
    std::vector<double> flips;
    if (layout == FlipLayout::Equispaced) {
        for (std::size_t k = 1; k <= mode; ++k) {
            flips.push_back(static_cast<double>(k) / static_cast<double>(mode + 1));
        }
        return flips;
    }
    // Walsh function with sequency `mode` on L dyadic cells: the natural-order
    // Hadamard row with this sequency is the bit-reversed Gray code.
    const std::size_t cells = std::bit_ceil(std::max<std::size_t>(n, 1));
    const int bits = std::countr_zero(cells);
    const std::size_t gray = mode ^ (mode >> 1);
    std::size_t row = 0;
    for (int b = 0; b < bits; ++b) {
        if ((gray >> b) & 1u) {
            row |= std::size_t{1} << (bits - 1 - b);
        }
    }
    auto sign_at = [&](std::size_t c) { return (std::popcount(row & c) % 2 == 0) ? 1 : -1; };
    for (std::size_t c = 1; c < cells; ++c) {
        if (sign_at(c) != sign_at(c - 1)) {
            flips.push_back(static_cast<double>(c) / static_cast<double>(cells));
        }
    }
    return flips;
}

ModeBasis flip_mode_basis(std::size_t n, std::size_t grid_points, Interval domain, FlipLayout layout,
                          std::span<const int> signs) {
    if (n == 0) {
        throw Error(ErrorCode::Dimension, "flip_mode_basis: need at least one mode");
    }
    if (grid_points < 64 * n) {
        throw Error(ErrorCode::Resolution, "flip_mode_basis: " + std::to_string(grid_points) +
                                               " grid points cannot resolve " + std::to_string(n) +
                                               " modes (need >= " + std::to_string(64 * n) + ")");
    }
    if (!signs.empty() && signs.size() != n) {
        throw Error(ErrorCode::Dimension, "flip_mode_basis: signs must have one entry per mode");
    }
    const double amplitude = 1.0 / std::sqrt(domain.length());
    std::vector<std::vector<Complex>> modes(n, std::vector<Complex>(grid_points));
    for (std::size_t m = 0; m < n; ++m) {
        std::vector<std::size_t> edges;
        for (double f : flip_positions(m, n, layout)) {
            edges.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(grid_points))));
        }
        double sign = 1.0;
        if (!signs.empty()) {
            if (signs[m] != 1 && signs[m] != -1) {
                throw Error(ErrorCode::Validation, "flip_mode_basis: signs must be +1 or -1");
            }
            sign = signs[m];
        }
        std::size_t next = 0;
        for (std::size_t k = 0; k < grid_points; ++k) {
            while (next < edges.size() && k >= edges[next]) {
                sign = -sign;
                ++next;
            }
            modes[m][k] = sign * amplitude;
        }
    }
    return ModeBasis(domain, grid_points, std::move(modes));
}

PixelPartition::PixelPartition(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
    if (boundaries_.size() < 2) {
        throw Error(ErrorCode::Validation, "PixelPartition: need at least two boundaries");
    }
    for (std::size_t i = 1; i < boundaries_.size(); ++i) {
        if (!(boundaries_[i] > boundaries_[i - 1])) {
            throw Error(ErrorCode::Validation, "PixelPartition: boundaries must be strictly increasing");
        }
    }
}

PixelPartition PixelPartition::equal(std::size_t pixels, Interval domain) {
    if (pixels == 0) {
        throw Error(ErrorCode::Validation, "PixelPartition: need at least one pixel");
    }
    std::vector<double> b(pixels + 1);
    for (std::size_t i = 0; i <= pixels; ++i) {
        b[i] = domain.lo + domain.length() * static_cast<double>(i) / static_cast<double>(pixels);
    }
    b.back() = domain.hi;
    return PixelPartition(std::move(b));
}

std::pair<std::size_t, std::size_t> PixelPartition::cell_range(std::size_t pixel, const ModeBasis &basis) const {
    const double h = basis.cell_width();
    const double lo = basis.domain().lo;
    const auto m = static_cast<double>(basis.grid_points());
    auto first_cell_at_or_after = [&](double b) {
        const double idx = std::ceil((b - lo) / h - 0.5);
        return static_cast<std::size_t>(std::clamp(idx, 0.0, m));
    };
    const std::size_t first = pixel == 0 ? 0 : first_cell_at_or_after(boundaries_.at(pixel));
    const std::size_t last =
        pixel + 1 == pixel_count() ? basis.grid_points() : first_cell_at_or_after(boundaries_.at(pixel + 1));
    return {first, std::max(first, last)};
}

namespace {

void require_covering(const PixelPartition &partition, const ModeBasis &basis) {
    const Interval d = basis.domain();
    const double slack = 1e-12 * d.length();
    if (std::abs(partition.boundaries().front() - d.lo) > slack ||
        std::abs(partition.boundaries().back() - d.hi) > slack) {
        throw Error(ErrorCode::Validation, "pixel partition does not cover the mode domain");
    }
}

void require_lo(const ModeBasis &basis, std::size_t lo_index) {
    if (lo_index >= basis.mode_count()) {
        throw Error(ErrorCode::Validation, "local oscillator index " + std::to_string(lo_index) +
                                               " out of range for " + std::to_string(basis.mode_count()) + " modes");
    }
}

double pixel_kappa(const ModeBasis &basis, std::size_t lo_index, std::size_t pixel, std::size_t first,
                   std::size_t last) {
    const auto re = basis.real(lo_index).subspan(first, last - first);
    const auto im = basis.imag(lo_index).subspan(first, last - first);
    const double power = basis.cell_width() * (kernels::dot(re, re) + kernels::dot(im, im));
    if (!(power > std::numeric_limits<double>::min())) {
        throw Error(ErrorCode::SingularPixel,
                    "pixel " + std::to_string(pixel) + " receives no local-oscillator power; kappa is undefined");
    }
    return 1.0 / std::sqrt(power);
}

}  // namespace

PixelModes pixel_modes(const ModeBasis &basis, std::size_t lo_index, const PixelPartition &partition) {
    require_lo(basis, lo_index);
    require_covering(partition, basis);
    const std::size_t p = partition.pixel_count();
    std::vector<double> kappa(p);
    std::vector<std::vector<Complex>> modes(p, std::vector<Complex>(basis.grid_points()));
    for (std::size_t i = 0; i < p; ++i) {
        const auto [first, last] = partition.cell_range(i, basis);
        kappa[i] = pixel_kappa(basis, lo_index, i, first, last);
        for (std::size_t k = first; k < last; ++k) {
            modes[i][k] = kappa[i] * basis.value(lo_index, k);
        }
    }
    return PixelModes{ModeBasis(basis.domain(), basis.grid_points(), std::move(modes)), std::move(kappa)};
}

ComplexMatrix detection_matrix(const ModeBasis &basis, std::size_t lo_index, const PixelPartition &partition) {
    require_lo(basis, lo_index);
    require_covering(partition, basis);
    const std::size_t p = partition.pixel_count();
    const std::size_t n = basis.mode_count();
    const double h = basis.cell_width();
    ComplexMatrix ut(p, n);
    for (std::size_t i = 0; i < p; ++i) {
        const auto [first, last] = partition.cell_range(i, basis);
        const double kappa = pixel_kappa(basis, lo_index, i, first, last);
        const std::size_t len = last - first;
        const auto lo_re = basis.real(lo_index).subspan(first, len);
        const auto lo_im = basis.imag(lo_index).subspan(first, len);
        for (std::size_t j = 0; j < n; ++j) {
            const Complex overlap =
                kernels::cdot_conj(lo_re, lo_im, basis.real(j).subspan(first, len), basis.imag(j).subspan(first, len));
            ut(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kappa * h * overlap;
        }
    }
    return ut;
}

ComplexMatrix build_G(const ComplexMatrix &ut, const DiagonalUnitary &opo) {
    if (static_cast<std::size_t>(ut.cols()) != opo.size()) {
        throw Error(ErrorCode::Dimension, "build_G: U_T has " + std::to_string(ut.cols()) + " columns but Delta_OPO has " +
                                              std::to_string(opo.size()) + " entries");
    }
    return ut * opo.conj().matrix();
}

DetectionSetup make_detection_setup(const ModeBasis &basis, std::size_t lo_index, const PixelPartition &partition,
                                    const DiagonalUnitary &opo) {
    DetectionSetup s;
    s.ut = detection_matrix(basis, lo_index, partition);
    s.opo = opo;
    s.g = build_G(s.ut, opo);
    s.lo_index = lo_index;
    s.kappa = pixel_modes(basis, lo_index, partition).kappa;
    return s;
}

}  // namespace mphd
