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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mphd/matcore.hpp"
#include "mphd/modes.hpp"
#include "test_support.hpp"

namespace mphd {
namespace {

using testing::kPi;
using testing::max_abs;

ModeBasis fourier_basis(std::size_t grid) {
    // 1, sqrt2 cos(2 pi x), sqrt2 sin(2 pi x) on [0, 1].
    std::vector<std::vector<Complex>> modes(3, std::vector<Complex>(grid));
    for (std::size_t k = 0; k < grid; ++k) {
        const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(grid);
        modes[0][k] = 1.0;
        modes[1][k] = std::sqrt(2.0) * std::cos(2 * kPi * x);
        modes[2][k] = std::sqrt(2.0) * std::sin(2 * kPi * x);
    }
    return ModeBasis({}, grid, std::move(modes));
}

ComplexMatrix fourier_detection_oracle() {
    // kappa = sqrt3 on thirds; entry = kappa * integral of the mode over the pixel.
    ComplexMatrix ut(3, 3);
    const double k = std::sqrt(3.0);
    for (int i = 0; i < 3; ++i) {
        const double a = i / 3.0, b = (i + 1) / 3.0;
        ut(i, 0) = k * (b - a);
        ut(i, 1) = k * std::sqrt(2.0) * (std::sin(2 * kPi * b) - std::sin(2 * kPi * a)) / (2 * kPi);
        ut(i, 2) = -k * std::sqrt(2.0) * (std::cos(2 * kPi * b) - std::cos(2 * kPi * a)) / (2 * kPi);
    }
    return ut;
}

TEST(FlipModes, SingleModeIsFlatWithUnitNorm) {
    const ModeBasis b = flip_mode_basis(1, 256);
    ASSERT_EQ(b.mode_count(), 1u);
    for (std::size_t k = 0; k < b.grid_points(); ++k) {
        EXPECT_DOUBLE_EQ(b.value(0, k).real(), 1.0);
        EXPECT_DOUBLE_EQ(b.value(0, k).imag(), 0.0);
    }
    EXPECT_NEAR(b.inner(0, 0).real(), 1.0, 1e-14);
}

TEST(FlipModes, EachModeHasOneMoreFlipThanThePrevious) {
    for (FlipLayout layout : {FlipLayout::Dyadic, FlipLayout::Equispaced}) {
        for (std::size_t n = 1; n <= 8; ++n) {
            for (std::size_t m = 0; m < n; ++m) {
                EXPECT_EQ(flip_positions(m, n, layout).size(), m) << "n=" << n << " mode=" << m;
            }
        }
    }
}

TEST(FlipModes, EquispacedLayoutPlacesFlipsAtRegularFractions) {
    const std::vector<std::vector<double>> expected = {{}, {0.5}, {1.0 / 3, 2.0 / 3}, {0.25, 0.5, 0.75}};
    for (std::size_t m = 0; m < 4; ++m) {
        const auto flips = flip_positions(m, 4, FlipLayout::Equispaced);
        ASSERT_EQ(flips.size(), expected[m].size());
        for (std::size_t k = 0; k < flips.size(); ++k) {
            EXPECT_NEAR(flips[k], expected[m][k], 1e-15);
        }
    }
}

TEST(FlipModes, EquispacedSamplesChangeSignAtTheFlips) {
    const ModeBasis b = flip_mode_basis(4, 4096, {}, FlipLayout::Equispaced);
    // Mode 3 (index 2): + on [0, 1/3), - on [1/3, 2/3), + afterwards.
    EXPECT_GT(b.value(2, 100).real(), 0);
    EXPECT_LT(b.value(2, 2000).real(), 0);
    EXPECT_GT(b.value(2, 4000).real(), 0);
}

TEST(FlipModes, EquispacedProfilesAreNotMutuallyOrthogonal) {
    // Documented property of the regular-fraction layout: the flat mode and
    // the two-flip mode overlap by 1/3, so it cannot serve as a detection basis.
    const ModeBasis b = flip_mode_basis(4, 3 * 4096, {}, FlipLayout::Equispaced);
    EXPECT_NEAR(b.inner(0, 2).real(), 1.0 / 3.0, 1e-12);
    EXPECT_GT(b.orthonormality_error(), 0.3);
    // Each profile is still normalized, and the first two are orthogonal.
    for (std::size_t m = 0; m < 4; ++m) {
        EXPECT_NEAR(b.inner(m, m).real(), 1.0, 1e-12);
    }
    EXPECT_NEAR(std::abs(b.inner(0, 1)), 0.0, 1e-12);
}

TEST(FlipModes, DyadicFourModesAreOrthonormal) {
    const ModeBasis b = flip_mode_basis(4, 4096);
    const ComplexMatrix g = b.gram();
    for (Eigen::Index a = 0; a < 4; ++a) {
        for (Eigen::Index c = 0; c < 4; ++c) {
            EXPECT_NEAR(std::abs(g(a, c) - (a == c ? 1.0 : 0.0)), 0.0, 1e-10) << a << "," << c;
        }
    }
}

TEST(FlipModes, DyadicLayoutIsOrthonormalForManySizes) {
    for (std::size_t n = 1; n <= 16; ++n) {
        EXPECT_LT(flip_mode_basis(n, 64 * 64).orthonormality_error(), 1e-10) << "n=" << n;
    }
}

TEST(FlipModes, DyadicFlipsForFourModes) {
    const std::vector<std::vector<double>> expected = {{}, {0.5}, {0.25, 0.75}, {0.25, 0.5, 0.75}};
    for (std::size_t m = 0; m < 4; ++m) {
        EXPECT_EQ(flip_positions(m, 4, FlipLayout::Dyadic), expected[m]) << "mode " << m;
    }
}

TEST(FlipModes, SignsOverrideTheFirstCell) {
    const int signs[] = {1, -1};
    const ModeBasis b = flip_mode_basis(2, 128, {}, FlipLayout::Dyadic, signs);
    EXPECT_LT(b.value(1, 0).real(), 0);
    EXPECT_GT(b.value(1, 127).real(), 0);
    const int bad[] = {1, 2};
    EXPECT_MPHD_ERROR(flip_mode_basis(2, 128, {}, FlipLayout::Dyadic, bad), Validation);
    const int short_signs[] = {1};
    EXPECT_MPHD_ERROR(flip_mode_basis(2, 128, {}, FlipLayout::Dyadic, short_signs), Dimension);
}

TEST(FlipModes, NonUnitDomainIsNormalized) {
    const ModeBasis b = flip_mode_basis(4, 4096, {-2.0, 3.0});
    EXPECT_LT(b.orthonormality_error(), 1e-10);
}

TEST(FlipModes, CoarseGridIsAResolutionError) {
    EXPECT_MPHD_ERROR(flip_mode_basis(4, 255), Resolution);
    EXPECT_NO_THROW(flip_mode_basis(4, 256));
    EXPECT_MPHD_ERROR(flip_mode_basis(0, 4096), Dimension);
}

TEST(ModeBasisTest, RejectsMalformedInput) {
    EXPECT_MPHD_ERROR(ModeBasis({1.0, 1.0}, 4, {std::vector<Complex>(4, 1.0)}), Validation);
    EXPECT_MPHD_ERROR(ModeBasis({}, 4, {}), Dimension);
    EXPECT_MPHD_ERROR(ModeBasis({}, 4, {std::vector<Complex>(3, 1.0)}), Dimension);
    std::vector<Complex> nan_mode(4, 1.0);
    nan_mode[2] = std::nan("");
    EXPECT_MPHD_ERROR(ModeBasis({}, 4, {nan_mode}), Validation);
}

TEST(ModeBasisTest, MixingByOrthogonalMatrixPreservesOrthonormality) {
    std::mt19937_64 rng(7);
    const ModeBasis b = flip_mode_basis(4, 4096);
    const ModeBasis m = b.mixed(RealOrthogonal(testing::random_orthogonal(4, rng)));
    EXPECT_LT(m.orthonormality_error(), 1e-12);
    EXPECT_MPHD_ERROR(b.mixed(RealOrthogonal(RealMatrix::Identity(3, 3))), Dimension);
}

TEST(ModeBasisTest, TextRoundTrip) {
    std::vector<std::vector<Complex>> modes(2, std::vector<Complex>(64));
    for (std::size_t k = 0; k < 64; ++k) {
        modes[0][k] = std::polar(1.0, 0.1 * static_cast<double>(k));
        modes[1][k] = (k < 32 ? 1.0 : -1.0);
    }
    const ModeBasis b({-1.0, 2.5}, 64, modes);
    std::stringstream ss;
    b.write(ss);
    const ModeBasis r = ModeBasis::read(ss);
    ASSERT_EQ(r.mode_count(), 2u);
    ASSERT_EQ(r.grid_points(), 64u);
    EXPECT_DOUBLE_EQ(r.domain().lo, -1.0);
    EXPECT_DOUBLE_EQ(r.domain().hi, 2.5);
    for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t k = 0; k < 64; ++k) {
            EXPECT_EQ(r.value(m, k), b.value(m, k));
        }
    }
}

TEST(ModeBasisTest, ReadAcceptsRealColumnsAndComments) {
    std::istringstream in("# two cells\n0 1 2\n1 1\n1 -1\n");
    const ModeBasis b = ModeBasis::read(in);
    EXPECT_EQ(b.mode_count(), 2u);
    EXPECT_LT(b.orthonormality_error(), 1e-15);
}

TEST(ModeBasisTest, ReadRejectsTruncatedOrRaggedFiles) {
    std::istringstream truncated("0 1 3\n1\n1\n");
    EXPECT_MPHD_ERROR(ModeBasis::read(truncated), Config);
    std::istringstream ragged("0 1 2\n1 1\n1\n");
    EXPECT_MPHD_ERROR(ModeBasis::read(ragged), Config);
    std::istringstream header("zero one\n");
    EXPECT_MPHD_ERROR(ModeBasis::read(header), Config);
    EXPECT_MPHD_ERROR(ModeBasis::read_file("/nonexistent/modes.txt"), Config);
}

TEST(PixelPartitionTest, ValidatesBoundaries) {
    EXPECT_MPHD_ERROR(PixelPartition({0.0}), Validation);
    EXPECT_MPHD_ERROR(PixelPartition({0.0, 0.5, 0.5, 1.0}), Validation);
    const PixelPartition p = PixelPartition::equal(4, {0.0, 2.0});
    EXPECT_EQ(p.pixel_count(), 4u);
    EXPECT_DOUBLE_EQ(p.boundaries()[1], 0.5);
    EXPECT_DOUBLE_EQ(p.boundaries().back(), 2.0);
}

TEST(PixelModesTest, FlatLoOnFourPixelsGivesKappaTwo) {
    const PixelModes pm = pixel_modes(flip_mode_basis(4, 4096), 0, PixelPartition::equal(4));
    ASSERT_EQ(pm.kappa.size(), 4u);
    for (double k : pm.kappa) {
        EXPECT_NEAR(k, 2.0, 1e-12);
    }
    // Disjoint supports and unit norms.
    EXPECT_LT(pm.modes.orthonormality_error(), 1e-12);
}

TEST(PixelModesTest, SinglePixelReproducesTheLo) {
    const ModeBasis b = flip_mode_basis(2, 512);
    const PixelModes pm = pixel_modes(b, 0, PixelPartition::equal(1));
    EXPECT_NEAR(pm.kappa[0], 1.0, 1e-14);
    for (std::size_t k = 0; k < b.grid_points(); ++k) {
        EXPECT_NEAR(std::abs(pm.modes.value(0, k) - b.value(0, k)), 0.0, 1e-14);
    }
}

TEST(PixelModesTest, DarkPixelIsSingular) {
    std::vector<Complex> lo(64, 0.0);
    for (std::size_t k = 0; k < 32; ++k) {
        lo[k] = std::sqrt(2.0);
    }
    const ModeBasis b({}, 64, {lo});
    EXPECT_MPHD_ERROR(pixel_modes(b, 0, PixelPartition::equal(2)), SingularPixel);
    EXPECT_MPHD_ERROR(pixel_modes(b, 1, PixelPartition::equal(2)), Validation);
}

TEST(DetectionMatrixTest, FourFlipModesOnFourPixels) {
    const ComplexMatrix ut =
        detection_matrix(flip_mode_basis(4, 4096, {}, FlipLayout::Dyadic, testing::kWalshSigns), 0,
                         PixelPartition::equal(4));
    EXPECT_LT(max_abs(ut - testing::printed_ut()), 1e-8);
    EXPECT_LT(max_abs(ut.adjoint() * ut - ComplexMatrix::Identity(4, 4)), 1e-8);
}

TEST(DetectionMatrixTest, SingleModeSinglePixelIsOne) {
    const ComplexMatrix ut = detection_matrix(flip_mode_basis(1, 64), 0, PixelPartition::equal(1));
    ASSERT_EQ(ut.rows(), 1);
    ASSERT_EQ(ut.cols(), 1);
    EXPECT_NEAR(std::abs(ut(0, 0) - 1.0), 0.0, 1e-14);
}

TEST(DetectionMatrixTest, UnitaryForFlipModesOfEverySize) {
    for (std::size_t n : {1u, 2u, 4u, 8u}) {
        const ComplexMatrix ut = detection_matrix(flip_mode_basis(n, 4096), 0, PixelPartition::equal(n));
        EXPECT_LT((ut.adjoint() * ut - ComplexMatrix::Identity(static_cast<Eigen::Index>(n),
                                                                static_cast<Eigen::Index>(n)))
                      .norm(),
                  1e-8)
            << "n=" << n;
    }
}

TEST(DetectionMatrixTest, InverseKappaSquaresSumToLoNorm) {
    for (std::size_t p : {1u, 3u, 4u, 7u}) {
        const PixelModes pm = pixel_modes(fourier_basis(7 * 3 * 128), 0, PixelPartition::equal(p));
        double s = 0;
        for (double k : pm.kappa) {
            s += 1 / (k * k);
        }
        EXPECT_NEAR(s, 1.0, 1e-12) << "P=" << p;
    }
}

TEST(DetectionMatrixTest, SmoothModesConvergeUnderGridRefinement) {
    const ComplexMatrix oracle = fourier_detection_oracle();
    const double coarse = max_abs(detection_matrix(fourier_basis(3 * 64), 0, PixelPartition::equal(3)) - oracle);
    const double fine = max_abs(detection_matrix(fourier_basis(3 * 128), 0, PixelPartition::equal(3)) - oracle);
    const double finest =
        max_abs(detection_matrix(fourier_basis(3 * 4096), 0, PixelPartition::equal(3)) - oracle);
    EXPECT_LT(fine, coarse);
    // Second-order midpoint rule: halving the cell size cuts the error ~4x.
    EXPECT_NEAR(coarse / fine, 4.0, 0.2);
    EXPECT_LT(finest, 1e-6);
}

TEST(DetectionMatrixTest, FewerPixelsThanModesIsRectangular) {
    const ComplexMatrix ut = detection_matrix(flip_mode_basis(4, 4096), 0, PixelPartition::equal(2));
    EXPECT_EQ(ut.rows(), 2);
    EXPECT_EQ(ut.cols(), 4);
    // Rows remain orthonormal: each pixel mode is a unit vector in the span.
    EXPECT_LT(max_abs(ut * ut.adjoint() - ComplexMatrix::Identity(2, 2)), 1e-12);
}

TEST(BuildGTest, MatchesDefinition) {
    std::mt19937_64 rng(3);
    const ComplexMatrix ut = testing::random_unitary(4, rng);
    const DiagonalUnitary opo(testing::random_phases(4, rng));
    const ComplexMatrix g = build_G(ut, opo);
    EXPECT_LT(max_abs(g - ut * opo.matrix().conjugate()), 1e-15);
    EXPECT_MPHD_ERROR(build_G(ut, DiagonalUnitary::identity(3)), Dimension);
}

TEST(BuildGTest, IdentityOpoLeavesUtUnchanged) {
    const ComplexMatrix ut = testing::printed_ut();
    EXPECT_EQ(build_G(ut, DiagonalUnitary::identity(4)), ut);
}

TEST(DetectionSetupTest, LinearClusterFrontEnd) {
    const DetectionSetup s = testing::lin4_setup();
    EXPECT_LT(max_abs(s.ut - testing::printed_ut()), 1e-8);
    const Complex i(0, 1);
    Eigen::VectorXcd d(4);
    d << 1.0, i, i, 1.0;
    EXPECT_LT(max_abs(s.g - testing::printed_ut() * d.asDiagonal()), 1e-8);
    EXPECT_EQ(s.kappa.size(), 4u);
}

}  // namespace
}  // namespace mphd
