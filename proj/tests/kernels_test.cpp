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

#include "mphd/kernels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace mphd::kernels {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto &x : v) {
        x = u(rng);
    }
    return v;
}

// Lengths around every vector-width boundary plus some long ones.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 127, 1000, 4099};

std::vector<const KernelTable *> vector_tables() {
    std::vector<const KernelTable *> out;
    if (const KernelTable *t = avx2_table()) {
        out.push_back(t);
    }
    if (const KernelTable *t = neon_table()) {
        out.push_back(t);
    }
    return out;
}

// Restores the process-wide backend after each test.
class KernelTest : public ::testing::Test {
   protected:
    void SetUp() override { saved_ = active().backend; }
    void TearDown() override { set_backend(saved_); }

   private:
    Backend saved_ = Backend::Scalar;
};

TEST_F(KernelTest, ScalarDotMatchesExtendedPrecisionOracle) {
    std::mt19937_64 rng(1);
    for (std::size_t n : kLengths) {
        const auto a = random_vector(n, rng);
        const auto b = random_vector(n, rng);
        long double ref = 0;
        for (std::size_t k = 0; k < n; ++k) {
            ref += static_cast<long double>(a[k]) * b[k];
        }
        EXPECT_NEAR(scalar_table().dot(a.data(), b.data(), n), static_cast<double>(ref), 1e-13 * (1 + n)) << n;
    }
}

TEST_F(KernelTest, ScalarComplexDotConjugatesFirstArgument) {
    // (1 + 2i)* (3 - i) = (1 - 2i)(3 - i) = 1 - 7i
    const double ar[] = {1}, ai[] = {2}, br[] = {3}, bi[] = {-1};
    double re = 0, im = 0;
    scalar_table().cdot_conj(ar, ai, br, bi, 1, &re, &im);
    EXPECT_EQ(re, 1.0);
    EXPECT_EQ(im, -7.0);
}

TEST_F(KernelTest, VectorBackendsMatchScalarReference) {
    const auto tables = vector_tables();
    if (tables.empty()) {
        GTEST_SKIP() << "no vector backend on this machine";
    }
    std::mt19937_64 rng(2);
    for (const KernelTable *t : tables) {
        for (std::size_t n : kLengths) {
            const auto a = random_vector(n, rng);
            const auto b = random_vector(n, rng);
            const auto c = random_vector(n, rng);
            const auto d = random_vector(n, rng);
            const double tol = 1e-14 * (1 + static_cast<double>(n));
            EXPECT_NEAR(t->dot(a.data(), b.data(), n), scalar_table().dot(a.data(), b.data(), n), tol) << n;
            EXPECT_NEAR(t->sum(a.data(), n), scalar_table().sum(a.data(), n), tol) << n;

            double re_v = 0, im_v = 0, re_s = 0, im_s = 0;
            t->cdot_conj(a.data(), b.data(), c.data(), d.data(), n, &re_v, &im_v);
            scalar_table().cdot_conj(a.data(), b.data(), c.data(), d.data(), n, &re_s, &im_s);
            EXPECT_NEAR(re_v, re_s, 2 * tol) << n;
            EXPECT_NEAR(im_v, im_s, 2 * tol) << n;

            // axpy does no reduction, so every backend must agree bit for bit.
            auto y_v = c;
            auto y_s = c;
            t->axpy(0.37, a.data(), y_v.data(), n);
            scalar_table().axpy(0.37, a.data(), y_s.data(), n);
            EXPECT_EQ(y_v, y_s) << n;
        }
    }
}

TEST_F(KernelTest, SelectionCanBeForcedAndRestored) {
    ASSERT_TRUE(set_backend(Backend::Scalar));
    EXPECT_EQ(active().backend, Backend::Scalar);
    const bool has_avx2 = avx2_table() != nullptr;
    EXPECT_EQ(set_backend(Backend::Avx2), has_avx2);
    EXPECT_EQ(active().backend, has_avx2 ? Backend::Avx2 : Backend::Scalar);
    EXPECT_EQ(backend_name(Backend::Neon), "neon");
}

TEST_F(KernelTest, SpanWrappersCheckLengths) {
    std::vector<double> a(3, 1.0), b(4, 1.0);
    EXPECT_THROW(dot(a, b), std::invalid_argument);
    EXPECT_THROW(axpy(1.0, a, b), std::invalid_argument);
    EXPECT_THROW(cdot_conj(a, a, a, b), std::invalid_argument);
    EXPECT_EQ(sum(b), 4.0);
}

TEST_F(KernelTest, SpanWrappersGiveSameAnswerOnEveryBackend) {
    std::mt19937_64 rng(3);
    const auto a = random_vector(1001, rng);
    const auto b = random_vector(1001, rng);
    ASSERT_TRUE(set_backend(Backend::Scalar));
    const double scalar = dot(a, b);
    for (Backend be : {Backend::Avx2, Backend::Neon}) {
        if (set_backend(be)) {
            EXPECT_NEAR(dot(a, b), scalar, 1e-12);
        }
    }
}

}  // namespace
}  // namespace mphd::kernels
