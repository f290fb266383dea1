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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace mphd::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double *a, const double *b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
    }
    for (; k + 4 <= n; k += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) {
        acc += a[k] * b[k];
    }
    return acc;
}

double sum_avx2(const double *a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + k));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + k + 4));
    }
    for (; k + 4 <= n; k += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + k));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) {
        acc += a[k];
    }
    return acc;
}

void axpy_avx2(double alpha, const double *x, double *y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        // mul then add, matching the scalar rounding exactly
        __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + k));
        _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k), prod));
    }
    for (; k < n; ++k) {
        const double prod = alpha * x[k];
        y[k] = y[k] + prod;
    }
}

void cdot_conj_avx2(const double *ar, const double *ai, const double *br, const double *bi, std::size_t n,
                    double *out_re, double *out_im) {
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d xr = _mm256_loadu_pd(ar + k);
        const __m256d xi = _mm256_loadu_pd(ai + k);
        const __m256d yr = _mm256_loadu_pd(br + k);
        const __m256d yi = _mm256_loadu_pd(bi + k);
        re = _mm256_fmadd_pd(xr, yr, re);
        re = _mm256_fmadd_pd(xi, yi, re);
        im = _mm256_fmadd_pd(xr, yi, im);
        im = _mm256_fnmadd_pd(xi, yr, im);
    }
    double sre = hsum(re);
    double sim = hsum(im);
    for (; k < n; ++k) {
        sre += ar[k] * br[k] + ai[k] * bi[k];
        sim += ar[k] * bi[k] - ai[k] * br[k];
    }
    *out_re = sre;
    *out_im = sim;
}

}  // namespace

const KernelTable kAvx2Table{Backend::Avx2, dot_avx2, sum_avx2, axpy_avx2, cdot_conj_avx2};

}  // namespace mphd::kernels::detail
