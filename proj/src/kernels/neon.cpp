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

// AArch64 only; Advanced SIMD is part of the base ISA there.

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace mphd::kernels::detail {
namespace {

double dot_neon(const double *a, const double *b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; k < n; ++k) {
        acc += a[k] * b[k];
    }
    return acc;
}

double sum_neon(const double *a, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(a + k));
        acc1 = vaddq_f64(acc1, vld1q_f64(a + k + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; k < n; ++k) {
        acc += a[k];
    }
    return acc;
}

void axpy_neon(double alpha, const double *x, double *y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        float64x2_t prod = vmulq_f64(va, vld1q_f64(x + k));
        vst1q_f64(y + k, vaddq_f64(vld1q_f64(y + k), prod));
    }
    for (; k < n; ++k) {
        const double prod = alpha * x[k];
        y[k] = y[k] + prod;
    }
}

void cdot_conj_neon(const double *ar, const double *ai, const double *br, const double *bi, std::size_t n,
                    double *out_re, double *out_im) {
    float64x2_t re = vdupq_n_f64(0.0);
    float64x2_t im = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t xr = vld1q_f64(ar + k);
        const float64x2_t xi = vld1q_f64(ai + k);
        const float64x2_t yr = vld1q_f64(br + k);
        const float64x2_t yi = vld1q_f64(bi + k);
        re = vfmaq_f64(re, xr, yr);
        re = vfmaq_f64(re, xi, yi);
        im = vfmaq_f64(im, xr, yi);
        im = vfmsq_f64(im, xi, yr);
    }
    double sre = vaddvq_f64(re);
    double sim = vaddvq_f64(im);
    for (; k < n; ++k) {
        sre += ar[k] * br[k] + ai[k] * bi[k];
        sim += ar[k] * bi[k] - ai[k] * br[k];
    }
    *out_re = sre;
    *out_im = sim;
}

}  // namespace

const KernelTable kNeonTable{Backend::Neon, dot_neon, sum_neon, axpy_neon, cdot_conj_neon};

}  // namespace mphd::kernels::detail
