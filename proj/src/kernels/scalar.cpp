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

#include "kernels_internal.hpp"

namespace mphd::kernels::detail {
namespace {

double dot_scalar(const double *a, const double *b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += a[k] * b[k];
    }
    return acc;
}

double sum_scalar(const double *a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += a[k];
    }
    return acc;
}

void axpy_scalar(double alpha, const double *x, double *y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double prod = alpha * x[k];
        y[k] = y[k] + prod;
    }
}

void cdot_conj_scalar(const double *ar, const double *ai, const double *br, const double *bi, std::size_t n,
                      double *out_re, double *out_im) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        // conj(a) * b = (ar br + ai bi) + i (ar bi - ai br)
        re += ar[k] * br[k] + ai[k] * bi[k];
        im += ar[k] * bi[k] - ai[k] * br[k];
    }
    *out_re = re;
    *out_im = im;
}

}  // namespace

const KernelTable kScalarTable{Backend::Scalar, dot_scalar, sum_scalar, axpy_scalar, cdot_conj_scalar};

}  // namespace mphd::kernels::detail
