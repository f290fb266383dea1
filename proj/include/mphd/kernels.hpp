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

// Data-parallel inner loops: overlap quadrature over mode grids and moment
// accumulation over shot arrays. Each kernel has a scalar reference and
// vectorized variants; the variant is chosen once at runtime.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace mphd::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

struct KernelTable {
    Backend backend;
    /// sum_k a[k] * b[k]
    double (*dot)(const double *a, const double *b, std::size_t n);
    /// sum_k a[k]
    double (*sum)(const double *a, std::size_t n);
    /// y[k] += alpha * x[k]; no fused multiply-add so every backend rounds identically.
    void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
    /// sum_k conj(a[k]) * b[k] with split real/imaginary storage.
    void (*cdot_conj)(const double *ar, const double *ai, const double *br, const double *bi, std::size_t n,
                      double *out_re, double *out_im);
};

const KernelTable &scalar_table();
/// nullptr when the backend is not compiled in or not supported by this CPU.
const KernelTable *avx2_table();
const KernelTable *neon_table();

/// Best supported table, unless overridden by set_backend or MPHD_SIMD=scalar|avx2|neon.
const KernelTable &active();
/// Returns false (and leaves the selection unchanged) if b is unavailable.
bool set_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
std::complex<double> cdot_conj(std::span<const double> ar, std::span<const double> ai, std::span<const double> br,
                               std::span<const double> bi);

}  // namespace mphd::kernels
