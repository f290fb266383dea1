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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace mphd::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(MPHD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable *best_table() {
    if (const char *env = std::getenv("MPHD_SIMD")) {
        const std::string want(env);
        if (want == "scalar") {
            return &scalar_table();
        }
        if (want == "avx2" && avx2_table() != nullptr) {
            return avx2_table();
        }
        if (want == "neon" && neon_table() != nullptr) {
            return neon_table();
        }
    }
    if (const KernelTable *t = avx2_table()) {
        return t;
    }
    if (const KernelTable *t = neon_table()) {
        return t;
    }
    return &scalar_table();
}

std::atomic<const KernelTable *> &selected() {
    static std::atomic<const KernelTable *> table{best_table()};
    return table;
}

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("kernels: operand lengths differ (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable &scalar_table() { return detail::kScalarTable; }

const KernelTable *avx2_table() {
#if defined(MPHD_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable *neon_table() {
#if defined(MPHD_HAVE_NEON)
    return &detail::kNeonTable;
#else
    return nullptr;
#endif
}

const KernelTable &active() { return *selected().load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
    const KernelTable *t = nullptr;
    switch (b) {
        case Backend::Scalar: t = &scalar_table(); break;
        case Backend::Avx2: t = avx2_table(); break;
        case Backend::Neon: t = neon_table(); break;
    }
    if (t == nullptr) {
        return false;
    }
    selected().store(t, std::memory_order_relaxed);
    return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size());
    return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_length(x.size(), y.size());
    active().axpy(alpha, x.data(), y.data(), x.size());
}

std::complex<double> cdot_conj(std::span<const double> ar, std::span<const double> ai, std::span<const double> br,
                               std::span<const double> bi) {
    require_same_length(ar.size(), ai.size());
    require_same_length(ar.size(), br.size());
    require_same_length(ar.size(), bi.size());
    double re = 0.0;
    double im = 0.0;
    active().cdot_conj(ar.data(), ai.data(), br.data(), bi.data(), ar.size(), &re, &im);
    return {re, im};
}

}  // namespace mphd::kernels
