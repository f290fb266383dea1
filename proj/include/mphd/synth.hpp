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

#include <cstdint>
#include <vector>

#include "mphd/matcore.hpp"

namespace mphd {

/// Result of testing whether U_th can be written as O * Delta_LO * G.
struct FeasibilityReport {
    ComplexMatrix u_prime;      // U_th G^dagger
    ComplexMatrix d_candidate;  // U'^T U' (plain transpose)
    double offdiag_residual = 0.0;
    double modulus_residual = 0.0;
    bool feasible = false;
    double tol = kDefaultTol;

    /// The diagonal of d_candidate as phases. Only meaningful when feasible.
    DiagonalUnitary diagonal() const;
};

struct SynthesisSolution {
    DiagonalUnitary delta_lo;
    RealOrthogonal o;
    ComplexMatrix u_mphd;  // O Delta_LO G
    double residual = 0.0; // ||U_mphd - U_th||_F
    BranchId branch;
};

struct ApproxOptions {
    int max_iters = 400;  // coordinate sweeps per restart
    int restarts = 8;
    std::uint64_t seed = 1;
    /// A restart stops once a sweep improves the residual by less than this.
    double tol = 1e-13;
};

struct ApproxResult {
    SynthesisSolution solution;
    std::vector<double> objective_trace;  // residual after each sweep of the winning restart
    std::vector<std::vector<double>> restart_traces;
    int iterations = 0;                   // sweeps summed over restarts
    bool converged = false;
};

FeasibilityReport feasibility(const ComplexMatrix &u_th, const ComplexMatrix &g, double tol = kDefaultTol);

SynthesisSolution solve_exact(const FeasibilityReport &report, const ComplexMatrix &g, const ComplexMatrix &u_th,
                              const BranchId &branch);

/// All 2^N solutions ordered by branch index. Throws Capacity for N > 20.
std::vector<SynthesisSolution> enumerate_solutions(const FeasibilityReport &report, const ComplexMatrix &g,
                                                   const ComplexMatrix &u_th);

/// ||O Delta_LO G - U_th||_F recomputed from the stored parameters.
double verify_solution(const SynthesisSolution &sol, const ComplexMatrix &u_th, const ComplexMatrix &g);

/// Best O for fixed LO phases, and the resulting distance to U_th.
struct PhaseProfile {
    RealOrthogonal o;
    double residual;
};
PhaseProfile best_gains_for_phases(const std::vector<double> &phases, const ComplexMatrix &g,
                                   const ComplexMatrix &u_th);

/// Minimizes ||O Delta_LO(phi) G - U_th||_F by alternating a closed-form
/// Procrustes step for O with golden-section line searches on each phase.
/// Restart 0 starts from phi = 0, later restarts from seeded random phases.
ApproxResult solve_approx(const ComplexMatrix &u_th, const ComplexMatrix &g, const ApproxOptions &opts = {});

}  // namespace mphd
