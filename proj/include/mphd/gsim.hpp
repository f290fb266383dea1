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
#include <iosfwd>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "mphd/cluster.hpp"
#include "mphd/matcore.hpp"
#include "mphd/mbqc.hpp"
#include "mphd/modes.hpp"
#include "mphd/synth.hpp"

namespace mphd {

/// LO global phase that makes angle 0 read out p.
inline constexpr double kDefaultLoPhase = 3 * std::numbers::pi / 2;

/// Gaussian state in the [q, p] = 2i convention (vacuum covariance = I).
/// Phase-space vectors are ordered (q_1..q_N, p_1..p_N).
class GaussianState {
   public:
    GaussianState() = default;
    GaussianState(RealVector mean, RealMatrix cov);

    static GaussianState vacuum(std::size_t n);

    std::size_t modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
    const RealVector &mean() const { return mean_; }
    const RealMatrix &cov() const { return cov_; }

    /// Smallest eigenvalue of cov + i*Omega; non-negative for physical states.
    double uncertainty_min_eigenvalue() const;

    /// Mean and 2x2 covariance of one mode.
    GaussianState mode(std::size_t k) const;

   private:
    RealVector mean_;
    RealMatrix cov_;
};

/// [[0, I], [-I, 0]].
RealMatrix symplectic_form(std::size_t n);

class SymplecticMap {
   public:
    SymplecticMap() = default;
    explicit SymplecticMap(RealMatrix s, double tol = 1e-10);

    std::size_t modes() const { return static_cast<std::size_t>(s_.rows() / 2); }
    const RealMatrix &matrix() const { return s_; }
    /// ||S Omega S^T - Omega||_F.
    double symplectic_error() const;

    /// Map applying this after `first`.
    SymplecticMap after(const SymplecticMap &first) const;

   private:
    RealMatrix s_;
};

/// U = X + iY gives S = [[X, -Y], [Y, X]]. Throws Validation if U is not unitary.
SymplecticMap symplectic_from_unitary(const ComplexMatrix &u, double tol = 1e-9);

enum class SqueezeAxis { P, Q };

/// Zero mean, per-mode covariance diag(e^{2r}, e^{-2r}) for p-squeezing
/// (mirrored for q-squeezing). Modes default to p-squeezed.
GaussianState squeezed_input(std::size_t n, double r, const std::vector<SqueezeAxis> &axes = {});

GaussianState apply(const SymplecticMap &s, const GaussianState &state);

/// Coefficients c with measured quadrature c . x for reading `mode` at angle
/// theta: q cos(phi0 + theta) - p sin(phi0 + theta).
RealVector quadrature_vector(std::size_t n, std::size_t mode, double theta, double lo_phase = kDefaultLoPhase);

struct HomodyneRecord {
    std::size_t mode = 0;
    double angle = 0.0;  // in [0, 2 pi)
    double outcome = 0.0;
    double lo_phase = kDefaultLoPhase;
};

/// State of the other modes after observing `outcome`. A zero-variance
/// quadrature contributes no update (generalized inverse).
GaussianState condition_homodyne(const GaussianState &state, std::size_t mode, double theta, double outcome,
                                 double lo_phase = kDefaultLoPhase);

/// Samples an outcome and returns it with the conditioned remaining state.
std::pair<HomodyneRecord, GaussianState> homodyne_measure(const GaussianState &state, std::size_t mode, double theta,
                                                          std::mt19937_64 &rng, double lo_phase = kDefaultLoPhase);
std::pair<HomodyneRecord, GaussianState> homodyne_measure(const GaussianState &state, std::size_t mode, double theta,
                                                          std::uint64_t seed, double lo_phase = kDefaultLoPhase);

/// Drops a mode without measuring it.
GaussianState marginalize(const GaussianState &state, std::size_t mode);

/// Variances of p_i - sum_j V_ij q_j.
std::vector<double> nullifier_variances(const GaussianState &state, const AdjacencyMatrix &v);

/// Seed of shot k derived from a master seed, independent of evaluation order.
std::uint64_t shot_seed(std::uint64_t master, std::uint64_t shot);

/// Full-state covariance after the staged maps G, then Delta_LO, then O,
/// applied to p-squeezed vacuum.
RealMatrix staged_covariance(const ComplexMatrix &g, const SynthesisSolution &sol, double r);
/// Full-state covariance after S(U) applied to p-squeezed vacuum.
RealMatrix direct_covariance(const ComplexMatrix &u, double r);

struct SimulationResult {
    std::vector<double> angles;
    std::vector<std::vector<double>> samples;  // [mode][shot], offsets included
    RealVector sample_mean;
    RealMatrix sample_cov;
    RealVector analytic_mean;
    RealMatrix analytic_cov;
    RealMatrix state_cov;  // staged full-state covariance before readout
    double symplectic_error = 0.0;

    std::size_t shots() const { return samples.empty() ? 0 : samples.front().size(); }
    /// Columns shot, mode, angle, outcome.
    void write_csv(std::ostream &out) const;
};

SimulationResult simulate_mphd(const DetectionSetup &setup, const SynthesisSolution &sol, const MeasurementPlan &plan,
                               double r, std::size_t shots, std::uint64_t seed);

struct GateVerification {
    Eigen::Vector2d target_mean;
    Eigen::Matrix2d target_cov;
    double cov_distance = 0.0;
    double mean_distance = 0.0;  // deterministic part vs target mean
    double relative_cov_deviation = 0.0;
    bool large_deviation = false;
};

struct GateRunResult {
    GaussianState output;  // single mode, feedforward applied to the mean
    std::vector<HomodyneRecord> records;
    RealMatrix byproduct;         // 2x3 feedforward gain on the (offset) outcomes
    Eigen::Matrix2d induced_gate; // action on the input in the ideal limit
    Eigen::Vector2d deterministic_mean;
    Eigen::Vector2d outcome_remainder;
    GateVerification verification;
};

struct GateRunOptions {
    /// Deviation is flagged when ||cov - target||_F exceeds this fraction of ||target||_F.
    double deviation_tol = 0.05;
};

/// Runs the program on (input, three p-squeezed cluster modes), measures
/// modes in, 1, 2 one after another and feeds the outcomes forward onto mode 3.
GateRunResult run_gate_program(const GateProgram &program, const GaussianState &input, double r, std::uint64_t seed,
                               const GateRunOptions &opts = {});

}  // namespace mphd
