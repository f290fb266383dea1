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

#include "mphd/gsim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mphd/kernels.hpp"

namespace mphd {
namespace {

Eigen::Index dim(std::size_t n) { return static_cast<Eigen::Index>(2 * n); }

void require_mode(const GaussianState &state, std::size_t mode) {
    if (mode >= state.modes()) {
        std::ostringstream msg;
        msg << "mode " << mode << " out of range for a " << state.modes() << "-mode state";
        throw Error(ErrorCode::Validation, msg.str());
    }
}

// Phase-space indices of every mode except `mode`.
std::vector<Eigen::Index> kept_indices(std::size_t n, std::size_t mode) {
    std::vector<Eigen::Index> idx;
    for (std::size_t quad = 0; quad < 2; ++quad) {
        for (std::size_t k = 0; k < n; ++k) {
            if (k != mode) {
                idx.push_back(static_cast<Eigen::Index>(quad * n + k));
            }
        }
    }
    return idx;
}

double wrap_angle_positive(double theta) {
    double a = std::fmod(theta, 2 * std::numbers::pi);
    if (a < 0) {
        a += 2 * std::numbers::pi;
    }
    return a >= 2 * std::numbers::pi ? 0.0 : a;
}

// Below this, a measured variance is treated as exactly zero.
constexpr double kZeroVariance = 1e-300;

GaussianState condition_on(const GaussianState &state, std::size_t mode, const RealVector &c, double outcome) {
    const RealVector sc = state.cov() * c;
    const double var = c.dot(sc);
    const double mu = c.dot(state.mean());
    const double gain = var > kZeroVariance ? 1.0 / var : 0.0;
    const RealVector mean = state.mean() + sc * (gain * (outcome - mu));
    const RealMatrix cov = state.cov() - gain * sc * sc.transpose();
    const auto idx = kept_indices(state.modes(), mode);
    return GaussianState(mean(idx), cov(idx, idx));
}

// Factor F with F F^T = cov, tolerating singular covariances.
RealMatrix covariance_factor(const RealMatrix &cov) {
    Eigen::LLT<RealMatrix> llt(cov);
    if (llt.info() == Eigen::Success) {
        return llt.matrixL();
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(cov);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::Numerical, "covariance factorization failed");
    }
    const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

SymplecticMap diagonal_map(const DiagonalUnitary &d) { return symplectic_from_unitary(d.matrix()); }

SymplecticMap orthogonal_map(const RealOrthogonal &o) { return symplectic_from_unitary(o.complex_matrix()); }

}  // namespace

GaussianState::GaussianState(RealVector mean, RealMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() % 2 != 0 || cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        std::ostringstream msg;
        msg << "Gaussian state needs an even-length mean and matching covariance, got " << mean_.size() << " and "
            << cov_.rows() << "x" << cov_.cols();
        throw Error(ErrorCode::Dimension, msg.str());
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
        throw Error(ErrorCode::Numerical, "Gaussian state has non-finite entries");
    }
    if (cov_.size() == 0) {
        return;  // every mode has been measured
    }
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw Error(ErrorCode::Validation, "covariance matrix is not symmetric");
    }
    cov_ = 0.5 * (cov_ + cov_.transpose());
}

GaussianState GaussianState::vacuum(std::size_t n) {
    return GaussianState(RealVector::Zero(dim(n)), RealMatrix::Identity(dim(n), dim(n)));
}

double GaussianState::uncertainty_min_eigenvalue() const {
    if (cov_.size() == 0) {
        return 0.0;
    }
    const ComplexMatrix h = cov_.cast<Complex>() + Complex(0, 1) * symplectic_form(modes()).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

GaussianState GaussianState::mode(std::size_t k) const {
    require_mode(*this, k);
    const auto n = static_cast<Eigen::Index>(modes());
    const std::vector<Eigen::Index> idx = {static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k) + n};
    return GaussianState(mean_(idx), cov_(idx, idx));
}

RealMatrix symplectic_form(std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    RealMatrix j = RealMatrix::Zero(2 * m, 2 * m);
    j.topRightCorner(m, m) = RealMatrix::Identity(m, m);
    j.bottomLeftCorner(m, m) = -RealMatrix::Identity(m, m);
    return j;
}

SymplecticMap::SymplecticMap(RealMatrix s, double tol) : s_(std::move(s)) {
    if (s_.rows() != s_.cols() || s_.rows() % 2 != 0 || s_.rows() == 0) {
        throw Error(ErrorCode::Dimension, "symplectic matrix must be square with even size");
    }
    const double err = symplectic_error();
    if (!(err <= tol)) {
        std::ostringstream msg;
        msg << "matrix is not symplectic: ||S Omega S^T - Omega||_F = " << err;
        throw Error(ErrorCode::Validation, msg.str());
    }
}

double SymplecticMap::symplectic_error() const {
    const RealMatrix j = symplectic_form(modes());
    return (s_ * j * s_.transpose() - j).norm();
}

SymplecticMap SymplecticMap::after(const SymplecticMap &first) const {
    if (first.modes() != modes()) {
        throw Error(ErrorCode::Dimension, "cannot compose symplectic maps of different sizes");
    }
    return SymplecticMap(s_ * first.s_);
}

SymplecticMap symplectic_from_unitary(const ComplexMatrix &u, double tol) {
    require_square(u, "U");
    if (!is_unitary(u, tol)) {
        throw Error(ErrorCode::Validation, "symplectic_from_unitary: U is not unitary");
    }
    const auto n = u.rows();
    RealMatrix s(2 * n, 2 * n);
    s.topLeftCorner(n, n) = u.real();
    s.topRightCorner(n, n) = -u.imag();
    s.bottomLeftCorner(n, n) = u.imag();
    s.bottomRightCorner(n, n) = u.real();
    return SymplecticMap(std::move(s));
}

GaussianState squeezed_input(std::size_t n, double r, const std::vector<SqueezeAxis> &axes) {
    if (!(r >= 0)) {
        throw Error(ErrorCode::Validation, "squeezing parameter must be non-negative");
    }
    if (!axes.empty() && axes.size() != n) {
        throw Error(ErrorCode::Dimension, "squeeze axes must list every mode");
    }
    const auto m = static_cast<Eigen::Index>(n);
    RealMatrix cov = RealMatrix::Zero(2 * m, 2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const bool squeeze_q = !axes.empty() && axes[static_cast<std::size_t>(k)] == SqueezeAxis::Q;
        cov(k, k) = std::exp(squeeze_q ? -2 * r : 2 * r);
        cov(k + m, k + m) = std::exp(squeeze_q ? 2 * r : -2 * r);
    }
    return GaussianState(RealVector::Zero(2 * m), std::move(cov));
}

GaussianState apply(const SymplecticMap &s, const GaussianState &state) {
    if (s.modes() != state.modes()) {
        std::ostringstream msg;
        msg << "symplectic map acts on " << s.modes() << " modes but the state has " << state.modes();
        throw Error(ErrorCode::Dimension, msg.str());
    }
    const RealMatrix &m = s.matrix();
    return GaussianState(m * state.mean(), m * state.cov() * m.transpose());
}

RealVector quadrature_vector(std::size_t n, std::size_t mode, double theta, double lo_phase) {
    if (mode >= n) {
        throw Error(ErrorCode::Validation, "quadrature_vector: mode out of range");
    }
    RealVector c = RealVector::Zero(dim(n));
    c(static_cast<Eigen::Index>(mode)) = std::cos(lo_phase + theta);
    c(static_cast<Eigen::Index>(mode + n)) = -std::sin(lo_phase + theta);
    return c;
}

GaussianState condition_homodyne(const GaussianState &state, std::size_t mode, double theta, double outcome,
                                 double lo_phase) {
    require_mode(state, mode);
    return condition_on(state, mode, quadrature_vector(state.modes(), mode, theta, lo_phase), outcome);
}

std::pair<HomodyneRecord, GaussianState> homodyne_measure(const GaussianState &state, std::size_t mode, double theta,
                                                          std::mt19937_64 &rng, double lo_phase) {
    require_mode(state, mode);
    const RealVector c = quadrature_vector(state.modes(), mode, theta, lo_phase);
    const double mu = c.dot(state.mean());
    const double var = std::max(0.0, c.dot(state.cov() * c));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double outcome = mu + std::sqrt(var) * normal(rng);
    HomodyneRecord rec{mode, wrap_angle_positive(theta), outcome, lo_phase};
    return {rec, condition_on(state, mode, c, outcome)};
}

std::pair<HomodyneRecord, GaussianState> homodyne_measure(const GaussianState &state, std::size_t mode, double theta,
                                                          std::uint64_t seed, double lo_phase) {
    std::mt19937_64 rng(seed);
    return homodyne_measure(state, mode, theta, rng, lo_phase);
}

GaussianState marginalize(const GaussianState &state, std::size_t mode) {
    require_mode(state, mode);
    const auto idx = kept_indices(state.modes(), mode);
    return GaussianState(state.mean()(idx), state.cov()(idx, idx));
}

std::vector<double> nullifier_variances(const GaussianState &state, const AdjacencyMatrix &v) {
    const std::size_t n = state.modes();
    if (v.size() != n) {
        throw Error(ErrorCode::Dimension, "nullifier_variances: graph and state sizes differ");
    }
    const auto m = static_cast<Eigen::Index>(n);
    std::vector<double> out(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        RealVector c = RealVector::Zero(2 * m);
        c.head(m) = -v.matrix().row(i).transpose();
        c(m + i) = 1.0;
        out[static_cast<std::size_t>(i)] = c.dot(state.cov() * c);
    }
    return out;
}

std::uint64_t shot_seed(std::uint64_t master, std::uint64_t shot) {
    // splitmix64 finalizer over a per-shot counter
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (shot + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RealMatrix staged_covariance(const ComplexMatrix &g, const SynthesisSolution &sol, double r) {
    const auto n = static_cast<std::size_t>(g.rows());
    GaussianState state = squeezed_input(n, r);
    state = apply(symplectic_from_unitary(g), state);
    state = apply(diagonal_map(sol.delta_lo), state);
    state = apply(orthogonal_map(sol.o), state);
    return state.cov();
}

RealMatrix direct_covariance(const ComplexMatrix &u, double r) {
    return apply(symplectic_from_unitary(u), squeezed_input(static_cast<std::size_t>(u.rows()), r)).cov();
}

void SimulationResult::write_csv(std::ostream &out) const {
    out << "shot,mode,angle,outcome\n";
    out.precision(17);
    for (std::size_t k = 0; k < shots(); ++k) {
        for (std::size_t m = 0; m < samples.size(); ++m) {
            out << k << ',' << m << ',' << angles[m] << ',' << samples[m][k] << '\n';
        }
    }
}

SimulationResult simulate_mphd(const DetectionSetup &setup, const SynthesisSolution &sol, const MeasurementPlan &plan,
                               double r, std::size_t shots, std::uint64_t seed) {
    plan.validate();
    const auto n = static_cast<std::size_t>(setup.g.rows());
    if (setup.g.rows() != setup.g.cols() || sol.delta_lo.size() != n || sol.o.size() != n || plan.size() != n) {
        throw Error(ErrorCode::Dimension, "simulate_mphd: setup, solution and plan sizes differ");
    }
    if (shots < 1) {
        throw Error(ErrorCode::Validation, "simulate_mphd: shots must be at least 1");
    }

    const SymplecticMap s_g = symplectic_from_unitary(setup.g);
    const SymplecticMap s_total = orthogonal_map(sol.o).after(diagonal_map(sol.delta_lo).after(s_g));
    GaussianState state = squeezed_input(n, r);
    state = apply(s_g, state);
    state = apply(diagonal_map(sol.delta_lo), state);
    state = apply(orthogonal_map(sol.o), state);

    SimulationResult res;
    res.state_cov = state.cov();
    res.symplectic_error = s_total.symplectic_error();
    const auto m = static_cast<Eigen::Index>(n);
    RealMatrix c(m, 2 * m);
    for (std::size_t k = 0; k < n; ++k) {
        c.row(static_cast<Eigen::Index>(k)) = plan.gains[k] * quadrature_vector(n, k, plan.angles[k]).transpose();
        res.angles.push_back(wrap_angle_positive(plan.angles[k]));
    }
    res.analytic_mean = c * state.mean() + Eigen::Map<const RealVector>(plan.offsets.data(), m);
    res.analytic_cov = c * state.cov() * c.transpose();
    res.analytic_cov = 0.5 * (res.analytic_cov + res.analytic_cov.transpose());

    // Shot-major standard normals, stored per mode so the moment loops run
    // over contiguous arrays.
    std::vector<std::vector<double>> z(n, std::vector<double>(shots));
    for (std::size_t k = 0; k < shots; ++k) {
        std::mt19937_64 rng(shot_seed(seed, k));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            z[j][k] = normal(rng);
        }
    }
    const RealMatrix factor = covariance_factor(res.analytic_cov);
    res.samples.assign(n, std::vector<double>(shots));
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(res.samples[i].begin(), res.samples[i].end(), res.analytic_mean(static_cast<Eigen::Index>(i)));
        for (std::size_t j = 0; j < n; ++j) {
            const double w = factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (w != 0.0) {
                kernels::axpy(w, z[j], res.samples[i]);
            }
        }
    }

    res.sample_mean.resize(m);
    std::vector<std::vector<double>> centered(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean = kernels::sum(res.samples[i]) / static_cast<double>(shots);
        res.sample_mean(static_cast<Eigen::Index>(i)) = mean;
        centered[i] = res.samples[i];
        for (double &x : centered[i]) {
            x -= mean;
        }
    }
    const double denom = shots > 1 ? static_cast<double>(shots - 1) : 1.0;
    res.sample_cov.resize(m, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernels::dot(centered[i], centered[j]) / denom;
            res.sample_cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            res.sample_cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return res;
}

GateRunResult run_gate_program(const GateProgram &program, const GaussianState &input, double r, std::uint64_t seed,
                               const GateRunOptions &opts) {
    constexpr std::size_t kModes = 4;
    constexpr std::size_t kMeasured = 3;
    program.plan.validate();
    if (program.plan.size() != kModes || program.u_th.rows() != 4 || program.d_meas.size() != kModes) {
        throw Error(ErrorCode::Dimension, "gate programs act on the modes (in, 1, 2, 3)");
    }
    if (input.modes() != 1) {
        throw Error(ErrorCode::Dimension, "run_gate_program: the input must be a single-mode state");
    }
    if (!(r >= 0)) {
        throw Error(ErrorCode::Validation, "run_gate_program: squeezing must be non-negative");
    }

    // (in, 1, 2, 3) with the cluster modes p-squeezed
    const GaussianState cluster = squeezed_input(kModes, r);
    RealVector mean0 = cluster.mean();
    RealMatrix cov0 = cluster.cov();
    const std::vector<Eigen::Index> in_idx = {0, 4};
    mean0(in_idx) = input.mean();
    cov0(in_idx, in_idx) = input.cov();
    const GaussianState prepared(mean0, cov0);

    // The measurement phases of D_meas are folded into the homodyne angles.
    const ComplexMatrix network = program.d_meas.conj().diagonal().asDiagonal() * program.u_th;
    const SymplecticMap s = symplectic_from_unitary(network);
    GaussianState state = apply(s, prepared);

    GateRunResult res;
    std::mt19937_64 rng(seed);
    Eigen::Vector3d outcomes;
    for (std::size_t k = 0; k < kMeasured; ++k) {
        // earlier modes are gone, so the next one is always at index 0
        auto [rec, next] = homodyne_measure(state, 0, program.plan.angles[k], rng);
        rec.mode = k;
        rec.outcome *= program.plan.gains[k];
        outcomes(static_cast<Eigen::Index>(k)) = rec.outcome;
        res.records.push_back(rec);
        state = std::move(next);
    }

    // Ideal-limit feedforward: T_anti = B R_anti removes the anti-squeezed
    // cluster quadratures from the output; the rest of T - B R acts on the input.
    const RealMatrix &sm = s.matrix();
    RealMatrix t(2, 8);
    t.row(0) = sm.row(3);
    t.row(1) = sm.row(7);
    RealMatrix rr(3, 8);
    for (std::size_t k = 0; k < kMeasured; ++k) {
        rr.row(static_cast<Eigen::Index>(k)) =
            program.plan.gains[k] * quadrature_vector(kModes, k, program.plan.angles[k]).transpose() * sm;
    }
    const std::vector<Eigen::Index> anti = {1, 2, 3};
    const RealMatrix r_anti = rr(Eigen::all, anti);
    Eigen::FullPivLU<RealMatrix> lu(r_anti);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::Singularity, "measurement plan does not determine the feedforward correction");
    }
    res.byproduct = t(Eigen::all, anti) * lu.inverse();
    res.induced_gate = t(Eigen::all, in_idx) - res.byproduct * rr(Eigen::all, in_idx);

    const Eigen::Vector3d offsets(program.plan.offsets[0], program.plan.offsets[1], program.plan.offsets[2]);
    const Eigen::Vector2d corrected = state.mean() - res.byproduct * (outcomes + offsets);
    res.output = GaussianState(corrected, state.cov());
    res.deterministic_mean = (t - res.byproduct * rr) * prepared.mean() - res.byproduct * offsets;
    res.outcome_remainder = corrected - res.deterministic_mean;

    GateVerification &v = res.verification;
    v.target_mean = program.target_gate * (input.mean() + program.target_shift);
    v.target_cov = program.target_gate * input.cov() * program.target_gate.transpose();
    v.cov_distance = (state.cov() - v.target_cov).norm();
    v.mean_distance = (res.deterministic_mean - v.target_mean).norm();
    v.relative_cov_deviation = v.cov_distance / v.target_cov.norm();
    v.large_deviation = !(v.relative_cov_deviation <= opts.deviation_tol) || !(v.mean_distance <= 1e-6);
    return res;
}

}  // namespace mphd
