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

#include "mphd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace mphd {
namespace {

void require_compatible(const ComplexMatrix &u_th, const ComplexMatrix &g) {
    require_square(u_th, "U_th");
    require_square(g, "G");
    if (u_th.rows() != g.rows()) {
        std::ostringstream msg;
        msg << "U_th is " << u_th.rows() << "x" << u_th.cols() << " but G is " << g.rows() << "x" << g.cols();
        throw Error(ErrorCode::Dimension, msg.str());
    }
}

void require_unitary(const ComplexMatrix &m, const char *name, double tol) {
    const auto n = m.rows();
    const double err = (m.adjoint() * m - ComplexMatrix::Identity(n, n)).norm();
    if (err > tol) {
        std::ostringstream msg;
        msg << name << " is not unitary: ||M^dagger M - I||_F = " << err << " > " << tol;
        throw Error(ErrorCode::Validation, msg.str());
    }
}

ComplexMatrix compose(const RealOrthogonal &o, const DiagonalUnitary &d, const ComplexMatrix &g) {
    return o.complex_matrix() * (d.diagonal().asDiagonal() * g);
}

}  // namespace

DiagonalUnitary FeasibilityReport::diagonal() const {
    if (!feasible) {
        throw Error(ErrorCode::Feasibility, "U'^T U' is not a unit-modulus diagonal");
    }
    // feasible implies every diagonal entry is within tol of the unit circle
    return DiagonalUnitary::from_entries(d_candidate.diagonal(), std::max(tol, 1e-12));
}

FeasibilityReport feasibility(const ComplexMatrix &u_th, const ComplexMatrix &g, double tol) {
    require_compatible(u_th, g);
    require_unitary(u_th, "U_th", tol);
    require_unitary(g, "G", tol);

    FeasibilityReport r;
    r.tol = tol;
    r.u_prime = u_th * g.adjoint();
    r.d_candidate = r.u_prime.transpose() * r.u_prime;
    const auto n = r.d_candidate.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        r.modulus_residual = std::max(r.modulus_residual, std::abs(std::abs(r.d_candidate(i, i)) - 1.0));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) {
                r.offdiag_residual = std::max(r.offdiag_residual, std::abs(r.d_candidate(i, j)));
            }
        }
    }
    r.feasible = r.offdiag_residual <= tol && r.modulus_residual <= tol;
    return r;
}

SynthesisSolution solve_exact(const FeasibilityReport &report, const ComplexMatrix &g, const ComplexMatrix &u_th,
                              const BranchId &branch) {
    if (!report.feasible) {
        std::ostringstream msg;
        msg << "target is not MPHD-implementable (off-diagonal residual " << report.offdiag_residual
            << ", modulus residual " << report.modulus_residual << ", tol " << report.tol << ")";
        throw Error(ErrorCode::Feasibility, msg.str());
    }
    require_compatible(u_th, g);
    const DiagonalUnitary delta = diag_sqrt_branch(report.diagonal(), branch);
    const ComplexMatrix o_complex = report.u_prime * delta.inverse().matrix();

    // O = U' Delta^-1 is real orthogonal whenever the report is feasible; a
    // failure here is a bug, not bad input.
    const double check_tol = std::max(1e-8, 100 * report.tol);
    if (!is_real_orthogonal(o_complex, check_tol)) {
        std::ostringstream msg;
        msg << "reconstructed gain matrix is not real orthogonal (max |Im| = " << o_complex.imag().cwiseAbs().maxCoeff()
            << ") for branch " << branch.str();
        throw Error(ErrorCode::InternalConsistency, msg.str());
    }

    SynthesisSolution s{delta, RealOrthogonal(o_complex.real(), check_tol), {}, 0.0, branch};
    s.u_mphd = compose(s.o, s.delta_lo, g);
    s.residual = frobenius_distance(s.u_mphd, u_th);
    return s;
}

std::vector<SynthesisSolution> enumerate_solutions(const FeasibilityReport &report, const ComplexMatrix &g,
                                                   const ComplexMatrix &u_th) {
    const auto n = static_cast<std::size_t>(g.rows());
    if (n > 20) {
        throw Error(ErrorCode::Capacity, "enumerate_solutions: 2^" + std::to_string(n) +
                                             " solutions is too many; request a single branch instead");
    }
    std::vector<SynthesisSolution> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
        out.push_back(solve_exact(report, g, u_th, BranchId::from_index(b, n)));
    }
    return out;
}

double verify_solution(const SynthesisSolution &sol, const ComplexMatrix &u_th, const ComplexMatrix &g) {
    require_compatible(u_th, g);
    if (sol.delta_lo.size() != static_cast<std::size_t>(g.rows()) || sol.o.size() != sol.delta_lo.size()) {
        throw Error(ErrorCode::Dimension, "verify_solution: solution size does not match the target");
    }
    return frobenius_distance(compose(sol.o, sol.delta_lo, g), u_th);
}

PhaseProfile best_gains_for_phases(const std::vector<double> &phases, const ComplexMatrix &g,
                                   const ComplexMatrix &u_th) {
    const DiagonalUnitary d(phases);
    const ComplexMatrix m = d.diagonal().asDiagonal() * g;
    // trace(O B) with B = Re(M U^dagger) equals Re tr((O M)^dagger U_th)
    const RealMatrix b = (m * u_th.adjoint()).real();
    RealOrthogonal o = procrustes_best_orthogonal(b);
    const double residual = (o.complex_matrix() * m - u_th).norm();
    return {std::move(o), residual};
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

struct LineSearch {
    double x;
    double f;
};

// The profile is pi-periodic in each phase (a sign flip of one LO entry is
// absorbed by O), so one period is scanned, then the best bracket is refined.
LineSearch minimize_coordinate(std::vector<double> &phases, std::size_t i, const ComplexMatrix &g,
                               const ComplexMatrix &u_th, double current) {
    const double origin = phases[i];
    auto eval = [&](double x) {
        phases[i] = x;
        return best_gains_for_phases(phases, g, u_th).residual;
    };
    constexpr int kScan = 12;
    const double step = std::numbers::pi / kScan;
    int best_k = 0;
    double best_f = current;
    for (int k = 1; k < kScan; ++k) {
        const double f = eval(origin + k * step);
        if (f < best_f) {
            best_f = f;
            best_k = k;
        }
    }
    double a = origin + (best_k - 1) * step;
    double b = origin + (best_k + 1) * step;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > 1e-13) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = eval(d);
        }
    }
    LineSearch best{origin + best_k * step, best_f};
    if (fc < best.f) {
        best = {c, fc};
    }
    if (fd < best.f) {
        best = {d, fd};
    }
    phases[i] = best.x;
    return best;
}

struct RestartOutcome {
    std::vector<double> phases;
    std::vector<double> trace;
    int sweeps = 0;
    bool converged = false;
};

RestartOutcome run_restart(std::vector<double> phases, const ComplexMatrix &g, const ComplexMatrix &u_th,
                           const ApproxOptions &opts) {
    RestartOutcome out;
    double f = best_gains_for_phases(phases, g, u_th).residual;
    out.trace.push_back(f);
    for (int sweep = 0; sweep < opts.max_iters; ++sweep) {
        if (f <= 1e-14) {
            out.converged = true;
            break;
        }
        const double before = f;
        for (std::size_t i = 0; i < phases.size(); ++i) {
            f = minimize_coordinate(phases, i, g, u_th, f).f;
        }
        ++out.sweeps;
        out.trace.push_back(f);
        if (before - f <= opts.tol) {
            out.converged = true;
            break;
        }
    }
    out.phases = std::move(phases);
    return out;
}

}  // namespace

ApproxResult solve_approx(const ComplexMatrix &u_th, const ComplexMatrix &g, const ApproxOptions &opts) {
    require_compatible(u_th, g);
    require_unitary(u_th, "U_th", 1e-8);
    require_unitary(g, "G", 1e-8);
    if (opts.restarts < 1 || opts.max_iters < 1) {
        throw Error(ErrorCode::Config, "solve_approx: restarts and max_iters must be positive");
    }
    const auto n = static_cast<std::size_t>(g.rows());
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);

    ApproxResult result;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_phases;
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> start(n, 0.0);
        if (r > 0) {
            for (auto &p : start) {
                p = angle(rng);
            }
        }
        RestartOutcome o = run_restart(std::move(start), g, u_th, opts);
        result.iterations += o.sweeps;
        const double f = o.trace.back();
        if (f < best) {
            best = f;
            best_phases = o.phases;
            result.objective_trace = o.trace;
            result.converged = o.converged;
        }
        result.restart_traces.push_back(std::move(o.trace));
    }

    std::vector<double> wrapped(best_phases.size());
    std::transform(best_phases.begin(), best_phases.end(), wrapped.begin(), wrap_phase);
    PhaseProfile p = best_gains_for_phases(wrapped, g, u_th);
    DiagonalUnitary delta(std::move(wrapped));
    ComplexMatrix u_mphd = compose(p.o, delta, g);
    const double residual = frobenius_distance(u_mphd, u_th);
    result.solution = SynthesisSolution{std::move(delta), std::move(p.o), std::move(u_mphd), residual,
                                        BranchId::principal(n)};
    return result;
}

}  // namespace mphd
