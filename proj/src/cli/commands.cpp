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

#include "mphd/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mphd/cli/log.hpp"

namespace mphd::cli {
namespace {

using Clock = std::chrono::steady_clock;

// Exhaustive listings beyond this mode count are only produced on request.
constexpr std::size_t kAutoEnumerateModes = 8;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json header(const char *command, const Config &c) {
    return json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", config_to_json(c)}};
}

json diagonal_to_json(const DiagonalUnitary &d) {
    json re = json::array();
    json im = json::array();
    for (std::size_t k = 0; k < d.size(); ++k) {
        re.push_back(d.entry(k).real());
        im.push_back(d.entry(k).imag());
    }
    return json{{"re", re}, {"im", im}};
}

json diagonal_display(const DiagonalUnitary &d) {
    json out = json::array();
    for (std::size_t k = 0; k < d.size(); ++k) {
        out.push_back(format_complex(d.entry(k)));
    }
    return out;
}

json solution_to_json(const SynthesisSolution &s) {
    return json{{"branch", s.branch.str()},
                {"phases", s.delta_lo.phases()},
                {"lo_entries", diagonal_to_json(s.delta_lo)},
                {"gains", real_to_json(s.o.matrix())},
                {"u_mphd", complex_to_json(s.u_mphd)},
                {"residual", s.residual}};
}

json solution_display(const SynthesisSolution &s) {
    return json{{"branch", s.branch.str()}, {"lo_entries", diagonal_display(s.delta_lo)},
                {"gains", real_display(s.o.matrix())}};
}

json setup_to_json(const DetectionSetup &s) {
    return json{{"lo_index", s.lo_index},
                {"kappa", s.kappa},
                {"opo_phases", s.opo.phases()},
                {"U_T", complex_to_json(s.ut)},
                {"G", complex_to_json(s.g)}};
}

json feasibility_to_json(const FeasibilityReport &r) {
    return json{{"feasible", r.feasible},
                {"tol", r.tol},
                {"offdiag_residual", r.offdiag_residual},
                {"modulus_residual", r.modulus_residual},
                {"U_prime", complex_to_json(r.u_prime)},
                {"D", complex_to_json(r.d_candidate)}};
}

BranchId selected_branch(const Config &c, std::size_t n) {
    if (c.branch.empty() || c.branch == "all") {
        return BranchId::principal(n);
    }
    BranchId b = BranchId::parse(c.branch);
    if (b.size() != n) {
        std::ostringstream msg;
        msg << "branch \"" << c.branch << "\" has " << b.size() << " bits but the problem has " << n << " modes";
        throw Error(ErrorCode::Config, msg.str());
    }
    return b;
}

// Feasibility, exact solutions or the approximate fallback, written into
// `report`. Returns the exit code and the selected solution.
std::pair<int, SynthesisSolution> synthesize_into(json &report, const Config &c, const DetectionSetup &setup,
                                                  const ComplexMatrix &u_th) {
    const std::size_t n = static_cast<std::size_t>(setup.g.rows());
    if (static_cast<std::size_t>(u_th.rows()) != n || u_th.rows() != u_th.cols()) {
        std::ostringstream msg;
        msg << "target is " << u_th.rows() << "x" << u_th.cols() << " but the front end has " << n << " modes";
        throw Error(ErrorCode::Dimension, msg.str());
    }
    if (setup.g.rows() != setup.g.cols()) {
        throw Error(ErrorCode::Dimension, "synthesis needs as many pixels as modes");
    }
    const FeasibilityReport fr = feasibility(u_th, setup.g, c.tol);
    report["feasibility"] = feasibility_to_json(fr);
    report["display"]["D"] = complex_display(fr.d_candidate);

    if (fr.feasible) {
        const SynthesisSolution sol = solve_exact(fr, setup.g, u_th, selected_branch(c, n));
        report["solution"] = solution_to_json(sol);
        report["display"]["solution"] = solution_display(sol);
        if (c.branch == "all" || n <= kAutoEnumerateModes) {
            json all = json::array();
            json shown = json::array();
            for (const auto &s : enumerate_solutions(fr, setup.g, u_th)) {
                all.push_back(solution_to_json(s));
                shown.push_back(solution_display(s));
            }
            report["solution_count"] = all.size();
            report["solutions"] = std::move(all);
            report["display"]["solutions"] = std::move(shown);
        }
        log(LogLevel::Info, "target is feasible; branch " + sol.branch.str());
        return {kExitOk, sol};
    }

    log(LogLevel::Info, "target is infeasible; running approximate synthesis");
    const ApproxResult ar = solve_approx(u_th, setup.g, c.optimizer);
    json finals = json::array();
    for (const auto &t : ar.restart_traces) {
        finals.push_back(t.back());
    }
    report["approx"] = json{{"residual", ar.solution.residual},
                            {"converged", ar.converged},
                            {"iterations", ar.iterations},
                            {"objective_trace", ar.objective_trace},
                            {"restart_residuals", finals},
                            {"solution", solution_to_json(ar.solution)}};
    report["display"]["approx_solution"] = solution_display(ar.solution);
    return {kExitInfeasible, ar.solution};
}

void finish(json &report, Clock::time_point start) { report["timing"] = json{{"total_ms", elapsed_ms(start)}}; }

json gate_matrix_json(const Eigen::Matrix2d &m) { return real_to_json(m); }

json program_to_json(const GateProgram &p) {
    return json{{"name", p.name},
                {"angles", p.plan.angles},
                {"offsets", p.plan.offsets},
                {"gains", p.plan.gains},
                {"target_gate", gate_matrix_json(p.target_gate)},
                {"target_shift", {p.target_shift(0), p.target_shift(1)}},
                {"d_meas_phases", p.d_meas.phases()}};
}

json state_json(const GaussianState &s) {
    return json{{"mean", vector_to_json(s.mean())}, {"cov", real_to_json(s.cov())}};
}

SynthesisSolution solution_from_inline(const InlineSolution &in, const ComplexMatrix &g, const ComplexMatrix &u_th) {
    SynthesisSolution s{DiagonalUnitary(in.phases), RealOrthogonal(in.gains, 1e-9), {}, 0.0,
                        in.branch.empty() ? BranchId::principal(in.phases.size()) : BranchId::parse(in.branch)};
    if (s.delta_lo.size() != static_cast<std::size_t>(g.rows()) || s.o.size() != s.delta_lo.size()) {
        throw Error(ErrorCode::Dimension, "inline solution size does not match the front end");
    }
    s.u_mphd = s.o.complex_matrix() * (s.delta_lo.diagonal().asDiagonal() * g);
    s.residual = frobenius_distance(s.u_mphd, u_th);
    return s;
}

InlineSolution solution_from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Config, "cannot open solution file " + path);
    }
    json report;
    try {
        report = json::parse(in);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::Config, path + ": " + e.what());
    }
    const json *sol = nullptr;
    if (report.contains("solution")) {
        sol = &report.at("solution");
    } else if (report.contains("approx")) {
        sol = &report.at("approx").at("solution");
    } else {
        throw Error(ErrorCode::Config, path + " holds no solution");
    }
    Config tmp = parse_config(json{{"solution", *sol}});
    return *tmp.solution;
}

}  // namespace

void apply_overrides(Config &c, const Overrides &o) {
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.branch) {
        c.branch = *o.branch;
    }
    if (o.tol) {
        if (!(*o.tol > 0)) {
            throw Error(ErrorCode::Config, "--tol must be positive");
        }
        c.tol = *o.tol;
    }
}

CommandOutput cmd_synthesize(const Config &c) {
    const auto start = Clock::now();
    CommandOutput out;
    out.report = header("synthesize", c);
    const DetectionSetup setup = build_setup(c);
    const ComplexMatrix u_th = build_target(c, &setup);
    out.report["setup"] = setup_to_json(setup);
    out.report["target"] = json{{"U_th", complex_to_json(u_th)}};
    out.report["display"]["U_th"] = complex_display(u_th);
    out.exit_code = synthesize_into(out.report, c, setup, u_th).first;
    finish(out.report, start);
    return out;
}

CommandOutput cmd_cluster(const Config &c) {
    const auto start = Clock::now();
    CommandOutput out;
    out.report = header("cluster", c);
    if (c.target.kind != "graph" && c.target.kind != "lin4") {
        throw Error(ErrorCode::Config, "cluster needs a graph target");
    }
    const AdjacencyMatrix v = c.target.kind == "graph" ? *c.target.graph : AdjacencyMatrix::path(4);
    out.report["graph"] = json{{"V", real_to_json(v.matrix())}};

    ClusterSolution cs;
    try {
        cs = c.target.freedom.size() > 0 ? cluster_unitary(v, RealOrthogonal(c.target.freedom)) : cluster_unitary(v);
    } catch (const Error &e) {
        if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::NotPsd) {
            throw;
        }
        out.report["error"] = json{{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
        out.exit_code = kExitInfeasible;
        finish(out.report, start);
        return out;
    }
    const RealMatrix id = RealMatrix::Identity(v.matrix().rows(), v.matrix().cols());
    const ClusterValidation val = validate_cluster(cs, c.tol);
    json residuals;
    for (std::size_t k = 0; k < val.residuals.size(); ++k) {
        residuals[ClusterValidation::kNames[k]] = val.residuals[k];
    }
    out.report["cluster"] = json{{"A", real_to_json(cs.a)},
                                 {"A_residual", (v.matrix() * cs.a * v.matrix() - (id - cs.a)).norm()},
                                 {"X_s", real_to_json(cs.x_s)},
                                 {"freedom", real_to_json(cs.freedom.matrix())},
                                 {"U", complex_to_json(cs.u)},
                                 {"unitary", is_unitary(cs.u, c.tol)},
                                 {"validation", {{"passed", val.passed}, {"tol", val.tol}, {"residuals", residuals}}}};
    out.report["display"] = json{{"A", real_display(cs.a)}, {"X_s", real_display(cs.x_s)}, {"U", complex_display(cs.u)}};

    if (c.front_end) {
        const DetectionSetup setup = build_setup(c);
        if (static_cast<std::size_t>(setup.g.rows()) == v.size()) {
            const FeasibilityReport fr = feasibility(cs.u, setup.g, c.tol);
            out.report["setup"] = setup_to_json(setup);
            out.report["feasibility"] = feasibility_to_json(fr);
        } else {
            log(LogLevel::Warn, "front end size differs from the graph; skipping feasibility");
        }
    }
    finish(out.report, start);
    return out;
}

CommandOutput cmd_gate(const Config &c) {
    const auto start = Clock::now();
    CommandOutput out;
    out.report = header("gate", c);
    if (c.target.kind != "gate") {
        throw Error(ErrorCode::Config, "gate needs a gate target (fourier, displacement or custom)");
    }
    const GateProgram program = build_program(c.target.gate);
    out.report["program"] = program_to_json(program);
    out.report["target"] = json{{"U_th", complex_to_json(program.u_th)}};
    out.report["display"]["U_th"] = complex_display(program.u_th);

    if (c.front_end) {
        const DetectionSetup setup = build_setup(c);
        out.report["setup"] = setup_to_json(setup);
        out.exit_code = synthesize_into(out.report, c, setup, program.u_th).first;
    }

    if (c.r) {
        const GaussianState input = build_input(c.input);
        const GateRunResult run = run_gate_program(program, input, *c.r, c.seed, {c.deviation_tol});
        json records = json::array();
        for (const auto &rec : run.records) {
            records.push_back({{"mode", rec.mode}, {"angle", rec.angle}, {"outcome", rec.outcome}});
        }
        const GateVerification &v = run.verification;
        json verification = {{"r", *c.r},
                             {"input", state_json(input)},
                             {"output", state_json(run.output)},
                             {"records", records},
                             {"byproduct", real_to_json(run.byproduct)},
                             {"induced_gate", gate_matrix_json(run.induced_gate)},
                             {"deterministic_mean", vector_to_json(run.deterministic_mean)},
                             {"outcome_remainder", vector_to_json(run.outcome_remainder)},
                             {"target_mean", vector_to_json(v.target_mean)},
                             {"target_cov", real_to_json(v.target_cov)},
                             {"cov_distance", v.cov_distance},
                             {"relative_cov_deviation", v.relative_cov_deviation},
                             {"mean_distance", v.mean_distance},
                             {"large_deviation", v.large_deviation}};

        // Repeated runs: the corrected output means scatter around the target.
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        Eigen::Vector2d sum_sq = Eigen::Vector2d::Zero();
        for (std::size_t k = 0; k < c.shots; ++k) {
            const GateRunResult r = run_gate_program(program, input, *c.r, shot_seed(c.seed, k), {c.deviation_tol});
            sum += r.output.mean();
            sum_sq += r.output.mean().cwiseProduct(r.output.mean());
        }
        if (c.shots > 0) {
            const double n = static_cast<double>(c.shots);
            const Eigen::Vector2d mean = sum / n;
            const Eigen::Vector2d var = (sum_sq / n - mean.cwiseProduct(mean)).cwiseMax(0.0);
            verification["shots"] = c.shots;
            verification["sample_output_mean"] = vector_to_json(mean);
            verification["sample_output_spread"] = vector_to_json(var.cwiseSqrt());
        }
        if (v.large_deviation) {
            log(LogLevel::Warn, "gate output deviates strongly from the target (relative covariance deviation " +
                                    std::to_string(v.relative_cov_deviation) + ")");
        }
        out.report["verification"] = std::move(verification);
        out.report["display"]["output_cov"] = real_display(run.output.cov());
        out.report["display"]["target_cov"] = real_display(v.target_cov);
    }
    finish(out.report, start);
    return out;
}

CommandOutput cmd_simulate(const Config &c, const std::string &out_path) {
    const auto start = Clock::now();
    CommandOutput out;
    out.report = header("simulate", c);
    const DetectionSetup setup = build_setup(c);
    const std::size_t n = static_cast<std::size_t>(setup.g.rows());
    std::optional<ComplexMatrix> u_th;
    if (!c.target.kind.empty()) {
        u_th = c.target.kind == "gate" ? build_program(c.target.gate).u_th : build_target(c, &setup);
    }

    SynthesisSolution sol;
    if (c.solution || !c.solution_file.empty()) {
        const InlineSolution in = c.solution ? *c.solution : solution_from_file(c.solution_file);
        sol = solution_from_inline(in, setup.g, u_th ? *u_th : setup.g);
    } else {
        if (!u_th) {
            throw Error(ErrorCode::Config, "simulate needs a solution, a solution_file or a target to synthesize");
        }
        json scratch;
        const auto [code, s] = synthesize_into(scratch, c, setup, *u_th);
        if (code != kExitOk) {
            log(LogLevel::Warn, "target is infeasible; simulating the approximate solution");
        }
        sol = s;
    }
    out.report["setup"] = setup_to_json(setup);
    out.report["solution"] = solution_to_json(sol);
    if (!u_th) {
        out.report["solution"].erase("residual");
    }

    MeasurementPlan plan;
    plan.angles = c.angles.empty() ? std::vector<double>(n, 0.0) : c.angles;
    plan.offsets = c.offsets.empty() ? std::vector<double>(n, 0.0) : c.offsets;
    plan.gains.assign(plan.angles.size(), 1.0);
    const double r = c.r.value_or(0.0);
    const SimulationResult sim = simulate_mphd(setup, sol, plan, r, c.shots, c.seed);

    const RealMatrix direct = direct_covariance(u_th ? *u_th : sol.u_mphd, r);
    double max_z = 0.0;
    if (c.shots > 1) {
        const double shots = static_cast<double>(c.shots);
        for (Eigen::Index i = 0; i < sim.analytic_cov.rows(); ++i) {
            for (Eigen::Index j = 0; j < sim.analytic_cov.cols(); ++j) {
                const double s_ij = sim.analytic_cov(i, j);
                const double se = std::sqrt((s_ij * s_ij + sim.analytic_cov(i, i) * sim.analytic_cov(j, j)) / (shots - 1));
                if (se > 0) {
                    max_z = std::max(max_z, std::abs(sim.sample_cov(i, j) - s_ij) / se);
                }
            }
        }
    }
    out.report["simulation"] = json{{"r", r},
                                    {"shots", c.shots},
                                    {"seed", c.seed},
                                    {"angles", sim.angles},
                                    {"offsets", plan.offsets},
                                    {"analytic_mean", vector_to_json(sim.analytic_mean)},
                                    {"analytic_cov", real_to_json(sim.analytic_cov)},
                                    {"sample_mean", vector_to_json(sim.sample_mean)},
                                    {"sample_cov", real_to_json(sim.sample_cov)},
                                    {"max_cov_standard_errors", max_z},
                                    {"symplectic_error", sim.symplectic_error}};
    out.report["staged_vs_direct"] = json{{"reference", u_th ? "U_th" : "U_mphd"},
                                          {"max_abs_deviation", (sim.state_cov - direct).cwiseAbs().maxCoeff()}};
    out.report["display"] = json{{"sample_cov", real_display(sim.sample_cov)},
                                 {"analytic_cov", real_display(sim.analytic_cov)}};

    std::ostringstream csv;
    sim.write_csv(csv);
    out.csv = csv.str();
    if (!c.csv.empty()) {
        out.csv_path = c.csv;
    } else if (!out_path.empty()) {
        out.csv_path = std::filesystem::path(out_path).replace_extension(".samples.csv").string();
    } else {
        out.csv_path = "mphd_samples.csv";
    }
    out.report["csv"] = out.csv_path;
    finish(out.report, start);
    return out;
}

CommandOutput run_command(const std::string &name, const Config &c, const std::string &out_path) {
    if (name == "synthesize") {
        return cmd_synthesize(c);
    }
    if (name == "cluster") {
        return cmd_cluster(c);
    }
    if (name == "gate") {
        return cmd_gate(c);
    }
    if (name == "simulate") {
        return cmd_simulate(c, out_path);
    }
    throw Error(ErrorCode::Config, "unknown command \"" + name + "\"");
}

int run_cli(int argc, char **argv) {
    CLI::App app{"Multi-pixel homodyne detection synthesis and simulation"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::string branch;
    double tol = 0.0;

    const std::vector<std::pair<const char *, const char *>> commands = {
        {"synthesize", "Decide feasibility of a target and list LO phases and gains"},
        {"cluster", "Build a cluster-state unitary from a graph"},
        {"gate", "Assemble a measurement-based gate program and check it"},
        {"simulate", "Sample homodyne outcomes of a synthesized detector"}};
    std::vector<CLI::App *> subs;
    std::vector<CLI::Option *> seed_opts, branch_opts, tol_opts;
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "Report path (default: stdout)");
        seed_opts.push_back(sub->add_option("--seed", seed, "Master seed"));
        branch_opts.push_back(sub->add_option("--branch", branch, "Square-root branch bits, or \"all\""));
        tol_opts.push_back(sub->add_option("--tol", tol, "Feasibility tolerance"));
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    std::size_t which = 0;
    while (!subs[which]->parsed()) {
        ++which;
    }
    Overrides o;
    if (seed_opts[which]->count() > 0) {
        o.seed = seed;
    }
    if (branch_opts[which]->count() > 0) {
        o.branch = branch;
    }
    if (tol_opts[which]->count() > 0) {
        o.tol = tol;
    }

    try {
        Config c = load_config(config_path);
        apply_overrides(c, o);
        CommandOutput res = run_command(commands[which].first, c, out_path);
        const std::string text = res.report.dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(out_path);
            if (!f) {
                throw Error(ErrorCode::Config, "cannot write " + out_path);
            }
            f << text;
        }
        if (!res.csv_path.empty()) {
            std::ofstream f(res.csv_path);
            if (!f) {
                throw Error(ErrorCode::Config, "cannot write " + res.csv_path);
            }
            f << res.csv;
            log(LogLevel::Info, "wrote samples to " + res.csv_path);
        }
        return res.exit_code;
    } catch (const Error &e) {
        log(LogLevel::Error, std::string(error_code_name(e.code())) + ": " + e.what());
        return kExitError;
    } catch (const std::exception &e) {
        log(LogLevel::Error, e.what());
        return kExitError;
    }
}

}  // namespace mphd::cli
