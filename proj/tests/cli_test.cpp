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

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mphd/cli/commands.hpp"
#include "mphd/cli/config.hpp"
#include "mphd/cli/json_io.hpp"
#include "mphd/cluster.hpp"
#include "test_support.hpp"

namespace mphd::cli {
namespace {

namespace fs = std::filesystem;
using mphd::testing::kI;
using mphd::testing::max_abs;

const std::string kDataDir = MPHD_TEST_DATA_DIR;
const std::string kBinary = MPHD_BINARY;

Config preset(const std::string &name, json extra = json::object()) {
    json j = {{"preset", name}};
    for (auto &[k, v] : extra.items()) {
        j[k] = v;
    }
    return parse_config(j);
}

ComplexMatrix matrix_at(const json &j) { return complex_from_json(j, "report"); }

json without_timing(json j) {
    j.erase("timing");
    return j;
}

/// Scratch directory removed at the end of each test.
class ScratchDir {
   public:
    ScratchDir() {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("mphd_cli_") + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() { fs::remove_all(path_); }
    std::string file(const std::string &name) const { return (path_ / name).string(); }

   private:
    fs::path path_;
};

void write_file(const std::string &path, const std::string &text) {
    std::ofstream(path) << text;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the mphd executable; returns its exit status.
int run_binary(const std::string &args, const std::string &stdout_path, const std::string &stderr_path,
               const std::string &env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kBinary + "' " + args + " >'" + stdout_path +
                            "' 2>'" + stderr_path + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, PresetsParse) {
    for (const auto &name : preset_names()) {
        EXPECT_NO_THROW(preset(name)) << name;
    }
    EXPECT_MPHD_ERROR(preset("no_such_preset"), Config);
}

TEST(Config, UnknownKeysAreRejected) {
    EXPECT_MPHD_ERROR(parse_config(json{{"preset", "lin4"}, {"shotz", 3}}), Config);
    EXPECT_MPHD_ERROR(parse_config(json{{"preset", "lin4"}, {"basis", {{"modez", 4}}}}), Config);
    EXPECT_MPHD_ERROR(parse_config(json{{"target", {{"kind", "graph"}, {"graph", {{"family", "path"}, {"n", 3}}}}}}),
                      Config);
    try {
        parse_config(json{{"preset", "lin4"}, {"optimizer", {{"restart", 2}}}});
        ADD_FAILURE() << "expected a config error";
    } catch (const Error &e) {
        EXPECT_NE(std::string(e.what()).find("restart"), std::string::npos) << e.what();
    }
}

TEST(Config, TypeErrorsAreConfigErrors) {
    EXPECT_MPHD_ERROR(parse_config(json{{"preset", "lin4"}, {"shots", "many"}}), Config);
    EXPECT_MPHD_ERROR(parse_config(json::parse(R"({"preset": "lin4", "opo_phases": [0, "x", 0, 0]})")), Config);
}

TEST(Config, ResolvedConfigRoundTrips) {
    for (const auto &name : preset_names()) {
        const json once = config_to_json(preset(name, {{"r", 3.0}, {"seed", 9}}));
        const json twice = config_to_json(parse_config(once));
        EXPECT_EQ(once, twice) << name;
    }
}

TEST(Config, UserKeysOverridePresetValues) {
    const Config c = preset("lin4", {{"opo_phases", {0, 0, 0, 0}}, {"tol", 1e-6}});
    EXPECT_EQ(c.opo_phases, (std::vector<double>{0, 0, 0, 0}));
    EXPECT_EQ(c.tol, 1e-6);
    EXPECT_EQ(c.basis.signs, (std::vector<int>{1, 1, -1, 1}));
}

TEST(Config, Overrides) {
    Config c = preset("lin4");
    apply_overrides(c, Overrides{42, std::string("1001"), 1e-7});
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.branch, "1001");
    EXPECT_EQ(c.tol, 1e-7);
}

TEST(Synthesize, LinearClusterPreset) {
    const CommandOutput out = run_command("synthesize", preset("lin4"));
    EXPECT_EQ(out.exit_code, kExitOk);
    const json &r = out.report;
    EXPECT_EQ(r["schema_version"], kSchemaVersion);
    EXPECT_EQ(r["command"], "synthesize");
    EXPECT_TRUE(r["feasibility"]["feasible"].get<bool>());
    EXPECT_EQ(r["solution_count"], 16);
    EXPECT_EQ(r["solutions"].size(), 16u);
    Eigen::VectorXcd d(4);
    d << (-2.0 - kI) / std::sqrt(5.0), (2.0 - kI) / std::sqrt(5.0), (2.0 + kI) / std::sqrt(5.0),
        (-2.0 + kI) / std::sqrt(5.0);
    EXPECT_LT(max_abs(matrix_at(r["feasibility"]["D"]) - ComplexMatrix(d.asDiagonal())), 1e-9);
    for (const auto &s : r["solutions"]) {
        EXPECT_LT(s["residual"].get<double>(), 1e-9);
    }
    // The 2-decimal display block carries the printed solution.
    bool printed = false;
    for (const auto &s : r["display"]["solutions"]) {
        printed = printed || (s["lo_entries"][0] == "-0.23+0.97i" && s["gains"][0][1] == "0.69");
    }
    EXPECT_TRUE(printed);
}

TEST(Synthesize, IdentityPresetGivesTrivialSolution) {
    const CommandOutput out = run_command("synthesize", preset("identity"));
    EXPECT_EQ(out.exit_code, kExitOk);
    const json &sol = out.report["solution"];
    EXPECT_EQ(sol["branch"], "0000");
    for (double p : sol["phases"].get<std::vector<double>>()) {
        EXPECT_NEAR(p, 0.0, 1e-12);
    }
    EXPECT_LT(max_abs(real_from_json(sol["gains"], "gains") - RealMatrix::Identity(4, 4)), 1e-12);
}

TEST(Synthesize, SingleBranchRequest) {
    const CommandOutput out = run_command("synthesize", preset("lin4", {{"branch", "1001"}}));
    EXPECT_EQ(out.exit_code, kExitOk);
    EXPECT_EQ(out.report["solution"]["branch"], "1001");
    EXPECT_EQ(out.report["display"]["solution"]["lo_entries"][0], "-0.23+0.97i");
    EXPECT_MPHD_ERROR(run_command("synthesize", preset("lin4", {{"branch", "10"}})), Config);
}

TEST(Synthesize, InfeasibleTargetFallsBackToApproximation) {
    const Config c = preset("cz2");
    const CommandOutput out = run_command("synthesize", c);
    EXPECT_EQ(out.exit_code, kExitInfeasible);
    const json &r = out.report;
    EXPECT_FALSE(r["feasibility"]["feasible"].get<bool>());
    const double residual = r["approx"]["residual"].get<double>();
    EXPECT_GT(residual, c.tol);
    // Same answer as calling the optimizer directly.
    const DetectionSetup setup = build_setup(c);
    const ApproxResult direct = solve_approx(build_target(c, &setup), setup.g, c.optimizer);
    EXPECT_NEAR(residual, direct.solution.residual, 1e-12);
    EXPECT_EQ(r["approx"]["restart_residuals"].size(), 8u);
}

TEST(Synthesize, ExplicitMatrixWithFileBasis) {
    const Config c = load_config(kDataDir + "/hadamard_target.json");
    const CommandOutput out = run_command("synthesize", c);
    EXPECT_EQ(out.exit_code, kExitOk);
    EXPECT_EQ(out.report["solution_count"], 4);
    EXPECT_LT(out.report["solution"]["residual"].get<double>(), 1e-12);
}

TEST(Cluster, ThreeModePath) {
    const CommandOutput out =
        run_command("cluster", parse_config(json{{"target", {{"kind", "graph"}, {"graph", {{"family", "path"}, {"nodes", 3}}}}}}));
    EXPECT_EQ(out.exit_code, kExitOk);
    const json &cl = out.report["cluster"];
    RealMatrix a(3, 3);
    a << 2.0 / 3, 0, -1.0 / 3, 0, 1.0 / 3, 0, -1.0 / 3, 0, 2.0 / 3;
    EXPECT_LT(max_abs(real_from_json(cl["A"], "A") - a), 1e-12);
    const RealMatrix x = real_from_json(cl["X_s"], "X_s");
    EXPECT_NEAR(x(0, 0), (3 + std::sqrt(3.0)) / 6, 1e-12);
    EXPECT_NEAR(x(1, 1), 1 / std::sqrt(3.0), 1e-12);
    EXPECT_TRUE(cl["validation"]["passed"].get<bool>());
    EXPECT_FALSE(out.report.contains("feasibility"));
}

TEST(Cluster, SingleNode) {
    const CommandOutput out =
        run_command("cluster", parse_config(json{{"target", {{"kind", "graph"}, {"graph", {{"nodes", 1}}}}}}));
    EXPECT_EQ(out.exit_code, kExitOk);
    const ComplexMatrix u = matrix_at(out.report["cluster"]["U"]);
    ASSERT_EQ(u.rows(), 1);
    EXPECT_NEAR(std::abs(u(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(Cluster, FourModePathWithFrontEnd) {
    const Config c = preset("lin4", {{"target", {{"kind", "graph"}, {"graph", {{"family", "path"}, {"nodes", 4}}}}}});
    const CommandOutput out = run_command("cluster", c);
    EXPECT_TRUE(out.report["cluster"]["validation"]["passed"].get<bool>());
    ASSERT_TRUE(out.report.contains("feasibility"));
    const FeasibilityReport direct = feasibility(cluster_unitary(AdjacencyMatrix::path(4)).u, build_setup(c).g);
    EXPECT_EQ(out.report["feasibility"]["feasible"].get<bool>(), direct.feasible);
    // The exit code reflects the cluster construction; front-end feasibility is informational.
    EXPECT_EQ(out.exit_code, kExitOk);
}

TEST(Cluster, EdgeListAndAdjacencyAgree) {
    const json by_edges = {{"kind", "graph"}, {"graph", {{"nodes", 3}, {"edges", {{0, 1}, {1, 2}}}}}};
    const json by_matrix = {{"kind", "graph"}, {"graph", {{"adjacency", {{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}}}}};
    const CommandOutput a = run_command("cluster", parse_config(json{{"target", by_edges}}));
    const CommandOutput b = run_command("cluster", parse_config(json{{"target", by_matrix}}));
    EXPECT_EQ(a.report["cluster"], b.report["cluster"]);
}

TEST(Gate, FourierProgram) {
    const CommandOutput out = run_command("gate", preset("fourier"));
    EXPECT_EQ(out.exit_code, kExitOk);
    EXPECT_LT(max_abs(matrix_at(out.report["target"]["U_th"]) - mphd::testing::printed_u_tf()), 1e-12);
    EXPECT_EQ(out.report["solution_count"], 16);
    bool printed = false;
    for (const auto &s : out.report["display"]["solutions"]) {
        printed = printed || (s["lo_entries"][0] == "-0.30+0.95i" && s["lo_entries"][1] == "0.95+0.30i");
    }
    EXPECT_TRUE(printed);
    EXPECT_FALSE(out.report.contains("verification"));
}

TEST(Gate, DisplacementWithoutShiftMatchesFourier) {
    const json f = run_command("gate", preset("fourier")).report;
    const json d = run_command("gate", preset("displacement", {{"target", {{"kind", "gate"}, {"gate", {{"program", "displacement"}, {"s", 0.0}}}}}})).report;
    EXPECT_EQ(f["target"], d["target"]);
    EXPECT_EQ(f["solutions"], d["solutions"]);
}

TEST(Gate, VerificationWithSqueezing) {
    const CommandOutput out = run_command("gate", preset("fourier", {{"r", 6.0}, {"shots", 200}}));
    const json &v = out.report["verification"];
    EXPECT_FALSE(v["large_deviation"].get<bool>());
    EXPECT_LT(v["cov_distance"].get<double>(), 1e-3);
    EXPECT_LT(v["mean_distance"].get<double>(), 1e-9);
    const RealMatrix g = real_from_json(v["induced_gate"], "induced_gate");
    EXPECT_LT(max_abs(g - fourier_matrix()), 1e-12);
    EXPECT_EQ(v["shots"], 200);
}

TEST(Gate, NonStandardReadoutPhaseIsReportedInfeasible) {
    const Config c = preset("fourier", {{"target", {{"kind", "gate"}, {"gate", {{"program", "fourier"}, {"theta_3", 0.5}}}}}});
    const CommandOutput out = run_command("gate", c);
    EXPECT_EQ(out.exit_code, kExitInfeasible);
    EXPECT_FALSE(out.report["feasibility"]["feasible"].get<bool>());
}

TEST(Simulate, InlineSolutionFromASynthesisReport) {
    ScratchDir dir;
    const json synth = run_command("synthesize", preset("lin4")).report;
    Config c = preset("lin4", {{"r", 2.0}, {"shots", 10}, {"seed", 7}, {"solution", synth["solutions"][9]}});
    const CommandOutput out = run_command("simulate", c, dir.file("report.json"));
    EXPECT_EQ(out.exit_code, kExitOk);
    EXPECT_EQ(out.report["solution"]["branch"], synth["solutions"][9]["branch"]);
    EXPECT_NEAR(out.report["solution"]["residual"].get<double>(), synth["solutions"][9]["residual"].get<double>(),
                1e-12);
    EXPECT_EQ(out.csv_path, dir.file("report.samples.csv"));
    EXPECT_LT(out.report["staged_vs_direct"]["max_abs_deviation"].get<double>(), 1e-10 * 100);
}

TEST(Simulate, SolutionFileRoundTrip) {
    ScratchDir dir;
    const json synth = run_command("synthesize", preset("lin4", {{"branch", "0110"}})).report;
    write_file(dir.file("synth.json"), synth.dump(2));
    write_file(dir.file("sim.json"), json{{"preset", "lin4"}, {"r", 1.0}, {"shots", 3}, {"solution_file", "synth.json"}}.dump());
    const Config c = load_config(dir.file("sim.json"));
    const CommandOutput out = run_command("simulate", c);
    EXPECT_EQ(out.report["solution"]["branch"], "0110");
    EXPECT_EQ(out.report["solution"]["phases"], synth["solution"]["phases"]);
    EXPECT_NEAR(out.report["solution"]["residual"].get<double>(), synth["solution"]["residual"].get<double>(), 1e-12);
}

TEST(Simulate, ReproducibleForAFixedSeed) {
    const Config c = preset("lin4", {{"r", 2.0}, {"shots", 10000}, {"seed", 7}});
    const CommandOutput a = run_command("simulate", c);
    const CommandOutput b = run_command("simulate", c);
    EXPECT_EQ(without_timing(a.report), without_timing(b.report));
    EXPECT_EQ(a.csv, b.csv);
    const double z = a.report["simulation"]["max_cov_standard_errors"].get<double>();
    EXPECT_LT(z, 5.0);
    EXPECT_EQ(a.csv_path, "mphd_samples.csv");
}

TEST(Simulate, SingleShotWritesOneRecordPerMode) {
    const CommandOutput out = run_command("simulate", preset("lin4", {{"r", 1.0}, {"shots", 1}, {"csv", "x.csv"}}));
    std::istringstream in(out.csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "shot,mode,angle,outcome");
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.rfind("0,", 0), 0u) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 4);
    EXPECT_EQ(out.csv_path, "x.csv");
}

TEST(Simulate, NeedsASolutionOrTarget) {
    Config c = parse_config(json{{"basis", {{"modes", 2}}}, {"r", 1.0}});
    EXPECT_MPHD_ERROR(run_command("simulate", c), Config);
}

TEST(Reports, DeterministicApartFromTiming) {
    for (const std::string cmd : {"synthesize", "gate"}) {
        const Config c = preset(cmd == "gate" ? "fourier" : "cz2", {{"r", 3.0}, {"shots", 50}});
        EXPECT_EQ(without_timing(run_command(cmd, c).report).dump(), without_timing(run_command(cmd, c).report).dump())
            << cmd;
    }
}

TEST(Reports, EmittedMatricesRoundTripThroughTheParser) {
    const json r = run_command("synthesize", preset("lin4")).report;
    const ComplexMatrix g = matrix_at(r["setup"]["G"]);
    const ComplexMatrix u = matrix_at(r["target"]["U_th"]);
    for (const auto &s : r["solutions"]) {
        const Config c = parse_config(json{{"solution", s}});
        const SynthesisSolution sol{DiagonalUnitary(c.solution->phases), RealOrthogonal(c.solution->gains, 1e-9), {},
                                    0.0, BranchId::parse(c.solution->branch)};
        EXPECT_NEAR(verify_solution(sol, u, g), s["residual"].get<double>(), 1e-12);
    }
}

TEST(Reports, DisplayFormatting) {
    EXPECT_EQ(format_complex(Complex(-0.001, 0.5)), "0.00+0.50i");
    EXPECT_EQ(format_complex(Complex(0.2349, -0.97)), "0.23-0.97i");
}

class Binary : public ::testing::Test {
   protected:
    ScratchDir dir;
    std::string out = dir.file("stdout.txt");
    std::string err = dir.file("stderr.txt");
    std::string config(const json &j, const std::string &name = "config.json") {
        const std::string p = dir.file(name);
        write_file(p, j.dump());
        return p;
    }
};

TEST_F(Binary, SynthesizeToStdout) {
    const std::string cfg = config({{"preset", "lin4"}});
    ASSERT_EQ(run_binary("synthesize --config '" + cfg + "'", out, err), 0) << read_file(err);
    const json r = json::parse(read_file(out));
    EXPECT_EQ(r["solution_count"], 16);
}

TEST_F(Binary, InfeasibleExitCode) {
    EXPECT_EQ(run_binary("synthesize --config '" + config({{"preset", "cz2"}}) + "'", out, err), 2);
}

TEST_F(Binary, UsageAndValidationErrorsExitOne) {
    EXPECT_EQ(run_binary("synthesize", out, err), 1);
    EXPECT_EQ(run_binary("", out, err), 1);
    EXPECT_EQ(run_binary("synthesize --config '" + dir.file("missing.json") + "'", out, err), 1);
    EXPECT_EQ(run_binary("synthesize --config '" + config({{"preset", "lin4"}, {"bogus", 1}}) + "'", out, err), 1);
    EXPECT_NE(read_file(err).find("bogus"), std::string::npos) << read_file(err);
    write_file(dir.file("broken.json"), "{ not json");
    EXPECT_EQ(run_binary("synthesize --config '" + dir.file("broken.json") + "'", out, err), 1);
}

TEST_F(Binary, OverridesApply) {
    const std::string cfg = config({{"preset", "lin4"}});
    ASSERT_EQ(run_binary("synthesize --config '" + cfg + "' --branch 1001 --tol 1e-7 --out '" + dir.file("r.json") + "'",
                         out, err),
              0);
    const json r = json::parse(read_file(dir.file("r.json")));
    EXPECT_EQ(r["solution"]["branch"], "1001");
    EXPECT_EQ(r["config"]["tol"], 1e-7);
    EXPECT_TRUE(read_file(out).empty());
}

TEST_F(Binary, SimulateWritesCsvNextToTheReport) {
    const std::string cfg = config({{"preset", "lin4"}, {"r", 1.0}, {"shots", 5}});
    ASSERT_EQ(run_binary("simulate --config '" + cfg + "' --seed 3 --out '" + dir.file("sim.json") + "'", out, err), 0)
        << read_file(err);
    const std::string csv = read_file(dir.file("sim.samples.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
    const json r = json::parse(read_file(dir.file("sim.json")));
    EXPECT_EQ(r["config"]["seed"], 3);
}

TEST_F(Binary, ScalarKernelsAgreeWithTheDispatchedOnes) {
    const std::string cfg = config({{"preset", "lin4"}, {"r", 2.0}, {"shots", 2000}, {"seed", 7}});
    ASSERT_EQ(run_binary("simulate --config '" + cfg + "' --out '" + dir.file("a.json") + "'", out, err), 0);
    ASSERT_EQ(run_binary("simulate --config '" + cfg + "' --out '" + dir.file("b.json") + "'", out, err,
                         "MPHD_SIMD=scalar"),
              0);
    const json a = json::parse(read_file(dir.file("a.json")));
    const json b = json::parse(read_file(dir.file("b.json")));
    const RealMatrix ca = real_from_json(a["simulation"]["sample_cov"], "a");
    const RealMatrix cb = real_from_json(b["simulation"]["sample_cov"], "b");
    EXPECT_LT(max_abs(ca - cb), 1e-9 * std::max(1.0, ca.cwiseAbs().maxCoeff()));
    EXPECT_EQ(a["solution"], b["solution"]);
}

TEST_F(Binary, LogLevelControlsDiagnostics) {
    const std::string cfg = config({{"preset", "lin4"}, {"r", 1.0}, {"shots", 2}});
    ASSERT_EQ(run_binary("simulate --config '" + cfg + "' --out '" + dir.file("r.json") + "'", out, err,
                         "MPHD_LOG=info"),
              0);
    EXPECT_NE(read_file(err).find("wrote samples"), std::string::npos);
    ASSERT_EQ(run_binary("simulate --config '" + cfg + "' --out '" + dir.file("r.json") + "'", out, err,
                         "MPHD_LOG=error"),
              0);
    EXPECT_TRUE(read_file(err).empty());
}

}  // namespace
}  // namespace mphd::cli
