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

#include "mphd/cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mphd::cli {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

Error config_error(const std::string &what) { return Error(ErrorCode::Config, what); }

template <typename T>
T get(const json &j, const char *key, const std::string &where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw config_error(where + "." + key + ": " + e.what());
    }
}

std::vector<double> get_vector(const json &j, const char *key, const std::string &where) {
    return get<std::vector<double>>(j, key, where);
}

json flip_front_end(std::size_t n, json signs, json opo) {
    json basis = {{"family", "flip"}, {"modes", n}};
    if (!signs.is_null()) {
        basis["signs"] = std::move(signs);
    }
    return json{{"basis", basis}, {"pixels", {{"count", n}}}, {"opo_phases", std::move(opo)}};
}

json preset_document(const std::string &name) {
    const json walsh_signs = {1, 1, -1, 1};
    if (name == "lin4") {
        json d = flip_front_end(4, walsh_signs, {0.0, -kHalfPi, -kHalfPi, 0.0});
        d["target"] = {{"kind", "lin4"}};
        return d;
    }
    if (name == "identity") {
        json d = flip_front_end(4, walsh_signs, {0.0, -kHalfPi, -kHalfPi, 0.0});
        d["target"] = {{"kind", "front_end"}};
        return d;
    }
    if (name == "cz2") {
        json d = flip_front_end(2, nullptr, {0.0, 0.0});
        d["basis"]["mixing_angle"] = std::numbers::pi / 8;
        d["target"] = {{"kind", "graph"}, {"graph", {{"family", "path"}, {"nodes", 2}}}};
        return d;
    }
    if (name == "fourier" || name == "displacement") {
        json d = flip_front_end(4, walsh_signs, {0.0, 0.0, -kHalfPi, kHalfPi});
        d["target"] = {{"kind", "gate"}, {"gate", {{"program", name}}}};
        return d;
    }
    std::ostringstream msg;
    msg << "unknown preset \"" << name << "\" (known:";
    for (const auto &p : preset_names()) {
        msg << " " << p;
    }
    msg << ")";
    throw config_error(msg.str());
}

FlipLayout parse_layout(const std::string &s) {
    if (s == "dyadic") {
        return FlipLayout::Dyadic;
    }
    if (s == "equispaced") {
        return FlipLayout::Equispaced;
    }
    throw config_error("basis.layout must be \"dyadic\" or \"equispaced\", got \"" + s + "\"");
}

const char *layout_name(FlipLayout l) { return l == FlipLayout::Dyadic ? "dyadic" : "equispaced"; }

BasisSpec parse_basis(const json &j) {
    const std::string where = "basis";
    require_keys(j, {"family", "modes", "grid", "domain", "layout", "signs", "mixing_angle", "path", "lo_index"},
                 where);
    BasisSpec b;
    if (j.contains("family")) {
        b.family = get<std::string>(j, "family", where);
    }
    if (b.family != "flip" && b.family != "file") {
        throw config_error("basis.family must be \"flip\" or \"file\"");
    }
    if (j.contains("modes")) {
        b.modes = get<std::size_t>(j, "modes", where);
    }
    if (j.contains("grid")) {
        b.grid = get<std::size_t>(j, "grid", where);
    }
    if (j.contains("domain")) {
        const auto d = get_vector(j, "domain", where);
        if (d.size() != 2 || !(d[0] < d[1])) {
            throw config_error("basis.domain must be [lo, hi] with lo < hi");
        }
        b.domain = {d[0], d[1]};
    }
    if (j.contains("layout")) {
        b.layout = parse_layout(get<std::string>(j, "layout", where));
    }
    if (j.contains("signs")) {
        b.signs = get<std::vector<int>>(j, "signs", where);
    }
    if (j.contains("mixing_angle")) {
        b.mixing_angle = get<double>(j, "mixing_angle", where);
    }
    if (j.contains("path")) {
        b.path = get<std::string>(j, "path", where);
    }
    if (b.family == "file" && b.path.empty()) {
        throw config_error("basis.path is required for the file family");
    }
    if (j.contains("lo_index")) {
        b.lo_index = get<std::size_t>(j, "lo_index", where);
    }
    return b;
}

PixelSpec parse_pixels(const json &j) {
    require_keys(j, {"count", "boundaries"}, "pixels");
    PixelSpec p;
    if (j.contains("count")) {
        p.count = get<std::size_t>(j, "count", "pixels");
    }
    if (j.contains("boundaries")) {
        p.boundaries = get_vector(j, "boundaries", "pixels");
    }
    return p;
}

AdjacencyMatrix parse_graph(const json &j) {
    const std::string where = "target.graph";
    require_keys(j, {"nodes", "edges", "adjacency", "family"}, where);
    if (j.contains("adjacency")) {
        return AdjacencyMatrix(real_from_json(j.at("adjacency"), where + ".adjacency"));
    }
    const auto n = get<std::size_t>(j, "nodes", where);
    if (j.contains("family")) {
        const auto f = get<std::string>(j, "family", where);
        if (f == "path") {
            return AdjacencyMatrix::path(n);
        }
        if (f == "cycle") {
            return AdjacencyMatrix::cycle(n);
        }
        if (f == "star") {
            return AdjacencyMatrix::star(n);
        }
        throw config_error(where + ".family must be path, cycle or star");
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    if (j.contains("edges")) {
        for (const auto &e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw config_error(where + ".edges entries must be [a, b] pairs");
            }
            edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
    }
    return AdjacencyMatrix::from_edges(n, edges);
}

GateSpec parse_gate(const json &j) {
    const std::string where = "target.gate";
    require_keys(j, {"program", "s", "theta_3", "theta_in", "theta_1"}, where);
    GateSpec g;
    if (j.contains("program")) {
        g.program = get<std::string>(j, "program", where);
    }
    if (g.program != "fourier" && g.program != "displacement" && g.program != "custom") {
        throw config_error(where + ".program must be fourier, displacement or custom");
    }
    for (auto [key, dst] : {std::pair{"s", &g.s}, std::pair{"theta_3", &g.theta_3},
                            std::pair{"theta_in", &g.theta_in}, std::pair{"theta_1", &g.theta_1}}) {
        if (j.contains(key)) {
            *dst = get<double>(j, key, where);
        }
    }
    if (g.program != "custom" && (j.contains("theta_in") || j.contains("theta_1"))) {
        throw config_error(where + ": theta_in/theta_1 only apply to the custom program");
    }
    if (g.program == "fourier" && g.s != 0.0) {
        throw config_error(where + ": s does not apply to the fourier program");
    }
    return g;
}

TargetSpec parse_target(const json &j) {
    const std::string where = "target";
    require_keys(j, {"kind", "matrix", "graph", "freedom", "gate"}, where);
    TargetSpec t;
    if (j.contains("kind")) {
        t.kind = get<std::string>(j, "kind", where);
    } else if (j.contains("matrix")) {
        t.kind = "matrix";
    } else if (j.contains("graph")) {
        t.kind = "graph";
    } else if (j.contains("gate")) {
        t.kind = "gate";
    } else {
        throw config_error("target: set kind or one of matrix, graph, gate");
    }
    if (t.kind == "matrix") {
        if (!j.contains("matrix")) {
            throw config_error("target.matrix is required for kind \"matrix\"");
        }
        t.matrix = complex_from_json(j.at("matrix"), "target.matrix");
    } else if (t.kind == "graph") {
        if (!j.contains("graph")) {
            throw config_error("target.graph is required for kind \"graph\"");
        }
        t.graph = parse_graph(j.at("graph"));
        if (j.contains("freedom")) {
            const json &f = j.at("freedom");
            if (f.is_object()) {
                require_keys(f, {"euler"}, "target.freedom");
                const auto e = get_vector(f, "euler", "target.freedom");
                if (e.size() != 3) {
                    throw config_error("target.freedom.euler needs [psi, theta, phi]");
                }
                t.freedom = euler_orthogonal(e[0], e[1], e[2]).matrix();
            } else {
                t.freedom = real_from_json(f, "target.freedom");
            }
        }
    } else if (t.kind == "gate") {
        t.gate = j.contains("gate") ? parse_gate(j.at("gate")) : GateSpec{};
    } else if (t.kind != "lin4" && t.kind != "front_end") {
        throw config_error("target.kind must be matrix, lin4, front_end, graph or gate");
    }
    if (t.kind != "graph" && j.contains("freedom")) {
        throw config_error("target.freedom only applies to graph targets");
    }
    return t;
}

InputSpec parse_input(const json &j) {
    require_keys(j, {"squeeze", "r", "mean"}, "input");
    InputSpec in;
    if (j.contains("squeeze")) {
        in.squeeze = get<std::string>(j, "squeeze", "input");
    }
    if (in.squeeze != "none" && in.squeeze != "q" && in.squeeze != "p") {
        throw config_error("input.squeeze must be none, q or p");
    }
    if (j.contains("r")) {
        in.r = get<double>(j, "r", "input");
    }
    if (j.contains("mean")) {
        in.mean = get_vector(j, "mean", "input");
        if (in.mean.size() != 2) {
            throw config_error("input.mean must be [q, p]");
        }
    }
    return in;
}

InlineSolution parse_solution(const json &j, const std::string &where) {
    // Accepts the solution object exactly as reports emit it; derived fields
    // are recomputed, never trusted.
    require_keys(j, {"branch", "phases", "lo_entries", "gains", "u_mphd", "residual"}, where);
    InlineSolution s;
    s.phases = get_vector(j, "phases", where);
    if (!j.contains("gains")) {
        throw config_error(where + ".gains is required");
    }
    s.gains = real_from_json(j.at("gains"), where + ".gains");
    if (j.contains("branch")) {
        s.branch = get<std::string>(j, "branch", where);
    }
    return s;
}

ApproxOptions parse_optimizer(const json &j) {
    require_keys(j, {"max_iters", "restarts", "seed", "tol"}, "optimizer");
    ApproxOptions o;
    if (j.contains("max_iters")) {
        o.max_iters = get<int>(j, "max_iters", "optimizer");
    }
    if (j.contains("restarts")) {
        o.restarts = get<int>(j, "restarts", "optimizer");
    }
    if (j.contains("seed")) {
        o.seed = get<std::uint64_t>(j, "seed", "optimizer");
    }
    if (j.contains("tol")) {
        o.tol = get<double>(j, "tol", "optimizer");
    }
    return o;
}

}  // namespace

const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names = {"lin4", "identity", "cz2", "fourier", "displacement"};
    return names;
}

Config parse_config(const json &user) {
    const std::vector<std::string> top = {"schema_version", "preset", "basis", "pixels", "opo_phases", "target",
                                          "tol", "branch", "optimizer", "r", "shots", "seed", "angles", "offsets",
                                          "input", "deviation_tol", "solution", "solution_file", "csv"};
    require_keys(user, top, "config");
    if (user.contains("schema_version") && user.at("schema_version") != kSchemaVersion) {
        throw config_error("unsupported schema_version " + user.at("schema_version").dump());
    }

    json doc = json::object();
    Config c;
    if (user.contains("preset")) {
        c.preset = get<std::string>(user, "preset", "config");
        doc = preset_document(c.preset);
    }
    for (const auto &item : user.items()) {
        if (item.key() == "target" || !item.value().is_object() || !doc.contains(item.key())) {
            doc[item.key()] = item.value();
        } else {
            doc[item.key()].merge_patch(item.value());
        }
    }

    if (doc.contains("basis")) {
        c.basis = parse_basis(doc.at("basis"));
        c.front_end = true;
    }
    if (doc.contains("pixels")) {
        c.pixels = parse_pixels(doc.at("pixels"));
    }
    if (doc.contains("opo_phases")) {
        c.opo_phases = get_vector(doc, "opo_phases", "config");
    }
    if ((doc.contains("pixels") || doc.contains("opo_phases")) && !c.front_end) {
        throw config_error("pixels/opo_phases need a basis");
    }
    if (doc.contains("target")) {
        c.target = parse_target(doc.at("target"));
    }
    if (doc.contains("tol")) {
        c.tol = get<double>(doc, "tol", "config");
        if (!(c.tol > 0)) {
            throw config_error("tol must be positive");
        }
    }
    if (doc.contains("branch")) {
        c.branch = get<std::string>(doc, "branch", "config");
    }
    if (doc.contains("optimizer")) {
        c.optimizer = parse_optimizer(doc.at("optimizer"));
    }
    if (doc.contains("r")) {
        c.r = get<double>(doc, "r", "config");
        if (!(*c.r >= 0)) {
            throw config_error("r must be non-negative");
        }
    }
    if (doc.contains("shots")) {
        c.shots = get<std::size_t>(doc, "shots", "config");
    }
    if (doc.contains("seed")) {
        c.seed = get<std::uint64_t>(doc, "seed", "config");
    }
    if (doc.contains("angles")) {
        c.angles = get_vector(doc, "angles", "config");
    }
    if (doc.contains("offsets")) {
        c.offsets = get_vector(doc, "offsets", "config");
    }
    if (doc.contains("input")) {
        c.input = parse_input(doc.at("input"));
    }
    if (doc.contains("deviation_tol")) {
        c.deviation_tol = get<double>(doc, "deviation_tol", "config");
    }
    if (doc.contains("solution")) {
        c.solution = parse_solution(doc.at("solution"), "solution");
    }
    if (doc.contains("solution_file")) {
        c.solution_file = get<std::string>(doc, "solution_file", "config");
    }
    if (doc.contains("csv")) {
        c.csv = get<std::string>(doc, "csv", "config");
    }
    return c;
}

Config load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw config_error(path + ": " + e.what());
    }
    Config c = parse_config(j);
    // Input files named inside a config are relative to the config itself.
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string &p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) {
            p = (base / p).lexically_normal().string();
        }
    };
    resolve(c.basis.path);
    resolve(c.solution_file);
    return c;
}

json config_to_json(const Config &c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (c.front_end) {
        json b = {{"family", c.basis.family},
                  {"modes", c.basis.modes},
                  {"grid", c.basis.grid},
                  {"domain", {c.basis.domain.lo, c.basis.domain.hi}},
                  {"layout", layout_name(c.basis.layout)},
                  {"signs", c.basis.signs},
                  {"mixing_angle", c.basis.mixing_angle},
                  {"lo_index", c.basis.lo_index}};
        if (!c.basis.path.empty()) {
            b["path"] = c.basis.path;
        }
        j["basis"] = b;
        json p = {{"count", c.pixels.count}};
        if (!c.pixels.boundaries.empty()) {
            p["boundaries"] = c.pixels.boundaries;
        }
        j["pixels"] = p;
        j["opo_phases"] = c.opo_phases;
    }
    if (!c.target.kind.empty()) {
        json t = {{"kind", c.target.kind}};
        if (c.target.kind == "matrix") {
            t["matrix"] = complex_to_json(c.target.matrix);
        } else if (c.target.kind == "graph") {
            t["graph"] = {{"adjacency", real_to_json(c.target.graph->matrix())}};
            if (c.target.freedom.size() > 0) {
                t["freedom"] = real_to_json(c.target.freedom);
            }
        } else if (c.target.kind == "gate") {
            json g = {{"program", c.target.gate.program}, {"theta_3", c.target.gate.theta_3}};
            if (c.target.gate.program != "fourier") {
                g["s"] = c.target.gate.s;
            }
            if (c.target.gate.program == "custom") {
                g["theta_in"] = c.target.gate.theta_in;
                g["theta_1"] = c.target.gate.theta_1;
            }
            t["gate"] = g;
        }
        j["target"] = t;
    }
    j["tol"] = c.tol;
    if (!c.branch.empty()) {
        j["branch"] = c.branch;
    }
    j["optimizer"] = {{"max_iters", c.optimizer.max_iters},
                      {"restarts", c.optimizer.restarts},
                      {"seed", c.optimizer.seed},
                      {"tol", c.optimizer.tol}};
    if (c.r) {
        j["r"] = *c.r;
    }
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    if (!c.angles.empty()) {
        j["angles"] = c.angles;
    }
    if (!c.offsets.empty()) {
        j["offsets"] = c.offsets;
    }
    j["input"] = {{"squeeze", c.input.squeeze}, {"r", c.input.r}, {"mean", c.input.mean}};
    j["deviation_tol"] = c.deviation_tol;
    if (c.solution) {
        json s = {{"phases", c.solution->phases}, {"gains", real_to_json(c.solution->gains)}};
        if (!c.solution->branch.empty()) {
            s["branch"] = c.solution->branch;
        }
        j["solution"] = s;
    }
    if (!c.solution_file.empty()) {
        j["solution_file"] = c.solution_file;
    }
    if (!c.csv.empty()) {
        j["csv"] = c.csv;
    }
    return j;
}

DetectionSetup build_setup(const Config &c) {
    if (!c.front_end) {
        throw config_error("this command needs a detection front end (basis, pixels, opo_phases)");
    }
    const BasisSpec &b = c.basis;
    ModeBasis basis = b.family == "file"
                          ? ModeBasis::read_file(b.path)
                          : flip_mode_basis(b.modes, b.grid, b.domain, b.layout, std::span<const int>(b.signs));
    if (b.mixing_angle != 0.0) {
        const auto n = static_cast<Eigen::Index>(basis.mode_count());
        if (n < 2) {
            throw config_error("basis.mixing_angle needs at least two modes");
        }
        RealMatrix r = RealMatrix::Identity(n, n);
        r(0, 0) = std::cos(b.mixing_angle);
        r(0, 1) = std::sin(b.mixing_angle);
        r(1, 0) = -std::sin(b.mixing_angle);
        r(1, 1) = std::cos(b.mixing_angle);
        basis = basis.mixed(RealOrthogonal(r));
    }
    const PixelPartition partition =
        c.pixels.boundaries.empty()
            ? PixelPartition::equal(c.pixels.count == 0 ? basis.mode_count() : c.pixels.count, basis.domain())
            : PixelPartition(c.pixels.boundaries);
    std::vector<double> opo = c.opo_phases;
    if (opo.empty()) {
        opo.assign(basis.mode_count(), 0.0);
    }
    if (opo.size() != basis.mode_count()) {
        throw Error(ErrorCode::Dimension, "opo_phases must list one phase per mode");
    }
    return make_detection_setup(basis, b.lo_index, partition, DiagonalUnitary(std::move(opo)));
}

GateProgram build_program(const GateSpec &g) {
    if (g.program == "fourier") {
        return fourier_program(g.theta_3);
    }
    if (g.program == "displacement") {
        return displacement_program(g.s, g.theta_3);
    }
    return custom_program(g.theta_in, g.theta_1, g.s, g.theta_3);
}

ComplexMatrix build_target(const Config &c, const DetectionSetup *setup) {
    const TargetSpec &t = c.target;
    if (t.kind.empty()) {
        throw config_error("config has no target");
    }
    if (t.kind == "matrix") {
        return t.matrix;
    }
    if (t.kind == "lin4") {
        return linear_cluster_4();
    }
    if (t.kind == "front_end") {
        if (setup == nullptr) {
            throw config_error("target kind front_end needs a detection front end");
        }
        return setup->g;
    }
    if (t.kind == "graph") {
        if (t.freedom.size() > 0) {
            return cluster_unitary(*t.graph, RealOrthogonal(t.freedom)).u;
        }
        return cluster_unitary(*t.graph).u;
    }
    return build_program(t.gate).u_th;
}

GaussianState build_input(const InputSpec &in) {
    GaussianState s = squeezed_input(1, in.r, {in.squeeze == "q" ? SqueezeAxis::Q : SqueezeAxis::P});
    if (in.squeeze == "none") {
        s = GaussianState::vacuum(1);
    }
    return GaussianState(Eigen::Vector2d(in.mean[0], in.mean[1]), s.cov());
}

}  // namespace mphd::cli
