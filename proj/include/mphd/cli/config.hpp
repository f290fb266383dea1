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
#include <optional>
#include <string>
#include <vector>

#include "mphd/cli/json_io.hpp"
#include "mphd/cluster.hpp"
#include "mphd/gsim.hpp"
#include "mphd/mbqc.hpp"
#include "mphd/modes.hpp"
#include "mphd/synth.hpp"

namespace mphd::cli {

inline constexpr int kSchemaVersion = 1;

struct BasisSpec {
    std::string family = "flip";  // flip | file
    std::size_t modes = 4;
    std::size_t grid = 4096;
    Interval domain;
    FlipLayout layout = FlipLayout::Dyadic;
    std::vector<int> signs;
    /// Rotation angle mixing the first two modes (flip family only).
    double mixing_angle = 0.0;
    std::string path;  // file family
    std::size_t lo_index = 0;
};

struct PixelSpec {
    std::size_t count = 0;  // 0: one pixel per mode
    std::vector<double> boundaries;
};

struct GateSpec {
    std::string program = "fourier";  // fourier | displacement | custom
    double s = 0.0;
    double theta_3 = 0.0;
    double theta_in = 0.0;  // custom only
    double theta_1 = 0.0;   // custom only
};

struct TargetSpec {
    /// matrix | lin4 | front_end | graph | gate
    std::string kind;
    ComplexMatrix matrix;
    std::optional<AdjacencyMatrix> graph;
    RealMatrix freedom;  // optional orthogonal freedom for graph targets
    GateSpec gate;
};

struct InputSpec {
    std::string squeeze = "none";  // none | q | p
    double r = 0.0;
    std::vector<double> mean = {0.0, 0.0};
};

struct InlineSolution {
    std::vector<double> phases;
    RealMatrix gains;
    std::string branch;
};

struct Config {
    std::string preset;
    BasisSpec basis;
    PixelSpec pixels;
    std::vector<double> opo_phases;
    TargetSpec target;
    double tol = kDefaultTol;
    std::string branch;  // "" principal, "all", or a bit string
    ApproxOptions optimizer;
    std::optional<double> r;
    std::size_t shots = 10000;
    std::uint64_t seed = 1;
    std::vector<double> angles;  // readout angles for simulate (default 0: p)
    std::vector<double> offsets;
    InputSpec input;
    double deviation_tol = 0.05;
    std::optional<InlineSolution> solution;
    std::string solution_file;
    std::string csv;
    bool front_end = false;  // basis/pixels/opo set (explicitly or by preset)
};

/// Known presets: lin4, identity, cz2, fourier, displacement.
const std::vector<std::string> &preset_names();

/// Validates the schema (unknown keys are rejected) and applies the preset.
Config parse_config(const json &j);
/// Reads and parses a config file; relative input paths inside it (mode
/// basis, solution file) are resolved against the file's directory.
Config load_config(const std::string &path);

/// Resolved configuration, re-parseable by parse_config.
json config_to_json(const Config &c);

DetectionSetup build_setup(const Config &c);

/// U_th for the configured target. `setup` supplies G for front_end targets.
ComplexMatrix build_target(const Config &c, const DetectionSetup *setup);

GateProgram build_program(const GateSpec &g);

GaussianState build_input(const InputSpec &in);

}  // namespace mphd::cli
