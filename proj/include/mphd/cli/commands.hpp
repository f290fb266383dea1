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

#include "mphd/cli/config.hpp"

namespace mphd::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> branch;
    std::optional<double> tol;
};

void apply_overrides(Config &c, const Overrides &o);

struct CommandOutput {
    json report;
    int exit_code = kExitOk;
    /// Sample records (simulate only) and where they should be written.
    std::string csv;
    std::string csv_path;
};

CommandOutput cmd_synthesize(const Config &c);
CommandOutput cmd_cluster(const Config &c);
CommandOutput cmd_gate(const Config &c);
/// `out_path` (may be empty) picks the default CSV location.
CommandOutput cmd_simulate(const Config &c, const std::string &out_path = {});

CommandOutput run_command(const std::string &name, const Config &c, const std::string &out_path = {});

/// Entry point behind the mphd executable; returns the process exit code.
int run_cli(int argc, char **argv);

}  // namespace mphd::cli
