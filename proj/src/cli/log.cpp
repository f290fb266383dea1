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

#include "mphd/cli/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>

#include "mphd/error.hpp"

namespace mphd::cli {
namespace {

constexpr const char *kNames[] = {"error", "warn", "info", "debug"};

LogLevel threshold_from_env() {
    const char *env = std::getenv("MPHD_LOG");
    if (env == nullptr || *env == '\0') {
        return LogLevel::Warn;
    }
    try {
        return parse_log_level(env);
    } catch (const Error &) {
        std::cerr << "mphd: warn: ignoring unknown MPHD_LOG value \"" << env << "\"\n";
        return LogLevel::Warn;
    }
}

std::atomic<int> &threshold() {
    static std::atomic<int> level{static_cast<int>(threshold_from_env())};
    return level;
}

}  // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold().load()); }

void set_log_threshold(LogLevel level) { threshold().store(static_cast<int>(level)); }

LogLevel parse_log_level(const std::string &name) {
    for (int k = 0; k < 4; ++k) {
        if (name == kNames[k]) {
            return static_cast<LogLevel>(k);
        }
    }
    throw Error(ErrorCode::Config, "unknown log level \"" + name + "\"");
}

void log(LogLevel level, const std::string &message) {
    if (static_cast<int>(level) <= threshold().load()) {
        std::cerr << "mphd: " << kNames[static_cast<int>(level)] << ": " << message << '\n';
    }
}

}  // namespace mphd::cli
