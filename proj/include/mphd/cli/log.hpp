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

#include <string>

namespace mphd::cli {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold from MPHD_LOG (error | warn | info | debug); defaults to warn.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);
LogLevel parse_log_level(const std::string &name);

/// Writes "mphd: <level>: <message>" to stderr when level passes the threshold.
void log(LogLevel level, const std::string &message);

}  // namespace mphd::cli
