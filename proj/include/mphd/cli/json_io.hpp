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
#include <vector>

#include <json.hpp>

#include "mphd/matcore.hpp"

namespace mphd::cli {

using json = nlohmann::ordered_json;

/// Complex matrices are {"re": [[...]], "im": [[...]]}; real matrices are
/// plain nested arrays. Doubles are written with round-trip precision.
json complex_to_json(const ComplexMatrix &m);
ComplexMatrix complex_from_json(const json &j, const std::string &where);

json real_to_json(const RealMatrix &m);
RealMatrix real_from_json(const json &j, const std::string &where);

json vector_to_json(const RealVector &v);

/// Entries rounded to 2 decimals, e.g. "-0.23+0.97i", for eyeballing
/// against printed tables.
json complex_display(const ComplexMatrix &m);
json real_display(const RealMatrix &m);
std::string format_complex(Complex z, int decimals = 2);

/// Throws Config if `j` has keys outside `allowed`.
void require_keys(const json &j, const std::vector<std::string> &allowed, const std::string &where);

}  // namespace mphd::cli
