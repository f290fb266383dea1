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

#include "mphd/cli/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mphd::cli {
namespace {

Error config_error(const std::string &where, const std::string &what) {
    return Error(ErrorCode::Config, where + ": " + what);
}

RealMatrix read_rows(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty()) {
        throw config_error(where, "expected a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    RealMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw config_error(where, "rows have different lengths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json &v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) {
                throw config_error(where, "matrix entries must be numbers");
            }
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

// Avoids "-0.00" in display blocks.
double round_display(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(x * scale) / scale;
    return r == 0.0 ? 0.0 : r;
}

}  // namespace

json complex_to_json(const ComplexMatrix &m) {
    return json{{"re", real_to_json(m.real())}, {"im", real_to_json(m.imag())}};
}

ComplexMatrix complex_from_json(const json &j, const std::string &where) {
    if (j.is_array()) {
        return read_rows(j, where).cast<Complex>();
    }
    if (!j.is_object()) {
        throw config_error(where, "expected {\"re\": ..., \"im\": ...} or a real matrix");
    }
    require_keys(j, {"re", "im"}, where);
    if (!j.contains("re")) {
        throw config_error(where, "missing \"re\"");
    }
    const RealMatrix re = read_rows(j.at("re"), where + ".re");
    RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
    if (j.contains("im")) {
        im = read_rows(j.at("im"), where + ".im");
        if (im.rows() != re.rows() || im.cols() != re.cols()) {
            throw config_error(where, "real and imaginary parts differ in shape");
        }
    }
    ComplexMatrix out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

json real_to_json(const RealMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix real_from_json(const json &j, const std::string &where) { return read_rows(j, where); }

json vector_to_json(const RealVector &v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v(k));
    }
    return out;
}

std::string format_complex(Complex z, int decimals) {
    const double re = round_display(z.real(), decimals);
    const double im = round_display(z.imag(), decimals);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f%+.*fi", decimals, re, decimals, im);
    return buf;
}

json complex_display(const ComplexMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(format_complex(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json real_display(const RealMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", round_display(m(r, c), 2));
            row.push_back(std::string(buf));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void require_keys(const json &j, const std::vector<std::string> &allowed, const std::string &where) {
    if (!j.is_object()) {
        throw config_error(where, "expected an object");
    }
    for (const auto &item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            std::ostringstream msg;
            msg << "unknown key \"" << item.key() << "\" (allowed:";
            for (const auto &a : allowed) {
                msg << " " << a;
            }
            msg << ")";
            throw config_error(where, msg.str());
        }
    }
}

}  // namespace mphd::cli
