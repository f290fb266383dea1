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

#include "mphd/mbqc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mphd/cluster.hpp"

namespace mphd {

namespace {

// sin/cos that return exact 0 and +-1 at quarter turns, so gates at the
// standard measurement angles come out as exact integer matrices.
std::pair<double, double> sin_cos(double angle) {
    const double turns = angle / (std::numbers::pi / 2);
    const double k = std::nearbyint(turns);
    if (std::abs(k) < 1e15 && std::abs(turns - k) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(k))) {
        constexpr double kSin[] = {0, 1, 0, -1};
        const auto q = static_cast<std::size_t>(((static_cast<long long>(k) % 4) + 4) % 4);
        return {kSin[q], kSin[(q + 1) % 4]};
    }
    return {std::sin(angle), std::cos(angle)};
}

}  // namespace

GateMatrix m_tele(double theta_in, double theta_1) {
    const auto [sin_minus, c] = sin_cos(theta_in - theta_1);
    const auto [sin_plus, cos_plus] = sin_cos(theta_in + theta_1);
    if (std::abs(c) < 1e-12) {
        std::ostringstream msg;
        msg << "teleportation gate is singular: cos(theta_in - theta_1) = " << c;
        throw Error(ErrorCode::Singularity, msg.str());
    }
    GateMatrix m;
    m << cos_plus, sin_minus - sin_plus,  //
        sin_minus + sin_plus, cos_plus;
    return -m / c;
}

GateMatrix m_shear(double s) {
    GateMatrix m;
    m << -s, -1, 1, 0;
    return m;
}

GateMatrix fourier_matrix() { return m_shear(0.0); }

ShearQuadrature quadrature_for_shear(double s) { return {std::sqrt(1 + s * s), std::atan(s)}; }

GateMatrix compose(const std::vector<GateMatrix> &gates) {
    if (gates.empty()) {
        throw Error(ErrorCode::Validation, "compose: empty gate list");
    }
    GateMatrix out = gates.front();
    for (std::size_t k = 1; k < gates.size(); ++k) {
        out = gates[k] * out;
    }
    return out;
}

void MeasurementPlan::validate() const {
    if (offsets.size() != angles.size() || gains.size() != angles.size()) {
        std::ostringstream msg;
        msg << "measurement plan lengths differ: " << angles.size() << " angles, " << offsets.size() << " offsets, "
            << gains.size() << " gains";
        throw Error(ErrorCode::Validation, msg.str());
    }
    for (double g : gains) {
        if (!(g >= 1.0)) {
            throw Error(ErrorCode::Validation, "measurement plan gains must be >= 1");
        }
    }
}

ComplexMatrix beam_splitter() {
    ComplexMatrix bs(2, 2);
    const Complex i(0, 1);
    bs << 1, i, i, 1;
    return bs / std::sqrt(2.0);
}

namespace {

ComplexMatrix assemble(const ComplexMatrix &u_lin3, const DiagonalUnitary &d_meas) {
    ComplexMatrix cluster = ComplexMatrix::Identity(4, 4);
    cluster.bottomRightCorner(3, 3) = u_lin3;
    ComplexMatrix bs = ComplexMatrix::Identity(4, 4);
    bs.topLeftCorner(2, 2) = beam_splitter();
    return d_meas.diagonal().asDiagonal() * (bs * cluster);
}

}  // namespace

ComplexMatrix build_U_tf(const ComplexMatrix &u_lin3, double theta_3) {
    if (u_lin3.rows() != 3 || u_lin3.cols() != 3) {
        throw Error(ErrorCode::Dimension, "build_U_tf: the cluster unitary must be 3x3");
    }
    const ClusterValidation check = validate_cluster(u_lin3, AdjacencyMatrix::path(3), 1e-9);
    if (!check.passed) {
        std::ostringstream msg;
        msg << "build_U_tf: input is not a three-mode linear cluster unitary (residuals";
        for (double r : check.residuals) {
            msg << " " << r;
        }
        msg << ")";
        throw Error(ErrorCode::Validation, msg.str());
    }
    return assemble(u_lin3, DiagonalUnitary({std::numbers::pi / 2, std::numbers::pi / 2, 0.0, theta_3}));
}

GateProgram fourier_program(double theta_3) {
    GateProgram p;
    p.name = "fourier";
    const double half_pi = std::numbers::pi / 2;
    const ShearQuadrature q2 = quadrature_for_shear(0.0);
    p.plan.angles = {half_pi, half_pi, q2.angle, theta_3};
    p.plan.offsets = {0, 0, 0, 0};
    p.plan.gains = {1, 1, q2.gain, 1};
    p.target_gate = compose({m_tele(half_pi, half_pi), m_shear(0.0)});
    p.d_meas = DiagonalUnitary({half_pi, half_pi, q2.angle, theta_3});
    p.u_th = build_U_tf(three_mode_cluster(), theta_3);
    return p;
}

GateProgram displacement_program(double s, double theta_3) {
    GateProgram p = fourier_program(theta_3);
    p.name = "displacement";
    p.plan.offsets[2] = s;
    p.target_shift = Eigen::Vector2d(0.0, s);
    return p;
}

GateProgram custom_program(double theta_in, double theta_1, double s, double theta_3) {
    GateProgram p;
    p.name = "custom";
    const ShearQuadrature q2 = quadrature_for_shear(s);
    p.plan.angles = {theta_in, theta_1, q2.angle, theta_3};
    p.plan.offsets = {0, 0, 0, 0};
    p.plan.gains = {1, 1, q2.gain, 1};
    p.target_gate = compose({m_tele(theta_in, theta_1), m_shear(s)});
    p.d_meas = DiagonalUnitary(p.plan.angles);
    p.u_th = assemble(three_mode_cluster(), p.d_meas);
    return p;
}

}  // namespace mphd
