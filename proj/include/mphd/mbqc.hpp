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
#include <utility>
#include <vector>

#include "mphd/matcore.hpp"

namespace mphd {

/// 2x2 real action on a single mode's (q, p).
using GateMatrix = Eigen::Matrix2d;

/// Gate enacted by teleporting through one cluster link with measurement
/// angles (theta_in, theta_1). Throws Singularity when cos(theta_in - theta_1)
/// vanishes.
GateMatrix m_tele(double theta_in, double theta_1);

/// Gate enacted by measuring a cluster mode along the quadrature selected by s.
GateMatrix m_shear(double s);

/// The Fourier transform on (q, p): q -> -p, p -> q.
GateMatrix fourier_matrix();

struct ShearQuadrature {
    double gain;   // sqrt(1 + s^2)
    double angle;  // arctan(s)
};
ShearQuadrature quadrature_for_shear(double s);

/// Product of the gates in the order they act: the last one ends up leftmost.
GateMatrix compose(const std::vector<GateMatrix> &gates);

/// Mode order is (in, 1, 2, 3): the input mode followed by the three cluster
/// modes. Offsets are added to the raw outcomes before feedforward.
struct MeasurementPlan {
    std::vector<double> angles;
    std::vector<double> offsets;
    std::vector<double> gains;

    std::size_t size() const { return angles.size(); }
    void validate() const;
};

struct GateProgram {
    std::string name;
    MeasurementPlan plan;
    GateMatrix target_gate;
    /// The target acts as target_gate * (x + target_shift) on the input means.
    Eigen::Vector2d target_shift = Eigen::Vector2d::Zero();
    DiagonalUnitary d_meas;
    ComplexMatrix u_th;
};

/// (1/sqrt 2) [[1, i], [i, 1]].
ComplexMatrix beam_splitter();

/// D_meas U_BS (1 (+) U_lin3) with D_meas = diag(i, i, 1, e^{i theta_3}).
/// Throws Validation unless U_lin3 is a three-mode path cluster unitary.
ComplexMatrix build_U_tf(const ComplexMatrix &u_lin3, double theta_3 = 0.0);

/// Fourier gate on the input mode via the three-mode cluster. The target is
/// MPHD-feasible for the matching front end only when theta_3 is 0 or pi;
/// other readout phases must be applied after detection.
GateProgram fourier_program(double theta_3 = 0.0);

/// Fourier program with s added to mode 2's outcome: the input is displaced
/// by s in p before the Fourier transform.
GateProgram displacement_program(double s, double theta_3 = 0.0);

/// Program with arbitrary teleportation angles and shear s on mode 2. The
/// target gate is m_shear(s) m_tele(theta_in, theta_1); whether the cluster
/// enacts it is left to the simulator's verification.
GateProgram custom_program(double theta_in, double theta_1, double s, double theta_3 = 0.0);

}  // namespace mphd
