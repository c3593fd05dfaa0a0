// Copyright 2026 The vivrom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VIVROM_CORE_BEAM_HPP_
#define VIVROM_CORE_BEAM_HPP_

#include <Eigen/Dense>
#include <vector>

namespace viv::beam {

// Proper orthogonal 3x3 matrix. Functions producing one guarantee
// R^T R = I and det R = +1 to tight tolerance.
using RotationMatrix = Eigen::Matrix3d;

// Λ = exp(φ̃), Rodrigues closed form with a series fallback below
// |phi| = 1e-6 so the map is smooth through zero.
RotationMatrix rot_exp(const Eigen::Vector3d& phi);

// Skew matrix φ̃ with φ̃ x = phi × x.
Eigen::Matrix3d skew(const Eigen::Vector3d& phi);

// Nearest rotation in the Frobenius sense (polar projection).
RotationMatrix orthonormalize(const RotationMatrix& R);

// Centroid line point plus a cross-section radius vector in the
// reference configuration.
struct ReferenceFrame {
  Eigen::Vector3d d_o = Eigen::Vector3d::Zero();
  Eigen::Vector3d R_o = Eigen::Vector3d::Zero();
  Eigen::Vector3d E1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d E2 = Eigen::Vector3d::UnitY();
  Eigen::Vector3d E3 = Eigen::Vector3d::UnitZ();
};

// Current position of the material particle at radius R_o when the
// centroid displaces by u and the section rotates by Lambda.
Eigen::Vector3d material_point(const ReferenceFrame& frame,
                               const Eigen::Vector3d& u,
                               const RotationMatrix& Lambda);

// Kinematic state of one beam node: centroid position, section rotation,
// and 6-component velocity/acceleration (translational then angular).
struct BeamNodeState {
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  RotationMatrix Lambda = RotationMatrix::Identity();
  Eigen::Matrix<double, 6, 1> velocity = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 1> acceleration =
      Eigen::Matrix<double, 6, 1>::Zero();
  int updates_since_renorm = 0;
};

// Incremental update d += du, Lambda = exp(dphi~) * Lambda. The rotation is
// re-orthonormalized by polar projection every 100 updates to stop
// round-off drift from accumulating.
BeamNodeState update_config(const BeamNodeState& node,
                            const Eigen::Vector3d& du,
                            const Eigen::Vector3d& dphi);

enum class Boundary {
  kPinnedPinned,
  kClampedFree,
  kFree,  // no constraints; keeps the rigid modes
};

// Uniform circular-section beam under constant axial tension.
struct BeamModel {
  double E = 0.0;        // Pa
  double A = 0.0;        // m^2
  double I = 0.0;        // m^4, bending (both transverse axes)
  double J = 0.0;        // m^4, torsion
  double rho = 0.0;      // kg/m^3
  double length = 0.0;   // m
  double tension = 0.0;  // N
  int n_elements = 0;
  Boundary boundary = Boundary::kPinnedPinned;
};

// One transverse bending plane discretized with cubic Hermite elements,
// boundary conditions already eliminated. Both transverse planes of a
// circular section share these matrices.
struct AssembledBeam {
  Eigen::MatrixXd M;
  Eigen::MatrixXd K;  // bending EI term plus geometric tension term
  // Index into the free-DOF vector for each node's deflection and
  // rotation DOF, or -1 where the boundary constrains it.
  std::vector<int> w_dof;
  std::vector<int> theta_dof;
  double element_length = 0.0;
};

AssembledBeam assemble(const BeamModel& model);

// Lowest `count` natural frequencies in Hz, ascending.
std::vector<double> natural_frequencies(const BeamModel& model, int count);

struct NewmarkState {
  Eigen::VectorXd d;
  Eigen::VectorXd v;
  Eigen::VectorXd a;
};

struct RayleighDamping {
  double mass_coeff = 0.0;       // 1/s
  double stiffness_coeff = 0.0;  // s
};

// a0 = M^{-1} (F - C v0 - K d0), the acceleration consistent with the
// equation of motion at the initial instant.
Eigen::VectorXd consistent_acceleration(const Eigen::MatrixXd& M,
                                        const Eigen::MatrixXd& C,
                                        const Eigen::MatrixXd& K,
                                        const Eigen::VectorXd& F,
                                        const Eigen::VectorXd& d,
                                        const Eigen::VectorXd& v);

// One Newmark step. beta = 1/4, gamma = 1/2 is the unconditionally stable
// average-acceleration scheme.
NewmarkState newmark_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                          const Eigen::MatrixXd& K, const Eigen::VectorXd& F,
                          const NewmarkState& state, double dt,
                          double beta = 0.25, double gamma = 0.5);

// Same scheme with the effective-stiffness factorization cached, for time
// loops with fixed matrices and step size.
class NewmarkSolver {
 public:
  NewmarkSolver(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                const Eigen::MatrixXd& K, double dt, double beta = 0.25,
                double gamma = 0.5);

  NewmarkState step(const NewmarkState& state, const Eigen::VectorXd& F) const;

  double dt() const { return dt_; }

 private:
  Eigen::MatrixXd M_, C_, K_;
  Eigen::LDLT<Eigen::MatrixXd> effective_;
  double dt_, beta_, gamma_;
};

}  // namespace viv::beam

#endif  // VIVROM_CORE_BEAM_HPP_
