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

#ifndef VIVROM_CORE_COUPLING_HPP_
#define VIVROM_CORE_COUPLING_HPP_

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "viv/beam.hpp"
#include "viv/ssmodel.hpp"
#include "viv/wake.hpp"

namespace viv::coupling {

struct HydroParams {
  double rho_f = 1000.0;  // kg/m^3
  double U = 0.0;         // m/s free stream
  double D = 0.0;         // m cylinder diameter
  double St = 0.2;
};

void validate(const HydroParams& hydro);

// Vortex-shedding frequency f_v = St * U / D in Hz.
double strouhal_frequency(const HydroParams& hydro);

// A fluid-side sample point attached to a beam element at natural
// coordinate xi, offset from the centroid line by the rigid section
// radius r_s.
struct InterfacePoint {
  int element = 0;
  double xi = 0.0;  // in [-1, 1]
  Eigen::Vector3d r_s = Eigen::Vector3d::Zero();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

struct ElementLoads {
  std::array<Eigen::Vector3d, 2> force = {Eigen::Vector3d::Zero(),
                                          Eigen::Vector3d::Zero()};
  std::array<Eigen::Vector3d, 2> moment = {Eigen::Vector3d::Zero(),
                                           Eigen::Vector3d::Zero()};
};

// Lumps point forces to the element's two nodes with the linear shape
// functions I1 = (1-xi)/2, I2 = (1+xi)/2; moments pick up r_s x F.
// The nodal sum reproduces the point-force sum exactly.
ElementLoads transfer_forces(const std::vector<InterfacePoint>& points,
                             const std::vector<Eigen::Vector3d>& forces,
                             int element);

// Moves interface points by the interpolated incremental nodal motion:
// the interpolated rotation increment is exponentiated and applied to the
// stored radius, so |r_s| is preserved.
void transfer_displacements(std::vector<InterfacePoint>& points,
                            const std::array<Eigen::Vector3d, 2>& du,
                            const std::array<Eigen::Vector3d, 2>& dphi,
                            int element);

// Dynamic relaxation factor from two successive residuals, clamped to
// [0.01, 2.0]. Throws StagnationError when the residuals are too close to
// divide; the caller then accepts the current iterate.
double aitken_omega(const Eigen::VectorXd& res_prev,
                    const Eigen::VectorXd& res_curr, double omega_prev);

struct CouplingConfig {
  double tol = 1e-6;    // m/s, infinity norm of the velocity residual
  double omega0 = 0.7;
  int max_subiter = 50;
  double dt_c = 0.0;    // s
};

void validate(const CouplingConfig& cfg);

// The fluid side of one coupled step: given a candidate end-of-step
// velocity it returns the load vector. Implementations keep whatever
// internal state they need; commit() is called once with the converged
// structural state so that state can be advanced.
class ForceProvider {
 public:
  virtual ~ForceProvider() = default;
  virtual Eigen::VectorXd force(const Eigen::VectorXd& v_pred) = 0;
  // DOF indices carrying interface velocities; the residual lives there.
  // Empty means every DOF.
  virtual std::vector<int> interface_dofs() const { return {}; }
  virtual void commit(const beam::NewmarkState& converged) { (void)converged; }
};

struct CoupledStepResult {
  beam::NewmarkState state;
  int subiterations = 0;
  std::vector<double> residual_history;
};

// Block Gauss-Seidel sub-iteration with dynamic relaxation: predict the
// interface velocity by linear extrapolation, evaluate the fluid force,
// solve the structure, and relax the prediction with the velocity residual
// until its infinity norm drops below cfg.tol.
CoupledStepResult coupled_step(const beam::NewmarkSolver& solver,
                               const beam::NewmarkState& state,
                               const Eigen::VectorXd& v_prev_step,
                               ForceProvider& provider,
                               const CouplingConfig& cfg);

// Nodal force from the lift and drag coefficients acting on a tributary
// length of cylinder: x is the in-line direction, y cross-flow.
Eigen::Vector3d coefficients_to_force(double lc, double dc,
                                      const HydroParams& hydro,
                                      double tributary);

// Per-node reduced-order hydrodynamic load model under the strip
// assumption: an independent wake oscillator and drag state-space filter
// at every structural node.
struct RomForceField {
  std::vector<wake::VdpParams> vdp;          // one per node
  std::vector<wake::ForcingKind> kinds;      // one per node
  std::vector<wake::WakeState> wake_states;  // empty: zeros (unperturbed)
  ssmodel::StateSpaceModel drag_model;       // D'_c filter, input L_c^2
  std::vector<Eigen::VectorXd> drag_states;  // empty: zeros
  double dcm = 0.0;                          // steady drag coefficient
  HydroParams hydro;
  std::vector<double> tributary;             // per node, sums to length
  // The oscillators are forced by the cylinder motion seen from the fluid
  // frame, the negative of the structural nodal motion.
  double forcing_sign = -1.0;
  int wake_substeps = 2;  // RK4 substeps per coupling step
};

// Uniform field: same parameters at every node, tributary lengths from
// half-sums of adjacent elements, wake states seeded with a uniform lift
// perturbation (a small nonzero value is needed to start vortex shedding
// on an initially quiescent cylinder).
RomForceField make_uniform_rom(const beam::BeamModel& model,
                               const wake::VdpParams& vdp,
                               wake::ForcingKind kind,
                               const ssmodel::StateSpaceModel& drag_model,
                               double dcm, const HydroParams& hydro,
                               double initial_lift = 0.0);

struct SnapshotRecord {
  double t = 0.0;
  std::vector<double> d_il, d_cf, v_il, v_cf;  // per node
};

struct FullScaleResult {
  std::vector<double> z;  // node coordinates along the span
  // Midspan trajectory sampled every coupling step.
  std::vector<double> time, mid_il, mid_cf;
  std::vector<SnapshotRecord> snapshots;
  double static_il_mid = 0.0;  // midspan deflection after the static phase
  double mean_subiterations = 0.0;
  int max_subiterations = 0;
};

// Two-phase driver: a static in-line solve under the steady drag load,
// then coupled time marching where every node's wake oscillator produces
// the lift coefficient and the drag filter its fluctuation.
FullScaleResult run_full_scale(const beam::BeamModel& model,
                               const RomForceField& rom,
                               const CouplingConfig& cfg, double T,
                               const beam::RayleighDamping& damping = {},
                               int snapshot_stride = 0);

}  // namespace viv::coupling

#endif  // VIVROM_CORE_COUPLING_HPP_
