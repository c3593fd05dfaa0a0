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

#ifndef VIV_WAKE_HPP_
#define VIV_WAKE_HPP_

#include <string>

#include "viv/signals.hpp"

namespace viv::wake {

// Which kinematic channel of the cylinder motion forces the oscillator.
enum class ForcingKind { kDisplacement, kVelocity, kAcceleration };

std::string to_string(ForcingKind kind);
ForcingKind forcing_kind_from_string(const std::string& name);

// Forced van der Pol lift model:
//   x1' = x2
//   x2' = mu (amp - x1^2) x2 - omega0_sq x1 + gain u
// with the lift coefficient L_c = x1.
struct VdpParams {
  double mu = 0.0;        // 1/s
  double amp = 0.0;       // dimensionless
  double omega0_sq = 0.0; // (rad/s)^2
  double gain = 0.0;      // units follow the ForcingKind of u
};

struct WakeState {
  double x1 = 0.0;  // L_c
  double x2 = 0.0;  // dL_c/dt
};

// Rayleigh background form:
//   x1' = x2
//   x2' = -omega_s_sq x1 + mu_lin x2 - alpha_nl x2^3
struct RayleighParams {
  double omega_s_sq = 0.0;
  double mu_lin = 0.0;
  double alpha_nl = 0.0;
};

WakeState vdp_rhs(const WakeState& state, const VdpParams& p, double u);

WakeState rayleigh_rhs(const WakeState& state, const RayleighParams& p);

// One classical RK4 step of the forced oscillator; u sampled at the start,
// middle, and end of the step.
WakeState vdp_rk4_step(const WakeState& state, const VdpParams& p, double u0,
                       double u_half, double u1, double dt);

// Fixed-step RK4 trajectory of L_c over [0, T]. `motion` is the cylinder
// displacement record; the forcing channel u is the displacement itself, its
// rate, or its second rate according to `kind`, interpolated linearly at the
// stage times. Throws DivergenceError when the state exceeds 1e6.
signals::TimeSeries integrate_wake(const VdpParams& p,
                                   const signals::TimeSeries& motion,
                                   ForcingKind kind, WakeState ic, double dt,
                                   double T);

// Quadratic lift-drag coupling: D_c(t) = dcm - K L_c(t) dL_c/dt.
signals::TimeSeries nayfeh_drag(const signals::TimeSeries& lc, double dcm,
                                double K);

}  // namespace viv::wake

#endif  // VIV_WAKE_HPP_
