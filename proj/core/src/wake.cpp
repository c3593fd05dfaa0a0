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

#include "viv/wake.hpp"

#include <cmath>

#include "viv/errors.hpp"

namespace viv::wake {

namespace {

void require_finite(const WakeState& s, double u) {
  if (!std::isfinite(s.x1) || !std::isfinite(s.x2) || !std::isfinite(u)) {
    throw NumericError("wake: non-finite state or forcing");
  }
}

void require_params(const VdpParams& p) {
  if (!(p.mu > 0.0) || !(p.amp > 0.0) || !(p.omega0_sq > 0.0)) {
    throw ParameterError("wake: mu, amp, omega0_sq must all be positive");
  }
}

// Linear interpolation of a series at arbitrary time (clamped to the ends).
double sample(const signals::TimeSeries& s, double t) {
  const double pos = (t - s.t0) / s.dt;
  if (pos <= 0.0) return s.values.front();
  const auto n = s.size();
  if (pos >= static_cast<double>(n - 1)) return s.values.back();
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return s.values[i] + frac * (s.values[i + 1] - s.values[i]);
}

}  // namespace

std::string to_string(ForcingKind kind) {
  switch (kind) {
    case ForcingKind::kDisplacement: return "displacement";
    case ForcingKind::kVelocity: return "velocity";
    case ForcingKind::kAcceleration: return "acceleration";
  }
  return "unknown";
}

ForcingKind forcing_kind_from_string(const std::string& name) {
  if (name == "displacement") return ForcingKind::kDisplacement;
  if (name == "velocity") return ForcingKind::kVelocity;
  if (name == "acceleration") return ForcingKind::kAcceleration;
  throw ParameterError("wake: unknown forcing kind '" + name + "'");
}

WakeState vdp_rhs(const WakeState& state, const VdpParams& p, double u) {
  require_finite(state, u);
  return {state.x2, p.mu * (p.amp - state.x1 * state.x1) * state.x2 -
                        p.omega0_sq * state.x1 + p.gain * u};
}

WakeState rayleigh_rhs(const WakeState& state, const RayleighParams& p) {
  require_finite(state, 0.0);
  const double x2 = state.x2;
  return {x2, -p.omega_s_sq * state.x1 + p.mu_lin * x2 -
                  p.alpha_nl * x2 * x2 * x2};
}

WakeState vdp_rk4_step(const WakeState& state, const VdpParams& p, double u0,
                       double u_half, double u1, double dt) {
  const auto f = [&p](const WakeState& s, double u) -> WakeState {
    return {s.x2, p.mu * (p.amp - s.x1 * s.x1) * s.x2 - p.omega0_sq * s.x1 +
                      p.gain * u};
  };
  const WakeState k1 = f(state, u0);
  const WakeState k2 = f({state.x1 + 0.5 * dt * k1.x1,
                          state.x2 + 0.5 * dt * k1.x2}, u_half);
  const WakeState k3 = f({state.x1 + 0.5 * dt * k2.x1,
                          state.x2 + 0.5 * dt * k2.x2}, u_half);
  const WakeState k4 = f({state.x1 + dt * k3.x1, state.x2 + dt * k3.x2}, u1);
  return {state.x1 + dt / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1),
          state.x2 + dt / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2)};
}

signals::TimeSeries integrate_wake(const VdpParams& p,
                                   const signals::TimeSeries& motion,
                                   ForcingKind kind, WakeState ic, double dt,
                                   double T) {
  require_params(p);
  if (dt <= 0.0 || T <= 0.0) {
    throw ParameterError("wake: dt and T must be positive");
  }
  require_finite(ic, 0.0);

  signals::TimeSeries u;
  if (p.gain == 0.0) {
    u.t0 = 0.0;
    u.dt = T;
    u.values = {0.0, 0.0};
  } else {
    if (motion.duration() + 1e-9 * dt < T) {
      throw ParameterError("wake: motion record shorter than requested T");
    }
    switch (kind) {
      case ForcingKind::kDisplacement: u = motion; break;
      case ForcingKind::kVelocity: u = signals::derivative(motion, 1); break;
      case ForcingKind::kAcceleration: u = signals::derivative(motion, 2); break;
    }
  }

  const auto nsteps = static_cast<std::size_t>(std::llround(T / dt));
  signals::TimeSeries out;
  out.t0 = 0.0;
  out.dt = dt;
  out.values.resize(nsteps + 1);
  WakeState s = ic;
  out.values[0] = s.x1;
  for (std::size_t k = 0; k < nsteps; ++k) {
    const double t = dt * static_cast<double>(k);
    s = vdp_rk4_step(s, p, sample(u, t), sample(u, t + 0.5 * dt),
                     sample(u, t + dt), dt);
    if (!std::isfinite(s.x1) || !std::isfinite(s.x2) ||
        std::abs(s.x1) > 1e6 || std::abs(s.x2) > 1e6) {
      throw DivergenceError("wake: trajectory blew up at t = " +
                                std::to_string(t + dt),
                            t + dt);
    }
    out.values[k + 1] = s.x1;
  }
  return out;
}

signals::TimeSeries nayfeh_drag(const signals::TimeSeries& lc, double dcm,
                                double K) {
  const signals::TimeSeries rate = signals::derivative(lc, 1);
  signals::TimeSeries out;
  out.t0 = lc.t0;
  out.dt = lc.dt;
  out.values.resize(lc.size());
  for (std::size_t i = 0; i < lc.size(); ++i) {
    out.values[i] = dcm - K * lc.values[i] * rate.values[i];
  }
  return out;
}

}  // namespace viv::wake
