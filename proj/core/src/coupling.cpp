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

#include "viv/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "viv/errors.hpp"

namespace viv::coupling {

void validate(const HydroParams& hydro) {
  if (hydro.rho_f <= 0.0 || hydro.U < 0.0 || hydro.D <= 0.0) {
    throw ParameterError("hydro: rho_f and D must be positive, U >= 0");
  }
  if (hydro.St <= 0.05 || hydro.St >= 0.5) {
    throw ParameterError("hydro: St outside (0.05, 0.5)");
  }
}

double strouhal_frequency(const HydroParams& hydro) {
  validate(hydro);
  return hydro.St * hydro.U / hydro.D;
}

namespace {

void check_points(const std::vector<InterfacePoint>& points, int element) {
  for (const auto& p : points) {
    if (p.element != element) {
      throw MappingError("transfer: point attached to a different element");
    }
    if (std::abs(p.xi) > 1.0) {
      throw MappingError("transfer: natural coordinate outside [-1, 1]");
    }
  }
}

}  // namespace

ElementLoads transfer_forces(const std::vector<InterfacePoint>& points,
                             const std::vector<Eigen::Vector3d>& forces,
                             int element) {
  if (points.size() != forces.size()) {
    throw DimensionError("transfer_forces: one force per point required");
  }
  check_points(points, element);
  ElementLoads out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double shape[2] = {0.5 * (1.0 - points[i].xi),
                             0.5 * (1.0 + points[i].xi)};
    const Eigen::Vector3d torque = points[i].r_s.cross(forces[i]);
    for (int j = 0; j < 2; ++j) {
      out.force[j] += shape[j] * forces[i];
      out.moment[j] += shape[j] * torque;
    }
  }
  return out;
}

void transfer_displacements(std::vector<InterfacePoint>& points,
                            const std::array<Eigen::Vector3d, 2>& du,
                            const std::array<Eigen::Vector3d, 2>& dphi,
                            int element) {
  check_points(points, element);
  for (auto& p : points) {
    const double i1 = 0.5 * (1.0 - p.xi);
    const double i2 = 0.5 * (1.0 + p.xi);
    const Eigen::Vector3d du_i = i1 * du[0] + i2 * du[1];
    const Eigen::Vector3d dphi_i = i1 * dphi[0] + i2 * dphi[1];
    const Eigen::Vector3d r_new = beam::rot_exp(dphi_i) * p.r_s;
    p.position += du_i + (r_new - p.r_s);
    p.r_s = r_new;
  }
}

double aitken_omega(const Eigen::VectorXd& res_prev,
                    const Eigen::VectorXd& res_curr, double omega_prev) {
  if (res_prev.size() != res_curr.size()) {
    throw DimensionError("aitken_omega: residual sizes differ");
  }
  const Eigen::VectorXd diff = res_curr - res_prev;
  const double denom = diff.squaredNorm();
  if (std::sqrt(denom) < 1e-14) {
    throw StagnationError("aitken_omega: residuals stagnated");
  }
  const double omega = -omega_prev * res_prev.dot(diff) / denom;
  return std::clamp(omega, 0.01, 2.0);
}

void validate(const CouplingConfig& cfg) {
  if (!(cfg.omega0 > 0.0 && cfg.omega0 <= 1.0)) {
    throw ParameterError("coupling: omega0 outside (0, 1]");
  }
  if (cfg.tol <= 0.0) throw ParameterError("coupling: tol must be positive");
  if (cfg.max_subiter < 1) {
    throw ParameterError("coupling: max_subiter must be >= 1");
  }
}

CoupledStepResult coupled_step(const beam::NewmarkSolver& solver,
                               const beam::NewmarkState& state,
                               const Eigen::VectorXd& v_prev_step,
                               ForceProvider& provider,
                               const CouplingConfig& cfg) {
  validate(cfg);
  const Eigen::Index n = state.v.size();
  if (v_prev_step.size() != n) {
    throw DimensionError("coupled_step: predictor velocity size mismatch");
  }
  std::vector<int> idx = provider.interface_dofs();
  if (idx.empty()) {
    idx.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
  }
  const auto gather = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = full(idx[i]);
    return out;
  };

  Eigen::VectorXd v_pred = 2.0 * state.v - v_prev_step;
  double omega = cfg.omega0;
  Eigen::VectorXd res_prev;
  CoupledStepResult result;

  for (int k = 1; k <= cfg.max_subiter; ++k) {
    const Eigen::VectorXd F = provider.force(v_pred);
    beam::NewmarkState trial = solver.step(state, F);
    const Eigen::VectorXd res = gather(trial.v) - gather(v_pred);
    const double rnorm = res.lpNorm<Eigen::Infinity>();
    result.residual_history.push_back(rnorm);

    bool accept = rnorm <= cfg.tol;
    if (!accept && res_prev.size() > 0) {
      try {
        omega = aitken_omega(res_prev, res, omega);
      } catch (const StagnationError&) {
        accept = true;  // no progress left to extract; take this iterate
      }
    }
    if (accept) {
      provider.commit(trial);
      result.state = std::move(trial);
      result.subiterations = k;
      return result;
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      v_pred(idx[i]) += omega * res(static_cast<Eigen::Index>(i));
    }
    // Non-interface DOFs carry no feedback; follow the structural solve.
    if (idx.size() != static_cast<std::size_t>(n)) {
      std::vector<bool> on_interface(static_cast<std::size_t>(n), false);
      for (const int i : idx) on_interface[static_cast<std::size_t>(i)] = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!on_interface[static_cast<std::size_t>(i)]) v_pred(i) = trial.v(i);
      }
    }
    res_prev = res;
  }

  std::string msg = "coupled_step: no convergence after " +
                    std::to_string(cfg.max_subiter) +
                    " sub-iterations; residual history:";
  for (const double r : result.residual_history) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %.3e", r);
    msg += buf;
  }
  throw ConvergenceError(msg);
}

Eigen::Vector3d coefficients_to_force(double lc, double dc,
                                      const HydroParams& hydro,
                                      double tributary) {
  validate(hydro);
  if (tributary <= 0.0) {
    throw ParameterError("coefficients_to_force: tributary must be positive");
  }
  const double q = 0.5 * hydro.rho_f * hydro.U * hydro.U * hydro.D * tributary;
  return {dc * q, lc * q, 0.0};
}

RomForceField make_uniform_rom(const beam::BeamModel& model,
                               const wake::VdpParams& vdp,
                               wake::ForcingKind kind,
                               const ssmodel::StateSpaceModel& drag_model,
                               double dcm, const HydroParams& hydro,
                               double initial_lift) {
  validate(hydro);
  const int nn = model.n_elements + 1;
  const double le = model.length / model.n_elements;
  RomForceField rom;
  rom.vdp.assign(static_cast<std::size_t>(nn), vdp);
  rom.kinds.assign(static_cast<std::size_t>(nn), kind);
  rom.wake_states.assign(static_cast<std::size_t>(nn),
                         wake::WakeState{initial_lift, 0.0});
  rom.drag_model = drag_model;
  rom.dcm = dcm;
  rom.hydro = hydro;
  rom.tributary.assign(static_cast<std::size_t>(nn), le);
  rom.tributary.front() = 0.5 * le;
  rom.tributary.back() = 0.5 * le;
  return rom;
}

namespace {

// The fluid side of the full-scale run: per-node wake oscillators driven by
// the candidate cross-flow motion plus a shared-form drag filter driven by
// the committed lift. DOF layout is [in-line plane; cross-flow plane].
class RomProvider : public ForceProvider {
 public:
  RomProvider(const RomForceField& rom, const beam::AssembledBeam& plane,
              const beam::NewmarkState* committed, const double* t_now,
              double dt)
      : rom_(rom),
        plane_(plane),
        committed_(committed),
        t_now_(t_now),
        dt_(dt),
        n_plane_(plane.M.rows()) {
    const auto nn = rom_.vdp.size();
    wake_states_ = rom_.wake_states;
    if (wake_states_.empty()) {
      wake_states_.assign(nn, wake::WakeState{0.0, 0.0});
    }
    trial_wake_ = wake_states_;
    const Eigen::Index p = rom_.drag_model.order();
    drag_states_ = rom_.drag_states;
    if (drag_states_.empty()) {
      drag_states_.assign(nn, Eigen::VectorXd::Zero(p));
    }
    drag_discrete_ = ssmodel::to_discrete(rom_.drag_model, dt);
    q_ = 0.5 * rom_.hydro.rho_f * rom_.hydro.U * rom_.hydro.U * rom_.hydro.D;

    for (std::size_t i = 0; i < rom_.tributary.size(); ++i) {
      const int w = plane_.w_dof[i];
      if (w >= 0) {
        il_dofs_.push_back(w);
        cf_dofs_.push_back(static_cast<int>(n_plane_) + w);
      }
    }
  }

  Eigen::VectorXd static_load() const {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(2 * n_plane_);
    for (std::size_t i = 0; i < rom_.tributary.size(); ++i) {
      const int w = plane_.w_dof[i];
      if (w >= 0) F(w) = rom_.dcm * q_ * rom_.tributary[i];
    }
    return F;
  }

  std::vector<int> interface_dofs() const override {
    std::vector<int> idx = il_dofs_;
    idx.insert(idx.end(), cf_dofs_.begin(), cf_dofs_.end());
    return idx;
  }

  Eigen::VectorXd force(const Eigen::VectorXd& v_pred) override {
    Eigen::VectorXd F = static_load();
    const double s = rom_.forcing_sign;
    for (std::size_t i = 0; i < rom_.vdp.size(); ++i) {
      const int w = plane_.w_dof[i];
      double u = 0.0;
      if (w >= 0) {
        const Eigen::Index cf = n_plane_ + w;
        const double v_new = v_pred(cf);
        const double v_old = committed_->v(cf);
        switch (rom_.kinds[i]) {
          case wake::ForcingKind::kDisplacement:
            u = s * (committed_->d(cf) + 0.5 * dt_ * (v_old + v_new));
            break;
          case wake::ForcingKind::kVelocity:
            u = s * v_new;
            break;
          case wake::ForcingKind::kAcceleration:
            u = s * (v_new - v_old) / dt_;
            break;
        }
      }
      wake::WakeState st = wake_states_[i];
      const int nsub = std::max(rom_.wake_substeps, 1);
      const double h = dt_ / nsub;
      for (int k = 0; k < nsub; ++k) {
        st = wake::vdp_rk4_step(st, rom_.vdp[i], u, u, u, h);
      }
      if (!(std::abs(st.x1) < 1e6 && std::abs(st.x2) < 1e6)) {
        throw DivergenceError("wake oscillator diverged at node " +
                                  std::to_string(i) + ", t = " +
                                  std::to_string(*t_now_ + dt_) + " s",
                              *t_now_ + dt_);
      }
      trial_wake_[i] = st;

      // Drag fluctuation from the committed lift; constant within the step.
      const double uq = wake_states_[i].x1 * wake_states_[i].x1;
      double dc = drag_discrete_.D * uq;
      if (drag_discrete_.order() > 0) {
        dc += drag_discrete_.C * drag_states_[i];
      }
      if (w >= 0) {
        const double f = q_ * rom_.tributary[i];
        F(w) += dc * f;
        F(n_plane_ + w) += st.x1 * f;
      }
    }
    return F;
  }

  void commit(const beam::NewmarkState&) override {
    for (std::size_t i = 0; i < wake_states_.size(); ++i) {
      const double uq = wake_states_[i].x1 * wake_states_[i].x1;
      if (drag_discrete_.order() > 0) {
        drag_states_[i] = drag_discrete_.A * drag_states_[i] +
                          drag_discrete_.B * uq;
      }
      wake_states_[i] = trial_wake_[i];
    }
  }

  const std::vector<wake::WakeState>& wake_states() const {
    return wake_states_;
  }

 private:
  const RomForceField& rom_;
  const beam::AssembledBeam& plane_;
  const beam::NewmarkState* committed_;
  const double* t_now_;
  double dt_;
  Eigen::Index n_plane_;
  double q_ = 0.0;
  std::vector<wake::WakeState> wake_states_, trial_wake_;
  std::vector<Eigen::VectorXd> drag_states_;
  ssmodel::StateSpaceModel drag_discrete_;
  std::vector<int> il_dofs_, cf_dofs_;
};

}  // namespace

FullScaleResult run_full_scale(const beam::BeamModel& model,
                               const RomForceField& rom,
                               const CouplingConfig& cfg, double T,
                               const beam::RayleighDamping& damping,
                               int snapshot_stride) {
  validate(rom.hydro);
  validate(cfg);
  if (cfg.dt_c <= 0.0) throw ParameterError("run_full_scale: dt_c must be positive");
  if (T <= 0.0) throw ParameterError("run_full_scale: T must be positive");
  const std::size_t nn = static_cast<std::size_t>(model.n_elements) + 1;
  if (rom.vdp.size() != nn || rom.kinds.size() != nn ||
      rom.tributary.size() != nn) {
    throw DimensionError("run_full_scale: one ROM entry per node required");
  }
  double trib_sum = 0.0;
  for (const double t : rom.tributary) trib_sum += t;
  if (std::abs(trib_sum - model.length) > 1e-9 * model.length) {
    throw ParameterError("run_full_scale: tributary lengths must sum to the span");
  }

  const beam::AssembledBeam plane = beam::assemble(model);
  const Eigen::Index np = plane.M.rows();
  const Eigen::Index n = 2 * np;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  M.topLeftCorner(np, np) = plane.M;
  M.bottomRightCorner(np, np) = plane.M;
  K.topLeftCorner(np, np) = plane.K;
  K.bottomRightCorner(np, np) = plane.K;
  const Eigen::MatrixXd C =
      damping.mass_coeff * M + damping.stiffness_coeff * K;

  const double dt = cfg.dt_c;
  beam::NewmarkState state;
  double t_now = 0.0;
  RomProvider provider(rom, plane, &state, &t_now, dt);

  // Phase 1: the steady drag goes on as a static preload.
  const Eigen::VectorXd F_static = provider.static_load();
  Eigen::LDLT<Eigen::MatrixXd> kldlt(K);
  if (kldlt.info() != Eigen::Success) {
    throw NumericError("run_full_scale: singular stiffness");
  }
  state.d = kldlt.solve(F_static);
  state.v = Eigen::VectorXd::Zero(n);
  state.a = Eigen::VectorXd::Zero(n);

  FullScaleResult out;
  out.z.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    out.z[i] = static_cast<double>(i) * plane.element_length;
  }
  const std::size_t mid = nn / 2;
  const int wmid = plane.w_dof[mid];
  const auto node_value = [&](const Eigen::VectorXd& vec, std::size_t node,
                              bool cf) {
    const int w = plane.w_dof[node];
    if (w < 0) return 0.0;
    return vec(cf ? np + w : w);
  };
  out.static_il_mid = wmid >= 0 ? state.d(wmid) : 0.0;

  const auto snapshot = [&](double t) {
    SnapshotRecord rec;
    rec.t = t;
    rec.d_il.resize(nn);
    rec.d_cf.resize(nn);
    rec.v_il.resize(nn);
    rec.v_cf.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      rec.d_il[i] = node_value(state.d, i, false);
      rec.d_cf[i] = node_value(state.d, i, true);
      rec.v_il[i] = node_value(state.v, i, false);
      rec.v_cf[i] = node_value(state.v, i, true);
    }
    out.snapshots.push_back(std::move(rec));
  };

  const beam::NewmarkSolver solver(M, C, K, dt);
  const auto nsteps = static_cast<long long>(std::llround(T / dt));
  Eigen::VectorXd v_prev = state.v;

  out.time.reserve(static_cast<std::size_t>(nsteps) + 1);
  out.mid_il.reserve(static_cast<std::size_t>(nsteps) + 1);
  out.mid_cf.reserve(static_cast<std::size_t>(nsteps) + 1);
  const auto record_mid = [&](double t) {
    out.time.push_back(t);
    out.mid_il.push_back(wmid >= 0 ? state.d(wmid) : 0.0);
    out.mid_cf.push_back(wmid >= 0 ? state.d(np + wmid) : 0.0);
  };
  record_mid(0.0);
  if (snapshot_stride > 0) snapshot(0.0);

  long long total_subiter = 0;
  for (long long step = 0; step < nsteps; ++step) {
    CoupledStepResult res;
    try {
      res = coupled_step(solver, state, v_prev, provider, cfg);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("run_full_scale: coupling failed at t = " +
                             std::to_string(t_now + dt) + " s: " + e.what());
    }
    v_prev = state.v;
    state = std::move(res.state);
    t_now = static_cast<double>(step + 1) * dt;
    total_subiter += res.subiterations;
    out.max_subiterations = std::max(out.max_subiterations, res.subiterations);
    record_mid(t_now);
    if (snapshot_stride > 0 && (step + 1) % snapshot_stride == 0) {
      snapshot(t_now);
    }
  }
  if (snapshot_stride <= 0 || nsteps % snapshot_stride != 0) {
    snapshot(t_now);
  }
  out.mean_subiterations =
      nsteps > 0 ? static_cast<double>(total_subiter) / nsteps : 0.0;
  return out;
}

}  // namespace viv::coupling
