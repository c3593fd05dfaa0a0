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

#include "viv/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "viv/errors.hpp"

namespace viv::sysid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenalty = 1e6;  // per-sample residual for diverged trials

double objective(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

// Solves the damped Gauss-Newton system min |J d + r|^2 + lambda |d|^2 via
// the augmented least-squares form, which stays well-posed for singular J.
Eigen::VectorXd damped_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r,
                            double lambda) {
  const Eigen::Index m = J.rows();
  const Eigen::Index n = J.cols();
  if (lambda == 0.0) {
    return J.colPivHouseholderQr().solve(-r);
  }
  Eigen::MatrixXd aug(m + n, n);
  aug.topRows(m) = J;
  aug.bottomRows(n) =
      std::sqrt(lambda) * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + n);
  rhs.head(m) = -r;
  return aug.colPivHouseholderQr().solve(rhs);
}

}  // namespace

std::pair<Eigen::VectorXd, FitReport> trf_minimize(const NlsProblem& prob) {
  const Eigen::Index n = prob.p0.size();
  if (n == 0) throw ParameterError("trf_minimize: empty parameter vector");
  Eigen::VectorXd lower = prob.lower.size() ? prob.lower
                                            : Eigen::VectorXd::Constant(n, -kInf);
  Eigen::VectorXd upper = prob.upper.size() ? prob.upper
                                            : Eigen::VectorXd::Constant(n, kInf);
  if (lower.size() != n || upper.size() != n) {
    throw DimensionError("trf_minimize: bounds size mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lower(i) < upper(i))) {
      throw ParameterError("trf_minimize: lower bound must be below upper");
    }
    if (std::isfinite(lower(i)) && !(prob.p0(i) > lower(i))) {
      throw ParameterError("trf_minimize: p0 must lie strictly inside bounds");
    }
    if (std::isfinite(upper(i)) && !(prob.p0(i) < upper(i))) {
      throw ParameterError("trf_minimize: p0 must lie strictly inside bounds");
    }
  }

  // Trust region radii live in the scaled coordinates s = p / scale, so the
  // default radius of 1 means a roughly 100% relative step.
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scale(i) = std::max(std::abs(prob.p0(i)), 1.0);
  }

  const auto& opt = prob.options;
  Eigen::VectorXd p = prob.p0;
  Eigen::VectorXd r = prob.residual(p);
  if (!r.allFinite()) {
    throw ParameterError("trf_minimize: residual not finite at p0");
  }
  double f = objective(r);

  FitReport report;
  report.objective_history.push_back(f);

  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  double radius = opt.initial_radius;
  bool converged = false;
  int iter = 0;

  const auto reflect_into_box = [&](Eigen::VectorXd cand) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int bounce = 0; bounce < 2; ++bounce) {
        if (std::isfinite(upper(i)) && cand(i) > upper(i)) {
          cand(i) = 2.0 * upper(i) - cand(i);
        } else if (std::isfinite(lower(i)) && cand(i) < lower(i)) {
          cand(i) = 2.0 * lower(i) - cand(i);
        } else {
          break;
        }
      }
      cand(i) = std::min(std::max(cand(i), lower(i)), upper(i));
    }
    return cand;
  };

  while (iter < opt.max_iterations && !converged) {
    ++iter;
    // Forward-difference Jacobian with respect to the scaled variables,
    // probing into the feasible side at active bounds.
    Eigen::MatrixXd J(r.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double h = sqrt_eps * (1.0 + std::abs(p(j)) / scale(j));
      double step = h * scale(j);
      if (std::isfinite(upper(j)) && p(j) + step > upper(j)) {
        step = -step;
        h = -h;
      }
      Eigen::VectorXd pj = p;
      pj(j) = std::min(std::max(pj(j) + step, lower(j)), upper(j));
      Eigen::VectorXd rj = prob.residual(pj);
      if (!rj.allFinite()) rj = Eigen::VectorXd::Constant(r.size(), kPenalty);
      J.col(j) = (rj - r) / h;
    }

    const Eigen::VectorXd g = J.transpose() * r;
    const auto at_lower = [&](Eigen::Index i) {
      return std::isfinite(lower(i)) &&
             p(i) - lower(i) <= 1e-12 * std::max(1.0, std::abs(lower(i)));
    };
    const auto at_upper = [&](Eigen::Index i) {
      return std::isfinite(upper(i)) &&
             upper(i) - p(i) <= 1e-12 * std::max(1.0, std::abs(upper(i)));
    };
    // Gradient components pushing out of the box at an active bound cannot
    // yield progress, so the optimality test ignores them.
    Eigen::VectorXd g_proj = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((at_lower(i) && g(i) > 0.0) || (at_upper(i) && g(i) < 0.0)) {
        g_proj(i) = 0.0;
      }
    }
    if (g_proj.lpNorm<Eigen::Infinity>() < opt.gtol) {
      converged = true;
      break;
    }

    // Gauss-Newton step, damped until it fits inside the trust radius.
    const auto solve_within_radius = [&](const Eigen::MatrixXd& Jm,
                                         const Eigen::VectorXd& rv) {
      Eigen::VectorXd d = damped_step(Jm, rv, 0.0);
      if (!d.allFinite()) {
        const Eigen::VectorXd gm = Jm.transpose() * rv;
        d = -gm / std::max(gm.norm(), 1e-300);
      }
      if (d.norm() > radius) {
        double lo = -14.0, hi = 20.0;  // log10(lambda) bracket
        for (int b = 0; b < 60; ++b) {
          const double mid = 0.5 * (lo + hi);
          d = damped_step(Jm, rv, std::pow(10.0, mid));
          const double len = d.norm();
          if (len > radius) {
            lo = mid;
          } else {
            hi = mid;
            if (len > 0.8 * radius) break;
          }
        }
        if (d.norm() > radius) d *= radius / d.norm();
      }
      return d;
    };

    const Eigen::VectorXd delta = solve_within_radius(J, r);
    const Eigen::VectorXd p_raw = p + scale.asDiagonal() * delta;
    const Eigen::VectorXd p_refl = reflect_into_box(p_raw);

    Eigen::VectorXd best_p = p_refl;
    Eigen::VectorXd best_r = prob.residual(p_refl);
    if (!best_r.allFinite()) {
      best_r = Eigen::VectorXd::Constant(r.size(), kPenalty);
    }
    double best_f = objective(best_r);

    const auto consider = [&](const Eigen::VectorXd& cand) {
      if ((cand - best_p).norm() == 0.0) return;
      Eigen::VectorXd rc = prob.residual(cand);
      if (!rc.allFinite()) rc = Eigen::VectorXd::Constant(r.size(), kPenalty);
      const double fc = objective(rc);
      if (fc < best_f) {
        best_p = cand;
        best_r = rc;
        best_f = fc;
      }
    };

    if ((p_refl - p_raw).norm() > 0.0) {
      // A bound was crossed: also try the plain projection onto the box.
      consider(p_raw.cwiseMax(lower).cwiseMin(upper));
    }

    // With an active bound the raw step tends to point out of the box and
    // loses most of its length to clipping; a step confined to the free
    // coordinates follows the active face instead.
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!((at_lower(i) && g(i) > 0.0) || (at_upper(i) && g(i) < 0.0))) {
        free_idx.push_back(i);
      }
    }
    if (!free_idx.empty() && free_idx.size() < static_cast<std::size_t>(n)) {
      Eigen::MatrixXd Jf(r.size(), static_cast<Eigen::Index>(free_idx.size()));
      for (std::size_t k = 0; k < free_idx.size(); ++k) {
        Jf.col(static_cast<Eigen::Index>(k)) = J.col(free_idx[k]);
      }
      const Eigen::VectorXd d_free = solve_within_radius(Jf, r);
      Eigen::VectorXd delta_sub = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < free_idx.size(); ++k) {
        delta_sub(free_idx[k]) = d_free(static_cast<Eigen::Index>(k));
      }
      consider((p + scale.asDiagonal() * delta_sub)
                   .cwiseMax(lower)
                   .cwiseMin(upper));
    }

    const Eigen::VectorXd step_taken = (best_p - p).cwiseQuotient(scale);
    const double pred = f - objective(r + J * step_taken);
    const double step_scaled = step_taken.norm();
    const double s_norm = (p.cwiseQuotient(scale)).norm();

    if (best_f < f) {
      const double rho = (f - best_f) / std::max(pred, 1e-300);
      const double df = f - best_f;
      p = best_p;
      r = best_r;
      f = best_f;
      report.objective_history.push_back(f);
      if (rho > 0.75 && step_scaled > 0.9 * radius) {
        radius *= 2.0;
      } else if (rho < 0.25) {
        radius *= 0.5;
      }
      if (f <= 1e-300 || df < opt.ftol * std::max(f + df, 1e-300) ||
          step_scaled < opt.xtol * (1.0 + s_norm)) {
        converged = true;
      }
    } else {
      radius *= 0.25;
      if (radius < opt.xtol * (1.0 + s_norm)) {
        converged = true;  // step tolerance at a (possibly bound) stationary point
      }
    }
  }

  report.iterations = iter;
  report.converged = converged;
  report.residual_norm = r.norm();
  report.params.assign(p.data(), p.data() + n);
  return {p, report};
}

namespace {

// Observer canonical form: the characteristic coefficients occupy the first
// column, C picks the first state.
ssmodel::StateSpaceModel observer_form(const Eigen::VectorXd& theta, int order,
                                       double dt) {
  ssmodel::StateSpaceModel m;
  m.continuous_time = false;
  m.dt = dt;
  const int n = order;
  m.A = Eigen::MatrixXd::Zero(n, n);
  m.B.resize(n);
  m.C = Eigen::RowVectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    m.A(i, 0) = -theta(i);
    if (i + 1 < n) m.A(i, i + 1) = 1.0;
    m.B(i) = theta(n + i);
  }
  if (n > 0) m.C(0) = 1.0;
  m.D = theta(2 * n);
  return m;
}

// Monic characteristic polynomial coefficients a_1..a_n of A, from its
// eigenvalues. Imaginary parts cancel for real matrices.
Eigen::VectorXd characteristic_coefficients(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  const Eigen::VectorXcd eigs = Eigen::MatrixXd(A).eigenvalues();
  std::vector<std::complex<double>> poly{1.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += poly[k];
      next[k + 1] -= poly[k] * eigs(i);
    }
    poly = std::move(next);
  }
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a(i) = poly[static_cast<std::size_t>(i) + 1].real();
  return a;
}

Eigen::VectorXd observer_theta_from_model(const ssmodel::StateSpaceModel& m) {
  const int n = static_cast<int>(m.order());
  Eigen::VectorXd theta(2 * n + 1);
  const Eigen::VectorXd a = characteristic_coefficients(m.A);
  theta.head(n) = a;
  // Match the first n Markov parameters; the map to B is triangular:
  // h_k = b_k - sum_{i<k} a_i h_{k-i}.
  const ssmodel::MarkovSequence h = ssmodel::markov_from_model(m, n);
  for (int k = 1; k <= n; ++k) {
    double b = h.h[static_cast<std::size_t>(k)];
    for (int i = 1; i < k; ++i) {
      b += a(i - 1) * h.h[static_cast<std::size_t>(k - i)];
    }
    theta(n + k - 1) = b;
  }
  theta(2 * n) = m.D;
  return theta;
}

void require_aligned(const signals::TimeSeries& a, const signals::TimeSeries& b,
                     const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": channel lengths differ");
  }
  if (std::abs(a.dt - b.dt) > 1e-9 * a.dt) {
    throw DimensionError(std::string(what) + ": channel sampling differs");
  }
}

}  // namespace

std::pair<ssmodel::StateSpaceModel, FitReport> pem_identify(
    const PemProblem& prob) {
  require_aligned(prob.input, prob.output, "pem_identify");
  const int n = prob.order;
  if (n < 0) throw ParameterError("pem_identify: order must be >= 0");
  const std::size_t nfree = 2 * static_cast<std::size_t>(n) + 1;
  if (prob.input.size() < 20 * nfree) {
    throw DimensionError("pem_identify: need at least 20 samples per parameter");
  }
  const double dt = prob.input.dt;

  if (n == 0) {
    double uu = 0.0, uy = 0.0;
    for (std::size_t k = 0; k < prob.input.size(); ++k) {
      uu += prob.input.values[k] * prob.input.values[k];
      uy += prob.input.values[k] * prob.output.values[k];
    }
    if (uu == 0.0) throw ParameterError("pem_identify: zero input");
    ssmodel::StateSpaceModel m;
    m.A.resize(0, 0);
    m.B.resize(0);
    m.C.resize(0);
    m.D = uy / uu;
    m.continuous_time = false;
    m.dt = dt;
    FitReport rep;
    rep.params = {m.D};
    rep.converged = true;
    const signals::TimeSeries yhat =
        ssmodel::simulate(m, prob.input, Eigen::VectorXd());
    rep.best_fit_percent = signals::best_fit(prob.output, yhat);
    rep.residual_norm = 0.0;
    for (std::size_t k = 0; k < prob.output.size(); ++k) {
      const double e = prob.output.values[k] - yhat.values[k];
      rep.residual_norm += e * e;
    }
    rep.residual_norm = std::sqrt(rep.residual_norm);
    return {m, rep};
  }

  if (prob.initial_model.order() != n) {
    throw DimensionError("pem_identify: initial model order mismatch");
  }
  ssmodel::StateSpaceModel seed = prob.initial_model;
  if (seed.continuous_time) seed = ssmodel::to_discrete(seed, dt);

  const Eigen::Map<const Eigen::VectorXd> y(prob.output.values.data(),
                                            static_cast<Eigen::Index>(
                                                prob.output.size()));
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  const auto residual = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    const ssmodel::StateSpaceModel m = observer_form(theta, n, dt);
    signals::TimeSeries yhat;
    try {
      yhat = ssmodel::simulate(m, prob.input, x0);
    } catch (const Error&) {
      return Eigen::VectorXd::Constant(y.size(), kPenalty);
    }
    Eigen::Map<const Eigen::VectorXd> yh(yhat.values.data(), y.size());
    if (!yh.allFinite()) {
      return Eigen::VectorXd::Constant(y.size(), kPenalty);
    }
    return y - yh;
  };

  NlsProblem nls;
  nls.residual = residual;
  nls.p0 = observer_theta_from_model(seed);
  nls.options = prob.options;
  auto [theta, rep] = trf_minimize(nls);

  const ssmodel::StateSpaceModel m = observer_form(theta, n, dt);
  const signals::TimeSeries yhat = ssmodel::simulate(m, prob.input, x0);
  const Eigen::Map<const Eigen::VectorXd> yh(yhat.values.data(),
                                             static_cast<Eigen::Index>(
                                                 yhat.size()));
  if (yh.allFinite()) {
    rep.best_fit_percent = signals::best_fit(prob.output, yhat);
  } else {
    rep.best_fit_percent = -1e300;
    rep.notes.push_back("simulation of the identified model diverged");
  }
  if (!ssmodel::is_stable(m)) {
    rep.notes.push_back("identified model is not stable");
  }
  return {m, rep};
}

VdpBounds default_vdp_bounds(const wake::VdpParams& p0) {
  const Eigen::Vector4d p(p0.mu, p0.amp, p0.omega0_sq, p0.gain);
  VdpBounds b;
  for (int i = 0; i < 4; ++i) {
    if (p(i) > 0.0) {
      b.lower(i) = p(i) / 100.0;
      b.upper(i) = p(i) * 100.0;
    } else if (p(i) < 0.0) {
      b.lower(i) = p(i) * 100.0;
      b.upper(i) = p(i) / 100.0;
    } else {
      b.lower(i) = -1e6;
      b.upper(i) = 1e6;
    }
  }
  return b;
}

std::pair<wake::VdpParams, FitReport> identify_crossflow(
    const signals::TimeSeries& motion, const signals::TimeSeries& lc_measured,
    wake::ForcingKind kind, const wake::VdpParams& p0,
    const VdpBounds& bounds) {
  require_aligned(motion, lc_measured, "identify_crossflow");
  const double dt = lc_measured.dt;
  const double T = lc_measured.duration();
  const signals::TimeSeries lc_rate = signals::derivative(lc_measured, 1);
  const wake::WakeState ic{lc_measured.values[0], lc_rate.values[0]};
  const Eigen::Map<const Eigen::VectorXd> z(lc_measured.values.data(),
                                            static_cast<Eigen::Index>(
                                                lc_measured.size()));

  const auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    const wake::VdpParams q{p(0), p(1), p(2), p(3)};
    try {
      const signals::TimeSeries sim =
          wake::integrate_wake(q, motion, kind, ic, dt, T);
      Eigen::Map<const Eigen::VectorXd> s(sim.values.data(), z.size());
      if (!s.allFinite()) {
        return Eigen::VectorXd::Constant(z.size(), kPenalty);
      }
      return z - s;
    } catch (const Error&) {
      return Eigen::VectorXd::Constant(z.size(), kPenalty);
    }
  };

  NlsProblem nls;
  nls.residual = residual;
  nls.p0 = Eigen::Vector4d(p0.mu, p0.amp, p0.omega0_sq, p0.gain);
  nls.lower = bounds.lower;
  nls.upper = bounds.upper;
  auto [p, rep] = trf_minimize(nls);

  const wake::VdpParams fitted{p(0), p(1), p(2), p(3)};
  try {
    const signals::TimeSeries sim =
        wake::integrate_wake(fitted, motion, kind, ic, dt, T);
    rep.best_fit_percent = signals::best_fit(lc_measured, sim);
  } catch (const DivergenceError&) {
    rep.best_fit_percent = -1e300;
    rep.notes.push_back("simulation of the fitted oscillator diverged");
  }
  rep.variant = wake::to_string(kind);

  // Sensitivity diagnostic: a forcing record with no information about the
  // gain leaves the residual flat along that axis.
  {
    const double dg = std::max(1e-8, 1e-6 * std::abs(p(3)));
    Eigen::VectorXd pg = p;
    pg(3) = (pg(3) + dg < bounds.upper(3)) ? pg(3) + dg : pg(3) - dg;
    const double sens = (residual(pg) - residual(p)).norm() / dg;
    double zscale = 0.0;
    const double zmean = z.mean();
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      zscale += (z(i) - zmean) * (z(i) - zmean);
    }
    zscale = std::sqrt(zscale);
    if (sens * std::max(std::abs(p(3)), 1.0) < 1e-9 * std::max(zscale, 1e-12)) {
      rep.notes.push_back("gain sensitivity near zero: motion record carries "
                          "no information about the forcing gain");
    }
  }
  return {fitted, rep};
}

namespace {

// Seed from steady-state structure instead of equation error: the dominant
// spectral line fixes omega0, the limit-cycle amplitude law fixes amp, and
// the gain follows from a single projection onto the forcing record. Much
// blunter than the equation-error seed, but free of its noise-amplifying
// double differentiation of the regressors.
wake::VdpParams vdp_spectral_seed(const signals::TimeSeries& motion,
                                  const signals::TimeSeries& lc,
                                  wake::ForcingKind kind) {
  const std::size_t seg = std::min<std::size_t>(lc.size(), 4096);
  const double f_dom = signals::dominant_frequency(signals::welch_psd(lc, seg));
  const double omega0 = f_dom > 0.0 ? 2.0 * M_PI * f_dom : 1.0;

  double peak = 0.0;
  for (std::size_t i = lc.size() / 2; i < lc.size(); ++i) {
    peak = std::max(peak, std::abs(lc.values[i]));
  }

  wake::VdpParams p;
  p.omega0_sq = omega0 * omega0;
  p.mu = omega0;
  p.amp = std::max(0.25 * peak * peak, 1e-3);

  signals::TimeSeries u;
  switch (kind) {
    case wake::ForcingKind::kDisplacement: u = motion; break;
    case wake::ForcingKind::kVelocity: u = signals::derivative(motion, 1); break;
    case wake::ForcingKind::kAcceleration:
      u = signals::derivative(motion, 2);
      break;
  }
  const signals::TimeSeries lcd = signals::derivative(lc, 1);
  const signals::TimeSeries lcdd = signals::derivative(lc, 2);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lc.size(); ++i) {
    const double x = lc.values[i];
    const double eq = lcdd.values[i] -
                      p.mu * (p.amp - x * x) * lcd.values[i] +
                      p.omega0_sq * x;
    num += u.values[i] * eq;
    den += u.values[i] * u.values[i];
  }
  p.gain = den > 0.0 ? num / den : 0.0;
  return p;
}

}  // namespace

std::pair<wake::VdpParams, FitReport> identify_crossflow(
    const signals::TimeSeries& motion, const signals::TimeSeries& lc_measured,
    wake::ForcingKind kind, const wake::VdpParams& p0) {
  auto first = identify_crossflow(motion, lc_measured, kind, p0,
                                  default_vdp_bounds(p0));
  if (first.second.converged && first.second.best_fit_percent >= 20.0) {
    return first;
  }
  // The equation-error seed differentiates the measured lift twice, which
  // noise can turn into a starting point (and bounding box) far from any
  // useful basin. Retry once from a spectral seed and keep the better fit.
  const wake::VdpParams alt = vdp_spectral_seed(motion, lc_measured, kind);
  auto second = identify_crossflow(motion, lc_measured, kind, alt,
                                   default_vdp_bounds(alt));
  second.second.notes.push_back(
      "reseeded from spectral estimate after a poor first fit");
  return second.second.best_fit_percent > first.second.best_fit_percent
             ? std::move(second)
             : std::move(first);
}

std::string to_string(DragForcing f) {
  return f == DragForcing::kLcSquared ? "lc_squared" : "lc_times_rate";
}

DragForcing drag_forcing_from_string(const std::string& name) {
  if (name == "lc_squared") return DragForcing::kLcSquared;
  if (name == "lc_times_rate") return DragForcing::kLcTimesRate;
  throw ParameterError("sysid: unknown drag forcing '" + name + "'");
}

namespace {

signals::TimeSeries drag_input(const signals::TimeSeries& lc,
                               DragForcing forcing) {
  signals::TimeSeries f = lc;
  if (forcing == DragForcing::kLcSquared) {
    for (auto& v : f.values) v = v * v;
  } else {
    const signals::TimeSeries rate = signals::derivative(lc, 1);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      f.values[i] = lc.values[i] * rate.values[i];
    }
  }
  return f;
}

}  // namespace

std::pair<ssmodel::StateSpaceModel, FitReport> identify_inline(
    const signals::TimeSeries& lc, const signals::TimeSeries& dc_fluct,
    DragForcing forcing, const InlineOptions& options) {
  require_aligned(lc, dc_fluct, "identify_inline");
  const signals::TimeSeries f = drag_input(lc, forcing);

  const int K = options.markov_count;
  const auto est = ssmodel::markov_from_data(f, dc_fluct, K);
  const int half = std::min(K / 2, 40);
  const auto H = ssmodel::build_hankel(est.markov, half, half);
  const auto Hs = ssmodel::build_hankel_shifted(est.markov, half, half);
  const auto sel = ssmodel::select_order(H, options.rel_threshold);
  const int n = options.order_override >= 0 ? options.order_override : sel.order;

  const auto fit_at = [&](int order) {
    const auto era = ssmodel::era_realize(H, Hs, order, lc.dt, est.markov.h[0]);
    PemProblem pem;
    pem.input = f;
    pem.output = dc_fluct;
    pem.order = order;
    pem.initial_model = era;
    auto res = pem_identify(pem);
    res.second.variant = to_string(forcing);
    return res;
  };
  const auto usable = [](const std::pair<ssmodel::StateSpaceModel, FitReport>&
                             r) {
    return std::isfinite(r.second.best_fit_percent) &&
           ssmodel::is_stable(r.first);
  };

  auto best = fit_at(n);
  if (options.order_override < 0) {
    // Noisy records inflate the selected order past what the data supports,
    // and the realization then comes out unstable. Re-select at coarser
    // thresholds before reporting an unusable model.
    for (const double t : {1e-2, 1e-1}) {
      if (usable(best)) break;
      if (t <= options.rel_threshold) continue;
      const int m = ssmodel::select_order(H, t).order;
      if (m < 1 || m == best.second.params.empty() ? m == n : false) {
      }
      if (m < 1 || m == n) continue;
      auto cand = fit_at(m);
      cand.second.notes.push_back(
          "order re-selected at relative threshold " + std::to_string(t) +
          " after an unusable fit at the configured threshold");
      if (usable(cand) ||
          cand.second.best_fit_percent > best.second.best_fit_percent) {
        best = std::move(cand);
      }
    }
  }
  if (!std::isfinite(best.second.best_fit_percent)) {
    best.second.converged = false;
  }
  return best;
}

// Equation-error least squares on the van der Pol form:
//   lc'' = (mu amp) lc' - mu lc^2 lc' - omega0_sq lc + gain u.
wake::VdpParams vdp_equation_error_seed(const signals::TimeSeries& motion,
                                        const signals::TimeSeries& lc,
                                        wake::ForcingKind kind) {
  const signals::TimeSeries lcd = signals::derivative(lc, 1);
  const signals::TimeSeries lcdd = signals::derivative(lc, 2);
  signals::TimeSeries u;
  switch (kind) {
    case wake::ForcingKind::kDisplacement: u = motion; break;
    case wake::ForcingKind::kVelocity: u = signals::derivative(motion, 1); break;
    case wake::ForcingKind::kAcceleration:
      u = signals::derivative(motion, 2);
      break;
  }
  const auto n = static_cast<Eigen::Index>(lc.size());
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    X(i, 0) = lcd.values[k];
    X(i, 1) = -lc.values[k] * lc.values[k] * lcd.values[k];
    X(i, 2) = -lc.values[k];
    X(i, 3) = u.values[k];
    rhs(i) = lcdd.values[k];
  }
  const Eigen::Vector4d c = X.colPivHouseholderQr().solve(rhs);

  double lc_max = 0.0;
  for (const double v : lc.values) lc_max = std::max(lc_max, std::abs(v));
  const double omega0_sq = c(2) > 0.0 ? c(2) : 1.0;
  wake::VdpParams p;
  p.omega0_sq = omega0_sq;
  p.mu = c(1) > 0.0 ? c(1) : 0.05 * std::sqrt(omega0_sq);
  const double amp = c(1) > 0.0 ? c(0) / c(1) : 0.25 * lc_max * lc_max;
  p.amp = amp > 1e-6 ? amp : std::max(0.25 * lc_max * lc_max, 1e-3);
  p.gain = c(3);
  return p;
}

ForcingComparison compare_forcings(const Dataset& dataset,
                                   const InlineOptions& options) {
  require_aligned(dataset.d_cf, dataset.lc, "compare_forcings");
  require_aligned(dataset.lc, dataset.dc_fluct, "compare_forcings");

  ForcingComparison out;
  for (const DragForcing f :
       {DragForcing::kLcSquared, DragForcing::kLcTimesRate}) {
    auto [model, rep] = identify_inline(dataset.lc, dataset.dc_fluct, f,
                                        options);
    out.drag.push_back(std::move(rep));
  }
  for (const wake::ForcingKind kind :
       {wake::ForcingKind::kDisplacement, wake::ForcingKind::kVelocity,
        wake::ForcingKind::kAcceleration}) {
    const wake::VdpParams seed =
        vdp_equation_error_seed(dataset.d_cf, dataset.lc, kind);
    auto [params, rep] =
        identify_crossflow(dataset.d_cf, dataset.lc, kind, seed);
    out.lift.push_back(std::move(rep));
  }
  const auto by_fit = [](const FitReport& a, const FitReport& b) {
    return a.best_fit_percent > b.best_fit_percent;
  };
  std::sort(out.drag.begin(), out.drag.end(), by_fit);
  std::sort(out.lift.begin(), out.lift.end(), by_fit);
  return out;
}

}  // namespace viv::sysid
