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

#ifndef VIV_SYSID_HPP_
#define VIV_SYSID_HPP_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "viv/signals.hpp"
#include "viv/ssmodel.hpp"
#include "viv/wake.hpp"

namespace viv::sysid {

struct FitReport {
  std::string variant;
  double best_fit_percent = 0.0;
  std::vector<double> params;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  std::vector<double> objective_history;  // accepted objective values
  std::vector<std::string> notes;
};

struct NlsOptions {
  double gtol = 1e-8;
  double xtol = 1e-10;
  double ftol = 1e-10;
  double initial_radius = 1.0;
  int max_iterations = 200;
};

// Bound-constrained nonlinear least squares min 0.5 |R(p)|^2. Bounds may be
// +-infinity; when finite, p0 must lie strictly inside.
struct NlsProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  Eigen::VectorXd p0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  NlsOptions options;
};

// Trust-region-reflective Gauss-Newton with Levenberg damping. Iterates stay
// inside the closed bound box (candidate steps are reflected off active
// bounds, with a projected fallback). The best point found is returned even
// when the iteration budget runs out (converged flag false in that case).
std::pair<Eigen::VectorXd, FitReport> trf_minimize(const NlsProblem& prob);

// Output-error prediction-error identification of a SISO model of the given
// order, parameterized in observer canonical form and seeded by
// initial_model. Minimizes the mean squared simulation error.
struct PemProblem {
  signals::TimeSeries input;   // f(L_c(t))
  signals::TimeSeries output;  // measured fluctuating drag
  int order = 0;
  ssmodel::StateSpaceModel initial_model;
  NlsOptions options;
};

std::pair<ssmodel::StateSpaceModel, FitReport> pem_identify(
    const PemProblem& prob);

// Bounds for the four van der Pol parameters (mu, amp, omega0_sq, gain).
struct VdpBounds {
  Eigen::Vector4d lower;
  Eigen::Vector4d upper;
};

// Default box: [p/100, 100 p] componentwise around a positive initial guess
// (mirrored for a negative gain, wide for a zero one).
VdpBounds default_vdp_bounds(const wake::VdpParams& p0);

// Fits the forced van der Pol parameters so the simulated lift matches
// lc_measured, with the oscillator forced by the selected channel of
// `motion`. Simulation blow-ups during trial points contribute a finite
// penalty of 1e6 per sample so the trust region can contract.
std::pair<wake::VdpParams, FitReport> identify_crossflow(
    const signals::TimeSeries& motion, const signals::TimeSeries& lc_measured,
    wake::ForcingKind kind, const wake::VdpParams& p0, const VdpBounds& bounds);

std::pair<wake::VdpParams, FitReport> identify_crossflow(
    const signals::TimeSeries& motion, const signals::TimeSeries& lc_measured,
    wake::ForcingKind kind, const wake::VdpParams& p0);

// Linear-least-squares initial guess for the van der Pol parameters: with
// the measured lift and its first two numerical rates substituted into the
// oscillator equation, every coefficient enters linearly.
wake::VdpParams vdp_equation_error_seed(const signals::TimeSeries& motion,
                                        const signals::TimeSeries& lc,
                                        wake::ForcingKind kind);

// Input nonlinearity for the drag model.
enum class DragForcing { kLcSquared, kLcTimesRate };

std::string to_string(DragForcing f);
DragForcing drag_forcing_from_string(const std::string& name);

struct InlineOptions {
  int markov_count = 40;        // K
  double rel_threshold = 1e-6;  // order-selection cutoff
  int order_override = -1;      // force the model order when >= 0
};

// Full drag-identification pipeline: Markov deconvolution, Hankel assembly,
// SVD order selection, ERA realization, PEM refinement.
std::pair<ssmodel::StateSpaceModel, FitReport> identify_inline(
    const signals::TimeSeries& lc, const signals::TimeSeries& dc_fluct,
    DragForcing forcing, const InlineOptions& options = {});

// Aligned measurement channels for the model-structure comparison.
struct Dataset {
  signals::TimeSeries d_cf;      // cross-flow displacement
  signals::TimeSeries lc;        // lift coefficient
  signals::TimeSeries dc_fluct;  // fluctuating drag coefficient
};

// Ranked identification results: drag reports over the two input
// nonlinearities and lift reports over the three forcing kinds, each sorted
// by descending best fit. Initial guesses for the lift fits come from an
// equation-error least-squares estimate on the measured channels.
struct ForcingComparison {
  std::vector<FitReport> drag;  // Lc^2 vs Lc dLc/dt
  std::vector<FitReport> lift;  // displacement vs velocity vs acceleration
};

ForcingComparison compare_forcings(const Dataset& dataset,
                                   const InlineOptions& options = {});

}  // namespace viv::sysid

#endif  // VIV_SYSID_HPP_
