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

#ifndef VIV_SSMODEL_HPP_
#define VIV_SSMODEL_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "viv/signals.hpp"

namespace viv::ssmodel {

// Single-input single-output linear state-space model
//   x' = A x + B u,  y = C x + D u
// in continuous or discrete time. Discrete models record their sample time.
struct StateSpaceModel {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
  bool continuous_time = false;
  double dt = 0.0;  // sample time of a discrete model; 0 when continuous

  Eigen::Index order() const { return A.rows(); }
};

struct MarkovSequence {
  std::vector<double> h;  // h[0] is the feed-through term
};

// Result of least-squares deconvolution, with fit diagnostics.
struct MarkovEstimate {
  MarkovSequence markov;
  double residual_norm = 0.0;
  double condition_number = 0.0;
};

struct HankelMatrix {
  Eigen::MatrixXd H;
};

struct OrderSelection {
  int order = 0;
  Eigen::VectorXd singular_values;
};

// Zero-order-hold discretization via the exponential of the augmented
// [[A, B], [0, 0]] block. Identity on already-discrete models with equal dt.
StateSpaceModel to_discrete(const StateSpaceModel& m, double dt);

// Inverse of ZOH discretization via the principal matrix logarithm. Throws
// ParameterError when the discrete state matrix has eigenvalues on the
// closed negative real axis, where the principal logarithm is undefined.
StateSpaceModel to_continuous(const StateSpaceModel& m);

// Eigenvalue stability test (unit disc for discrete, left half-plane for
// continuous models).
bool is_stable(const StateSpaceModel& m);

// Simulates the response to a sampled input from initial state x0.
// Continuous models are ZOH-discretized at the input's dt, so the result is
// exact for piecewise-constant inputs.
signals::TimeSeries simulate(const StateSpaceModel& m,
                             const signals::TimeSeries& u,
                             const Eigen::VectorXd& x0);

// Markov (impulse-response) parameters h_0 = D, h_k = C A^{k-1} B of a
// discrete-time model.
MarkovSequence markov_from_model(const StateSpaceModel& m, int K);

// Least-squares deconvolution of y = h * u over lags 0..K assuming zero
// initial conditions. Requires length >= 10 K; throws IllConditioningError
// (with the condition number) on rank-deficient regressors.
MarkovEstimate markov_from_data(const signals::TimeSeries& u,
                                const signals::TimeSeries& y, int K);

// H[i][j] = h_{i+j+1} (feed-through excluded). Requires rows + cols <= K
// so that the one-step-shifted companion matrix also fits.
HankelMatrix build_hankel(const MarkovSequence& h, int rows, int cols);

// H_shift[i][j] = h_{i+j+2}.
HankelMatrix build_hankel_shifted(const MarkovSequence& h, int rows, int cols);

// Number of singular values at or above rel_threshold * sigma_1, plus the
// full singular spectrum for diagnostics.
OrderSelection select_order(const HankelMatrix& H, double rel_threshold);

// Balanced realization of order n from the truncated SVD of the Hankel pair:
//   A = S^-1/2 U^T H_shift V S^-1/2, B = first column of S^1/2 V^T,
//   C = first row of U S^1/2, D = h0.
// The result is discrete-time at sample time dt.
StateSpaceModel era_realize(const HankelMatrix& H, const HankelMatrix& H_shift,
                            int n, double dt, double h0 = 0.0);

// JSON model document with fields n, A (row-major), B, C, D,
// continuous_time, dt_identified.
StateSpaceModel load_model(const std::string& path);
void save_model(const std::string& path, const StateSpaceModel& m);

}  // namespace viv::ssmodel

#endif  // VIV_SSMODEL_HPP_
