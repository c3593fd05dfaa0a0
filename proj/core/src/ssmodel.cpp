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

#include "viv/ssmodel.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "viv/errors.hpp"

namespace viv::ssmodel {

namespace {

void require_consistent(const StateSpaceModel& m) {
  const Eigen::Index n = m.A.rows();
  if (m.A.cols() != n || m.B.size() != n || m.C.size() != n) {
    throw DimensionError("ssmodel: inconsistent A/B/C dimensions");
  }
}

}  // namespace

StateSpaceModel to_discrete(const StateSpaceModel& m, double dt) {
  require_consistent(m);
  if (dt <= 0.0) throw ParameterError("to_discrete: dt must be positive");
  if (!m.continuous_time) {
    if (m.dt > 0.0 && std::abs(m.dt - dt) > 1e-12 * dt) {
      throw ModeError("to_discrete: model already discrete at a different dt");
    }
    StateSpaceModel out = m;
    out.dt = dt;
    return out;
  }
  const Eigen::Index n = m.A.rows();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = m.A;
  aug.topRightCorner(n, 1) = m.B;
  const Eigen::MatrixXd e = (aug * dt).exp();
  StateSpaceModel out;
  out.A = e.topLeftCorner(n, n);
  out.B = e.topRightCorner(n, 1);
  out.C = m.C;
  out.D = m.D;
  out.continuous_time = false;
  out.dt = dt;
  return out;
}

StateSpaceModel to_continuous(const StateSpaceModel& m) {
  require_consistent(m);
  if (m.continuous_time) return m;
  if (m.dt <= 0.0) {
    throw ModeError("to_continuous: discrete model has no sample time");
  }
  const Eigen::Index n = m.A.rows();
  const Eigen::VectorXcd eigs = m.A.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto lambda = eigs(i);
    if (lambda.real() <= 0.0 &&
        std::abs(lambda.imag()) <= 1e-12 * std::max(1.0, std::abs(lambda))) {
      throw ParameterError(
          "to_continuous: eigenvalue on the negative real axis, principal "
          "logarithm undefined");
    }
  }
  // exp([[Ac,Bc],[0,0]] dt) = [[Ad,Bd],[0,I]], so the principal log of the
  // augmented discrete block recovers Ac dt and Bc dt together.
  Eigen::MatrixXd aug = Eigen::MatrixXd::Identity(n + 1, n + 1);
  aug.topLeftCorner(n, n) = m.A;
  aug.topRightCorner(n, 1) = m.B;
  const Eigen::MatrixXd l = aug.log();
  StateSpaceModel out;
  out.A = l.topLeftCorner(n, n) / m.dt;
  out.B = l.topRightCorner(n, 1) / m.dt;
  out.C = m.C;
  out.D = m.D;
  out.continuous_time = true;
  out.dt = 0.0;
  return out;
}

bool is_stable(const StateSpaceModel& m) {
  require_consistent(m);
  if (m.order() == 0) return true;
  const Eigen::VectorXcd eigs = m.A.eigenvalues();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (m.continuous_time) {
      if (eigs(i).real() >= 0.0) return false;
    } else {
      if (std::abs(eigs(i)) >= 1.0) return false;
    }
  }
  return true;
}

signals::TimeSeries simulate(const StateSpaceModel& m,
                             const signals::TimeSeries& u,
                             const Eigen::VectorXd& x0) {
  require_consistent(m);
  if (u.dt <= 0.0 || u.size() < 1) {
    throw DimensionError("simulate: invalid input series");
  }
  if (x0.size() != m.order()) {
    throw DimensionError("simulate: x0 length does not match model order");
  }
  const StateSpaceModel d = to_discrete(m, u.dt);
  signals::TimeSeries y;
  y.t0 = u.t0;
  y.dt = u.dt;
  y.values.resize(u.size());
  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    y.values[k] = (m.order() ? d.C.dot(x) : 0.0) + d.D * u.values[k];
    if (m.order() && k + 1 < u.size()) {
      x = d.A * x + d.B * u.values[k];
    }
  }
  return y;
}

MarkovSequence markov_from_model(const StateSpaceModel& m, int K) {
  require_consistent(m);
  if (m.continuous_time) {
    throw ModeError("markov_from_model: discretize the model first");
  }
  if (K < 0) throw ParameterError("markov_from_model: K must be >= 0");
  MarkovSequence seq;
  seq.h.resize(static_cast<std::size_t>(K) + 1);
  seq.h[0] = m.D;
  if (m.order() == 0) {
    for (int k = 1; k <= K; ++k) seq.h[static_cast<std::size_t>(k)] = 0.0;
    return seq;
  }
  Eigen::VectorXd v = m.B;
  for (int k = 1; k <= K; ++k) {
    seq.h[static_cast<std::size_t>(k)] = m.C.dot(v);
    v = m.A * v;
  }
  return seq;
}

MarkovEstimate markov_from_data(const signals::TimeSeries& u,
                                const signals::TimeSeries& y, int K) {
  if (K < 1) throw ParameterError("markov_from_data: K must be >= 1");
  if (u.size() != y.size()) {
    throw DimensionError("markov_from_data: input/output lengths differ");
  }
  if (std::abs(u.dt - y.dt) > 1e-9 * u.dt) {
    throw DimensionError("markov_from_data: input/output sampling differs");
  }
  const auto n = static_cast<Eigen::Index>(u.size());
  if (n < static_cast<Eigen::Index>(10) * K) {
    throw DimensionError("markov_from_data: need at least 10 K samples");
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, K + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j <= K && j <= k; ++j) {
      T(k, j) = u.values[static_cast<std::size_t>(k - j)];
    }
  }
  Eigen::Map<const Eigen::VectorXd> rhs(y.values.data(), n);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double cond = smin > 0.0 ? smax / smin :
      std::numeric_limits<double>::infinity();
  if (!(smin > smax * 1e-10)) {
    throw IllConditioningError(
        "markov_from_data: rank-deficient regressor (condition number " +
            std::to_string(cond) + ")",
        cond);
  }
  const Eigen::VectorXd hvec = svd.solve(rhs);
  MarkovEstimate est;
  est.markov.h.assign(hvec.data(), hvec.data() + hvec.size());
  est.residual_norm = (T * hvec - rhs).norm();
  est.condition_number = cond;
  return est;
}

namespace {

HankelMatrix build_hankel_offset(const MarkovSequence& h, int rows, int cols,
                                 int offset) {
  if (rows < 1 || cols < 1) {
    throw ParameterError("build_hankel: rows and cols must be positive");
  }
  const int K = static_cast<int>(h.h.size()) - 1;
  if (rows + cols > K) {
    throw DimensionError("build_hankel: need rows + cols <= K");
  }
  HankelMatrix out;
  out.H.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out.H(i, j) = h.h[static_cast<std::size_t>(i + j + offset)];
    }
  }
  return out;
}

}  // namespace

HankelMatrix build_hankel(const MarkovSequence& h, int rows, int cols) {
  return build_hankel_offset(h, rows, cols, 1);
}

HankelMatrix build_hankel_shifted(const MarkovSequence& h, int rows, int cols) {
  return build_hankel_offset(h, rows, cols, 2);
}

OrderSelection select_order(const HankelMatrix& H, double rel_threshold) {
  if (H.H.size() == 0) throw DimensionError("select_order: empty Hankel");
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw ParameterError("select_order: rel_threshold must lie in (0, 1)");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(H.H);
  OrderSelection sel;
  sel.singular_values = svd.singularValues();
  const double s1 = sel.singular_values(0);
  if (s1 == 0.0) {
    sel.order = 0;
    return sel;
  }
  for (Eigen::Index i = 0; i < sel.singular_values.size(); ++i) {
    if (sel.singular_values(i) >= rel_threshold * s1) ++sel.order;
  }
  return sel;
}

StateSpaceModel era_realize(const HankelMatrix& H, const HankelMatrix& H_shift,
                            int n, double dt, double h0) {
  if (H.H.rows() != H_shift.H.rows() || H.H.cols() != H_shift.H.cols()) {
    throw DimensionError("era_realize: Hankel pair dimensions differ");
  }
  if (n < 0 || n > std::min(H.H.rows(), H.H.cols())) {
    throw ParameterError("era_realize: order out of range");
  }
  StateSpaceModel m;
  m.continuous_time = false;
  m.dt = dt;
  m.D = h0;
  if (n == 0) {
    m.A.resize(0, 0);
    m.B.resize(0);
    m.C.resize(0);
    return m;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(H.H,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(n - 1) < 1e-12 * s(0)) {
    throw ParameterError("era_realize: requested order exceeds numerical rank");
  }
  const Eigen::MatrixXd U = svd.matrixU().leftCols(n);
  const Eigen::MatrixXd V = svd.matrixV().leftCols(n);
  const Eigen::VectorXd sq = s.head(n).array().sqrt();
  const Eigen::VectorXd isq = sq.array().inverse();
  m.A = isq.asDiagonal() * (U.transpose() * H_shift.H * V) * isq.asDiagonal();
  m.B = sq.asDiagonal() * V.row(0).transpose();
  m.C = U.row(0) * sq.asDiagonal();
  return m;
}

}  // namespace viv::ssmodel
