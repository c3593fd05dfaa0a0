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

#include "viv/beam.hpp"

#include <cmath>

#include "viv/errors.hpp"

namespace viv::beam {

Eigen::Matrix3d skew(const Eigen::Vector3d& phi) {
  Eigen::Matrix3d s;
  s << 0.0, -phi.z(), phi.y(),
       phi.z(), 0.0, -phi.x(),
       -phi.y(), phi.x(), 0.0;
  return s;
}

RotationMatrix rot_exp(const Eigen::Vector3d& phi) {
  if (!phi.allFinite()) throw NumericError("rot_exp: non-finite rotation vector");
  const double theta = phi.norm();
  double c1, c2;  // sin(t)/t and (1-cos(t))/t^2
  if (theta < 1e-6) {
    const double t2 = theta * theta;
    c1 = 1.0 - t2 / 6.0;
    c2 = 0.5 - t2 / 24.0;
  } else {
    c1 = std::sin(theta) / theta;
    c2 = (1.0 - std::cos(theta)) / (theta * theta);
  }
  const Eigen::Matrix3d s = skew(phi);
  return Eigen::Matrix3d::Identity() + c1 * s + c2 * (s * s);
}

RotationMatrix orthonormalize(const RotationMatrix& R) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0.0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    out = u * svd.matrixV().transpose();
  }
  return out;
}

Eigen::Vector3d material_point(const ReferenceFrame& frame,
                               const Eigen::Vector3d& u,
                               const RotationMatrix& Lambda) {
  return frame.d_o + u + Lambda * frame.R_o;
}

BeamNodeState update_config(const BeamNodeState& node,
                            const Eigen::Vector3d& du,
                            const Eigen::Vector3d& dphi) {
  BeamNodeState out = node;
  out.d += du;
  out.Lambda = rot_exp(dphi) * node.Lambda;
  out.updates_since_renorm = node.updates_since_renorm + 1;
  if (out.updates_since_renorm >= 100) {
    out.Lambda = orthonormalize(out.Lambda);
    out.updates_since_renorm = 0;
  }
  return out;
}

namespace {

void validate(const BeamModel& m) {
  if (m.E <= 0.0 || m.A <= 0.0 || m.I <= 0.0 || m.rho <= 0.0 ||
      m.length <= 0.0) {
    throw ParameterError("beam: physical constants must be positive");
  }
  if (m.tension < 0.0) throw ParameterError("beam: tension must be >= 0");
  if (m.n_elements < 1 ||
      (m.boundary == Boundary::kPinnedPinned && m.n_elements < 2)) {
    throw ParameterError("beam: too few elements");
  }
}

// Cubic Hermite element matrices for transverse deflection on (w, theta)
// DOFs: consistent mass, bending stiffness, and the geometric stiffness of
// a constant axial tension.
void element_matrices(double EI, double T, double rhoA, double le,
                      Eigen::Matrix4d* Me, Eigen::Matrix4d* Ke) {
  const double l2 = le * le;
  Eigen::Matrix4d kb;
  kb << 12.0, 6.0 * le, -12.0, 6.0 * le,
        6.0 * le, 4.0 * l2, -6.0 * le, 2.0 * l2,
        -12.0, -6.0 * le, 12.0, -6.0 * le,
        6.0 * le, 2.0 * l2, -6.0 * le, 4.0 * l2;
  kb *= EI / (l2 * le);

  Eigen::Matrix4d kg;
  kg << 36.0, 3.0 * le, -36.0, 3.0 * le,
        3.0 * le, 4.0 * l2, -3.0 * le, -l2,
        -36.0, -3.0 * le, 36.0, -3.0 * le,
        3.0 * le, -l2, -3.0 * le, 4.0 * l2;
  kg *= T / (30.0 * le);

  Eigen::Matrix4d me;
  me << 156.0, 22.0 * le, 54.0, -13.0 * le,
        22.0 * le, 4.0 * l2, 13.0 * le, -3.0 * l2,
        54.0, 13.0 * le, 156.0, -22.0 * le,
        -13.0 * le, -3.0 * l2, -22.0 * le, 4.0 * l2;
  me *= rhoA * le / 420.0;

  *Ke = kb + kg;
  *Me = me;
}

}  // namespace

AssembledBeam assemble(const BeamModel& model) {
  validate(model);
  const int ne = model.n_elements;
  const int nn = ne + 1;
  const double le = model.length / ne;
  const double EI = model.E * model.I;
  const double rhoA = model.rho * model.A;

  Eigen::Matrix4d Me, Ke;
  element_matrices(EI, model.tension, rhoA, le, &Me, &Ke);

  const int ndof = 2 * nn;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ndof, ndof);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ndof, ndof);
  for (int e = 0; e < ne; ++e) {
    const int base = 2 * e;
    M.block<4, 4>(base, base) += Me;
    K.block<4, 4>(base, base) += Ke;
  }

  std::vector<bool> fixed(ndof, false);
  switch (model.boundary) {
    case Boundary::kPinnedPinned:
      fixed[0] = true;             // w at first node
      fixed[2 * (nn - 1)] = true;  // w at last node
      break;
    case Boundary::kClampedFree:
      fixed[0] = true;
      fixed[1] = true;
      break;
    case Boundary::kFree:
      break;
  }

  AssembledBeam out;
  out.element_length = le;
  out.w_dof.assign(nn, -1);
  out.theta_dof.assign(nn, -1);
  std::vector<int> keep;
  keep.reserve(ndof);
  for (int g = 0; g < ndof; ++g) {
    if (fixed[g]) continue;
    const int node = g / 2;
    if (g % 2 == 0) {
      out.w_dof[node] = static_cast<int>(keep.size());
    } else {
      out.theta_dof[node] = static_cast<int>(keep.size());
    }
    keep.push_back(g);
  }
  const auto nfree = static_cast<Eigen::Index>(keep.size());
  out.M.resize(nfree, nfree);
  out.K.resize(nfree, nfree);
  for (Eigen::Index i = 0; i < nfree; ++i) {
    for (Eigen::Index j = 0; j < nfree; ++j) {
      out.M(i, j) = M(keep[static_cast<std::size_t>(i)],
                      keep[static_cast<std::size_t>(j)]);
      out.K(i, j) = K(keep[static_cast<std::size_t>(i)],
                      keep[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::vector<double> natural_frequencies(const BeamModel& model, int count) {
  const AssembledBeam ab = assemble(model);
  if (count < 1 || count > ab.M.rows()) {
    throw ParameterError("natural_frequencies: count out of range");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(ab.K, ab.M);
  if (eig.info() != Eigen::Success) {
    throw NumericError("natural_frequencies: eigenvalue solve failed");
  }
  const Eigen::VectorXd lam = eig.eigenvalues();
  const double floor = -1e-8 * std::abs(lam(lam.size() - 1));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (lam(i) < floor) {
      throw NumericError("natural_frequencies: indefinite system matrices");
    }
    out.push_back(std::sqrt(std::max(lam(i), 0.0)) / (2.0 * M_PI));
  }
  return out;
}

Eigen::VectorXd consistent_acceleration(const Eigen::MatrixXd& M,
                                        const Eigen::MatrixXd& C,
                                        const Eigen::MatrixXd& K,
                                        const Eigen::VectorXd& F,
                                        const Eigen::VectorXd& d,
                                        const Eigen::VectorXd& v) {
  Eigen::VectorXd rhs = F - K * d;
  if (C.size() > 0) rhs -= C * v;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success ||
      (M.size() > 0 && ldlt.vectorD().cwiseAbs().minCoeff() < 1e-300)) {
    throw ParameterError("consistent_acceleration: singular mass matrix");
  }
  return ldlt.solve(rhs);
}

namespace {

void check_newmark_args(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K,
                        double dt, double beta, double gamma) {
  if (dt <= 0.0) throw ParameterError("newmark: dt must be positive");
  if (gamma < 0.5 || 2.0 * beta < gamma) {
    throw ParameterError("newmark: need 2*beta >= gamma >= 1/2 for stability");
  }
  if (M.rows() != M.cols() || K.rows() != K.cols() || M.rows() != K.rows()) {
    throw DimensionError("newmark: matrix sizes disagree");
  }
}

}  // namespace

NewmarkState newmark_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                          const Eigen::MatrixXd& K, const Eigen::VectorXd& F,
                          const NewmarkState& state, double dt, double beta,
                          double gamma) {
  NewmarkSolver solver(M, C, K, dt, beta, gamma);
  return solver.step(state, F);
}

NewmarkSolver::NewmarkSolver(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                             const Eigen::MatrixXd& K, double dt, double beta,
                             double gamma)
    : M_(M), C_(C), K_(K), dt_(dt), beta_(beta), gamma_(gamma) {
  check_newmark_args(M, K, dt, beta, gamma);
  if (C_.size() == 0) C_ = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  if (C_.rows() != M.rows() || C_.cols() != M.cols()) {
    throw DimensionError("newmark: damping matrix size disagrees");
  }
  const Eigen::MatrixXd S = M_ + gamma_ * dt_ * C_ + beta_ * dt_ * dt_ * K_;
  effective_.compute(S);
  if (effective_.info() != Eigen::Success ||
      (effective_.vectorD().array().abs() < 1e-300).any()) {
    throw ParameterError("newmark: singular effective stiffness");
  }
}

NewmarkState NewmarkSolver::step(const NewmarkState& state,
                                 const Eigen::VectorXd& F) const {
  const Eigen::Index n = M_.rows();
  if (state.d.size() != n || state.v.size() != n || state.a.size() != n ||
      F.size() != n) {
    throw DimensionError("newmark: state size disagrees with matrices");
  }
  // Predictors holding the old acceleration, then solve for the new one.
  const Eigen::VectorXd d_pred =
      state.d + dt_ * state.v + dt_ * dt_ * (0.5 - beta_) * state.a;
  const Eigen::VectorXd v_pred = state.v + dt_ * (1.0 - gamma_) * state.a;
  const Eigen::VectorXd rhs = F - C_ * v_pred - K_ * d_pred;

  NewmarkState out;
  out.a = effective_.solve(rhs);
  out.v = v_pred + gamma_ * dt_ * out.a;
  out.d = d_pred + beta_ * dt_ * dt_ * out.a;
  return out;
}

}  // namespace viv::beam
