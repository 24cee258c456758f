// Copyright 2026 The Swarmplane Authors
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

#ifndef SWARMPLANE_RICCATI_HPP_
#define SWARMPLANE_RICCATI_HPP_

#include <Eigen/Dense>
#include <cmath>

#include "swarmplane/manifold.hpp"
#include "swarmplane/types.hpp"

namespace swarmplane {

/// Solves the continuous-time algebraic Riccati equation
///   A' P + P A - P B R^-1 B' P + Q = 0
/// by the matrix sign function of the Hamiltonian with determinant scaling.
/// Throws RiccatiFailure if the iteration stalls or the residual stays
/// above 1e-10.
inline Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q,
                                  const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols())
    throw RiccatiFailure("solve_care: inconsistent dimensions");

  Eigen::LLT<Eigen::MatrixXd> R_llt(R);
  if (R_llt.info() != Eigen::Success)
    throw RiccatiFailure("solve_care: R is not positive definite");
  const Eigen::MatrixXd G = B * R_llt.solve(B.transpose());

  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -G, -Q, -A.transpose();

  // Sign iteration: Z <- (Z/c + c Z^-1) / 2 with c = |det Z|^(1/2n).
  Eigen::MatrixXd Z = H;
  const int max_iter = 100;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Z);
    if (!lu.isInvertible())
      throw RiccatiFailure("solve_care: Hamiltonian sign iterate is singular");
    const double c =
        std::pow(std::abs(lu.determinant()), 1.0 / (2.0 * static_cast<double>(n)));
    const Eigen::MatrixXd Z_next = 0.5 * (Z / c + c * lu.inverse());
    const double delta = (Z_next - Z).norm();
    Z = Z_next;
    if (delta <= 1e-14 * Z.norm()) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw RiccatiFailure("solve_care: sign iteration did not converge");

  // sign(H) = Z; the stabilizing P satisfies W11 P = -W21 with W = Z + I
  // restricted to the blocks below.
  const Eigen::MatrixXd W11 = Z.topLeftCorner(n, n) + Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd W12 = Z.topRightCorner(n, n);
  const Eigen::MatrixXd W21 = Z.bottomLeftCorner(n, n);
  const Eigen::MatrixXd W22 =
      Z.bottomRightCorner(n, n) + Eigen::MatrixXd::Identity(n, n);

  // Stack [W11; W21] P = -[W12; W22] style solve via least squares on
  // [W12; W22 ] ... use the standard relation P = -[W12; W22]^+ [W11; W21].
  Eigen::MatrixXd M(2 * n, n), N(2 * n, n);
  M << W12, W22;
  N << W11, W21;
  const Eigen::MatrixXd P =
      -M.colPivHouseholderQr().solve(N);

  const Eigen::MatrixXd residual =
      A.transpose() * P + P * A - P * G * P + Q;
  if (!(residual.norm() < 1e-10))
    throw RiccatiFailure("solve_care: residual norm above tolerance");
  return 0.5 * (P + P.transpose());
}

/// LQR gain K = R^-1 B' P for the CARE solution P.
inline Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd P = solve_care(A, B, Q, R);
  return R.llt().solve(B.transpose() * P);
}

/// How the linear axle damping enters the design model.  Physical keeps the
/// stabilizing -gamma6 term; Reversed flips its sign, designing against a
/// model in which the damping opposes the controller.  The Reversed gains
/// are more conservative and match a common hand-tuned reference set.
enum class DampingConvention { Physical, Reversed };

struct LqrDesign {
  Eigen::Matrix2d P;
  double k1 = 0.0;  // gain on tilt error
  double k2 = 0.0;  // gain on tilt rate error
};

/// Designs the tilt-regulation gains about theta = 0 with the swarm held at
/// the bottom of the inertia manifold.  The input channel is the gravity
/// torque produced by the swarm, so B = [0, 1/(J + j(0))].
inline LqrDesign lqr_design(const PhysicalParams& phys,
                            const ManifoldSpec& manifold,
                            const Eigen::Matrix2d& Q, double R,
                            DampingConvention convention =
                                DampingConvention::Physical) {
  phys.validate();
  manifold.validate();
  if (R <= 0.0) throw RiccatiFailure("lqr_design: R must be > 0");
  const double Jt = phys.J + manifold.j_min();
  const double damping = phys.gamma6 / Jt;
  Eigen::Matrix2d A;
  A << 0.0, 1.0, 0.0,
      (convention == DampingConvention::Physical ? -damping : damping);
  Eigen::Vector2d B(0.0, 1.0 / Jt);
  Eigen::MatrixXd Rm(1, 1);
  Rm(0, 0) = R;
  const Eigen::MatrixXd P = solve_care(A, B, Q, Rm);
  const Eigen::MatrixXd K = Rm.llt().solve(B.transpose() * P);
  LqrDesign out;
  out.P = P;
  out.k1 = K(0, 0);
  out.k2 = K(0, 1);
  return out;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_RICCATI_HPP_
