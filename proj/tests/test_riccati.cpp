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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "swarmplane/riccati.hpp"

using namespace swarmplane;

TEST_CASE("scalar CARE against the closed form") {
  // a p^2 ... for xdot = a x + b u:  2 a p - b^2 p^2 / r + q = 0.
  const double a = -1.0, b = 2.0, q = 3.0, r = 0.5;
  Eigen::MatrixXd A(1, 1), B(1, 1), Q(1, 1), R(1, 1);
  A << a;
  B << b;
  Q << q;
  R << r;
  const double g = b * b / r;
  const double p_exact = (a + std::sqrt(a * a + g * q)) / g;
  auto P = solve_care(A, B, Q, R);
  CHECK(P(0, 0) == doctest::Approx(p_exact).epsilon(1e-12));
}

TEST_CASE("double integrator CARE closed form") {
  // A=[[0,1],[0,0]], B=[0,1], Q=I, R=1: P=[[sqrt(3),1],[1,sqrt(3)]].
  Eigen::MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << 0, 1, 0, 0;
  B << 0, 1;
  Q.setIdentity();
  R << 1;
  auto P = solve_care(A, B, Q, R);
  CHECK(P(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(P(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(P(1, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("random stabilizable systems: residual and closed-loop stability") {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    Eigen::MatrixXd A(n, n), B(n, 1);
    for (int i = 0; i < n; ++i) {
      B(i, 0) = gauss(rng);
      for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    }
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd P;
    try {
      P = solve_care(A, B, Q, R);
    } catch (const RiccatiFailure&) {
      continue;  // random system may be unstabilizable
    }
    Eigen::MatrixXd resid = A.transpose() * P + P * A -
                            P * B * R.inverse() * B.transpose() * P + Q;
    CHECK(resid.norm() < 1e-10);
    Eigen::MatrixXd K = R.inverse() * B.transpose() * P;
    Eigen::MatrixXd Acl = A - B * K;
    CHECK(Acl.eigenvalues().real().maxCoeff() < 0.0);
    // P is symmetric positive definite.
    CHECK((P - P.transpose()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("uncontrollable unstable system fails") {
  Eigen::MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << 1, 0, 0, 1;
  B << 0, 0;  // no control authority at all
  Q.setIdentity();
  R << 1;
  CHECK_THROWS_AS(solve_care(A, B, Q, R), RiccatiFailure);
}

TEST_CASE("dimension and definiteness checks") {
  Eigen::MatrixXd A(2, 2), B(3, 1), Q(2, 2), R(1, 1);
  A.setZero();
  B.setZero();
  Q.setIdentity();
  R << 1;
  CHECK_THROWS_AS(solve_care(A, B, Q, R), RiccatiFailure);
  Eigen::MatrixXd B2(2, 1);
  B2 << 0, 1;
  Eigen::MatrixXd Rbad(1, 1);
  Rbad << -1;
  CHECK_THROWS_AS(solve_care(A, B2, Q, Rbad), RiccatiFailure);
}

TEST_CASE("tilt-regulation design: frozen gains for both damping conventions") {
  PhysicalParams phys;
  ManifoldSpec manifold;
  Eigen::Matrix2d Q;
  Q << 10.0, 0.0, 0.0, 1.0;
  auto physical = lqr_design(phys, manifold, Q, 1.0, DampingConvention::Physical);
  CHECK(physical.k1 == doctest::Approx(3.1622776601683795).epsilon(1e-9));
  CHECK(physical.k2 == doctest::Approx(1.3065974).epsilon(1e-6));
  auto reversed = lqr_design(phys, manifold, Q, 1.0, DampingConvention::Reversed);
  CHECK(reversed.k1 == doctest::Approx(3.1622776601683795).epsilon(1e-9));
  CHECK(reversed.k2 == doctest::Approx(3.3065974).epsilon(1e-6));
}

TEST_CASE("design rejects non-positive R") {
  PhysicalParams phys;
  ManifoldSpec manifold;
  CHECK_THROWS_AS(lqr_design(phys, manifold, Eigen::Matrix2d::Identity(), 0.0),
                  RiccatiFailure);
}
