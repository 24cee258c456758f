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
#include <algorithm>
#include <random>

#include "swarmplane/control.hpp"

using namespace swarmplane;

TEST_CASE("tilt regulation at the origin") {
  PDGains gains;
  ManifoldSpec manifold;
  auto d = pd_parent_control({0.0, 0.0}, gains, manifold, 9.81);
  CHECK(d.tau_sd == 0.0);
  CHECK(d.M1 == 0.0);
  CHECK(d.Js == doctest::Approx(0.025).epsilon(1e-14));
}

TEST_CASE("tilt regulation away from the origin") {
  PDGains gains{3.1623, 3.2859};
  ManifoldSpec manifold;
  auto d = pd_parent_control({0.1, 0.0}, gains, manifold, 9.81);
  CHECK(d.tau_sd == doctest::Approx(0.31623).epsilon(1e-12));
  CHECK(d.Js == doctest::Approx(0.025 + 0.0125 * 0.31623 * 0.31623).epsilon(1e-12));
  CHECK(d.M1 == doctest::Approx(0.31623 / 9.81).epsilon(1e-12));
}

TEST_CASE("torque saturation pins the inertia target and derivatives") {
  PDGains gains{3.1623, 3.2859};
  ManifoldSpec manifold;
  auto d = pd_parent_control({10.0, 10.0}, gains, manifold, 9.81, 1.0);
  CHECK(d.tau_sd == 5.0);
  CHECK(d.Js == doctest::Approx(0.3375).epsilon(1e-14));
  CHECK(d.M1_dot == 0.0);
  CHECK(d.Js_dot == 0.0);
}

TEST_CASE("emitted desired states lie on the manifold") {
  PDGains gains{3.1623, 3.2859};
  ManifoldSpec manifold;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    auto d = pd_parent_control({ang(rng), ang(rng)}, gains, manifold, 9.81);
    CHECK(std::abs(d.tau_sd) <= manifold.tau_max);
    CHECK(d.Js == doctest::Approx(manifold.j(d.tau_sd)).epsilon(1e-12));
  }
}

TEST_CASE("regressor vanishes at rest") {
  TrajectorySpec traj{0.0, 0.0};
  ARISEGains g;
  auto r = regressor(traj, g, 1.0);
  CHECK(r.Yd.norm() == 0.0);
  CHECK(r.Yd_dot.norm() == 0.0);
  CHECK(r.Yd_ddot.norm() == 0.0);
}

TEST_CASE("regressor derivatives match finite differences") {
  TrajectorySpec traj{0.7, 0.015 * M_PI};
  ARISEGains g;
  const double h = 1e-6;
  for (double t : {0.3, 5.0, 40.0, 90.0}) {
    auto r = regressor(traj, g, t);
    auto rp = regressor(traj, g, t + h);
    auto rm = regressor(traj, g, t - h);
    CHECK((r.Yd_dot - (rp.Yd - rm.Yd) / (2 * h)).norm() < 1e-4);
    CHECK((r.Yd_ddot - (rp.Yd_dot - rm.Yd_dot) / (2 * h)).norm() < 1e-4);
  }
}

TEST_CASE("adaptive law starts at pure feed-forward") {
  TrajectorySpec traj{0.7, 0.015 * M_PI};
  ARISEGains g;
  ManifoldSpec manifold;
  // Zero initial error: parent matches the reference exactly at t=0.
  ParentState x{traj.theta_d(0.0), traj.d1(0.0)};
  ARISEState st;
  arise_initialize(st, x, traj, g, 0.0);
  CHECK(st.e2_t0 == 0.0);
  auto ev = arise_parent_control(x, traj, st, g, manifold, 9.81, 0.0, 0.0);
  CHECK(ev.e1 == 0.0);
  CHECK(ev.e2 == 0.0);
  CHECK((ev.lambda_hat - g.lambda_hat0).norm() == 0.0);
  // tau_sd = -sec(theta) Yd . lambda_hat0 with zero integral states.
  const auto r = regressor(traj, g, 0.0);
  const double expected = -r.Yd.dot(g.lambda_hat0) / std::cos(x.theta);
  CHECK(ev.a_d.tau_sd == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("secant domain guard") {
  TrajectorySpec traj{0.7, 0.015 * M_PI};
  ARISEGains g;
  ManifoldSpec manifold;
  ARISEState st;
  arise_initialize(st, {0.0, 0.0}, traj, g, 0.0);
  CHECK_THROWS_AS(
      arise_parent_control({M_PI / 2.0, 0.0}, traj, st, g, manifold, 9.81,
                           0.0, 0.0),
      SecantDomain);
}

TEST_CASE("integral-form estimate equals the rate-form estimate") {
  // Integrate mu2 with small steps along a synthetic e2(t) profile and
  // compare lambda_hat against directly integrating
  // d/dt lambda_hat = Gamma Yd_dot (e2_dot + alpha2 e2).
  TrajectorySpec traj{0.7, 0.015 * M_PI};
  ARISEGains g;
  const auto e2_of = [](double t) { return 0.01 * std::sin(0.3 * t); };
  const auto e2dot_of = [](double t) { return 0.003 * std::cos(0.3 * t); };
  const double dt = 1e-4;
  Eigen::Vector4d mu2 = Eigen::Vector4d::Zero();
  Eigen::Vector4d lh_rate = g.lambda_hat0;
  const Eigen::Vector4d yd_dot_t0_e2 =
      regressor(traj, g, 0.0).Yd_dot * e2_of(0.0);
  double t = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto mid = regressor(traj, g, t + 0.5 * dt);
    const double e2m = e2_of(t + 0.5 * dt);
    mu2 += dt * (mid.Yd_ddot * e2m - g.alpha2 * mid.Yd_dot * e2m);
    lh_rate += dt * g.Gamma * mid.Yd_dot *
               (e2dot_of(t + 0.5 * dt) + g.alpha2 * e2m);
    t += dt;
  }
  const auto r = regressor(traj, g, t);
  const Eigen::Vector4d lh_integral =
      g.lambda_hat0 + g.Gamma * (r.Yd_dot * e2_of(t) - yd_dot_t0_e2 - mu2);
  CHECK((lh_integral - lh_rate).norm() < 1e-6);
}

namespace {

SwarmState symmetric_pair() {
  SwarmState s;
  s.push_back({MemberKind::SingleIntegrator, 1.0, 0.0, 1.0, 0.0});
  s.push_back({MemberKind::SingleIntegrator, 1.0, 0.0, -1.0, 0.0});
  return s;
}

}  // namespace

TEST_CASE("velocity law on the symmetric pair") {
  auto s = symmetric_pair();
  auto a = abstract_map(s);
  auto aux = aux_state(s);
  DesiredAbstract a_d;
  a_d.M1 = a.M1;
  a_d.Js = a.Js;
  a_d.M1_dot = 1.0;  // K e_a + a_d_dot = (1, 0)
  a_d.Js_dot = 0.0;
  Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
  CHECK(si_member_control(s[0], a, aux, a_d, K, 2.5) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(si_member_control(s[1], a, aux, a_d, K, 2.5) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("converged swarm commands zero") {
  auto s = symmetric_pair();
  auto a = abstract_map(s);
  auto aux = aux_state(s);
  DesiredAbstract a_d;
  a_d.M1 = a.M1;
  a_d.Js = a.Js;
  Eigen::Matrix2d K = 10.0 * Eigen::Matrix2d::Identity();
  CHECK(si_member_control(s[0], a, aux, a_d, K, 2.5) == 0.0);
  SwarmState sd = s;
  for (auto& m : sd) m.kind = MemberKind::DoubleIntegrator;
  for (auto& m : sd) m.damping = 1.0;
  auto auxd = aux_state_with_Ca(sd, 1.0, 2.5);
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  CHECK(di_member_control(sd[0], a, auxd, a_d, zero, zero, K, K, 1.0, 2.5) ==
        0.0);
}

TEST_CASE("C_a matches the generic matrix product") {
  // Symmetric pair, m = c = 1, k_sd = 1: Phi M^-1 (C + I) Phi^+ = 2 I.
  SwarmState s;
  s.push_back({MemberKind::DoubleIntegrator, 1.0, 1.0, 1.0, 0.0});
  s.push_back({MemberKind::DoubleIntegrator, 1.0, 1.0, -1.0, 0.0});
  auto aux = aux_state_with_Ca(s, 1.0, 2.5);
  CHECK(aux.has_Ca);
  CHECK(aux.Ca11 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(aux.Ca12 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(aux.Ca21 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(aux.Ca22 == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> mass(0.25, 0.75);
  std::uniform_real_distribution<double> damp(0.5, 1.5);
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    SwarmState sw;
    const int n = 2 + trial % 5;
    for (int i = 0; i < n; ++i)
      sw.push_back({MemberKind::DoubleIntegrator, mass(rng), damp(rng),
                    pos(rng), 0.0});
    auto auxw = aux_state(sw);
    if (auxw.S3 <= s3_epsilon(auxw, 1.0)) continue;
    const double k_sd = 1.0;
    auto with_ca = aux_state_with_Ca(sw, k_sd, 1.0);
    Eigen::MatrixXd phi = abstract_jacobian(sw);
    Eigen::MatrixXd D(n, n);
    D.setZero();
    for (int i = 0; i < n; ++i)
      D(i, i) = (sw[i].damping + k_sd) / sw[i].mass;
    Eigen::MatrixXd pinv =
        Eigen::MatrixXd(phi).completeOrthogonalDecomposition().pseudoInverse();
    Eigen::Matrix2d expected = phi * D * pinv;
    Eigen::Matrix2d got;
    got << with_ca.Ca11, with_ca.Ca12, with_ca.Ca21, with_ca.Ca22;
    CHECK((got - expected).norm() < 1e-9);
  }
}

TEST_CASE("member law needs only own state and shared summaries") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> mass(0.25, 0.75);
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  SwarmState s;
  for (int i = 0; i < 6; ++i)
    s.push_back({MemberKind::SingleIntegrator, mass(rng), 0.0, pos(rng), 0.0});
  auto a = abstract_map(s);
  auto aux = aux_state(s);
  DesiredAbstract a_d;
  a_d.M1 = 0.02;
  a_d.Js = 0.03;
  Eigen::Matrix2d K = 10.0 * Eigen::Matrix2d::Identity();
  const double u0 = si_member_control(s[0], a, aux, a_d, K, 1.0);
  // Permute the other members; shared summaries are unchanged, so must u0 be.
  SwarmState permuted{s[0], s[3], s[5], s[1], s[4], s[2]};
  auto a2 = abstract_map(permuted);
  auto aux2 = aux_state(permuted);
  CHECK(si_member_control(permuted[0], a2, aux2, a_d, K, 1.0) ==
        doctest::Approx(u0).epsilon(1e-14));
}

TEST_CASE("heterogeneous dispatch matches the pure paths") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> mass(0.25, 0.75);
  std::uniform_real_distribution<double> damp(0.5, 1.5);
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  SwarmGains gains;
  for (int all_di = 0; all_di <= 1; ++all_di) {
    SwarmState s;
    for (int i = 0; i < 4; ++i) {
      SwarmMember m;
      m.kind = all_di ? MemberKind::DoubleIntegrator
                      : MemberKind::SingleIntegrator;
      m.mass = mass(rng);
      m.damping = all_di ? damp(rng) : 0.0;
      m.position = pos(rng);
      m.velocity = all_di ? pos(rng) : 0.0;
      s.push_back(m);
    }
    auto a = abstract_map(s);
    auto aux = all_di ? aux_state_with_Ca(s, gains.k_sd, 1.0) : aux_state(s);
    DesiredAbstract a_d;
    a_d.M1 = 0.01;
    a_d.Js = 0.03;
    a_d.M1_dot = 0.001;
    auto u = heterogeneous_control(s, a, aux, a_d, gains, 1.0);
    const Eigen::Vector2d a_dot = abstract_rate(s);
    const Eigen::Vector2d pp = jacobian_rate_times_velocity(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double direct =
          all_di ? di_member_control(s[i], a, aux, a_d, a_dot, pp, gains.Kp,
                                     gains.Kd, gains.k_sd, 1.0)
                 : si_member_control(s[i], a, aux, a_d, gains.K, 1.0);
      CHECK(u[i] == doctest::Approx(direct).epsilon(1e-14));
    }
  }
}

TEST_CASE("gain validation") {
  ARISEGains g;
  CHECK_NOTHROW(g.validate());
  g.beta = 0.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = ARISEGains{};
  g.Gamma(0, 0) = -1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}
