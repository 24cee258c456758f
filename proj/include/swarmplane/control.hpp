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

#ifndef SWARMPLANE_CONTROL_HPP_
#define SWARMPLANE_CONTROL_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "swarmplane/abstraction.hpp"
#include "swarmplane/manifold.hpp"
#include "swarmplane/plant.hpp"
#include "swarmplane/types.hpp"

namespace swarmplane {

/// Tilt-regulation gain row: tau_sd = k1*theta + k2*omega (before the
/// saturation to +-tau_max).
struct PDGains {
  double k1 = 3.1623;
  double k2 = 3.2859;
};

/// Swarm-side gains.  K drives the velocity-controlled members; Kp, Kd and
/// the damping injection k_sd drive the force-controlled members.
struct SwarmGains {
  Eigen::Matrix2d K = 10.0 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d Kp = 10.0 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d Kd = 5.0 * Eigen::Matrix2d::Identity();
  double k_sd = 1.0;
};

/// Sinusoidal reference tilt theta_d(t) = amplitude * sin(omega t), with
/// analytic derivatives through fourth order (the adaptation law needs the
/// regressor's second time derivative).
struct TrajectorySpec {
  double amplitude = 0.0;  // rad
  double omega = 0.0;      // rad/s

  double theta_d(double t) const { return amplitude * std::sin(omega * t); }
  double d1(double t) const { return amplitude * omega * std::cos(omega * t); }
  double d2(double t) const {
    return -amplitude * omega * omega * std::sin(omega * t);
  }
  double d3(double t) const {
    return -amplitude * omega * omega * omega * std::cos(omega * t);
  }
  double d4(double t) const {
    return amplitude * omega * omega * omega * omega * std::sin(omega * t);
  }
  double period() const {
    return omega > 0.0 ? 2.0 * M_PI / omega
                       : std::numeric_limits<double>::infinity();
  }
};

/// Adaptive robust tracking gains.  lambda_hat estimates (J, gamma1,
/// gamma4, gamma6); gbar2/gbar3/gbar5 are the fixed estimates of the inner
/// friction slopes used in the regressor.
struct ARISEGains {
  double alpha1 = 1.0;
  double alpha2 = 2.0;
  double k_s = 1.0;
  double beta = 0.5;
  Eigen::Matrix4d Gamma =
      Eigen::Vector4d(10.0, 1.0, 1.0, 10.0).asDiagonal();
  double gbar2 = 1000.0;
  double gbar3 = 700.0;
  double gbar5 = 1000.0;
  Eigen::Vector4d lambda_hat0 = Eigen::Vector4d(0.4566, 0.009, 0.01, 0.9);
  double boundary_layer = 0.0;  // 0 means exact sign function

  void validate() const {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0) || !(k_s > 0.0) || !(beta > 0.0))
      throw ConfigError("ARISEGains: alpha1, alpha2, k_s, beta must be > 0");
    if (boundary_layer < 0.0)
      throw ConfigError("ARISEGains: boundary_layer must be >= 0");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Gamma);
    if ((Gamma - Gamma.transpose()).norm() > 1e-12 ||
        es.eigenvalues().minCoeff() <= 0.0)
      throw ConfigError("ARISEGains: Gamma must be symmetric positive definite");
  }
};

/// Integral and memory states of the adaptive robust controller.  mu1 and
/// mu2 are integrated alongside the plant; the t0 terms are cached at the
/// first evaluation so the estimate starts exactly at lambda_hat0.
struct ARISEState {
  double mu1 = 0.0;
  Eigen::Vector4d mu2 = Eigen::Vector4d::Zero();
  bool initialized = false;
  double e2_t0 = 0.0;
  Eigen::Vector4d Yd_dot_t0_e2 = Eigen::Vector4d::Zero();
};

/// Regressor row and its first two time derivatives along the desired
/// trajectory.
struct Regressor {
  Eigen::Vector4d Yd = Eigen::Vector4d::Zero();
  Eigen::Vector4d Yd_dot = Eigen::Vector4d::Zero();
  Eigen::Vector4d Yd_ddot = Eigen::Vector4d::Zero();
};

inline Regressor regressor(const TrajectorySpec& traj, const ARISEGains& g,
                           double t) {
  const double v = traj.d1(t);   // desired tilt rate
  const double a = traj.d2(t);   // desired tilt acceleration
  const double j = traj.d3(t);
  const double s = traj.d4(t);
  const auto f = [](double gain, double x) { return std::tanh(gain * x); };
  const auto fp = [](double gain, double x) {
    const double c = std::cosh(gain * x);
    return gain / (c * c);
  };
  const auto fpp = [&](double gain, double x) {
    const double th = std::tanh(gain * x);
    const double c = std::cosh(gain * x);
    return -2.0 * gain * gain * th / (c * c);
  };
  Regressor r;
  r.Yd << a, f(g.gbar2, v) - f(g.gbar3, v), f(g.gbar5, v), v;
  r.Yd_dot << j, (fp(g.gbar2, v) - fp(g.gbar3, v)) * a, fp(g.gbar5, v) * a, a;
  r.Yd_ddot << s,
      (fpp(g.gbar2, v) - fpp(g.gbar3, v)) * a * a +
          (fp(g.gbar2, v) - fp(g.gbar3, v)) * j,
      fpp(g.gbar5, v) * a * a + fp(g.gbar5, v) * j, j;
  return r;
}

/// Sign of e2, optionally smoothed by a linear boundary layer.
inline double robust_sign(double e2, double boundary_layer) {
  if (boundary_layer > 0.0) {
    const double s = e2 / boundary_layer;
    return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
  }
  return e2 > 0.0 ? 1.0 : (e2 < 0.0 ? -1.0 : 0.0);
}

/// Fills the desired abstract state from a (pre-clamp) torque command and
/// its rate.  The inertia target follows the manifold; derivatives vanish
/// while the torque command is saturated.
inline DesiredAbstract desired_from_torque(double tau_raw, double tau_dot_raw,
                                           const ManifoldSpec& manifold,
                                           double gravity) {
  DesiredAbstract d;
  d.tau_sd = manifold.clamp_tau(tau_raw);
  const bool saturated = std::abs(tau_raw) > manifold.tau_max;
  const double tau_dot = saturated ? 0.0 : tau_dot_raw;
  d.M1 = d.tau_sd / gravity;
  d.Js = manifold.j(d.tau_sd);
  d.M1_dot = tau_dot / gravity;
  d.Js_dot = manifold.dj_dtau(d.tau_sd) * tau_dot;
  return d;
}

/// Tilt-regulation command: tau_sd = k1 theta + k2 omega, clamped.
/// theta_ddot is the current (predicted) tilt acceleration used to
/// propagate the torque rate through the chain rule.
inline DesiredAbstract pd_parent_control(const ParentState& x,
                                         const PDGains& gains,
                                         const ManifoldSpec& manifold,
                                         double gravity,
                                         double theta_ddot = 0.0) {
  const double tau_raw = gains.k1 * x.theta + gains.k2 * x.omega;
  const double tau_dot = gains.k1 * x.omega + gains.k2 * theta_ddot;
  return desired_from_torque(tau_raw, tau_dot, manifold, gravity);
}

/// Instantaneous outputs of the adaptive robust tracking law.
struct AriseEval {
  DesiredAbstract a_d;
  double e1 = 0.0;
  double e2 = 0.0;
  double sgn_e2 = 0.0;
  Eigen::Vector4d lambda_hat = Eigen::Vector4d::Zero();
  double mu1_dot = 0.0;
  Eigen::Vector4d mu2_dot = Eigen::Vector4d::Zero();
};

/// Initializes the t0 memory terms on first use so the torque starts from
/// the pure feed-forward value and the estimate from lambda_hat0.
inline void arise_initialize(ARISEState& st, const ParentState& x,
                             const TrajectorySpec& traj, const ARISEGains& g,
                             double t0) {
  const double e1 = traj.theta_d(t0) - x.theta;
  const double e2 = (traj.d1(t0) - x.omega) + g.alpha1 * e1;
  st.e2_t0 = e2;
  st.Yd_dot_t0_e2 = regressor(traj, g, t0).Yd_dot * e2;
  st.mu1 = 0.0;
  st.mu2.setZero();
  st.initialized = true;
}

/// Evaluates the adaptive robust tracking controller at one instant.
/// The caller integrates mu1_dot and mu2_dot alongside the plant;
/// sgn_e2_frozen, when finite, pins the discontinuous term across one
/// integration step.  theta_ddot_pred propagates the torque rate.
inline AriseEval arise_parent_control(const ParentState& x,
                                      const TrajectorySpec& traj,
                                      const ARISEState& st,
                                      const ARISEGains& g,
                                      const ManifoldSpec& manifold,
                                      double gravity, double t,
                                      double theta_ddot_pred,
                                      double sgn_e2_frozen = std::nan("")) {
  if (std::abs(x.theta) >= M_PI / 2.0)
    throw SecantDomain("arise_parent_control: |theta| >= pi/2");
  if (!st.initialized)
    throw ConfigError("arise_parent_control: state not initialized");

  AriseEval out;
  out.e1 = traj.theta_d(t) - x.theta;
  const double e1_dot = traj.d1(t) - x.omega;
  out.e2 = e1_dot + g.alpha1 * out.e1;
  out.sgn_e2 = std::isnan(sgn_e2_frozen)
                   ? robust_sign(out.e2, g.boundary_layer)
                   : sgn_e2_frozen;

  const Regressor reg = regressor(traj, g, t);
  out.lambda_hat =
      g.lambda_hat0 +
      g.Gamma * (reg.Yd_dot * out.e2 - st.Yd_dot_t0_e2 - st.mu2);

  const double feedback =
      (g.k_s + 1.0) * (out.e2 - st.e2_t0) + st.mu1;
  const double F = reg.Yd.dot(out.lambda_hat) + feedback;
  const double sec = 1.0 / std::cos(x.theta);
  const double tau_raw = -sec * F;

  out.mu1_dot = (g.k_s + 1.0) * g.alpha2 * out.e2 + g.beta * out.sgn_e2;
  out.mu2_dot = reg.Yd_ddot * out.e2 - g.alpha2 * reg.Yd_dot * out.e2;

  // Torque rate by the chain rule, using the predicted tilt acceleration.
  const double e2_dot =
      (traj.d2(t) - theta_ddot_pred) + g.alpha1 * e1_dot;
  const Eigen::Vector4d lambda_hat_dot =
      g.Gamma * reg.Yd_dot * (e2_dot + g.alpha2 * out.e2);
  const double F_dot = reg.Yd_dot.dot(out.lambda_hat) +
                       reg.Yd.dot(lambda_hat_dot) +
                       (g.k_s + 1.0) * e2_dot + out.mu1_dot;
  const double tau_dot_raw =
      -sec * std::tan(x.theta) * x.omega * F - sec * F_dot;

  out.a_d = desired_from_torque(tau_raw, tau_dot_raw, manifold, gravity);
  return out;
}

/// Velocity command for one velocity-controlled member (its own row of the
/// pseudo-inverse applied to the abstract-error feedback).
inline double si_member_control(const SwarmMember& m, const AbstractState& a,
                                const AuxAbstractState& aux,
                                const DesiredAbstract& a_d,
                                const Eigen::Matrix2d& K, double L) {
  if (aux.S3 <= s3_epsilon(aux, L))
    throw SingularSwarm("si_member_control: S3 ~ 0");
  const Eigen::Vector2d e_a(a_d.M1 - a.M1, a_d.Js - a.Js);
  const Eigen::Vector2d ad_dot(a_d.M1_dot, a_d.Js_dot);
  return pinv_row(aux, m.mass, m.position).dot(K * e_a + ad_dot);
}

/// Force command for one force-controlled member.  a_dot and phidot_pdot
/// are the swarm-wide quantities (sum m_i v_i, Jdot_s) and (0, sum
/// 2 m_i v_i^2); the auxiliary state must carry the C_a entries.
inline double di_member_control(const SwarmMember& m, const AbstractState& a,
                                const AuxAbstractState& aux,
                                const DesiredAbstract& a_d,
                                const Eigen::Vector2d& a_dot,
                                const Eigen::Vector2d& phidot_pdot,
                                const Eigen::Matrix2d& Kp,
                                const Eigen::Matrix2d& Kd, double k_sd,
                                double L) {
  if (aux.S3 <= s3_epsilon(aux, L))
    throw SingularSwarm("di_member_control: S3 ~ 0");
  if (m.kind != MemberKind::DoubleIntegrator)
    throw ConfigError("di_member_control: member is not a double integrator");
  if (!aux.has_Ca)
    throw ConfigError("di_member_control: auxiliary state lacks C_a");
  Eigen::Matrix2d Ca;
  Ca << aux.Ca11, aux.Ca12, aux.Ca21, aux.Ca22;
  const Eigen::Vector2d e_a(a_d.M1 - a.M1, a_d.Js - a.Js);
  const Eigen::Vector2d ad_dot(a_d.M1_dot, a_d.Js_dot);
  const Eigen::Vector2d e_a_dot = ad_dot - a_dot;
  const Eigen::Vector2d ad_ddot(a_d.M1_ddot, a_d.Js_ddot);
  const Eigen::Vector2d inner =
      m.mass * (Kp * e_a + (Kd - Ca) * e_a_dot - phidot_pdot + ad_ddot) +
      (m.damping + k_sd) * ad_dot;
  return pinv_row(aux, m.mass, m.position).dot(inner) - k_sd * m.velocity;
}

/// Swarm-wide velocity-coupling terms used by the force law.
inline Eigen::Vector2d abstract_rate(const SwarmState& s) {
  Eigen::Vector2d a_dot = Eigen::Vector2d::Zero();
  for (const auto& m : s) {
    a_dot(0) += m.mass * m.velocity;
    a_dot(1) += 2.0 * m.mass * m.position * m.velocity;
  }
  return a_dot;
}

inline Eigen::Vector2d jacobian_rate_times_velocity(const SwarmState& s) {
  double sum = 0.0;
  for (const auto& m : s) sum += 2.0 * m.mass * m.velocity * m.velocity;
  return {0.0, sum};
}

/// Dispatches the per-kind member laws across a (possibly mixed) swarm.
inline std::vector<double> heterogeneous_control(const SwarmState& s,
                                                 const AbstractState& a,
                                                 const AuxAbstractState& aux,
                                                 const DesiredAbstract& a_d,
                                                 const SwarmGains& gains,
                                                 double L) {
  const Eigen::Vector2d a_dot = abstract_rate(s);
  const Eigen::Vector2d phidot_pdot = jacobian_rate_times_velocity(s);
  std::vector<double> u(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].kind == MemberKind::SingleIntegrator)
      u[i] = si_member_control(s[i], a, aux, a_d, gains.K, L);
    else
      u[i] = di_member_control(s[i], a, aux, a_d, a_dot, phidot_pdot,
                               gains.Kp, gains.Kd, gains.k_sd, L);
  }
  return u;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_CONTROL_HPP_
