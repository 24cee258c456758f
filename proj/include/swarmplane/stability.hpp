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

#ifndef SWARMPLANE_STABILITY_HPP_
#define SWARMPLANE_STABILITY_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmplane/control.hpp"
#include "swarmplane/manifold.hpp"
#include "swarmplane/plant.hpp"
#include "swarmplane/sim.hpp"
#include "swarmplane/types.hpp"

namespace swarmplane {

struct NonInvertibleRhoE : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Condition {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // amount by which the inequality holds (signed)
};

struct StabilityReport {
  std::vector<Condition> conditions;
  std::map<std::string, double> constants;

  void add(const std::string& name, bool pass, double margin) {
    conditions.push_back({name, pass, margin});
  }
  void set(const std::string& name, double value) { constants[name] = value; }
  bool all_pass() const {
    for (const auto& c : conditions)
      if (!c.pass) return false;
    return true;
  }
};

inline bool is_spd(const Eigen::Matrix2d& M) {
  if ((M - M.transpose()).norm() > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  return es.eigenvalues().minCoeff() > 0.0;
}

/// Worst-case swarm-inertia rate along the regulation closed loop,
/// evaluated at a given error norm.  The rational bound has coefficients
///   a1 = dJ/2 k1
///   a2 = dJ (k1 (J + Js_max) + k2 g6) - Ks2   (signed convention)
///   a3 = dJ k2 (tau_max + g1)
///   b1 = dJ k2,  b2 = J + Js_min
/// where dJ is the largest manifold slope and Ks2 the second diagonal
/// swarm gain.  The signed a2 follows the source convention for this
/// bound; the |Ks2| variant is reported alongside since a bound that
/// shrinks as the swarm gain grows is suspicious.
struct JdotBound {
  double jdot_max = 0.0;      // signed-a2 convention
  double jdot_max_abs = 0.0;  // |Ks2| convention
  double a1 = 0.0, a2_signed = 0.0, a2_abs = 0.0, a3 = 0.0;
  double b1 = 0.0, b2 = 0.0;
};

inline JdotBound jdot_max_bound(const PhysicalParams& phys,
                                const PDGains& gains,
                                const Eigen::Matrix2d& K_swarm,
                                const ManifoldSpec& manifold,
                                double z_norm_max) {
  const double dJ = manifold.slope_max();
  const double Ks2 = K_swarm(1, 1);
  JdotBound b;
  b.a1 = 0.5 * dJ * gains.k1;
  const double a2_core =
      dJ * (gains.k1 * (phys.J + manifold.j_max()) + gains.k2 * phys.gamma6);
  b.a2_signed = a2_core - Ks2;
  b.a2_abs = a2_core + std::abs(Ks2);
  b.a3 = dJ * gains.k2 * (manifold.tau_max + phys.gamma1);
  b.b1 = dJ * gains.k2;
  b.b2 = phys.J + manifold.j_min();
  const double z = z_norm_max;
  const double den = b.b1 * z + b.b2;
  b.jdot_max = (b.a1 * z * z + b.a2_signed * z + b.a3) / den;
  b.jdot_max_abs = (b.a1 * z * z + b.a2_abs * z + b.a3) / den;
  return b;
}

/// Gain conditions and region estimate for the regulation loop.
/// Region radius^2 = theta_max^2 / (2 eta), eta = max{1, (J + Js_max)/2}.
inline StabilityReport check_pd_conditions(const PhysicalParams& phys,
                                           const PDGains& gains,
                                           const Eigen::Matrix2d& K_swarm,
                                           const ManifoldSpec& manifold,
                                           double jdot_max) {
  if (phys.theta_max >= M_PI / 2.0)
    throw ConfigError("check_pd_conditions: theta_max must be < pi/2");
  StabilityReport r;
  r.add("pd.k1_positive", gains.k1 > 0.0, gains.k1);
  const double k2_floor = jdot_max / (2.0 * std::cos(phys.theta_max));
  r.add("pd.k2_exceeds_jdot_bound", gains.k2 > k2_floor,
        gains.k2 - k2_floor);
  r.add("pd.swarm_gain_spd", is_spd(K_swarm),
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(K_swarm)
            .eigenvalues()
            .minCoeff());
  const double eta = std::max(1.0, (phys.J + manifold.j_max()) / 2.0);
  const double radius_sq = phys.theta_max * phys.theta_max / (2.0 * eta);
  r.set("pd.jdot_max", jdot_max);
  r.set("pd.k2_floor", k2_floor);
  r.set("pd.eta", eta);
  r.set("pd.region_radius_sq", radius_sq);
  // A commonly quoted value for this configuration is 0.0326; the formula
  // above gives 0.02 for theta_max = 0.2.  Surface the discrepancy rather
  // than silently adopting either number.
  r.set("pd.region_radius_sq_quoted", 0.0326);
  r.set("pd.region_radius_sq_discrepancy",
        std::abs(radius_sq - 0.0326));
  return r;
}

/// Inverse of the affine gain function rho_E(x) = k1 + (1 + alpha1) x.
/// Throws when the argument is below k1 (the region would be empty).
inline double rho_E_inverse(double value, double k1, double alpha1) {
  if (value < k1)
    throw NonInvertibleRhoE("rho_E_inverse: argument below k1, empty region");
  return (value - k1) / (1.0 + alpha1);
}

namespace detail {

/// Feed-forward torque along the desired trajectory, with the swarm
/// inertia riding the manifold.  Solved by fixed point; jsd_dot is the
/// manifold inertia rate from a previous pass (zero on the first).
inline double feedforward_torque(const PhysicalParams& phys,
                                 const ManifoldSpec& manifold,
                                 const TrajectorySpec& traj,
                                 const Disturbance& dist, double t,
                                 double jsd_dot) {
  const double th = traj.theta_d(t);
  const double w = traj.d1(t);
  const double acc = traj.d2(t);
  double tau = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double Js = manifold.j(manifold.clamp_tau(tau));
    const double next =
        -((phys.J + Js) * acc + jsd_dot * w + friction_torque(w, phys) +
          dist(t)) /
        std::cos(th);
    if (std::abs(next - tau) < 1e-13) return next;
    tau = next;
  }
  return tau;
}

}  // namespace detail

/// Tracking-loop conditions, disturbance bounds, and region estimate.
/// The suprema (zeta terms, torque rates, the regressor product) are found
/// by sampling 10^4 points over one trajectory period with a 1.1 safety
/// factor.  The empty-region case is reported via the
/// "arise.region_nonempty" condition rather than thrown.
inline StabilityReport check_arise_conditions(const PhysicalParams& phys,
                                              const ARISEGains& g,
                                              const Eigen::Matrix2d& K_swarm,
                                              const TrajectorySpec& traj,
                                              const Disturbance& dist,
                                              const ManifoldSpec& manifold) {
  StabilityReport r;
  const int n = 10000;
  const double T = std::isfinite(traj.period()) ? traj.period() : 1.0;
  const double h = T / n;

  // Two passes: the first ignores the manifold inertia rate, the second
  // includes it from the first pass's finite differences.
  std::vector<double> tau_ff(n + 1);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> jsd_dot(n + 1, 0.0);
    if (pass == 1) {
      for (int i = 1; i < n; ++i) {
        const double dtau = (tau_ff[i + 1] - tau_ff[i - 1]) / (2.0 * h);
        jsd_dot[i] =
            manifold.dj_dtau(manifold.clamp_tau(tau_ff[i])) * dtau;
      }
      jsd_dot[0] = jsd_dot[1];
      jsd_dot[n] = jsd_dot[n - 1];
    }
    for (int i = 0; i <= n; ++i)
      tau_ff[i] = detail::feedforward_torque(phys, manifold, traj, dist,
                                             i * h, jsd_dot[i]);
  }

  std::vector<double> Js(n + 1), Nd(n + 1, 0.0);
  for (int i = 0; i <= n; ++i)
    Js[i] = manifold.j(manifold.clamp_tau(tau_ff[i]));
  auto central = [&](const std::vector<double>& f, int i) {
    const int lo = std::max(1, std::min(i, n - 1));
    return (f[lo + 1] - f[lo - 1]) / (2.0 * h);
  };
  auto central2 = [&](const std::vector<double>& f, int i) {
    const int lo = std::max(1, std::min(i, n - 1));
    return (f[lo + 1] - 2.0 * f[lo] + f[lo - 1]) / (h * h);
  };

  double tau_dot_max = 0.0, tau_ddot_max = 0.0, ygy_max = 0.0;
  for (int i = 1; i < n; ++i) {
    const double t = i * h;
    const double Js_dot = central(Js, i);
    const double Js_ddot = central2(Js, i);
    Nd[i] = Js[i] * traj.d3(t) + 2.0 * Js_dot * traj.d2(t) +
            Js_ddot * traj.d1(t) + dist.rate(t);
    tau_dot_max = std::max(tau_dot_max, std::abs(central(tau_ff, i)));
    tau_ddot_max = std::max(tau_ddot_max, std::abs(central2(tau_ff, i)));
    const Regressor reg = regressor(traj, g, t);
    ygy_max = std::max(ygy_max,
                       std::abs(reg.Yd.dot(g.Gamma * reg.Yd_dot)));
  }
  Nd[0] = Nd[1];
  Nd[n] = Nd[n - 1];
  double nd_max = 0.0, nd_dot_max = 0.0;
  for (int i = 0; i <= n; ++i) nd_max = std::max(nd_max, std::abs(Nd[i]));
  for (int i = 1; i < n; ++i)
    nd_dot_max = std::max(nd_dot_max, std::abs(central(Nd, i)));
  const double safety = 1.1;
  const double zeta_Nd = safety * nd_max;
  const double zeta_Nd_dot = safety * nd_dot_max;
  tau_dot_max *= safety;
  tau_ddot_max *= safety;

  const double jdot_max = manifold.slope_max() * tau_dot_max;
  const double jddot_max = manifold.slope_max() * tau_ddot_max +
                           manifold.d2j_dtau2() * tau_dot_max * tau_dot_max;

  // Friction-slope constant with the worst of the true and estimated
  // inner-slope parameters.
  const double g2h = std::max(phys.gamma2, g.gbar2);
  const double g3h = std::min(phys.gamma3, g.gbar3);
  const double g5h = std::max(phys.gamma5, g.gbar5);
  const double c =
      phys.gamma1 * g2h - phys.gamma1 * g3h + phys.gamma4 * g5h + phys.gamma6;

  const double Jmax = manifold.j_max();
  const double c1 = 0.5 * jdot_max + ygy_max +
                    (phys.J + Jmax) * std::abs(g.alpha1 - g.alpha2) +
                    jdot_max + c;
  const double c2 =
      std::abs(1.0 + (2.0 * jdot_max +
                      (phys.J + Jmax) * (g.alpha2 - g.alpha1)) *
                         g.alpha2) +
      std::abs(Jmax * g.alpha1 + jddot_max + phys.J * g.alpha1 * g.alpha1 +
               jdot_max * g.alpha1 - (g.alpha1 + g.alpha2) * c);
  const double c3 = jddot_max * g.alpha1 +
                    2.0 * jdot_max * g.alpha1 * g.alpha1 +
                    (phys.J + jdot_max) * g.alpha1 * g.alpha1 * g.alpha1 +
                    g.alpha1 * g.alpha1 * c;
  const double c_max = std::max({c1, c2, c3});

  const Eigen::Matrix4d Gamma_inv = g.Gamma.inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> gi(Gamma_inv);
  const double eta1 =
      0.5 * std::min({1.0, phys.J + manifold.j_min(),
                      gi.eigenvalues().minCoeff()});
  const double eta2 =
      0.5 * std::max({2.0, phys.J + manifold.j_max(),
                      gi.eigenvalues().maxCoeff()});
  const double eta3 =
      std::min({2.0 * g.alpha1 - 1.0, g.alpha2 - 1.0, 1.0});

  r.add("arise.alpha1_gt_half", g.alpha1 > 0.5, g.alpha1 - 0.5);
  r.add("arise.alpha2_gt_one", g.alpha2 > 1.0, g.alpha2 - 1.0);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g.Gamma);
    r.add("arise.gamma_spd",
          (g.Gamma - g.Gamma.transpose()).norm() < 1e-12 &&
              es.eigenvalues().minCoeff() > 0.0,
          es.eigenvalues().minCoeff());
  }
  r.add("arise.swarm_gain_spd", is_spd(K_swarm),
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(K_swarm)
            .eigenvalues()
            .minCoeff());
  const double beta_floor = zeta_Nd + zeta_Nd_dot / g.alpha2;
  r.add("arise.beta_exceeds_zeta", g.beta > beta_floor,
        g.beta - beta_floor);
  const double ks_floor = eta3 > 0.0
                              ? c_max / eta3
                              : std::numeric_limits<double>::infinity();
  r.add("arise.ks_exceeds_cmax", g.k_s > ks_floor, g.k_s - ks_floor);
  r.set("arise.ks_floor_relaxed", eta3 > 0.0 ? c_max / (4.0 * eta3) : 0.0);

  const double k1_swarm = K_swarm(0, 0);
  const double lam_min_K =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(K_swarm)
          .eigenvalues()
          .minCoeff();
  const double rho_arg =
      2.0 * eta3 - c_max / (2.0 * g.k_s) + 2.0 * lam_min_K;
  double rho = 0.0;
  bool region_nonempty = true;
  try {
    rho = rho_E_inverse(rho_arg, k1_swarm, g.alpha1);
  } catch (const NonInvertibleRhoE&) {
    region_nonempty = false;
  }
  const double radius =
      region_nonempty && eta2 > 0.0 ? std::sqrt(eta1 / eta2) * rho : 0.0;
  r.add("arise.region_nonempty", region_nonempty, rho_arg - k1_swarm);

  r.set("arise.zeta_Nd", zeta_Nd);
  r.set("arise.zeta_Nd_dot", zeta_Nd_dot);
  r.set("arise.beta_floor", beta_floor);
  r.set("arise.tau_dot_max", tau_dot_max);
  r.set("arise.tau_ddot_max", tau_ddot_max);
  r.set("arise.jdot_max", jdot_max);
  r.set("arise.jddot_max", jddot_max);
  r.set("arise.ygydot_max", ygy_max);
  r.set("arise.c", c);
  r.set("arise.c1", c1);
  r.set("arise.c2", c2);
  r.set("arise.c3", c3);
  r.set("arise.c_max", c_max);
  r.set("arise.ks_floor", ks_floor);
  r.set("arise.eta1", eta1);
  r.set("arise.eta2", eta2);
  r.set("arise.eta3", eta3);
  r.set("arise.rho_arg", rho_arg);
  r.set("arise.rho", rho);
  r.set("arise.region_radius", radius);
  return r;
}

/// Searches for an epsilon certifying the second-order abstract-error
/// dynamics, over the four diagonal-gain inequalities:
///   e k_p + k_d - e > 0
///   e k_p k_d - e^2 k_p - (e/4) k_d^2 > 0
///   k_p + 1 > 0
///   k_p - e^2 > 0
/// Returns the epsilon maximizing the worst margin, or nullopt.
struct EpsilonWitness {
  double epsilon = 0.0;
  double margin = 0.0;
};

inline std::optional<EpsilonWitness> check_di_epsilon(
    const Eigen::Matrix2d& Kp, const Eigen::Matrix2d& Kd) {
  const double kp_min = std::min(Kp(0, 0), Kp(1, 1));
  if (kp_min <= 0.0) return std::nullopt;
  const double eps_hi = std::sqrt(kp_min);
  const int n = 10000;
  std::optional<EpsilonWitness> best;
  for (int i = 1; i < n; ++i) {
    const double e = eps_hi * static_cast<double>(i) / n;
    double margin = std::numeric_limits<double>::infinity();
    for (int ch = 0; ch < 2; ++ch) {
      const double kp = Kp(ch, ch), kd = Kd(ch, ch);
      margin = std::min(margin, e * kp + kd - e);
      margin = std::min(margin, e * kp * kd - e * e * kp - 0.25 * e * kd * kd);
      margin = std::min(margin, kp + 1.0);
      margin = std::min(margin, kp - e * e);
    }
    if (margin > 0.0 && (!best || margin > best->margin))
      best = EpsilonWitness{e, margin};
  }
  return best;
}

/// Monotonicity audit of V = V_p + V_a along a logged run.
struct LyapunovReport {
  std::size_t samples_checked = 0;
  std::size_t increases = 0;            // increases beyond tolerance
  double fraction_nonincreasing = 1.0;  // among checked pairs
  double max_increase = 0.0;
};

inline LyapunovReport lyapunov_monitor(const RunLog& log,
                                       double skip_time = 0.1,
                                       double tolerance = 1e-9) {
  LyapunovReport rep;
  double prev_v = 0.0;
  bool have_prev = false;
  for (const auto& s : log.samples) {
    if (s.t < skip_time) continue;
    const double v = s.V_p + s.V_a;
    if (have_prev) {
      ++rep.samples_checked;
      const double rise = v - prev_v;
      if (rise > tolerance) {
        ++rep.increases;
        rep.max_increase = std::max(rep.max_increase, rise);
      }
    }
    prev_v = v;
    have_prev = true;
  }
  if (rep.samples_checked > 0)
    rep.fraction_nonincreasing =
        1.0 - static_cast<double>(rep.increases) /
                  static_cast<double>(rep.samples_checked);
  return rep;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_STABILITY_HPP_
