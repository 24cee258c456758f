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

#ifndef SWARMPLANE_SIM_HPP_
#define SWARMPLANE_SIM_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include "swarmplane/abstraction.hpp"
#include "swarmplane/control.hpp"
#include "swarmplane/manifold.hpp"
#include "swarmplane/plant.hpp"
#include "swarmplane/types.hpp"

namespace swarmplane {

enum class ParentControllerKind { PD, ARISE };

/// Everything needed to run one closed-loop scenario.
struct ScenarioConfig {
  PhysicalParams phys;
  SwarmState roster;  // initial member states
  double theta0 = 0.0;  // initial tilt (rad)
  double omega0 = 0.0;  // initial tilt rate (rad/s)
  ParentControllerKind controller = ParentControllerKind::PD;
  PDGains pd;
  ARISEGains arise;
  SwarmGains swarm;
  ManifoldSpec manifold;
  TrajectorySpec traj;
  Disturbance disturbance;
  double dt = 1e-3;
  double duration = 15.0;
  std::uint64_t seed = 0;
  int decimation = 10;
  double settle_tol = 0.005;  // rad
  bool hard_stop = false;     // throw on constraint violation

  void validate() const {
    phys.validate();
    manifold.validate();
    if (controller == ParentControllerKind::ARISE) arise.validate();
    if (roster.empty()) throw ConfigError("ScenarioConfig: roster is empty");
    for (const auto& m : roster) {
      if (m.mass <= 0.0) throw ConfigError("ScenarioConfig: mass must be > 0");
      if (m.kind == MemberKind::DoubleIntegrator && m.damping <= 0.0)
        throw ConfigError("ScenarioConfig: DI damping must be > 0");
      if (std::abs(m.position) > phys.L / 2.0)
        throw ConfigError("ScenarioConfig: initial position outside the plane");
    }
    if (dt <= 0.0) throw ConfigError("ScenarioConfig: dt must be > 0");
    if (duration < dt)
      throw ConfigError("ScenarioConfig: duration must be >= dt");
    if (decimation < 1)
      throw ConfigError("ScenarioConfig: decimation must be >= 1");
    if (settle_tol <= 0.0)
      throw ConfigError("ScenarioConfig: settle_tol must be > 0");
  }
};

/// One logged sample of the closed loop.
struct Sample {
  double t = 0.0;
  double theta = 0.0, omega = 0.0, theta_d = 0.0;
  std::vector<double> p, v;
  double tau_sd = 0.0;
  double M1 = 0.0, Js = 0.0;
  double e_tau = 0.0, e_J = 0.0;  // desired minus actual (mass-moment units)
  double V_p = 0.0, V_a = 0.0;
  double lh[4] = {0.0, 0.0, 0.0, 0.0};
  bool flag_theta = false, flag_pos = false;
};

struct RunLog {
  std::size_t n_members = 0;
  std::vector<Sample> samples;

  void write_csv(std::ostream& os) const {
    os << "t,theta,omega,theta_d";
    for (std::size_t i = 1; i <= n_members; ++i) os << ",p" << i;
    for (std::size_t i = 1; i <= n_members; ++i) os << ",v" << i;
    os << ",tau_sd,M1,Js,e_tau,e_J,V_p,V_a,lh1,lh2,lh3,lh4,"
          "flag_theta,flag_pos\n";
    os.precision(12);
    for (const auto& s : samples) {
      os << s.t << ',' << s.theta << ',' << s.omega << ',' << s.theta_d;
      for (double x : s.p) os << ',' << x;
      for (double x : s.v) os << ',' << x;
      os << ',' << s.tau_sd << ',' << s.M1 << ',' << s.Js << ',' << s.e_tau
         << ',' << s.e_J << ',' << s.V_p << ',' << s.V_a;
      for (double x : s.lh) os << ',' << x;
      os << ',' << (s.flag_theta ? 1 : 0) << ',' << (s.flag_pos ? 1 : 0)
         << '\n';
    }
  }
};

struct Metrics {
  double settling_time = -1.0;  // -1 if |theta| never settles below tol
  double rms_tracking = 0.0;    // RMS of theta_d - theta over final half
  double max_theta = 0.0;
  double max_member_disp = 0.0;  // max_i max_t |p_i(t) - p_i(0)|
  double max_e_tau = 0.0, max_e_J = 0.0;
  double final_e_tau = 0.0, final_e_J = 0.0;
  int violations = 0;
  double lambda_hat_final[4] = {0.0, 0.0, 0.0, 0.0};
};

/// Classic fixed-step RK4 over a flat state vector.  The derivative
/// evaluator is called as f(t, y) -> VectorXd.
template <typename F>
Eigen::VectorXd rk4_step(const Eigen::VectorXd& y, double t, double dt,
                         F&& f) {
  if (dt <= 0.0) throw ConfigError("rk4_step: dt must be > 0");
  const Eigen::VectorXd k1 = f(t, y);
  const Eigen::VectorXd k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(t + dt, y + dt * k3);
  Eigen::VectorXd out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!out.allFinite()) throw NonFiniteState("rk4_step: non-finite state");
  return out;
}

namespace detail {

/// Controller quantities evaluated at one (t, state) point.
struct LoopEval {
  DesiredAbstract a_d;
  AbstractState a;
  std::vector<double> u;
  double theta_ddot_pred = 0.0;
  double e2 = 0.0;
  Eigen::Vector4d lambda_hat = Eigen::Vector4d::Zero();
  double mu1_dot = 0.0;
  Eigen::Vector4d mu2_dot = Eigen::Vector4d::Zero();
};

struct LoopWorkspace {
  const ScenarioConfig* cfg = nullptr;
  bool has_di = false;
  ARISEState arise_state;          // cached t0 terms (mu values live in y)
  std::vector<double> prev_u;      // member inputs from the previous step
  double sgn_e2 = 0.0;             // frozen across one step
  Eigen::Vector2d add_filtered = Eigen::Vector2d::Zero();  // filtered a_d_ddot
  Eigen::Vector2d prev_ad_dot = Eigen::Vector2d::Zero();
  bool have_prev_ad_dot = false;
};

/// State vector layout: [theta, omega, p_0..p_{N-1}, v for each DI member,
/// mu1, mu2(4)].
inline Eigen::Index state_size(const ScenarioConfig& cfg) {
  Eigen::Index n = 2 + static_cast<Eigen::Index>(cfg.roster.size());
  for (const auto& m : cfg.roster)
    if (m.kind == MemberKind::DoubleIntegrator) ++n;
  return n + 5;
}

inline void unpack(const ScenarioConfig& cfg, const Eigen::VectorXd& y,
                   const std::vector<double>& si_velocity, ParentState& x,
                   SwarmState& s, double& mu1, Eigen::Vector4d& mu2) {
  x.theta = y(0);
  x.omega = y(1);
  const std::size_t n = cfg.roster.size();
  s = cfg.roster;
  Eigen::Index k = 2 + static_cast<Eigen::Index>(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].position = y(2 + static_cast<Eigen::Index>(i));
    if (s[i].kind == MemberKind::DoubleIntegrator)
      s[i].velocity = y(k++);
    else
      s[i].velocity = si_velocity[i];
  }
  mu1 = y(k);
  mu2 = y.segment<4>(k + 1);
}

/// Evaluates the full closed loop at one point: parent controller, member
/// inputs, and the resulting state derivative.
inline LoopEval evaluate(const LoopWorkspace& ws, double t,
                         const Eigen::VectorXd& y, Eigen::VectorXd* dydt) {
  const ScenarioConfig& cfg = *ws.cfg;
  ParentState x;
  SwarmState s;
  double mu1;
  Eigen::Vector4d mu2;
  unpack(cfg, y, ws.prev_u, x, s, mu1, mu2);

  LoopEval ev;
  const double tau_d = cfg.disturbance(t);
  // Predicted tilt acceleration with last step's commanded inputs; used
  // only to propagate the desired-torque rate.
  const AbstractState a_pre = abstract_map(s);
  ev.theta_ddot_pred = parent_accel(x, a_pre, cfg.phys, tau_d);

  if (cfg.controller == ParentControllerKind::PD) {
    ev.a_d = pd_parent_control(x, cfg.pd, cfg.manifold, cfg.phys.g,
                               ev.theta_ddot_pred);
  } else {
    ARISEState st = ws.arise_state;
    st.mu1 = mu1;
    st.mu2 = mu2;
    AriseEval ae =
        arise_parent_control(x, cfg.traj, st, cfg.arise, cfg.manifold,
                             cfg.phys.g, t, ev.theta_ddot_pred, ws.sgn_e2);
    ev.a_d = ae.a_d;
    ev.e2 = ae.e2;
    ev.lambda_hat = ae.lambda_hat;
    ev.mu1_dot = ae.mu1_dot;
    ev.mu2_dot = ae.mu2_dot;
  }
  ev.a_d.M1_ddot = ws.add_filtered(0);
  ev.a_d.Js_ddot = ws.add_filtered(1);

  const AuxAbstractState aux =
      ws.has_di ? aux_state_with_Ca(s, cfg.swarm.k_sd, cfg.phys.L)
                : aux_state(s);
  ev.u = heterogeneous_control(s, a_pre, aux, ev.a_d, cfg.swarm, cfg.phys.L);

  // Velocity-controlled members realize their input instantly; fold it
  // back into Jdot_s before computing the parent acceleration.
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].kind == MemberKind::SingleIntegrator) s[i].velocity = ev.u[i];
  ev.a = abstract_map(s);

  if (dydt != nullptr) {
    dydt->setZero(y.size());
    (*dydt)(0) = x.omega;
    (*dydt)(1) = parent_accel(x, ev.a, cfg.phys, tau_d);
    const std::size_t n = s.size();
    Eigen::Index k = 2 + static_cast<Eigen::Index>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const MemberDeriv d = member_deriv(s[i], ev.u[i]);
      (*dydt)(2 + static_cast<Eigen::Index>(i)) = d.pdot;
      if (s[i].kind == MemberKind::DoubleIntegrator) (*dydt)(k++) = d.vdot;
    }
    (*dydt)(k) = ev.mu1_dot;
    dydt->segment<4>(k + 1) = ev.mu2_dot;
  }
  return ev;
}

}  // namespace detail

struct RunResult {
  RunLog log;
  Metrics metrics;
};

/// Integrates the closed loop for the configured duration with fixed-step
/// RK4.  Controller discontinuities (the sign term, the torque clamp state
/// used for a_d_ddot filtering) are frozen across each step.  Deterministic
/// for a given config.
inline RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.roster.size();

  detail::LoopWorkspace ws;
  ws.cfg = &cfg;
  ws.prev_u.assign(n, 0.0);
  for (const auto& m : cfg.roster) {
    if (m.kind == MemberKind::DoubleIntegrator) ws.has_di = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (cfg.roster[i].kind == MemberKind::SingleIntegrator)
      ws.prev_u[i] = cfg.roster[i].velocity;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(detail::state_size(cfg));
  y(0) = cfg.theta0;
  y(1) = cfg.omega0;
  {
    Eigen::Index k = 2 + static_cast<Eigen::Index>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(2 + static_cast<Eigen::Index>(i)) = cfg.roster[i].position;
      if (cfg.roster[i].kind == MemberKind::DoubleIntegrator)
        y(k++) = cfg.roster[i].velocity;
    }
  }

  if (cfg.controller == ParentControllerKind::ARISE) {
    ParentState x0{y(0), y(1)};
    arise_initialize(ws.arise_state, x0, cfg.traj, cfg.arise, 0.0);
  }

  const auto n_steps =
      static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  RunResult out;
  out.log.n_members = n;
  out.log.samples.reserve(n_steps / cfg.decimation + 2);

  std::vector<double> p0(n);
  for (std::size_t i = 0; i < n; ++i) p0[i] = cfg.roster[i].position;

  double t = 0.0;
  for (std::size_t step = 0; step <= n_steps; ++step) {
    // Step-start inspection: freezes the sign term, updates the filtered
    // a_d_ddot, and provides the logging snapshot.
    Eigen::VectorXd dydt(y.size());
    detail::LoopEval ev;
    {
      // The sign must be computed before evaluate() so the frozen value is
      // current for this step.
      ParentState x;
      SwarmState s;
      double mu1;
      Eigen::Vector4d mu2;
      detail::unpack(cfg, y, ws.prev_u, x, s, mu1, mu2);
      if (cfg.controller == ParentControllerKind::ARISE) {
        const double e1 = cfg.traj.theta_d(t) - x.theta;
        const double e2 = (cfg.traj.d1(t) - x.omega) + cfg.arise.alpha1 * e1;
        ws.sgn_e2 = robust_sign(e2, cfg.arise.boundary_layer);
      }
      ev = detail::evaluate(ws, t, y, &dydt);
      const Eigen::Vector2d ad_dot(ev.a_d.M1_dot, ev.a_d.Js_dot);
      if (ws.have_prev_ad_dot) {
        const Eigen::Vector2d raw = (ad_dot - ws.prev_ad_dot) / cfg.dt;
        ws.add_filtered += 0.1 * (raw - ws.add_filtered);
      }
      ws.prev_ad_dot = ad_dot;
      ws.have_prev_ad_dot = true;
    }

    const bool flag_theta = std::abs(y(0)) > cfg.phys.theta_max;
    bool flag_pos = false;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(y(2 + static_cast<Eigen::Index>(i))) > cfg.phys.L / 2.0)
        flag_pos = true;
    if (cfg.hard_stop && (flag_theta || flag_pos))
      throw ConstraintBreach("run_scenario: constraint violated at t=" +
                             std::to_string(t));

    if (step % static_cast<std::size_t>(cfg.decimation) == 0) {
      Sample smp;
      smp.t = t;
      smp.theta = y(0);
      smp.omega = y(1);
      smp.theta_d = cfg.controller == ParentControllerKind::ARISE
                        ? cfg.traj.theta_d(t)
                        : 0.0;
      smp.p.resize(n);
      smp.v.resize(n);
      {
        ParentState x;
        SwarmState s;
        double mu1;
        Eigen::Vector4d mu2;
        detail::unpack(cfg, y, ws.prev_u, x, s, mu1, mu2);
        for (std::size_t i = 0; i < n; ++i) {
          smp.p[i] = s[i].position;
          smp.v[i] = s[i].kind == MemberKind::SingleIntegrator ? ev.u[i]
                                                               : s[i].velocity;
        }
      }
      smp.tau_sd = ev.a_d.tau_sd;
      smp.M1 = ev.a.M1;
      smp.Js = ev.a.Js;
      smp.e_tau = ev.a_d.M1 - ev.a.M1;
      smp.e_J = ev.a_d.Js - ev.a.Js;
      smp.V_p = 0.5 * smp.theta * smp.theta +
                0.5 * (cfg.phys.J + smp.Js) * smp.omega * smp.omega;
      smp.V_a = 0.5 * (smp.e_tau * smp.e_tau + smp.e_J * smp.e_J);
      for (int k = 0; k < 4; ++k) smp.lh[k] = ev.lambda_hat(k);
      smp.flag_theta = flag_theta;
      smp.flag_pos = flag_pos;
      out.log.samples.push_back(std::move(smp));
    }

    if (step == n_steps) break;
    y = rk4_step(y, t, cfg.dt, [&](double tt, const Eigen::VectorXd& yy) {
      Eigen::VectorXd d(yy.size());
      detail::evaluate(ws, tt, yy, &d);
      return d;
    });
    ws.prev_u = ev.u;
    t += cfg.dt;
  }

  // Metrics.
  Metrics& m = out.metrics;
  const auto& samples = out.log.samples;
  if (!samples.empty()) {
    const std::size_t half = samples.size() / 2;
    double sq = 0.0;
    for (std::size_t i = half; i < samples.size(); ++i) {
      const double e1 = samples[i].theta_d - samples[i].theta;
      sq += e1 * e1;
    }
    m.rms_tracking = std::sqrt(sq / static_cast<double>(samples.size() - half));
    m.settling_time = -1.0;
    for (std::size_t i = samples.size(); i-- > 0;) {
      if (std::abs(samples[i].theta) >= cfg.settle_tol) break;
      m.settling_time = samples[i].t;
    }
    for (const auto& s : samples) {
      m.max_theta = std::max(m.max_theta, std::abs(s.theta));
      for (std::size_t i = 0; i < n; ++i)
        m.max_member_disp =
            std::max(m.max_member_disp, std::abs(s.p[i] - p0[i]));
      m.max_e_tau = std::max(m.max_e_tau, std::abs(s.e_tau));
      m.max_e_J = std::max(m.max_e_J, std::abs(s.e_J));
      if (s.flag_theta || s.flag_pos) ++m.violations;
    }
    m.final_e_tau = samples.back().e_tau;
    m.final_e_J = samples.back().e_J;
    for (int k = 0; k < 4; ++k)
      m.lambda_hat_final[k] = samples.back().lh[k];
  }
  return out;
}

struct SweepRow {
  bool ok = false;
  std::string error;
  Metrics metrics;
};

/// Runs scenarios concurrently with at most `threads` in flight.
/// Per-run failures are captured per row, not fatal to the sweep.
inline std::vector<SweepRow> sweep(const std::vector<ScenarioConfig>& cfgs,
                                   int threads) {
  if (cfgs.empty()) throw ConfigError("sweep: no scenarios");
  if (threads < 1) threads = 1;
  std::vector<SweepRow> rows(cfgs.size());
  std::size_t next = 0;
  while (next < cfgs.size()) {
    const std::size_t batch =
        std::min<std::size_t>(threads, cfgs.size() - next);
    std::vector<std::future<SweepRow>> futures;
    for (std::size_t b = 0; b < batch; ++b) {
      const ScenarioConfig& cfg = cfgs[next + b];
      futures.push_back(std::async(std::launch::async, [&cfg]() {
        SweepRow row;
        try {
          row.metrics = run_scenario(cfg).metrics;
          row.ok = true;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        return row;
      }));
    }
    for (std::size_t b = 0; b < batch; ++b)
      rows[next + b] = futures[b].get();
    next += batch;
  }
  return rows;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_SIM_HPP_
