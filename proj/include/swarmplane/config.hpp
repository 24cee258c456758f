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

#ifndef SWARMPLANE_CONFIG_HPP
#define SWARMPLANE_CONFIG_HPP

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmplane/atlas.hpp"
#include "swarmplane/riccati.hpp"
#include "swarmplane/sim.hpp"
#include "swarmplane/stability.hpp"

namespace swarmplane {

using Json = nlohmann::json;

inline constexpr const char* kScenarioSchema = "swarmplane/scenario-v1";
inline constexpr const char* kAtlasSchema = "swarmplane/atlas-v1";
inline constexpr const char* kDesignSchema = "swarmplane/design-v1";
inline constexpr const char* kCheckSchema = "swarmplane/check-v1";
inline constexpr const char* kSweepSchema = "swarmplane/sweep-v1";

namespace detail {

inline const Json& require_key(const Json& j, const std::string& key,
                               const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(ctx + ": missing key '" + key + "'");
  return j.at(key);
}

inline double num(const Json& j, const std::string& key, const std::string& ctx) {
  const Json& v = require_key(j, key, ctx);
  if (!v.is_number())
    throw ConfigError(ctx + ": key '" + key + "' must be a number");
  return v.get<double>();
}

inline double num_or(const Json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError("key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline void check_schema(const Json& j, const std::string& expected,
                         const std::string& ctx) {
  const Json& s = require_key(j, "schema", ctx);
  if (!s.is_string() || s.get<std::string>() != expected)
    throw ConfigError(ctx + ": schema must be '" + expected + "'");
}

inline Eigen::Matrix2d mat2(const Json& j, const std::string& ctx) {
  Eigen::Matrix2d m;
  if (j.is_number()) {
    m = j.get<double>() * Eigen::Matrix2d::Identity();
    return m;
  }
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2)
    throw ConfigError(ctx + ": expected a scalar or a 2x2 array");
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

inline Json mat2_json(const Eigen::Matrix2d& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}),
                      Json::array({m(1, 0), m(1, 1)})});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Leaf sections

inline PhysicalParams parse_physical(const Json& j) {
  PhysicalParams p;
  p.J = detail::num_or(j, "J", p.J);
  p.L = detail::num_or(j, "L", p.L);
  p.g = detail::num_or(j, "gravity", p.g);
  p.gamma1 = detail::num_or(j, "gamma1", p.gamma1);
  p.gamma2 = detail::num_or(j, "gamma2", p.gamma2);
  p.gamma3 = detail::num_or(j, "gamma3", p.gamma3);
  p.gamma4 = detail::num_or(j, "gamma4", p.gamma4);
  p.gamma5 = detail::num_or(j, "gamma5", p.gamma5);
  p.gamma6 = detail::num_or(j, "gamma6", p.gamma6);
  p.theta_max = detail::num_or(j, "theta_max", p.theta_max);
  p.tau_max = detail::num_or(j, "tau_max", p.tau_max);
  return p;
}

inline Json to_json(const PhysicalParams& p) {
  return Json{{"J", p.J},           {"L", p.L},
              {"gravity", p.g},     {"gamma1", p.gamma1},
              {"gamma2", p.gamma2}, {"gamma3", p.gamma3},
              {"gamma4", p.gamma4}, {"gamma5", p.gamma5},
              {"gamma6", p.gamma6}, {"theta_max", p.theta_max},
              {"tau_max", p.tau_max}};
}

inline ManifoldSpec parse_manifold(const Json& j) {
  ManifoldSpec m;
  m.quad = detail::num_or(j, "quad", m.quad);
  m.offset = detail::num_or(j, "offset", m.offset);
  m.tau_max = detail::num_or(j, "tau_max", m.tau_max);
  return m;
}

inline Json to_json(const ManifoldSpec& m) {
  return Json{{"quad", m.quad}, {"offset", m.offset}, {"tau_max", m.tau_max}};
}

inline TrajectorySpec parse_trajectory(const Json& j) {
  TrajectorySpec t;
  t.amplitude = detail::num_or(j, "amplitude", 0.0);
  t.omega = detail::num_or(j, "omega", 0.0);
  return t;
}

inline Json to_json(const TrajectorySpec& t) {
  return Json{{"amplitude", t.amplitude}, {"omega", t.omega}};
}

inline Disturbance parse_disturbance(const Json& j) {
  Disturbance d;
  d.amplitude = detail::num_or(j, "amplitude", 0.0);
  d.omega = detail::num_or(j, "omega", 0.0);
  return d;
}

inline Json to_json(const Disturbance& d) {
  return Json{{"amplitude", d.amplitude}, {"omega", d.omega}};
}

inline PDGains parse_pd(const Json& j) {
  PDGains g;
  g.k1 = detail::num_or(j, "k1", g.k1);
  g.k2 = detail::num_or(j, "k2", g.k2);
  return g;
}

inline Json to_json(const PDGains& g) {
  return Json{{"k1", g.k1}, {"k2", g.k2}};
}

inline ARISEGains parse_arise(const Json& j) {
  ARISEGains g;
  g.alpha1 = detail::num_or(j, "alpha1", g.alpha1);
  g.alpha2 = detail::num_or(j, "alpha2", g.alpha2);
  g.k_s = detail::num_or(j, "k_s", g.k_s);
  g.beta = detail::num_or(j, "beta", g.beta);
  g.gbar2 = detail::num_or(j, "gbar2", g.gbar2);
  g.gbar3 = detail::num_or(j, "gbar3", g.gbar3);
  g.gbar5 = detail::num_or(j, "gbar5", g.gbar5);
  g.boundary_layer = detail::num_or(j, "boundary_layer", g.boundary_layer);
  if (j.is_object() && j.contains("Gamma")) {
    const Json& G = j.at("Gamma");
    if (G.is_array() && G.size() == 4 && G[0].is_number()) {
      Eigen::Vector4d d;
      for (int i = 0; i < 4; ++i) d(i) = G[i].get<double>();
      g.Gamma = d.asDiagonal();
    } else if (G.is_array() && G.size() == 4) {
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) g.Gamma(r, c) = G[r][c].get<double>();
    } else {
      throw ConfigError("arise: Gamma must be a 4-array or 4x4 array");
    }
  }
  if (j.is_object() && j.contains("lambda_hat0")) {
    const Json& l = j.at("lambda_hat0");
    if (!l.is_array() || l.size() != 4)
      throw ConfigError("arise: lambda_hat0 must be a 4-array");
    for (int i = 0; i < 4; ++i) g.lambda_hat0(i) = l[i].get<double>();
  }
  return g;
}

inline Json to_json(const ARISEGains& g) {
  Json G = Json::array();
  for (int r = 0; r < 4; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 4; ++c) row.push_back(g.Gamma(r, c));
    G.push_back(row);
  }
  return Json{{"alpha1", g.alpha1},
              {"alpha2", g.alpha2},
              {"k_s", g.k_s},
              {"beta", g.beta},
              {"Gamma", G},
              {"gbar2", g.gbar2},
              {"gbar3", g.gbar3},
              {"gbar5", g.gbar5},
              {"lambda_hat0",
               Json::array({g.lambda_hat0(0), g.lambda_hat0(1),
                            g.lambda_hat0(2), g.lambda_hat0(3)})},
              {"boundary_layer", g.boundary_layer}};
}

inline SwarmGains parse_swarm_gains(const Json& j) {
  SwarmGains g;
  if (j.is_object() && j.contains("K")) g.K = detail::mat2(j.at("K"), "swarm.K");
  if (j.is_object() && j.contains("Kp"))
    g.Kp = detail::mat2(j.at("Kp"), "swarm.Kp");
  if (j.is_object() && j.contains("Kd"))
    g.Kd = detail::mat2(j.at("Kd"), "swarm.Kd");
  g.k_sd = detail::num_or(j, "k_sd", g.k_sd);
  return g;
}

inline Json to_json(const SwarmGains& g) {
  return Json{{"K", detail::mat2_json(g.K)},
              {"Kp", detail::mat2_json(g.Kp)},
              {"Kd", detail::mat2_json(g.Kd)},
              {"k_sd", g.k_sd}};
}

// ---------------------------------------------------------------------------
// Roster: explicit member list or a seeded generator.

inline SwarmState parse_roster(const Json& j, std::uint64_t default_seed) {
  SwarmState roster;
  if (j.is_object() && j.contains("members")) {
    const Json& arr = j.at("members");
    if (!arr.is_array()) throw ConfigError("roster: members must be an array");
    for (const auto& mj : arr) {
      SwarmMember m;
      const std::string kind =
          detail::require_key(mj, "kind", "roster member").get<std::string>();
      if (kind == "si")
        m.kind = MemberKind::SingleIntegrator;
      else if (kind == "di")
        m.kind = MemberKind::DoubleIntegrator;
      else
        throw ConfigError("roster member: kind must be 'si' or 'di'");
      m.mass = detail::num(mj, "mass", "roster member");
      m.position = detail::num(mj, "position", "roster member");
      m.damping = detail::num_or(mj, "damping", 0.0);
      m.velocity = detail::num_or(mj, "velocity", 0.0);
      roster.push_back(m);
    }
    return roster;
  }
  if (j.is_object() && j.contains("generate")) {
    const Json& g = j.at("generate");
    const int n_si =
        static_cast<int>(detail::num_or(g, "count_si", 0.0));
    const int n_di =
        static_cast<int>(detail::num_or(g, "count_di", 0.0));
    if (n_si < 0 || n_di < 0 || n_si + n_di == 0)
      throw ConfigError("roster.generate: need count_si + count_di >= 1");
    double m_lo = 0.25, m_hi = 0.75, c_lo = 0.5, c_hi = 1.5;
    if (g.contains("mass_range")) {
      m_lo = g.at("mass_range")[0].get<double>();
      m_hi = g.at("mass_range")[1].get<double>();
    }
    if (g.contains("damping_range")) {
      c_lo = g.at("damping_range")[0].get<double>();
      c_hi = g.at("damping_range")[1].get<double>();
    }
    double spacing = detail::num_or(g, "spacing", 0.125);
    const std::uint64_t seed = g.contains("seed")
                                   ? g.at("seed").get<std::uint64_t>()
                                   : default_seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> um(m_lo, m_hi), uc(c_lo, c_hi);
    for (int i = 0; i < n_si + n_di; ++i) {
      SwarmMember m;
      m.kind = i < n_si ? MemberKind::SingleIntegrator
                        : MemberKind::DoubleIntegrator;
      m.mass = um(rng);
      m.damping = m.kind == MemberKind::DoubleIntegrator ? uc(rng) : 0.0;
      roster.push_back(m);
    }
    // With alternating +-s positions, Js(0) = S0 s^2.  An initial_Js target
    // starts every generated swarm at the same abstract state regardless of
    // its size, making responses comparable across sizes.
    if (g.contains("initial_Js")) {
      const double Js0 = detail::num(g, "initial_Js", "roster.generate");
      if (Js0 <= 0.0)
        throw ConfigError("roster.generate: initial_Js must be > 0");
      double S0 = 0.0;
      for (const auto& m : roster) S0 += m.mass;
      spacing = std::sqrt(Js0 / S0);
    }
    for (std::size_t i = 0; i < roster.size(); ++i)
      roster[i].position = (i % 2 == 0) ? spacing : -spacing;
    return roster;
  }
  throw ConfigError("roster: expected 'members' or 'generate'");
}

inline Json to_json(const SwarmState& roster) {
  Json members = Json::array();
  for (const auto& m : roster)
    members.push_back(
        Json{{"kind", m.kind == MemberKind::SingleIntegrator ? "si" : "di"},
             {"mass", m.mass},
             {"damping", m.damping},
             {"position", m.position},
             {"velocity", m.velocity}});
  return Json{{"members", members}};
}

// ---------------------------------------------------------------------------
// Scenario

inline ScenarioConfig parse_scenario(const Json& j) {
  detail::check_schema(j, kScenarioSchema, "scenario");
  ScenarioConfig cfg;
  if (j.contains("physical")) cfg.phys = parse_physical(j.at("physical"));
  if (j.contains("initial")) {
    cfg.theta0 = detail::num_or(j.at("initial"), "theta", 0.0);
    cfg.omega0 = detail::num_or(j.at("initial"), "omega", 0.0);
  }
  if (j.contains("sim")) {
    const Json& s = j.at("sim");
    cfg.dt = detail::num_or(s, "dt", cfg.dt);
    cfg.duration = detail::num_or(s, "duration", cfg.duration);
    cfg.decimation =
        static_cast<int>(detail::num_or(s, "decimation", cfg.decimation));
    cfg.settle_tol = detail::num_or(s, "settle_tol", cfg.settle_tol);
    if (s.contains("seed")) cfg.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("hard_stop")) cfg.hard_stop = s.at("hard_stop").get<bool>();
  }
  cfg.roster =
      parse_roster(detail::require_key(j, "roster", "scenario"), cfg.seed);
  if (j.contains("controller")) {
    const Json& c = j.at("controller");
    const std::string type =
        c.contains("type") ? c.at("type").get<std::string>() : "pd";
    if (type == "pd")
      cfg.controller = ParentControllerKind::PD;
    else if (type == "arise")
      cfg.controller = ParentControllerKind::ARISE;
    else
      throw ConfigError("controller.type must be 'pd' or 'arise'");
    if (c.contains("pd")) cfg.pd = parse_pd(c.at("pd"));
    if (c.contains("arise")) cfg.arise = parse_arise(c.at("arise"));
  }
  if (j.contains("swarm")) cfg.swarm = parse_swarm_gains(j.at("swarm"));
  if (j.contains("manifold")) cfg.manifold = parse_manifold(j.at("manifold"));
  if (j.contains("trajectory"))
    cfg.traj = parse_trajectory(j.at("trajectory"));
  if (j.contains("disturbance"))
    cfg.disturbance = parse_disturbance(j.at("disturbance"));
  cfg.validate();
  return cfg;
}

inline Json to_json(const ScenarioConfig& cfg) {
  return Json{
      {"schema", kScenarioSchema},
      {"physical", to_json(cfg.phys)},
      {"initial", Json{{"theta", cfg.theta0}, {"omega", cfg.omega0}}},
      {"roster", to_json(cfg.roster)},
      {"controller",
       Json{{"type",
             cfg.controller == ParentControllerKind::PD ? "pd" : "arise"},
            {"pd", to_json(cfg.pd)},
            {"arise", to_json(cfg.arise)}}},
      {"swarm", to_json(cfg.swarm)},
      {"manifold", to_json(cfg.manifold)},
      {"trajectory", to_json(cfg.traj)},
      {"disturbance", to_json(cfg.disturbance)},
      {"sim", Json{{"dt", cfg.dt},
                   {"duration", cfg.duration},
                   {"seed", cfg.seed},
                   {"decimation", cfg.decimation},
                   {"settle_tol", cfg.settle_tol},
                   {"hard_stop", cfg.hard_stop}}}};
}

// ---------------------------------------------------------------------------
// Atlas job

struct AtlasJob {
  std::vector<double> masses;
  double L = 1.0;
  double gravity = 9.81;
  double M1_min = 0.0, M1_max = 0.0, Js_min = 0.0, Js_max = 0.0;
  int nx = 50, ny = 50;
  long budget = 20000;
  std::uint64_t seed = 0;
  int samples_per_edge = 33;
  ManifoldSpec manifold;
  int n_tau = 101;
};

inline AtlasJob parse_atlas_job(const Json& j) {
  detail::check_schema(j, kAtlasSchema, "atlas");
  AtlasJob job;
  job.L = detail::num_or(j, "L", job.L);
  job.gravity = detail::num_or(j, "gravity", job.gravity);
  if (j.contains("masses")) {
    for (const auto& m : j.at("masses")) job.masses.push_back(m.get<double>());
  } else if (j.contains("generate")) {
    const Json& g = j.at("generate");
    const int n = static_cast<int>(detail::num(g, "count", "atlas.generate"));
    if (n < 1) throw ConfigError("atlas.generate: count must be >= 1");
    double m_lo = 0.25, m_hi = 0.75;
    if (g.contains("mass_range")) {
      m_lo = g.at("mass_range")[0].get<double>();
      m_hi = g.at("mass_range")[1].get<double>();
    }
    std::mt19937_64 rng(g.contains("seed") ? g.at("seed").get<std::uint64_t>()
                                           : std::uint64_t{0});
    std::uniform_real_distribution<double> um(m_lo, m_hi);
    for (int i = 0; i < n; ++i) job.masses.push_back(um(rng));
  } else {
    throw ConfigError("atlas: expected 'masses' or 'generate'");
  }
  if (job.masses.empty()) throw ConfigError("atlas: empty swarm");

  double S0 = 0.0;
  for (double m : job.masses) {
    if (m <= 0.0) throw ConfigError("atlas: masses must be > 0");
    S0 += m;
  }
  // Default grid: the bounding box of the image of the position box.
  job.M1_max = S0 * job.L / 2.0;
  job.M1_min = -job.M1_max;
  job.Js_min = 0.0;
  job.Js_max = S0 * job.L * job.L / 4.0;
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    job.M1_min = detail::num_or(g, "M1_min", job.M1_min);
    job.M1_max = detail::num_or(g, "M1_max", job.M1_max);
    job.Js_min = detail::num_or(g, "Js_min", job.Js_min);
    job.Js_max = detail::num_or(g, "Js_max", job.Js_max);
    job.nx = static_cast<int>(detail::num_or(g, "nx", job.nx));
    job.ny = static_cast<int>(detail::num_or(g, "ny", job.ny));
  }
  job.budget = static_cast<long>(detail::num_or(j, "budget", job.budget));
  if (j.contains("seed")) job.seed = j.at("seed").get<std::uint64_t>();
  job.samples_per_edge = static_cast<int>(
      detail::num_or(j, "samples_per_edge", job.samples_per_edge));
  if (j.contains("manifold")) job.manifold = parse_manifold(j.at("manifold"));
  job.n_tau = static_cast<int>(detail::num_or(j, "n_tau", job.n_tau));
  return job;
}

inline Json to_json(const AtlasJob& job) {
  return Json{{"schema", kAtlasSchema},
              {"masses", job.masses},
              {"L", job.L},
              {"gravity", job.gravity},
              {"grid", Json{{"M1_min", job.M1_min},
                            {"M1_max", job.M1_max},
                            {"Js_min", job.Js_min},
                            {"Js_max", job.Js_max},
                            {"nx", job.nx},
                            {"ny", job.ny}}},
              {"budget", job.budget},
              {"seed", job.seed},
              {"samples_per_edge", job.samples_per_edge},
              {"manifold", to_json(job.manifold)},
              {"n_tau", job.n_tau}};
}

// ---------------------------------------------------------------------------
// LQR design job

struct DesignJob {
  PhysicalParams phys;
  ManifoldSpec manifold;
  Eigen::Matrix2d Q = Eigen::Vector2d(10.0, 1.0).asDiagonal();
  double R = 1.0;
  DampingConvention convention = DampingConvention::Physical;
};

inline DesignJob parse_design_job(const Json& j) {
  detail::check_schema(j, kDesignSchema, "design");
  DesignJob job;
  if (j.contains("physical")) job.phys = parse_physical(j.at("physical"));
  if (j.contains("manifold")) job.manifold = parse_manifold(j.at("manifold"));
  if (j.contains("Q")) job.Q = detail::mat2(j.at("Q"), "design.Q");
  job.R = detail::num_or(j, "R", job.R);
  if (j.contains("convention")) {
    const std::string c = j.at("convention").get<std::string>();
    if (c == "physical")
      job.convention = DampingConvention::Physical;
    else if (c == "reversed")
      job.convention = DampingConvention::Reversed;
    else
      throw ConfigError("design.convention must be 'physical' or 'reversed'");
  }
  return job;
}

inline Json to_json(const DesignJob& job) {
  return Json{{"schema", kDesignSchema},
              {"physical", to_json(job.phys)},
              {"manifold", to_json(job.manifold)},
              {"Q", detail::mat2_json(job.Q)},
              {"R", job.R},
              {"convention", job.convention == DampingConvention::Physical
                                 ? "physical"
                                 : "reversed"}};
}

// ---------------------------------------------------------------------------
// Stability check job

struct CheckJob {
  PhysicalParams phys;
  ManifoldSpec manifold;
  ParentControllerKind controller = ParentControllerKind::PD;
  PDGains pd;
  ARISEGains arise;
  SwarmGains swarm;
  TrajectorySpec traj;
  Disturbance dist;
  double z_norm_max = 0.0;  // initial-error radius for the Jdot bound
};

inline CheckJob parse_check_job(const Json& j) {
  detail::check_schema(j, kCheckSchema, "check");
  CheckJob job;
  if (j.contains("physical")) job.phys = parse_physical(j.at("physical"));
  if (j.contains("manifold")) job.manifold = parse_manifold(j.at("manifold"));
  if (j.contains("controller")) {
    const std::string c = j.at("controller").get<std::string>();
    if (c == "pd")
      job.controller = ParentControllerKind::PD;
    else if (c == "arise")
      job.controller = ParentControllerKind::ARISE;
    else
      throw ConfigError("check.controller must be 'pd' or 'arise'");
  }
  if (j.contains("pd")) job.pd = parse_pd(j.at("pd"));
  if (j.contains("arise")) job.arise = parse_arise(j.at("arise"));
  if (j.contains("swarm")) job.swarm = parse_swarm_gains(j.at("swarm"));
  if (j.contains("trajectory")) job.traj = parse_trajectory(j.at("trajectory"));
  if (j.contains("disturbance"))
    job.dist = parse_disturbance(j.at("disturbance"));
  job.z_norm_max = detail::num_or(j, "z_norm_max", job.z_norm_max);
  return job;
}

inline Json to_json(const CheckJob& job) {
  return Json{{"schema", kCheckSchema},
              {"physical", to_json(job.phys)},
              {"manifold", to_json(job.manifold)},
              {"controller",
               job.controller == ParentControllerKind::PD ? "pd" : "arise"},
              {"pd", to_json(job.pd)},
              {"arise", to_json(job.arise)},
              {"swarm", to_json(job.swarm)},
              {"trajectory", to_json(job.traj)},
              {"disturbance", to_json(job.dist)},
              {"z_norm_max", job.z_norm_max}};
}

/// Full audit for a check job: parent-controller conditions plus the
/// force-controlled swarm's epsilon witness.
inline StabilityReport run_check(const CheckJob& job) {
  StabilityReport rep;
  if (job.controller == ParentControllerKind::PD) {
    const JdotBound b = jdot_max_bound(job.phys, job.pd, job.swarm.K,
                                       job.manifold, job.z_norm_max);
    rep = check_pd_conditions(job.phys, job.pd, job.swarm.K, job.manifold,
                              b.jdot_max);
    rep.set("pd.jdot_max_signed", b.jdot_max);
    rep.set("pd.jdot_max_abs", b.jdot_max_abs);
    rep.set("pd.z_norm_max", job.z_norm_max);
  } else {
    rep = check_arise_conditions(job.phys, job.arise, job.swarm.K, job.traj,
                                 job.dist, job.manifold);
  }
  const auto eps = check_di_epsilon(job.swarm.Kp, job.swarm.Kd);
  rep.add("di.epsilon_exists", eps.has_value(),
          eps ? eps->margin : -1.0);
  if (eps) rep.set("di.epsilon", eps->epsilon);
  return rep;
}

// ---------------------------------------------------------------------------
// Sweep job

struct SweepJob {
  Json base;  // scenario document (swarmplane/scenario-v1)
  std::string axis;  // "size" | "gain" | "seed"
  std::vector<double> values;
};

inline SweepJob parse_sweep_job(const Json& j) {
  detail::check_schema(j, kSweepSchema, "sweep");
  SweepJob job;
  job.base = detail::require_key(j, "base", "sweep");
  job.axis = detail::require_key(j, "axis", "sweep").get<std::string>();
  if (job.axis != "size" && job.axis != "gain" && job.axis != "seed")
    throw ConfigError("sweep.axis must be 'size', 'gain', or 'seed'");
  const Json& vals = detail::require_key(j, "values", "sweep");
  if (!vals.is_array() || vals.empty())
    throw ConfigError("sweep.values must be a nonempty array");
  for (const auto& v : vals) job.values.push_back(v.get<double>());
  return job;
}

/// Materializes one scenario per sweep value.
inline std::vector<ScenarioConfig> expand_sweep(const SweepJob& job) {
  std::vector<ScenarioConfig> out;
  for (double v : job.values) {
    Json doc = job.base;
    if (job.axis == "size") {
      if (!doc.contains("roster") || !doc.at("roster").contains("generate"))
        throw ConfigError("sweep over size needs a generative roster");
      const int n = static_cast<int>(v);
      if (n < 1) throw ConfigError("sweep size values must be >= 1");
      doc["roster"]["generate"]["count_si"] = n - n / 2;
      doc["roster"]["generate"]["count_di"] = n / 2;
    } else if (job.axis == "gain") {
      doc["swarm"]["K"] = v;
      doc["swarm"]["Kp"] = v;
    } else {  // seed
      doc["sim"]["seed"] = static_cast<std::uint64_t>(v);
      if (doc.contains("roster") && doc.at("roster").contains("generate"))
        doc["roster"]["generate"]["seed"] = static_cast<std::uint64_t>(v);
    }
    out.push_back(parse_scenario(doc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Overrides: dotted-key assignments applied to the raw document.

inline Json parse_override_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return Json(text);  // bare strings need no quotes
  }
}

inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const Json value = parse_override_value(assignment.substr(eq + 1));

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("override has an empty key: " + path);
    const bool last = dot == std::string::npos;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(key);
      } catch (...) {
        throw ConfigError("override indexes an array with '" + key + "'");
      }
      if (idx >= node->size())
        throw ConfigError("override index out of range: " + path);
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) *node = Json::object();
      node = &(*node)[key];
    }
    if (last) {
      *node = value;
      return;
    }
    start = dot + 1;
  }
}

inline void apply_overrides(Json& doc,
                            const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) apply_override(doc, a);
}

// ---------------------------------------------------------------------------
// Result serialization

inline Json to_json(const Metrics& m) {
  return Json{{"settling_time", m.settling_time},
              {"rms_tracking", m.rms_tracking},
              {"max_theta", m.max_theta},
              {"max_member_disp", m.max_member_disp},
              {"max_e_tau", m.max_e_tau},
              {"max_e_J", m.max_e_J},
              {"final_e_tau", m.final_e_tau},
              {"final_e_J", m.final_e_J},
              {"violations", m.violations},
              {"lambda_hat_final",
               Json::array({m.lambda_hat_final[0], m.lambda_hat_final[1],
                            m.lambda_hat_final[2], m.lambda_hat_final[3]})}};
}

inline Json to_json(const StabilityReport& rep) {
  Json conditions = Json::array();
  for (const auto& c : rep.conditions)
    conditions.push_back(
        Json{{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
  return Json{{"all_pass", rep.all_pass()},
              {"conditions", conditions},
              {"constants", rep.constants}};
}

inline Json to_json(const LqrDesign& d) {
  return Json{{"k1", d.k1},
              {"k2", d.k2},
              {"P", detail::mat2_json(d.P)}};
}

inline Json sweep_table_json(const SweepJob& job,
                             const std::vector<SweepRow>& rows) {
  Json table = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Json row{{"axis", job.axis},
             {"value", job.values[i]},
             {"ok", rows[i].ok}};
    if (rows[i].ok)
      row["metrics"] = to_json(rows[i].metrics);
    else
      row["error"] = rows[i].error;
    table.push_back(row);
  }
  return Json{{"schema", "swarmplane/sweep-result-v1"}, {"rows", table}};
}

// ---------------------------------------------------------------------------
// File IO

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

}  // namespace swarmplane

#endif  // SWARMPLANE_CONFIG_HPP
