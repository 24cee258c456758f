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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmplane/config.hpp"

namespace {

using swarmplane::Json;

// Exit codes shared by every subcommand.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;
constexpr int kStrictStability = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict_stability = false;
  int threads = 1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "Path to the JSON config")
      ->required();
  sub->add_option("--out", o.out_dir, "Output directory (created if missing)");
  sub->add_option("--set", o.overrides,
                  "Override a config key, e.g. --set sim.duration=30");
  sub->add_option("--seed", o.seed, "Override every seed in the config")
      ->each([&o](const std::string&) { o.seed_given = true; });
  sub->add_flag("--strict-stability", o.strict_stability,
                "Exit with code 4 if the stability pre-check fails");
  sub->add_option("--threads", o.threads, "Worker threads for sweeps/atlas")
      ->check(CLI::PositiveNumber);
}

Json load_doc(const CommonOpts& o) {
  Json doc = swarmplane::load_json_file(o.config_path);
  swarmplane::apply_overrides(doc, o.overrides);
  return doc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::filesystem::path ensure_out(const CommonOpts& o) {
  std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// The initial-error radius used by the regulation-stability audit:
// |(theta0, omega0, M1(0), Js(0))|.
double initial_z_norm(const swarmplane::ScenarioConfig& cfg) {
  const auto a0 = swarmplane::abstract_map(cfg.roster);
  return std::sqrt(cfg.theta0 * cfg.theta0 + cfg.omega0 * cfg.omega0 +
                   a0.M1 * a0.M1 + a0.Js * a0.Js);
}

swarmplane::CheckJob check_job_for(const swarmplane::ScenarioConfig& cfg) {
  swarmplane::CheckJob job;
  job.phys = cfg.phys;
  job.manifold = cfg.manifold;
  job.controller = cfg.controller;
  job.pd = cfg.pd;
  job.arise = cfg.arise;
  job.swarm = cfg.swarm;
  job.traj = cfg.traj;
  job.dist = cfg.disturbance;
  job.z_norm_max = initial_z_norm(cfg);
  return job;
}

int cmd_simulate(const CommonOpts& o) {
  Json doc = load_doc(o);
  if (o.seed_given) {
    doc["sim"]["seed"] = o.seed;
    if (doc.contains("roster") && doc.at("roster").contains("generate"))
      doc["roster"]["generate"]["seed"] = o.seed;
  }
  const auto cfg = swarmplane::parse_scenario(doc);
  const auto dir = ensure_out(o);

  const auto report = swarmplane::run_check(check_job_for(cfg));
  write_json(dir / "stability_report.json", swarmplane::to_json(report));
  if (o.strict_stability && !report.all_pass()) {
    std::cerr << "stability pre-check failed (see stability_report.json)\n";
    return kStrictStability;
  }

  const auto res = swarmplane::run_scenario(cfg);
  {
    std::ofstream csv(dir / "run.csv");
    res.log.write_csv(csv);
  }
  write_json(dir / "metrics.json", swarmplane::to_json(res.metrics));
  return kOk;
}

int cmd_atlas(const CommonOpts& o) {
  Json doc = load_doc(o);
  if (o.seed_given) doc["seed"] = o.seed;
  const auto job = swarmplane::parse_atlas_job(doc);
  const auto dir = ensure_out(o);

  const auto grid = swarmplane::build_atlas(
      job.masses, job.L, job.M1_min, job.M1_max, job.Js_min, job.Js_max,
      job.nx, job.ny, job.budget, job.seed, o.threads);
  {
    std::ofstream csv(dir / "atlas.csv");
    grid.write_csv(csv);
    std::ofstream meta(dir / "atlas_meta.json");
    grid.write_meta(meta);
  }
  {
    const auto edges = swarmplane::map_hypercube_edges(job.masses, job.L,
                                                       job.samples_per_edge);
    std::ofstream csv(dir / "edges.csv");
    swarmplane::write_polylines_csv(edges, csv);
  }
  const auto cert = swarmplane::certify_manifold(
      job.manifold, job.masses, job.L, job.n_tau, job.gravity, job.budget,
      job.seed);
  write_json(dir / "manifold_cert.json",
             Json{{"pass", cert.pass},
                  {"worst_margin", cert.worst_margin},
                  {"worst_tau", cert.worst_tau},
                  {"n_points", cert.n_points},
                  {"n_failed", cert.n_failed}});
  return kOk;
}

int cmd_design_lqr(const CommonOpts& o) {
  const auto job = swarmplane::parse_design_job(load_doc(o));
  const auto dir = ensure_out(o);

  const auto selected =
      swarmplane::lqr_design(job.phys, job.manifold, job.Q, job.R,
                             job.convention);
  const auto physical =
      swarmplane::lqr_design(job.phys, job.manifold, job.Q, job.R,
                             swarmplane::DampingConvention::Physical);
  const auto reversed =
      swarmplane::lqr_design(job.phys, job.manifold, job.Q, job.R,
                             swarmplane::DampingConvention::Reversed);
  write_json(dir / "gains.json",
             Json{{"schema", "swarmplane/gains-v1"},
                  {"selected",
                   job.convention == swarmplane::DampingConvention::Physical
                       ? "physical"
                       : "reversed"},
                  {"k1", selected.k1},
                  {"k2", selected.k2},
                  {"P", swarmplane::detail::mat2_json(selected.P)},
                  {"conventions",
                   Json{{"physical", swarmplane::to_json(physical)},
                        {"reversed", swarmplane::to_json(reversed)}}}});
  return kOk;
}

int cmd_check_stability(const CommonOpts& o) {
  const auto job = swarmplane::parse_check_job(load_doc(o));
  const auto dir = ensure_out(o);
  const auto report = swarmplane::run_check(job);
  write_json(dir / "stability_report.json", swarmplane::to_json(report));
  if (o.strict_stability && !report.all_pass()) return kStrictStability;
  return kOk;
}

int cmd_sweep(const CommonOpts& o) {
  Json doc = load_doc(o);
  if (o.seed_given && doc.contains("base")) {
    doc["base"]["sim"]["seed"] = o.seed;
    if (doc["base"].contains("roster") &&
        doc["base"]["roster"].contains("generate"))
      doc["base"]["roster"]["generate"]["seed"] = o.seed;
  }
  const auto job = swarmplane::parse_sweep_job(doc);
  const auto cfgs = swarmplane::expand_sweep(job);
  const auto dir = ensure_out(o);
  const auto rows = swarmplane::sweep(cfgs, o.threads);
  write_json(dir / "sweep.json", swarmplane::sweep_table_json(job, rows));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm-through-abstraction plane control toolbox"};
  app.require_subcommand(1);

  CommonOpts opts[5];
  auto* simulate = app.add_subcommand("simulate", "Run a closed-loop scenario");
  auto* atlas = app.add_subcommand("atlas", "Map and classify abstract space");
  auto* design = app.add_subcommand("design-lqr", "Design regulation gains");
  auto* check =
      app.add_subcommand("check-stability", "Audit stability conditions");
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario sweep");
  add_common(simulate, opts[0]);
  add_common(atlas, opts[1]);
  add_common(design, opts[2]);
  add_common(check, opts[3]);
  add_common(sweep_cmd, opts[4]);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opts[0]);
    if (atlas->parsed()) return cmd_atlas(opts[1]);
    if (design->parsed()) return cmd_design_lqr(opts[2]);
    if (check->parsed()) return cmd_check_stability(opts[3]);
    if (sweep_cmd->parsed()) return cmd_sweep(opts[4]);
  } catch (const swarmplane::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
