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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kBin = CLI_BIN;
const std::string kConfigs = CONFIG_DIR;

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "swarmplane_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return Json::parse(in);
}

}  // namespace

TEST_CASE("simulate writes run.csv, metrics.json, stability_report.json") {
  const auto out = scratch() / "sim";
  REQUIRE(run("simulate --config " + kConfigs + "/pd_si_4.json --out " +
              out.string() + " --set sim.duration=2") == 0);
  std::ifstream csv(out / "run.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("t,theta,omega,theta_d,", 0) == 0);

  const Json metrics = read_json(out / "metrics.json");
  CHECK(metrics.at("max_theta").get<double>() <= 0.11);
  CHECK(metrics.at("violations").get<int>() == 0);

  const Json report = read_json(out / "stability_report.json");
  CHECK(report.at("all_pass").get<bool>());
}

TEST_CASE("config errors exit with code 2") {
  CHECK(run("simulate --config /nonexistent.json --out " +
            (scratch() / "x").string()) == 2);
  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run("simulate --config " + bad.string() + " --out " +
            (scratch() / "x").string()) == 2);
  CHECK(run("simulate --config " + kConfigs + "/pd_si_4.json --out " +
            (scratch() / "x").string() + " --set sim.dt=0") == 2);
}

TEST_CASE("runtime divergence exits with code 3") {
  CHECK(run("simulate --config " + kConfigs + "/pd_si_4.json --out " +
            (scratch() / "div").string() +
            " --set initial.theta=0.5 --set sim.hard_stop=true --set "
            "sim.duration=1") == 3);
}

TEST_CASE("strict stability gates with code 4") {
  // The tracking-controller audit fails its k_s floor at the quoted gains.
  CHECK(run("check-stability --config " + kConfigs +
            "/check_arise.json --out " + (scratch() / "strict").string() +
            " --strict-stability") == 4);
  CHECK(run("check-stability --config " + kConfigs + "/check_arise.json "
            "--out " + (scratch() / "lax").string()) == 0);
  CHECK(run("check-stability --config " + kConfigs + "/check_pd.json --out " +
            (scratch() / "pd").string() + " --strict-stability") == 0);
  const Json rep = read_json(scratch() / "pd" / "stability_report.json");
  CHECK(rep.at("all_pass").get<bool>());
}

TEST_CASE("design-lqr writes both damping conventions") {
  const auto out = scratch() / "design";
  REQUIRE(run("design-lqr --config " + kConfigs + "/design_lqr.json --out " +
              out.string()) == 0);
  const Json gains = read_json(out / "gains.json");
  CHECK(gains.at("k1").get<double>() == doctest::Approx(3.1623).epsilon(1e-4));
  CHECK(gains.at("conventions").at("physical").at("k2").get<double>() ==
        doctest::Approx(1.3066).epsilon(1e-4));
  CHECK(gains.at("conventions").at("reversed").at("k2").get<double>() ==
        doctest::Approx(3.3066).epsilon(1e-4));
}

TEST_CASE("atlas writes grid, edges, and certificate") {
  const auto out = scratch() / "atlas";
  REQUIRE(run("atlas --config " + kConfigs + "/atlas_2.json --out " +
              out.string() +
              " --threads 2 --set grid.nx=12 --set grid.ny=10 "
              "--set budget=2000 --set n_tau=21") == 0);
  std::ifstream csv(out / "atlas.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 12 * 10 + 1);
  CHECK(fs::exists(out / "edges.csv"));
  CHECK(fs::exists(out / "atlas_meta.json"));
  const Json cert = read_json(out / "manifold_cert.json");
  CHECK(cert.contains("pass"));
  CHECK(cert.at("n_points").get<int>() == 21);
}

TEST_CASE("single-value sweep matches simulate") {
  const auto sim_out = scratch() / "single_sim";
  REQUIRE(run("simulate --config " + kConfigs + "/pd_si_4.json --out " +
              sim_out.string() + " --set sim.duration=2") == 0);

  // A gain sweep at the default gain runs the identical scenario.
  Json base = read_json(fs::path(kConfigs) / "pd_si_4.json");
  base["sim"]["duration"] = 2.0;
  const Json sweep_doc{{"schema", "swarmplane/sweep-v1"},
                       {"base", base},
                       {"axis", "gain"},
                       {"values", Json::array({10.0})}};
  const auto cfg_path = scratch() / "single_sweep.json";
  std::ofstream(cfg_path) << sweep_doc.dump(2);
  const auto sweep_out = scratch() / "single_sweep";
  REQUIRE(run("sweep --config " + cfg_path.string() + " --out " +
              sweep_out.string()) == 0);

  const Json metrics = read_json(sim_out / "metrics.json");
  const Json table = read_json(sweep_out / "sweep.json");
  REQUIRE(table.at("rows").size() == 1);
  const Json& row = table.at("rows")[0];
  CHECK(row.at("ok").get<bool>());
  CHECK(row.at("metrics").at("max_theta") == metrics.at("max_theta"));
  CHECK(row.at("metrics").at("rms_tracking") == metrics.at("rms_tracking"));
}

TEST_CASE("cli seed overrides config seeds") {
  Json doc{{"schema", "swarmplane/scenario-v1"},
           {"roster", Json{{"generate", Json{{"count_si", 2},
                                             {"count_di", 2},
                                             {"seed", 3}}}}},
           {"initial", Json{{"theta", 0.05}}},
           {"sim", Json{{"duration", 1.0}}}};
  const auto cfg_path = scratch() / "gen.json";
  std::ofstream(cfg_path) << doc.dump(2);
  const auto a = scratch() / "seed_a";
  const auto b = scratch() / "seed_b";
  REQUIRE(run("simulate --config " + cfg_path.string() + " --out " +
              a.string() + " --seed 1") == 0);
  REQUIRE(run("simulate --config " + cfg_path.string() + " --out " +
              b.string() + " --seed 2") == 0);
  std::ifstream fa(a / "run.csv"), fb(b / "run.csv");
  std::string la, lb;
  std::getline(fa, la);
  std::getline(fb, lb);  // headers equal
  std::getline(fa, la);
  std::getline(fb, lb);  // first samples differ (different rosters)
  CHECK(la != lb);
}
