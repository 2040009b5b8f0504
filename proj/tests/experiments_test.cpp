// Copyright 2026 The qconsensus Authors
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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qconsensus/experiments.hpp"
#include "qconsensus/metrics.hpp"
#include "test_util.hpp"

using namespace qconsensus;

TEST_CASE("config text round trip") {
  for (const std::string& name : ExperimentConfig::experiments()) {
    ExperimentConfig cfg = ExperimentConfig::defaults_for(name);
    cfg.set("seed", "12345678901");
    cfg.set("dt", "0.003");
    const ExperimentConfig back = parse_config(cfg.to_text());
    CHECK(back.to_text() == cfg.to_text());
    CHECK(back.to_json() == cfg.to_json());
  }
}

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config("# comment\nexperiment = grid-run\nseed = 9\n\n");
  CHECK(cfg.experiment == "grid-run");
  CHECK(cfg.protocol == "geometry");
  CHECK(cfg.seed == 9);
  CHECK_THROWS_KIND(parse_config("colour = red\n"), ErrorKind::kConfig);
  CHECK_THROWS_KIND(parse_config("seed = many\n"), ErrorKind::kConfig);
  CHECK_THROWS_KIND(parse_config("just words\n"), ErrorKind::kConfig);
  CHECK_THROWS_KIND(ExperimentConfig::defaults_for("fig-9"), ErrorKind::kConfig);
  CHECK_THROWS_KIND(load_config("/does/not/exist.cfg"), ErrorKind::kIo);
  ExperimentConfig small = ExperimentConfig::defaults_for("min-time-heatmap");
  small.set("resolution", "4");
  CHECK_THROWS(small.validate());
}

TEST_CASE("initial states") {
  const auto a = initial_kets(9, InitKind::kHemisphere, 3);
  const auto b = initial_kets(9, InitKind::kHemisphere, 3);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(a[i].a0() == b[i].a0());
    CHECK(bloch_from_ket(a[i]).z >= 0.0);
  }
  const auto e = initial_kets(4, InitKind::kEqual, 3);
  CHECK(pure_state_error(e) < 1e-15);
}

TEST_CASE("network experiment") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("chain-run");
  cfg.integrator.t_max = 30.0;
  const ExperimentOutput a = run_experiment(cfg);
  const ExperimentOutput b = run_experiment(cfg);
  REQUIRE(a.tables.count("trajectory.csv") == 1);
  CHECK(a.tables.at("trajectory.csv").str() == b.tables.at("trajectory.csv").str());
  CHECK(a.summary.dump() == b.summary.dump());
  const auto& header = a.tables.at("trajectory.csv").header;
  CHECK(header.front() == "time");
  CHECK(std::find(header.begin(), header.end(), "q1_x") != header.end());
  CHECK(std::find(header.begin(), header.end(), "q5_z") != header.end());
  CHECK(a.summary["final_pure_state_error"].get<double>() < 1e-2);
  CHECK(a.summary["settling_time"].is_number());

  cfg.init = InitKind::kEqual;
  CHECK(run_experiment(cfg).summary["settling_time"].get<double>() == 0.0);

  cfg.topology = "grid:2";
  CHECK_THROWS_KIND(run_experiment(cfg), ErrorKind::kIncompatibleTopology);
}

TEST_CASE("heatmap control cell") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("min-time-heatmap");
  const HeatmapCell c = heatmap_cell(0.5, 0.0, cfg);
  CHECK(c.t1 == 0.0);
  CHECK(c.t_min == 0.0);
}

TEST_CASE("coherence experiment is reproducible") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("coherence-protect");
  cfg.trajectories = 8;
  cfg.sde.t_max = 0.05;
  const ExperimentOutput a = run_experiment(cfg);
  const ExperimentOutput b = run_experiment(cfg);
  for (const auto& [name, table] : a.tables) CHECK(table.str() == b.tables.at(name).str());
  cfg.noise = {0.0, 0.0, 0.0, 1.0};
  const ExperimentOutput flat = run_experiment(cfg);
  CHECK(flat.summary["distance_final"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("manifest reproduces the config") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("sphere-twin-check");
  cfg.seeds = 2;
  const auto dir = std::filesystem::temp_directory_path() / "qconsensus_manifest_test";
  std::filesystem::remove_all(dir);
  cfg.out = dir.string();
  const ExperimentOutput out = run_experiment(cfg);
  write_output(cfg, out);
  std::ifstream in(dir / "manifest.json");
  REQUIRE(in.good());
  const nlohmann::json m = nlohmann::json::parse(in);
  CHECK(m["version"] == std::string(version()));
  CHECK(m["seed"] == cfg.seed);
  CHECK(m["experiment"] == "sphere-twin-check");
  CHECK(parse_config(m["config_text"].get<std::string>()).to_text() == cfg.to_text());
  CHECK(std::filesystem::exists(dir / "summary.json"));
  for (const auto& f : m["files"]) CHECK(std::filesystem::exists(dir / f.get<std::string>()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("fmt") {
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(2.0) == "2");
  CHECK(std::stod(fmt(1.0 / 3.0)) == 1.0 / 3.0);
}
