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

// Experiment runners behind the CLI: config parsing, seeded initial states,
// sweeps and CSV / JSON emission.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "qconsensus/decoherence.hpp"
#include "qconsensus/dynamics.hpp"
#include "qconsensus/graph.hpp"
#include "qconsensus/protocols.hpp"

namespace qconsensus {

std::string_view version();

// ---------------------------------------------------------------------------
// Initial states.

enum class InitKind { kRandom, kHemisphere, kEqual };

// Uniform on the sphere via a normalized Gaussian 3-vector.
BlochVector sample_sphere(std::mt19937_64& rng);
// As above with z < 0 samples reflected to the upper hemisphere.
BlochVector sample_hemisphere(std::mt19937_64& rng);
std::vector<Ket> initial_kets(std::size_t n, InitKind kind, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Config.

// Every setting is a `key = value` line. `keys()` lists the schema; any other
// key is a kConfig error.
struct ExperimentConfig {
  std::string experiment = "chain-run";
  std::string topology = "chain:5";
  std::string protocol = "chain";
  InitKind init = InitKind::kRandom;
  double gain = 1.0;
  IntegratorConfig integrator;
  std::uint64_t seed = 1;
  std::string out = "out";
  double threshold = 1e-2;

  // min-time-heatmap
  std::size_t resolution = 32;
  double theta_max = 0.7853981633974483;  // pi / 4
  double phi_max = 1.5707963267948966;    // pi / 2

  // scaling-sweep, qcme-compare, sphere-twin-check
  std::vector<std::size_t> chain_sizes{5, 10, 20, 40};
  std::vector<std::size_t> grid_sides{3, 4, 5};
  std::size_t seeds = 5;

  // coherence-protect
  NoiseParams noise;
  SdeConfig sde;
  std::size_t trajectories = 100;

  static std::vector<std::string> keys();
  static std::vector<std::string> experiments();
  // Defaults tuned per experiment; unknown names are kConfig errors.
  static ExperimentConfig defaults_for(const std::string& experiment);

  // Throws kConfig for unknown keys and unparsable values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  // `key = value` text, one line per key, in schema order. Parsing it back
  // reproduces the config exactly.
  std::string to_text() const;
  nlohmann::json to_json() const;
  void validate() const;
};

// Applies the lines of a config text on top of the defaults of its
// `experiment` key (or of `fallback_experiment` when absent).
ExperimentConfig parse_config(const std::string& text,
                              const std::string& fallback_experiment = "chain-run");
ExperimentConfig load_config(const std::string& path,
                             const std::string& fallback_experiment = "chain-run");

// ---------------------------------------------------------------------------
// Outputs.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string str() const;
};

// Shortest decimal form that round-trips.
std::string fmt(double v);

struct ExperimentOutput {
  std::map<std::string, CsvTable> tables;  // file name -> table
  nlohmann::json summary;
};

// Writes every table, summary.json and manifest.json under cfg.out.
void write_output(const ExperimentConfig& cfg, const ExperimentOutput& output);
nlohmann::json manifest(const ExperimentConfig& cfg, const ExperimentOutput& output);

// ---------------------------------------------------------------------------
// Runners.

struct HeatmapCell {
  double theta;
  double dphi;
  double t1;  // NaN when the threshold is never reached
  double t_min;
};

// Both qubits at polar angle theta, azimuths pi/4 -+ dphi/2, chain protocol.
HeatmapCell heatmap_cell(double theta, double dphi, const ExperimentConfig& cfg);

// Summary fields: settling_time, settling_metric, hemisphere_preserved,
// final_pure_state_error, warnings.
ExperimentOutput run_min_time_heatmap(const ExperimentConfig& cfg);
ExperimentOutput run_network_experiment(const ExperimentConfig& cfg);

struct ScalingPoint {
  std::string family;  // "chain" or "grid"
  std::size_t qubits;
  std::size_t seed_index;
  double settling;  // NaN when not reached
};
std::vector<ScalingPoint> scaling_points(const ExperimentConfig& cfg);
ExperimentOutput run_scaling_sweep(const ExperimentConfig& cfg);

// Settling times (threshold cfg.threshold on |rho - sym(rho)|) of one seeded
// three-qubit product state under the three dynamics.
struct QcmeComparison {
  double chain_protocol;
  double geometry_on_chain;
  double qcme_on_chain;
  double geometry_on_complete;
  double qcme_on_complete;
};
QcmeComparison qcme_comparison(std::uint64_t seed, const ExperimentConfig& cfg,
                               ExperimentOutput* series = nullptr);
ExperimentOutput run_qcme_compare(const ExperimentConfig& cfg);

ExperimentOutput run_coherence_protect(const ExperimentConfig& cfg);

// Largest pointwise Bloch deviation between the quantum geometric protocol
// (gain gain/2) and the sphere flow (gain gain) for one seed.
double twin_deviation(std::uint64_t seed, const ExperimentConfig& cfg);
ExperimentOutput run_sphere_twin_check(const ExperimentConfig& cfg);

// Dispatches on cfg.experiment.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

}  // namespace qconsensus
