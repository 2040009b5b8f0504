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

#include "qconsensus/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qconsensus/error.hpp"
#include "qconsensus/metrics.hpp"

namespace qconsensus {

std::string_view version() { return "0.1.0"; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs f(0..n-1) across OpenMP threads; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  std::exception_ptr failure;
  const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < m; ++k) {
    try {
      f(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double value_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  // Unreached settling times count as +infinity.
  for (double& x : v) {
    if (std::isnan(x)) x = std::numeric_limits<double>::infinity();
  }
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::kConfig, what); }

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    config_error("config key '" + key + "': expected a number, got '" + s + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    config_error("config key '" + key + "': expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(parse_uint(key, item));
  }
  if (out.empty()) config_error("config key '" + key + "': empty list");
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string_view init_name(InitKind k) {
  switch (k) {
    case InitKind::kRandom: return "random";
    case InitKind::kHemisphere: return "hemisphere";
    case InitKind::kEqual: return "equal";
  }
  return "random";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

// ---------------------------------------------------------------------------

BlochVector sample_sphere(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    const Vec3 v{normal(rng), normal(rng), normal(rng)};
    const double len = norm(v);
    if (len > 1e-12) return (1.0 / len) * v;
  }
}

BlochVector sample_hemisphere(std::mt19937_64& rng) {
  BlochVector v = sample_sphere(rng);
  if (v.z < 0.0) v.z = -v.z;
  return v;
}

std::vector<Ket> initial_kets(std::size_t n, InitKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Ket> kets;
  kets.reserve(n);
  const BlochVector common = sample_sphere(rng);
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind) {
      case InitKind::kRandom: kets.push_back(ket_from_bloch(sample_sphere(rng))); break;
      case InitKind::kHemisphere: kets.push_back(ket_from_bloch(sample_hemisphere(rng))); break;
      case InitKind::kEqual: kets.push_back(ket_from_bloch(common)); break;
    }
  }
  return kets;
}

// ---------------------------------------------------------------------------

std::vector<std::string> ExperimentConfig::keys() {
  return {"experiment", "topology",    "protocol",  "init",         "gain",
          "dt",         "t_max",       "sample_every", "stepper",   "execution",
          "seed",       "out",         "threshold", "resolution",   "theta_max",
          "phi_max",    "chain_sizes", "grid_sides", "seeds",       "gamma_r",
          "gamma_phi",  "gamma_z",     "eta_z",     "sde_dt",       "sde_t_max",
          "sde_sample_every", "trajectories"};
}

std::vector<std::string> ExperimentConfig::experiments() {
  return {"min-time-heatmap", "chain-run",        "grid-run",         "scaling-sweep",
          "qcme-compare",     "coherence-protect", "sphere-twin-check"};
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.integrator.dt = 1e-2;
  c.integrator.t_max = 50.0;
  c.integrator.sample_every = 10;
  if (experiment == "min-time-heatmap") {
    c.topology = "chain:2";
    c.integrator.dt = 1e-3;
    c.integrator.t_max = 20.0;
    c.integrator.sample_every = 1;
    c.threshold = 1e-5;
  } else if (experiment == "chain-run") {
  } else if (experiment == "grid-run") {
    c.topology = "grid:3";
    c.protocol = "geometry";
    c.init = InitKind::kHemisphere;
  } else if (experiment == "scaling-sweep") {
    c.integrator.dt = 2e-2;
    c.integrator.t_max = 1000.0;
    c.integrator.sample_every = 5;
  } else if (experiment == "qcme-compare") {
    c.topology = "chain:3";
    c.init = InitKind::kHemisphere;
    c.integrator.sample_every = 1;
    c.seeds = 10;
  } else if (experiment == "coherence-protect") {
  } else if (experiment == "sphere-twin-check") {
    c.topology = "grid:3";
    c.protocol = "geometry";
    c.init = InitKind::kHemisphere;
    c.integrator.t_max = 10.0;
    c.integrator.sample_every = 1;
    c.seeds = 20;
  } else {
    config_error("unknown experiment '" + experiment + "'");
  }
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") {
    const auto names = experiments();
    if (std::find(names.begin(), names.end(), value) == names.end()) {
      config_error("unknown experiment '" + value + "'");
    }
    experiment = value;
  } else if (key == "topology") {
    topology = value;
  } else if (key == "protocol") {
    protocol = value;
  } else if (key == "init") {
    if (value == "random") {
      init = InitKind::kRandom;
    } else if (value == "hemisphere") {
      init = InitKind::kHemisphere;
    } else if (value == "equal") {
      init = InitKind::kEqual;
    } else {
      config_error("config key 'init': expected random, hemisphere or equal");
    }
  } else if (key == "gain") {
    gain = parse_double(key, value);
  } else if (key == "dt") {
    integrator.dt = parse_double(key, value);
  } else if (key == "t_max") {
    integrator.t_max = parse_double(key, value);
  } else if (key == "sample_every") {
    integrator.sample_every = parse_uint(key, value);
  } else if (key == "stepper") {
    if (value == "cf4") {
      integrator.stepper = Stepper::kCommutatorFree4;
    } else if (value == "frozen") {
      integrator.stepper = Stepper::kFrozenSnapshot;
    } else {
      config_error("config key 'stepper': expected cf4 or frozen");
    }
  } else if (key == "execution") {
    if (value == "serial") {
      integrator.execution = Execution::kSerial;
    } else if (value == "parallel") {
      integrator.execution = Execution::kParallel;
    } else {
      config_error("config key 'execution': expected serial or parallel");
    }
  } else if (key == "seed") {
    seed = parse_uint(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "threshold") {
    threshold = parse_double(key, value);
  } else if (key == "resolution") {
    resolution = parse_uint(key, value);
  } else if (key == "theta_max") {
    theta_max = parse_double(key, value);
  } else if (key == "phi_max") {
    phi_max = parse_double(key, value);
  } else if (key == "chain_sizes") {
    chain_sizes = parse_list(key, value);
  } else if (key == "grid_sides") {
    grid_sides = parse_list(key, value);
  } else if (key == "seeds") {
    seeds = parse_uint(key, value);
  } else if (key == "gamma_r") {
    noise.gamma_r = parse_double(key, value);
  } else if (key == "gamma_phi") {
    noise.gamma_phi = parse_double(key, value);
  } else if (key == "gamma_z") {
    noise.gamma_z = parse_double(key, value);
  } else if (key == "eta_z") {
    noise.eta_z = parse_double(key, value);
  } else if (key == "sde_dt") {
    sde.dt = parse_double(key, value);
  } else if (key == "sde_t_max") {
    sde.t_max = parse_double(key, value);
  } else if (key == "sde_sample_every") {
    sde.sample_every = parse_uint(key, value);
  } else if (key == "trajectories") {
    trajectories = parse_uint(key, value);
  } else {
    config_error("unknown config key '" + key + "'");
  }
}

std::string ExperimentConfig::get(const std::string& key) const {
  if (key == "experiment") return experiment;
  if (key == "topology") return topology;
  if (key == "protocol") return protocol;
  if (key == "init") return std::string(init_name(init));
  if (key == "gain") return fmt(gain);
  if (key == "dt") return fmt(integrator.dt);
  if (key == "t_max") return fmt(integrator.t_max);
  if (key == "sample_every") return std::to_string(integrator.sample_every);
  if (key == "stepper") return integrator.stepper == Stepper::kCommutatorFree4 ? "cf4" : "frozen";
  if (key == "execution") return integrator.execution == Execution::kSerial ? "serial" : "parallel";
  if (key == "seed") return std::to_string(seed);
  if (key == "out") return out;
  if (key == "threshold") return fmt(threshold);
  if (key == "resolution") return std::to_string(resolution);
  if (key == "theta_max") return fmt(theta_max);
  if (key == "phi_max") return fmt(phi_max);
  if (key == "chain_sizes") return join(chain_sizes);
  if (key == "grid_sides") return join(grid_sides);
  if (key == "seeds") return std::to_string(seeds);
  if (key == "gamma_r") return fmt(noise.gamma_r);
  if (key == "gamma_phi") return fmt(noise.gamma_phi);
  if (key == "gamma_z") return fmt(noise.gamma_z);
  if (key == "eta_z") return fmt(noise.eta_z);
  if (key == "sde_dt") return fmt(sde.dt);
  if (key == "sde_t_max") return fmt(sde.t_max);
  if (key == "sde_sample_every") return std::to_string(sde.sample_every);
  if (key == "trajectories") return std::to_string(trajectories);
  config_error("unknown config key '" + key + "'");
}

std::string ExperimentConfig::to_text() const {
  std::string s;
  for (const auto& k : keys()) s += k + " = " + get(k) + "\n";
  return s;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : keys()) j[k] = get(k);
  return j;
}

void ExperimentConfig::validate() const {
  integrator.validate();
  if (!(threshold > 0.0)) config_error("threshold must be positive");
  if (!(gain > 0.0)) config_error("gain must be positive");
  if (experiment == "min-time-heatmap" && resolution < 8) {
    config_error("heatmap resolution must be at least 8");
  }
  if (experiment == "scaling-sweep" && seeds < 3) config_error("scaling sweep needs >= 3 seeds");
  if (seeds == 0) config_error("seeds must be >= 1");
  if (experiment == "coherence-protect") {
    noise.validate();
    sde.validate();
    if (trajectories < 2) config_error("need at least two trajectories");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& fallback_experiment) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string experiment = fallback_experiment;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") experiment = value;
    entries.emplace_back(std::move(key), std::move(value));
  }
  ExperimentConfig cfg = ExperimentConfig::defaults_for(experiment);
  for (const auto& [k, v] : entries) cfg.set(k, v);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& fallback_experiment) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), fallback_experiment);
}

// ---------------------------------------------------------------------------

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw Error(ErrorKind::kInvalidArgument, "CSV row width does not match header");
  }
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string s;
  auto line = [&s](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    s += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

nlohmann::json manifest(const ExperimentConfig& cfg, const ExperimentOutput& output) {
  nlohmann::json m;
  m["artifact"] = "qconsensus";
  m["version"] = std::string(version());
  m["experiment"] = cfg.experiment;
  m["seed"] = cfg.seed;
  m["config"] = cfg.to_json();
  m["config_text"] = cfg.to_text();
  try {
    m["topology"] = {{"spec", cfg.topology},
                     {"hash", parse_topology(cfg.topology).hash()}};
  } catch (const Error&) {
    m["topology"] = {{"spec", cfg.topology}, {"hash", nullptr}};
  }
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, table] : output.tables) files.push_back(name);
  files.push_back("summary.json");
  m["files"] = files;
  return m;
}

void write_output(const ExperimentConfig& cfg, const ExperimentOutput& output) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory '" + cfg.out + "'");
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(cfg.out) / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::kIo, "cannot write '" + name + "' under '" + cfg.out + "'");
    f << content;
  };
  for (const auto& [name, table] : output.tables) write(name, table.str());
  write("summary.json", output.summary.dump(2) + "\n");
  write("manifest.json", manifest(cfg, output).dump(2) + "\n");
}

// ---------------------------------------------------------------------------

HeatmapCell heatmap_cell(double theta, double dphi, const ExperimentConfig& cfg) {
  const double phi1 = 0.25 * kPi - 0.5 * dphi;
  const double phi2 = 0.25 * kPi + 0.5 * dphi;
  const std::vector<Ket> kets{ket_from_angles(theta, phi1), ket_from_angles(theta, phi2)};
  IntegratorConfig ic = cfg.integrator;
  ic.stop_threshold = cfg.threshold;
  ic.stop_metric = metric_names::kLyapunov;
  ic.record_states = false;
  ProtocolSpec spec;
  spec.gain = cfg.gain;
  const Trajectory tr = simulate_network({kets, 0.0}, chain(2), spec, ic);
  const auto t1 = settling_time(tr, {cfg.threshold, metric_names::kLyapunov});
  return {theta, dphi, value_or_nan(t1), min_time(bloch_from_ket(kets[0]), bloch_from_ket(kets[1]))};
}

ExperimentOutput run_min_time_heatmap(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t r = cfg.resolution;
  std::vector<HeatmapCell> cells(r * r + 1);
  parallel_for(cells.size(), [&](std::size_t k) {
    if (k == r * r) {
      // Control: coincident states.
      cells[k] = heatmap_cell(0.5 * cfg.theta_max, 0.0, cfg);
      return;
    }
    const double theta = (static_cast<double>(k / r) + 0.5) * cfg.theta_max / r;
    const double dphi = (static_cast<double>(k % r) + 0.5) * cfg.phi_max / r;
    cells[k] = heatmap_cell(theta, dphi, cfg);
  });
  ExperimentOutput out;
  CsvTable t{{"kind", "theta", "dphi", "t1", "t_min", "t1_minus_t_min"}, {}};
  std::size_t unreached = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    unreached += std::isnan(c.t1);
    if (!std::isnan(c.t1)) worst = std::max(worst, c.t1 - c.t_min);
    t.add({k == r * r ? "control" : "cell", fmt(c.theta), fmt(c.dphi), fmt(c.t1), fmt(c.t_min),
           fmt(c.t1 - c.t_min)});
  }
  out.tables["heatmap.csv"] = std::move(t);
  out.summary = {{"experiment", cfg.experiment},
                 {"cells", r * r},
                 {"unreached", unreached},
                 {"max_t1_minus_t_min", worst},
                 {"control_t1", number_or_null(cells.back().t1)},
                 {"control_t_min", cells.back().t_min}};
  return out;
}

// ---------------------------------------------------------------------------

ExperimentOutput run_network_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Topology topo = parse_topology(cfg.topology);
  ProtocolSpec spec;
  spec.kind = parse_protocol(cfg.protocol);
  spec.gain = cfg.gain;
  const std::vector<Ket> kets = initial_kets(topo.size(), cfg.init, cfg.seed);
  const Trajectory tr = simulate_network({kets, 0.0}, topo, spec, cfg.integrator);

  const bool use_v = spec.kind == ProtocolKind::kChain && tr.has_metric(metric_names::kLyapunov);
  const std::string metric = use_v ? metric_names::kLyapunov : metric_names::kPureStateError;
  const auto settle = settling_time(tr, {cfg.threshold, metric});

  nlohmann::json hemisphere = nullptr;
  if (spec.kind == ProtocolKind::kGeometry) {
    const auto c = open_hemisphere_direction(tr.bloch.front());
    bool kept = c.has_value();
    for (const auto& sample : tr.bloch) {
      for (const auto& x : sample) kept = kept && dot(*c, x) > 0.0;
    }
    hemisphere = kept;
  }

  ExperimentOutput out;
  CsvTable t;
  t.header.push_back("time");
  std::vector<std::string> names;
  for (const auto& [name, series] : tr.metrics) names.push_back(name);
  for (const auto& n : names) t.header.push_back(n);
  for (std::size_t i = 0; i < topo.size(); ++i) {
    for (const char* axis : {"x", "y", "z"}) {
      t.header.push_back("q" + std::to_string(i + 1) + "_" + axis);
    }
  }
  for (std::size_t s = 0; s < tr.size(); ++s) {
    std::vector<std::string> row{fmt(tr.times[s])};
    for (const auto& n : names) row.push_back(fmt(tr.metrics.at(n)[s]));
    for (const auto& b : tr.bloch[s]) {
      row.push_back(fmt(b.x));
      row.push_back(fmt(b.y));
      row.push_back(fmt(b.z));
    }
    t.add(std::move(row));
  }
  out.tables["trajectory.csv"] = std::move(t);
  out.summary = {{"experiment", cfg.experiment},
                 {"topology", topo.label()},
                 {"protocol", std::string(to_string(spec.kind))},
                 {"settling_metric", metric},
                 {"settling_threshold", cfg.threshold},
                 {"settling_time", settle ? nlohmann::json(*settle) : nlohmann::json(nullptr)},
                 {"final_pure_state_error", tr.metric(metric_names::kPureStateError).back()},
                 {"hemisphere_preserved", hemisphere},
                 {"warnings", tr.warnings}};
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ScalingPoint> scaling_points(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ScalingPoint> pts;
  for (std::size_t n : cfg.chain_sizes) {
    for (std::size_t s = 0; s < cfg.seeds; ++s) pts.push_back({"chain", n, s, kNaN});
  }
  for (std::size_t side : cfg.grid_sides) {
    for (std::size_t s = 0; s < cfg.seeds; ++s) pts.push_back({"grid", side * side, s, kNaN});
  }
  parallel_for(pts.size(), [&](std::size_t k) {
    ScalingPoint& p = pts[k];
    const bool is_chain = p.family == "chain";
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(p.qubits)));
    const Topology topo = is_chain ? chain(p.qubits) : grid(side);
    ProtocolSpec spec;
    spec.kind = is_chain ? ProtocolKind::kChain : ProtocolKind::kGeometry;
    spec.gain = cfg.gain;
    IntegratorConfig ic = cfg.integrator;
    ic.record_states = false;
    ic.stop_threshold = cfg.threshold;
    ic.stop_metric = is_chain ? metric_names::kLyapunov : metric_names::kPureStateError;
    const auto kets = initial_kets(p.qubits, is_chain ? InitKind::kRandom : InitKind::kHemisphere,
                                   trajectory_seed(cfg.seed, k));
    const Trajectory tr = simulate_network({kets, 0.0}, topo, spec, ic);
    p.settling = value_or_nan(settling_time(tr, {cfg.threshold, ic.stop_metric}));
  });
  return pts;
}

ExperimentOutput run_scaling_sweep(const ExperimentConfig& cfg) {
  const auto pts = scaling_points(cfg);
  ExperimentOutput out;
  CsvTable runs{{"family", "qubits", "seed_index", "settling_time"}, {}};
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& p : pts) {
    runs.add({p.family, std::to_string(p.qubits), std::to_string(p.seed_index), fmt(p.settling)});
    groups[{p.family, p.qubits}].push_back(p.settling);
  }
  CsvTable med{{"family", "qubits", "median_settling_time"}, {}};
  nlohmann::json summary_rows = nlohmann::json::array();
  for (const auto& [key, v] : groups) {
    const double m = median(v);
    med.add({key.first, std::to_string(key.second), fmt(m)});
    summary_rows.push_back(
        {{"family", key.first}, {"qubits", key.second}, {"median", number_or_null(m)}});
  }
  out.tables["scaling_runs.csv"] = std::move(runs);
  out.tables["scaling.csv"] = std::move(med);
  out.summary = {{"experiment", cfg.experiment},
                 {"threshold", cfg.threshold},
                 {"chain_metric", metric_names::kLyapunov},
                 {"grid_metric", metric_names::kPureStateError},
                 {"medians", summary_rows}};
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> symmetry_defect(const Trajectory& tr) {
  std::vector<double> d;
  d.reserve(tr.size());
  for (const auto& kets : tr.kets) {
    const Eigen::MatrixXcd rho = product_state(kets);
    d.push_back(composite_distance(rho, quantum_average(rho)));
  }
  return d;
}

double first_below(const std::vector<double>& times, const std::vector<double>& v, double thr) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < thr) return times[k];
  }
  return kNaN;
}

}  // namespace

QcmeComparison qcme_comparison(std::uint64_t seed, const ExperimentConfig& cfg,
                               ExperimentOutput* series) {
  const auto kets = initial_kets(3, cfg.init, seed);
  IntegratorConfig ic = cfg.integrator;
  ic.stop_threshold.reset();
  ic.record_states = true;
  const Topology line = chain(3);
  const Topology full = complete(3);
  ProtocolSpec chain_spec;
  chain_spec.gain = cfg.gain;
  ProtocolSpec geo_spec;
  geo_spec.kind = ProtocolKind::kGeometry;
  geo_spec.gain = cfg.gain;

  const Trajectory a = simulate_network({kets, 0.0}, line, chain_spec, ic);
  const Trajectory b = simulate_network({kets, 0.0}, line, geo_spec, ic);
  const Trajectory c = simulate_network({kets, 0.0}, full, geo_spec, ic);
  IntegratorConfig qc = ic;
  qc.record_states = false;
  const Eigen::MatrixXcd rho0 = product_state(kets);
  const Trajectory ql = simulate_qcme(rho0, line, qc);
  const Trajectory qf = simulate_qcme(rho0, full, qc);

  const auto da = symmetry_defect(a);
  const auto db = symmetry_defect(b);
  const auto dc = symmetry_defect(c);
  const auto& dql = ql.metric(metric_names::kCompositeDistance);
  const auto& dqf = qf.metric(metric_names::kCompositeDistance);
  const double thr = cfg.threshold;
  if (series) {
    CsvTable t{{"time", "chain_protocol", "geometry_chain", "qcme_chain", "geometry_complete",
                "qcme_complete"},
               {}};
    for (std::size_t k = 0; k < a.size(); ++k) {
      t.add({fmt(a.times[k]), fmt(da[k]), fmt(db[k]), fmt(dql[k]), fmt(dc[k]), fmt(dqf[k])});
    }
    series->tables["qcme_series.csv"] = std::move(t);
  }
  return {first_below(a.times, da, thr), first_below(b.times, db, thr),
          first_below(ql.times, dql, thr), first_below(c.times, dc, thr),
          first_below(qf.times, dqf, thr)};
}

ExperimentOutput run_qcme_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentOutput out;
  std::vector<QcmeComparison> rows(cfg.seeds);
  parallel_for(cfg.seeds, [&](std::size_t k) {
    rows[k] = qcme_comparison(trajectory_seed(cfg.seed, k), cfg, nullptr);
  });
  qcme_comparison(trajectory_seed(cfg.seed, 0), cfg, &out);
  CsvTable t{{"seed_index", "chain_protocol", "geometry_chain", "qcme_chain", "geometry_complete",
              "qcme_complete"},
             {}};
  std::vector<double> a, b, ql, c, qf;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    t.add({std::to_string(k), fmt(r.chain_protocol), fmt(r.geometry_on_chain),
           fmt(r.qcme_on_chain), fmt(r.geometry_on_complete), fmt(r.qcme_on_complete)});
    a.push_back(r.chain_protocol);
    b.push_back(r.geometry_on_chain);
    ql.push_back(r.qcme_on_chain);
    c.push_back(r.geometry_on_complete);
    qf.push_back(r.qcme_on_complete);
  }
  out.tables["qcme_settling.csv"] = std::move(t);
  const double ma = median(a), mb = median(b), mql = median(ql), mc = median(c), mqf = median(qf);
  out.summary = {{"experiment", cfg.experiment},
                 {"threshold", cfg.threshold},
                 {"median_settling",
                  {{"chain_protocol", number_or_null(ma)},
                   {"geometry_chain", number_or_null(mb)},
                   {"qcme_chain", number_or_null(mql)},
                   {"geometry_complete", number_or_null(mc)},
                   {"qcme_complete", number_or_null(mqf)}}},
                 {"geometry_faster_than_qcme_chain", mb < mql},
                 {"geometry_faster_than_qcme_complete", mc < mqf},
                 {"chain_protocol_slower_than_qcme", ma > mql}};
  return out;
}

// ---------------------------------------------------------------------------

ExperimentOutput run_coherence_protect(const ExperimentConfig& cfg) {
  cfg.validate();
  const DensityMatrix ri = density_from_bloch({1.0, 0.0, 0.0});
  const DensityMatrix rj = density_from_bloch({0.0, 1.0, 0.0});
  SdeConfig on = cfg.sde;
  on.feedback = true;
  SdeConfig off = cfg.sde;
  off.feedback = false;
  const PairEnsemble fb = simulate_protected_ensemble(ri, rj, cfg.noise, on, cfg.seed,
                                                      cfg.trajectories);
  const PairEnsemble nf = simulate_protected_ensemble(ri, rj, cfg.noise, off, cfg.seed,
                                                      cfg.trajectories);
  ExperimentOutput out;
  CsvTable t{{"time", "target_c", "fb_c1_mean", "fb_c1_se", "fb_c2_mean", "fb_c2_se",
              "fb_dist_mean", "fb_dist_se", "nofb_c1_mean", "nofb_c1_se", "nofb_c2_mean",
              "nofb_c2_se", "nofb_dist_mean", "nofb_dist_se"},
             {}};
  for (std::size_t k = 0; k < fb.times.size(); ++k) {
    t.add({fmt(fb.times[k]), fmt(1.0), fmt(fb.coherence_i.mean[k]),
           fmt(fb.coherence_i.std_error[k]), fmt(fb.coherence_j.mean[k]),
           fmt(fb.coherence_j.std_error[k]), fmt(fb.distance.mean[k]),
           fmt(fb.distance.std_error[k]), fmt(nf.coherence_i.mean[k]),
           fmt(nf.coherence_i.std_error[k]), fmt(nf.coherence_j.mean[k]),
           fmt(nf.coherence_j.std_error[k]), fmt(nf.distance.mean[k]),
           fmt(nf.distance.std_error[k])});
  }
  out.tables["coherence.csv"] = std::move(t);

  SdeConfig one = on;
  one.keep_records = true;
  const PairTrajectory first =
      simulate_protected_pair(ri, rj, cfg.noise, one, trajectory_seed(cfg.seed, 0));
  CsvTable tr{{"time", "c1", "c2", "target_c1", "target_c2", "distance"}, {}};
  for (std::size_t k = 0; k < first.times.size(); ++k) {
    tr.add({fmt(first.times[k]), fmt(first.coherence_i[k]), fmt(first.coherence_j[k]),
            fmt(first.target_i[k]), fmt(first.target_j[k]), fmt(first.distance[k])});
  }
  out.tables["trajectory0.csv"] = std::move(tr);

  const std::size_t last = fb.times.size() - 1;
  const double gap = fb.coherence_i.mean[last] - nf.coherence_i.mean[last];
  const double pooled = std::hypot(fb.coherence_i.std_error[last], nf.coherence_i.std_error[last]);
  out.summary = {{"experiment", cfg.experiment},
                 {"trajectories", cfg.trajectories},
                 {"horizon", fb.times[last]},
                 {"feedback_coherence_mean", fb.coherence_i.mean[last]},
                 {"feedback_coherence_se", fb.coherence_i.std_error[last]},
                 {"no_feedback_coherence_mean", nf.coherence_i.mean[last]},
                 {"no_feedback_coherence_se", nf.coherence_i.std_error[last]},
                 {"coherence_gap_in_pooled_se", pooled > 0.0 ? number_or_null(gap / pooled)
                                                             : nlohmann::json(nullptr)},
                 {"distance_initial", fb.distance.mean.front()},
                 {"distance_final", fb.distance.mean[last]},
                 {"suspended_steps_trajectory0", first.suspended_steps}};
  return out;
}

// ---------------------------------------------------------------------------

double twin_deviation(std::uint64_t seed, const ExperimentConfig& cfg) {
  const Topology topo = parse_topology(cfg.topology);
  const auto kets = initial_kets(topo.size(), cfg.init, seed);
  std::vector<BlochVector> x0;
  for (const auto& k : kets) x0.push_back(bloch_from_ket(k));
  ProtocolSpec spec;
  spec.kind = ProtocolKind::kGeometry;
  spec.gain = 0.5 * cfg.gain;
  IntegratorConfig ic = cfg.integrator;
  ic.stop_threshold.reset();
  ic.record_states = false;
  const Trajectory q = simulate_network({kets, 0.0}, topo, spec, ic);
  const Trajectory s = simulate_sphere(x0, topo, ic, cfg.gain);
  if (q.size() != s.size()) {
    throw Error(ErrorKind::kNumericalBreakdown, "twin trajectories sampled differently");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    for (std::size_t i = 0; i < topo.size(); ++i) {
      worst = std::max(worst, max_abs_diff(q.bloch[k][i], s.bloch[k][i]));
    }
  }
  return worst;
}

ExperimentOutput run_sphere_twin_check(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> dev(cfg.seeds);
  parallel_for(cfg.seeds,
               [&](std::size_t k) { dev[k] = twin_deviation(trajectory_seed(cfg.seed, k), cfg); });
  ExperimentOutput out;
  CsvTable t{{"seed_index", "max_deviation"}, {}};
  for (std::size_t k = 0; k < dev.size(); ++k) t.add({std::to_string(k), fmt(dev[k])});
  out.tables["twin.csv"] = std::move(t);
  out.summary = {{"experiment", cfg.experiment},
                 {"topology", cfg.topology},
                 {"max_deviation", *std::max_element(dev.begin(), dev.end())}};
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "min-time-heatmap") return run_min_time_heatmap(cfg);
  if (e == "chain-run" || e == "grid-run") return run_network_experiment(cfg);
  if (e == "scaling-sweep") return run_scaling_sweep(cfg);
  if (e == "qcme-compare") return run_qcme_compare(cfg);
  if (e == "coherence-protect") return run_coherence_protect(cfg);
  if (e == "sphere-twin-check") return run_sphere_twin_check(cfg);
  config_error("unknown experiment '" + e + "'");
}

}  // namespace qconsensus
