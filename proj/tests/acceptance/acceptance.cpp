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

// Acceptance suite: one PASS/FAIL line per criterion, each with its measured
// runtime and budget. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qconsensus/decoherence.hpp"
#include "qconsensus/dynamics.hpp"
#include "qconsensus/experiments.hpp"
#include "qconsensus/metrics.hpp"
#include "qconsensus/protocols.hpp"

using namespace qconsensus;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail << " [over budget]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %s:%s (%.2f s / %.0f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(),
              o.detail.str().c_str(), secs, budget_s);
  std::fflush(stdout);
}

Vec3 random_unit(std::mt19937_64& g) {
  return sample_sphere(g);
}

IntegratorConfig integrator(double dt, double t_max, std::size_t every) {
  IntegratorConfig c;
  c.dt = dt;
  c.t_max = t_max;
  c.sample_every = every;
  return c;
}

ProtocolSpec protocol(ProtocolKind kind, double gain = 1.0) {
  ProtocolSpec p;
  p.kind = kind;
  p.gain = gain;
  return p;
}

Unitary2 random_unitary(std::mt19937_64& g) {
  std::uniform_real_distribution<double> a(0.0, 2.0 * kPi);
  return su2_from_axis_angle(random_unit(g), a(g));
}

double median(std::vector<double> v) {
  for (double& x : v)
    if (std::isnan(x)) x = INFINITY;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double max_bloch_gap(const Trajectory& a, const Trajectory& b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    for (std::size_t i = 0; i < a.bloch[k].size(); ++i)
      worst = std::max(worst, max_abs_diff(a.bloch[k][i], b.bloch[k][i]));
  return worst;
}

std::optional<double> settle(const Trajectory& tr, const std::string& metric, double threshold) {
  return settling_time(tr, {threshold, metric});
}

void min_time_law(Outcome& o) {
  std::mt19937_64 g(20261);
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    const Vec3 si = random_unit(g), sj = random_unit(g);
    const double angle = std::acos(std::clamp(dot(si, sj), -1.0, 1.0));
    if (angle < 1e-2 || angle > kPi - 1e-2) continue;
    const std::vector<Ket> kets{ket_from_bloch(si), ket_from_bloch(sj)};
    const double expected = 0.5 * angle;
    const Trajectory tr = simulate_network({kets, 0.0}, chain(2), protocol(ProtocolKind::kMinTimePair),
                                           integrator(1e-3, expected + 0.05, 1));
    const auto t = meeting_time(tr, 1e-6);
    const double rel = t ? std::abs(*t - expected) / expected : INFINITY;
    worst = std::max(worst, rel);
    ++done;
  }
  o.detail << " 100 pairs, max relative error " << worst;
  o.require(worst < 1e-3, "relative error < 1e-3");
}

void closed_form(Outcome& o) {
  std::mt19937_64 g(20262);
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double ti = th(g), pi = ph(g), tj = th(g), pj = ph(g);
    const std::vector<Ket> kets{ket_from_angles(ti, pi), ket_from_angles(tj, pj)};
    const Vec3 chain_axis = chain_hamiltonian(kets, 0, chain(2)).axis;
    worst = std::max(worst, max_abs_diff(two_qubit_closed_form_axis(ti, pi, tj, pj), chain_axis));
  }
  o.detail << " 1000 pairs, max axis gap " << worst;
  o.require(worst < 1e-10, "axis gap < 1e-10");
}

void chain_convergence(Outcome& o) {
  double worst_rise = -INFINITY, worst_w = -INFINITY, worst_err = 0.0, worst_t2 = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto kets = initial_kets(5, InitKind::kRandom, trajectory_seed(1, k));
    const Trajectory tr = simulate_network({kets, 0.0}, chain(5), protocol(ProtocolKind::kChain),
                                           integrator(1e-3, 50.0, 1));
    const auto& v = tr.metric(metric_names::kLyapunov);
    for (std::size_t s = 1; s < v.size(); ++s) worst_rise = std::max(worst_rise, v[s] - v[s - 1]);
    for (const auto& snap : tr.kets)
      for (double w : lyapunov_decay_terms(snap, chain(5))) worst_w = std::max(worst_w, w);
    worst_err = std::max(worst_err, tr.metric(metric_names::kPureStateError).back());
    const auto t2 = settle(tr, metric_names::kLyapunov, 1e-2);
    worst_t2 = std::max(worst_t2, t2 ? *t2 : INFINITY);
  }
  o.detail << " 10 seeds, max V rise " << worst_rise << ", max W " << worst_w
           << ", final pure-state error " << worst_err << ", max T2 " << worst_t2;
  o.require(worst_rise <= 1e-8, "V non-increasing");
  o.require(worst_w <= 1e-9, "W <= 1e-9");
  o.require(worst_err < 1e-2, "pure-state error < 1e-2");
  o.require(std::isfinite(worst_t2), "T2 finite");
}

void twin_check(Outcome& o) {
  const ExperimentConfig cfg = ExperimentConfig::defaults_for("sphere-twin-check");
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) worst = std::max(worst, twin_deviation(trajectory_seed(cfg.seed, k), cfg));
  o.detail << " grid(3), 20 seeds, max Bloch deviation " << worst;
  o.require(worst < 1e-6, "deviation < 1e-6");
}

void hemisphere(Outcome& o) {
  double min_margin = INFINITY, worst_err = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto kets = initial_kets(9, InitKind::kHemisphere, trajectory_seed(1, k));
    std::vector<BlochVector> x0;
    for (const Ket& psi : kets) x0.push_back(bloch_from_ket(psi));
    const auto c = open_hemisphere_direction(x0);
    if (!c) {
      o.require(false, "sampled state lies in a hemisphere");
      continue;
    }
    const Trajectory tr = simulate_network({kets, 0.0}, grid(3), protocol(ProtocolKind::kGeometry),
                                           integrator(1e-2, 50.0, 1));
    for (const auto& snap : tr.bloch)
      for (const auto& x : snap) min_margin = std::min(min_margin, dot(*c, x));
    worst_err = std::max(worst_err, tr.metric(metric_names::kPureStateError).back());
  }
  std::vector<Ket> board(9, Ket::zero_state());
  for (std::size_t i = 1; i < 9; i += 2) board[i] = Ket::one_state();
  const Trajectory still = simulate_network({board, 0.0}, grid(3), protocol(ProtocolKind::kGeometry),
                                            integrator(1e-2, 50.0, 10));
  double drift = 0.0;
  for (const auto& snap : still.bloch)
    for (std::size_t i = 0; i < 9; ++i) drift = std::max(drift, max_abs_diff(snap[i], still.bloch[0][i]));
  o.detail << " grid(3), 20 seeds, min hemisphere margin " << min_margin << ", final pure-state error "
           << worst_err << "; checkerboard drift " << drift << " with " << still.warnings.size()
           << " warning";
  o.require(min_margin > 0.0, "hemisphere invariant");
  o.require(worst_err < 1e-2, "pure-state error < 1e-2");
  o.require(drift < 1e-12, "counterexample stationary");
  o.require(still.warnings.size() == 1, "counterexample warned");
}

void scaling(Outcome& o) {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("scaling-sweep");
  cfg.chain_sizes = {5, 9, 10, 16, 20, 25, 40};
  cfg.grid_sides = {3, 4, 5};
  cfg.seeds = 5;
  const auto points = scaling_points(cfg);
  auto med = [&](const std::string& family, std::size_t n) {
    std::vector<double> v;
    for (const auto& p : points)
      if (p.family == family && p.qubits == n) v.push_back(p.settling);
    return median(v);
  };
  const std::vector<double> ns{5, 10, 20, 40};
  std::vector<double> t;
  for (double n : ns) t.push_back(med("chain", static_cast<std::size_t>(n)));
  o.detail << " chain T2 medians";
  for (double x : t) o.detail << " " << x;
  bool increasing = true, concave = true;
  std::vector<double> slope;
  for (std::size_t k = 1; k < t.size(); ++k) {
    increasing = increasing && t[k] > t[k - 1];
    slope.push_back((std::log(t[k]) - std::log(t[k - 1])) / (ns[k] - ns[k - 1]));
  }
  for (std::size_t k = 1; k < slope.size(); ++k) concave = concave && slope[k] < slope[k - 1];
  o.detail << "; grid vs chain";
  bool grid_smaller = true;
  for (std::size_t side : {3, 4, 5}) {
    const double tg = med("grid", side * side), tc = med("chain", side * side);
    o.detail << " N=" << side * side << ": " << tg << " < " << tc;
    grid_smaller = grid_smaller && tg < tc;
  }
  o.require(increasing && std::isfinite(t.back()), "chain settling grows and stays finite");
  o.require(concave, "log T2 concave in N");
  o.require(grid_smaller, "grid faster than chain");
}

void qcme_ordering(Outcome& o) {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("qcme-compare");
  cfg.seeds = 10;
  const ExperimentOutput out = run_qcme_compare(cfg);
  o.detail << " medians " << out.summary["median_settling"].dump();
  o.require(out.summary["geometry_faster_than_qcme_chain"].get<bool>(), "geometry < QCME on chain");
  o.require(out.summary["geometry_faster_than_qcme_complete"].get<bool>(),
            "geometry < QCME on complete graph");
  o.require(out.summary["chain_protocol_slower_than_qcme"].get<bool>(), "chain protocol > QCME on chain");
}

void invariant_suite(Outcome& o) {
  std::mt19937_64 g(20268);
  // Unitarity: long runs keep every ket normalized.
  double norm_drift = 0.0;
  {
    const auto kets = initial_kets(5, InitKind::kRandom, 77);
    const Trajectory tr = simulate_network({kets, 0.0}, chain(5), protocol(ProtocolKind::kChain),
                                           integrator(1e-3, 50.0, 100));
    for (const auto& snap : tr.kets)
      for (const Ket& k : snap) norm_drift = std::max(norm_drift, std::abs(k.norm() - 1.0));
    for (int k = 0; k < 1000; ++k) {
      const Ket psi = step_ket(ket_from_bloch(random_unit(g)), {random_unit(g)}, 0.37);
      norm_drift = std::max(norm_drift, std::abs(psi.norm() - 1.0));
    }
  }
  // Purity and mixed weight under conjugation.
  double purity_gap = 0.0;
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const DensityMatrix rho = density_from_bloch(r(g) * random_unit(g));
    const DensityMatrix c = conjugate(rho, random_unitary(g));
    purity_gap = std::max(purity_gap, std::abs(c.purity() - rho.purity()));
    purity_gap = std::max(purity_gap, std::abs(decompose(c).mixed_weight - decompose(rho).mixed_weight));
  }
  // SU(2) -> SO(3) homomorphism.
  double hom_gap = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Unitary2 u = random_unitary(g), v = random_unitary(g);
    hom_gap = std::max(hom_gap, max_abs_diff(so3_from_su2(u * v), so3_from_su2(u) * so3_from_su2(v)));
  }
  // Frame invariance, 50 random frame sets per protocol.
  double frame_gap = 0.0;
  for (ProtocolKind kind : {ProtocolKind::kChain, ProtocolKind::kGeometry}) {
    const Topology t = kind == ProtocolKind::kChain ? chain(5) : grid(3);
    const auto kets = initial_kets(t.size(), InitKind::kHemisphere, 78);
    const IntegratorConfig ic = integrator(1e-2, 5.0, 10);
    const Trajectory plain = simulate_network({kets, 0.0}, t, protocol(kind), ic);
    for (int trial = 0; trial < 50; ++trial) {
      ProtocolSpec framed = protocol(kind);
      for (std::size_t i = 0; i < t.size(); ++i) framed.body_frames.push_back(random_unitary(g));
      frame_gap = std::max(frame_gap, max_bloch_gap(plain, simulate_network({kets, 0.0}, t, framed, ic)));
    }
  }
  // Step halving on settling times at the default step.
  double halving = 0.0;
  auto relative = [](std::optional<double> a, std::optional<double> b) {
    return a && b && *a > 0.0 ? std::abs(*a - *b) / *a : INFINITY;
  };
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto kets = initial_kets(5, InitKind::kRandom, trajectory_seed(5, k));
    const auto run = [&](double dt) {
      IntegratorConfig ic = integrator(dt, 50.0, 1);
      ic.stop_threshold = 1e-2;
      ic.record_states = false;
      return settle(simulate_network({kets, 0.0}, chain(5), protocol(ProtocolKind::kChain), ic),
                    metric_names::kLyapunov, 1e-2);
    };
    halving = std::max(halving, relative(run(1e-3), run(5e-4)));
  }
  {
    const auto kets = initial_kets(9, InitKind::kHemisphere, 79);
    const auto run = [&](double dt) {
      IntegratorConfig ic = integrator(dt, 50.0, 1);
      ic.stop_threshold = 1e-2;
      ic.stop_metric = metric_names::kPureStateError;
      ic.record_states = false;
      return settle(simulate_network({kets, 0.0}, grid(3), protocol(ProtocolKind::kGeometry), ic),
                    metric_names::kPureStateError, 1e-2);
    };
    halving = std::max(halving, relative(run(1e-3), run(5e-4)));
  }
  {
    const auto kets = initial_kets(3, InitKind::kHemisphere, 80);
    const Eigen::MatrixXcd rho0 = product_state(kets);
    const auto run = [&](double dt) {
      IntegratorConfig ic = integrator(dt, 50.0, 1);
      ic.stop_threshold = 1e-2;
      ic.stop_metric = metric_names::kCompositeDistance;
      ic.record_states = false;
      return settle(simulate_qcme(rho0, chain(3), ic), metric_names::kCompositeDistance, 1e-2);
    };
    halving = std::max(halving, relative(run(1e-3), run(5e-4)));
  }
  {
    ExperimentConfig cfg = ExperimentConfig::defaults_for("min-time-heatmap");
    for (double theta : {0.3, 0.7}) {
      const double a = heatmap_cell(theta, 1.0, cfg).t1;
      cfg.integrator.dt = 5e-4;
      const double b = heatmap_cell(theta, 1.0, cfg).t1;
      cfg.integrator.dt = 1e-3;
      halving = std::max(halving, relative(a, b));
    }
  }
  o.detail << " norm drift " << norm_drift << ", purity/mixed-weight gap " << purity_gap
           << ", homomorphism gap " << hom_gap << ", frame gap " << frame_gap
           << ", step-halving change " << 100.0 * halving << "%";
  o.require(norm_drift < 1e-9, "unitarity");
  o.require(purity_gap < 1e-12, "purity and mixed weight");
  o.require(hom_gap < 1e-9, "homomorphism");
  o.require(frame_gap < 1e-9, "frame invariance");
  o.require(halving < 1e-2, "step halving < 1%");
}

void decoherence_feedback(Outcome& o) {
  const NoiseParams p;
  const DensityMatrix ri = density_from_bloch({1.0, 0.0, 0.0});
  const DensityMatrix rj = density_from_bloch({0.0, 1.0, 0.0});
  SdeConfig on;
  on.t_max = 0.5;
  SdeConfig off = on;
  off.feedback = false;
  const PairEnsemble fb = simulate_protected_ensemble(ri, rj, p, on, 1, 100);
  const PairEnsemble nf = simulate_protected_ensemble(ri, rj, p, off, 1, 100);
  const std::size_t last = fb.times.size() - 1;
  double min_gap = INFINITY;
  for (const auto* pair : {&fb.coherence_i, &fb.coherence_j}) {
    const SeriesStats& other = pair == &fb.coherence_i ? nf.coherence_i : nf.coherence_j;
    const double gap = pair->mean[last] - other.mean[last];
    min_gap = std::min(min_gap, gap / std::hypot(pair->std_error[last], other.std_error[last]));
  }
  o.detail << " t=" << fb.times[last] << " feedback C " << fb.coherence_i.mean[last] << " vs "
           << nf.coherence_i.mean[last] << ", gap " << min_gap << " pooled SE; distance "
           << fb.distance.mean.front() << " -> " << fb.distance.mean[last];
  o.require(min_gap >= 3.0, "coherence gap >= 3 pooled SE");
  o.require(fb.distance.mean[last] < fb.distance.mean.front(), "distance decreases");

  SdeConfig lin;
  lin.feedback = false;
  lin.t_max = 0.1;
  const PairEnsemble e = simulate_protected_ensemble(ri, rj, p, lin, 2, 10000);
  const BlochVector want_i = bloch_from_density(lindblad_evolve(ri, p, 0.1));
  const double want[3] = {want_i.x, want_i.y, want_i.z};
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double se = std::max(e.bloch_i[c].std_error.back(), 1e-15);
    worst = std::max(worst, std::abs(e.bloch_i[c].mean.back() - want[c]) / se);
  }
  o.detail << "; SDE vs Lindblad at t=0.1 over 10000 trajectories: " << worst << " SE";
  o.require(worst <= 3.0, "SDE mean within 3 SE of Lindblad");
}

}  // namespace

int main() {
  criterion("min-time law: meeting time = arccos(s_i.s_j)/2", 10, min_time_law);
  criterion("two-qubit closed form equals chain axis", 1, closed_form);
  criterion("chain(5) convergence", 30, chain_convergence);
  criterion("sphere twin check", 60, twin_check);
  criterion("hemisphere behavior on grid(3)", 60, hemisphere);
  criterion("scaling observations", 600, scaling);
  criterion("QCME comparison ordering", 120, qcme_ordering);
  criterion("invariant suite", 60, invariant_suite);
  criterion("decoherence feedback and SDE consistency", 300, decoherence_feedback);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
