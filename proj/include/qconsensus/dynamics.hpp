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

// Time integration of qubit networks under state-feedback Hamiltonians, the
// classical 2-sphere twin, and the joint-state master-equation baseline.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qconsensus/graph.hpp"
#include "qconsensus/protocols.hpp"
#include "qconsensus/qubit.hpp"

namespace qconsensus {

// Metric series names shared by the integrators, metrics and CSV export.
namespace metric_names {
inline constexpr const char* kLyapunov = "V";
inline constexpr const char* kPureStateError = "pure_state_error";
inline constexpr const char* kCompositeDistance = "composite_distance";
inline constexpr const char* kMaxPairAngle = "max_pair_angle";
}  // namespace metric_names

struct NetworkState {
  std::vector<Ket> kets;
  double time = 0.0;
};

enum class Execution { kSerial, kParallel };

enum class Stepper {
  // One exponential per step with every Hamiltonian frozen at the start-of-step
  // snapshot. First order.
  kFrozenSnapshot,
  // Commutator-free fourth-order Lie group scheme: four synchronous snapshot
  // evaluations, two exponentials per qubit per step.
  kCommutatorFree4,
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 50.0;
  std::size_t sample_every = 10;
  // Stop at the first recorded sample whose `stop_metric` is below this.
  std::optional<double> stop_threshold;
  std::string stop_metric = metric_names::kLyapunov;
  Stepper stepper = Stepper::kCommutatorFree4;
  Execution execution = Execution::kSerial;
  // Keep the kets (or joint states) of every sample, not just the metrics.
  bool record_states = true;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  // Quantum network runs, when record_states is set.
  std::vector<std::vector<Ket>> kets;
  // Bloch image of every sample (quantum and sphere runs).
  std::vector<std::vector<BlochVector>> bloch;
  // Joint 2^N states of master-equation runs, when record_states is set.
  std::vector<Eigen::MatrixXcd> joint;
  std::map<std::string, std::vector<double>> metrics;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  bool has_metric(const std::string& name) const { return metrics.count(name) != 0; }
  // Throws kUnknownMetric.
  const std::vector<double>& metric(const std::string& name) const;
};

// exp(-i dt n.sigma) psi in closed form: cos(|n| dt) I - i sin(|n| dt) n^.sigma.
Ket step_ket(const Ket& psi, const AxisHamiltonian& h, double dt);

// Unit c with c . x_i > 0 for every i, if the points share an open hemisphere.
std::optional<Vec3> open_hemisphere_direction(std::span<const BlochVector> points);

// Synchronous update: each stage evaluates all N controls from one snapshot,
// then every ket advances by its own exact exponential. Records Bloch samples,
// pure_state_error for every run and V on chain topologies.
Trajectory simulate_network(const NetworkState& initial, const Topology& t,
                            const ProtocolSpec& protocol, const IntegratorConfig& cfg);

// Classical twin: dx_i/dt = gain * (I - x_i x_i^T) sum_j w_ij x_j, RK4 with
// per-step renormalization. Records Bloch samples and max_pair_angle.
Trajectory simulate_sphere(std::span<const BlochVector> x0, const Topology& t,
                           const IntegratorConfig& cfg, double gain = 1.0,
                           const DistanceWeight& distance_weight = {});

// d rho/dt = QcmeGenerator(rho) with RK4. Records composite_distance to
// `reference` (default: the permutation average of rho0) plus trace_error and
// hermiticity_error. Aborts if a sample has an eigenvalue below -1e-6.
Trajectory simulate_qcme(const Eigen::MatrixXcd& rho0, const Topology& t,
                         const IntegratorConfig& cfg,
                         const std::optional<Eigen::MatrixXcd>& reference = std::nullopt);

// Earliest time the largest pairwise Bloch angle drops below angle_tol,
// interpolated linearly between samples; nullopt if it never does.
std::optional<double> meeting_time(const Trajectory& traj, double angle_tol);

double max_pairwise_angle(std::span<const BlochVector> xs);

}  // namespace qconsensus
