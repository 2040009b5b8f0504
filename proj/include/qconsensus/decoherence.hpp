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

// Single-qubit stochastic master equation with relaxation, dephasing and a
// continuous weak sigma_z measurement, plus the coherence-protecting feedback
// for a qubit pair.
//
//   d rho = -i[H, rho] dt + 4 gr D[s-] rho dt + (gp + gz) D[sz] rho dt
//           + sqrt(eta gz) H[sz] rho dW
//   dy    = <sz> dt + dW / (2 sqrt(eta gz))
//
// with D[L]rho = L rho L^+ - (L^+L rho + rho L^+L)/2 and
// H[L]rho = L rho + rho L^+ - tr(L rho + rho L^+) rho. s- = |0><1| relaxes
// toward |0>, the +z pole.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qconsensus/dynamics.hpp"
#include "qconsensus/protocols.hpp"
#include "qconsensus/qubit.hpp"

namespace qconsensus {

struct NoiseParams {
  double gamma_r = 10.0;
  double gamma_phi = 10.0;
  double gamma_z = 0.1;
  double eta_z = 1.0;

  // gamma_r + gamma_phi + gamma_z
  double total() const { return gamma_r + gamma_phi + gamma_z; }
  void validate() const;
};

struct MeasurementRecord {
  std::vector<double> times;
  std::vector<double> dy;
  // Y_z(t) = (1/t) int_0^t dy
  std::vector<double> running_average;
};

struct SmeStep {
  DensityMatrix rho;
  // nullopt when gamma_z = 0: there is no output line.
  std::optional<double> dy;
};

// One exponential Euler-Maruyama step: Euler increment of the innovation
// term, then the exact flow of the (linear) dissipative drift, then the exact
// unitary exp(-i H dt). The ensemble mean therefore carries no step bias from
// the stiff drift, and arbitrarily strong feedback stays stable. Trace is renormalized and Hermiticity symmetrized;
// an eigenvalue below -1e-6 throws kNumericalBreakdown.
SmeStep sme_step(const DensityMatrix& rho, const AxisHamiltonian& h, const NoiseParams& p,
                 double dW, double dt);

// Deterministic part of the SME (dW terms dropped), RK4 from 0 to t.
DensityMatrix lindblad_evolve(const DensityMatrix& rho, const NoiseParams& p, double t,
                              double dt = 1e-4);

inline constexpr double kFeedbackWarmup = 0.01;
inline constexpr double kFeedbackFloor = 1e-3;

struct Feedback {
  AxisHamiltonian h;
  bool suspended = false;
};

// mu (cos phi, sin phi, 0) with mu = total() * c0_i / yz_i and
// phi = atan2(-x_i, y_i)/2 + atan2(-x_j, y_j)/2. Suspended (zero axis) when
// |yz_i| <= floor or either qubit sits on the z axis.
Feedback feedback_hamiltonian(const DensityMatrix& rho_i, const DensityMatrix& rho_j, double c0_i,
                              double yz_i, const NoiseParams& p, double floor = kFeedbackFloor);

struct SdeConfig {
  double dt = 1e-4;
  double t_max = 0.5;
  std::size_t sample_every = 100;
  bool feedback = true;
  double warmup = kFeedbackWarmup;
  double floor = kFeedbackFloor;
  bool keep_records = false;

  void validate() const;
};

struct PairTrajectory {
  std::vector<double> times;
  std::vector<double> coherence_i;
  std::vector<double> coherence_j;
  // No feedback, no decoherence: the states stay put, so these are C_xy(0).
  std::vector<double> target_i;
  std::vector<double> target_j;
  // |rho_i - rho_j|_F
  std::vector<double> distance;
  std::vector<BlochVector> bloch_i;
  std::vector<BlochVector> bloch_j;
  std::size_t suspended_steps = 0;
  MeasurementRecord record_i;
  MeasurementRecord record_j;
};

// One trajectory. Both qubits draw independent Wiener increments from a
// stream seeded by `seed`.
PairTrajectory simulate_protected_pair(const DensityMatrix& rho0_i, const DensityMatrix& rho0_j,
                                       const NoiseParams& p, const SdeConfig& cfg,
                                       std::uint64_t seed);

// Stream seed of trajectory `index` under a master seed.
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> std_error;
};

SeriesStats summarize(const std::vector<std::vector<double>>& runs);

struct PairEnsemble {
  std::vector<double> times;
  SeriesStats coherence_i;
  SeriesStats coherence_j;
  SeriesStats distance;
  // Bloch components of qubit i, (x, y, z) as three series.
  SeriesStats bloch_i[3];
  std::size_t trajectories = 0;
};

// M independent trajectories, run across OpenMP threads when `execution` is
// parallel. Trajectory k uses trajectory_seed(seed, k), so the result does
// not depend on the thread count.
PairEnsemble simulate_protected_ensemble(const DensityMatrix& rho0_i, const DensityMatrix& rho0_j,
                                         const NoiseParams& p, const SdeConfig& cfg,
                                         std::uint64_t seed, std::size_t trajectories,
                                         Execution execution = Execution::kParallel);

}  // namespace qconsensus
