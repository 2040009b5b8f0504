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

// Scalar diagnostics over network states and trajectories.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qconsensus/dynamics.hpp"
#include "qconsensus/graph.hpp"
#include "qconsensus/qubit.hpp"

namespace qconsensus {

// (N-1) - sum_i Re<psi_i|psi_{i+1}>, in [0, 2(N-1)]. Requires a chain.
double lyapunov_V(std::span<const Ket> states, const Topology& t);

// Per-node contributions W_i to dV/dt under the chain protocol at unit gain.
// Each is minus a sum of squares.
std::vector<double> lyapunov_decay_terms(std::span<const Ket> states, const Topology& t);

// max_{i<j} |rho'_i - rho'_j|_F over the pure densities of the kets.
double pure_state_error(std::span<const Ket> states);

struct SettlingSpec {
  double threshold = 1e-2;
  // One of the metric_names; "pureStateError" and "compositeDistance" are
  // accepted as aliases.
  std::string metric = metric_names::kLyapunov;
};

// First sample time with metric < threshold, or nullopt.
std::optional<double> settling_time(const Trajectory& traj, const SettlingSpec& spec);

// Spectral norm of rho - rho_bar.
double composite_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& rho_bar);

inline constexpr std::size_t kMaxAverageQubits = 6;

// (1/N!) sum over qubit permutations of U_pi rho U_pi^dagger. N <= 6.
Eigen::MatrixXcd quantum_average(const Eigen::MatrixXcd& rho0);

// Relabels tensor factors: qubit q of the input becomes qubit perm[q].
Eigen::MatrixXcd permute_qubits(const Eigen::MatrixXcd& rho, std::span<const std::size_t> perm);

// rho'_1 (x) rho'_2 (x) ... with qubit 0 the most significant factor.
Eigen::MatrixXcd product_state(std::span<const Ket> states);
Eigen::MatrixXcd product_state(std::span<const DensityMatrix> states);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Eigen::MatrixXcd& h);

// sqrt(<sigma_x>^2 + <sigma_y>^2)
double coherence(const DensityMatrix& rho);

}  // namespace qconsensus
