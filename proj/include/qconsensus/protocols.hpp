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

// Per-qubit control Hamiltonians H_i = n_i . sigma for each consensus protocol,
// frame transforms, and the swap-based master-equation baseline.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qconsensus/graph.hpp"
#include "qconsensus/qubit.hpp"

namespace qconsensus {

// H = axis . sigma. The axis is not normalized; |axis| sets the rotation rate
// (the Bloch vector turns at angular speed 2 |axis|).
struct AxisHamiltonian {
  Vec3 axis;

  Mat2 matrix() const { return pauli_dot(axis); }
};

// Minimum-time rendezvous of two pure states.
struct MinTimePlan {
  Vec3 axis;            // unit, normal to both Bloch vectors
  double total_angle;   // angle between the Bloch vectors, [0, pi]
  double meet_time;     // total_angle / 2
};

// ---------------------------------------------------------------------------
// Two qubits, minimum time.

// normalize(s_i x s_j). Throws kParallelStates / kAntipodalStates when the
// cross product vanishes.
Vec3 two_qubit_axis(const BlochVector& s_i, const BlochVector& s_j);

// 1/2 acos(s_i . s_j), dot product clamped to [-1, 1].
double min_time(const BlochVector& s_i, const BlochVector& s_j);

MinTimePlan plan_min_time(const BlochVector& s_i, const BlochVector& s_j);

// (+1/2 n, -1/2 n) with n the unit rendezvous axis. At that magnitude each
// Bloch vector turns at unit rate, so the pair meets at min_time().
std::pair<AxisHamiltonian, AxisHamiltonian> min_time_pair_hamiltonians(const BlochVector& s_i,
                                                                       const BlochVector& s_j);

// ---------------------------------------------------------------------------
// Chain graphs, Lyapunov design.

// Node i of a chain: c(i, i+1) - c(i-1, i), with c the cross_terms vector and
// missing neighbors dropped at the two ends.
AxisHamiltonian chain_hamiltonian(std::span<const Ket> states, std::size_t i, const Topology& t);

// Closed form of the two-qubit chain axis in terms of Bloch angles. Node i
// with neighbor j; antisymmetric under exchanging (i) and (j).
Vec3 two_qubit_closed_form_axis(double theta_i, double phi_i, double theta_j, double phi_j);

// ---------------------------------------------------------------------------
// Connected graphs, geometric design.

struct WeightedBloch {
  BlochVector x;
  double weight = 1.0;
};

// x_i x ((I - x_i x_i^T) sum_j w_ij x_j). Always orthogonal to x_i.
Vec3 geometry_axis(const BlochVector& x_i, std::span<const WeightedBloch> neighbors);

// Optional distance shaping: w_ij = a_ij * f(|x_i - x_j|).
using DistanceWeight = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Frames.

// U^dagger H U re-expressed in axis form.
AxisHamiltonian hamiltonian_to_body_frame(const AxisHamiltonian& h_world, const Unitary2& u);

// R^T n
Vec3 axis_to_body_frame(const Vec3& n_world, const Rotation3& r);

// ---------------------------------------------------------------------------
// Network-wide protocol selection, consumed by the integrators.

enum class ProtocolKind {
  kChain,        // Lyapunov design, chain graphs only
  kGeometry,     // geometric design, any connected graph
  kMinTimePair,  // open-loop minimum-time rendezvous, two qubits
};

std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol(std::string_view name);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::kChain;
  // Multiplies every feedback axis. 1 reproduces the design as written.
  double gain = 1.0;
  // Geometry only; empty means w_ij = a_ij.
  DistanceWeight distance_weight;
  // When non-empty, qubit i evaluates its control law in the body frame
  // U_i (world = U_i body) and the result is mapped back to the world frame.
  std::vector<Unitary2> body_frames;
};

// ---------------------------------------------------------------------------
// Swap-operator master equation baseline on the joint 2^N state.

inline constexpr std::size_t kMaxQcmeQubits = 12;

// rho -> sum_{edges (j,k)} a_jk (U_jk rho U_jk^dagger - rho), each undirected
// edge counted once. Qubit 0 is the most significant tensor factor.
class QcmeGenerator {
 public:
  explicit QcmeGenerator(const Topology& t);

  std::size_t qubits() const { return n_; }
  Eigen::Index dimension() const { return dim_; }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  // Same result, rows split across OpenMP threads.
  Eigen::MatrixXcd apply_parallel(const Eigen::MatrixXcd& rho) const;

  struct SwapTerm {
    double weight;
    std::vector<Eigen::Index> permutation;  // basis index -> swapped index
  };
  const std::vector<SwapTerm>& terms() const { return terms_; }

 private:
  std::size_t n_;
  Eigen::Index dim_;
  std::vector<SwapTerm> terms_;
};

// Basis permutation for exchanging tensor factors j and k of an n-qubit state.
std::vector<Eigen::Index> swap_permutation(std::size_t n, std::size_t j, std::size_t k);

}  // namespace qconsensus
