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

#include "qconsensus/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qconsensus/error.hpp"
#include "qconsensus/kernels.hpp"

namespace qconsensus {

namespace {

constexpr double kDegenerateCross = 1e-9;

void require_unit(const BlochVector& v, const char* what) {
  if (!is_unit(v)) {
    throw Error(ErrorKind::kNotNormalized, std::string(what) + ": Bloch vector is not unit");
  }
}

}  // namespace

Vec3 two_qubit_axis(const BlochVector& s_i, const BlochVector& s_j) {
  require_unit(s_i, "two_qubit_axis");
  require_unit(s_j, "two_qubit_axis");
  const Vec3 c = cross(s_i, s_j);
  const double len = norm(c);
  if (len <= kDegenerateCross) {
    if (dot(s_i, s_j) > 0.0) {
      throw Error(ErrorKind::kParallelStates, "two_qubit_axis: states already coincide");
    }
    throw Error(ErrorKind::kAntipodalStates,
                "two_qubit_axis: antipodal states have no unique rotation plane");
  }
  return (1.0 / len) * c;
}

double min_time(const BlochVector& s_i, const BlochVector& s_j) {
  return 0.5 * std::acos(std::clamp(dot(s_i, s_j), -1.0, 1.0));
}

MinTimePlan plan_min_time(const BlochVector& s_i, const BlochVector& s_j) {
  const Vec3 axis = two_qubit_axis(s_i, s_j);
  const double angle = std::acos(std::clamp(dot(s_i, s_j), -1.0, 1.0));
  return {axis, angle, 0.5 * angle};
}

std::pair<AxisHamiltonian, AxisHamiltonian> min_time_pair_hamiltonians(const BlochVector& s_i,
                                                                       const BlochVector& s_j) {
  const Vec3 n = two_qubit_axis(s_i, s_j);
  return {AxisHamiltonian{0.5 * n}, AxisHamiltonian{-0.5 * n}};
}

AxisHamiltonian chain_hamiltonian(std::span<const Ket> states, std::size_t i, const Topology& t) {
  if (!t.is_chain()) {
    throw Error(ErrorKind::kIncompatibleTopology, "chain_hamiltonian requires a chain topology");
  }
  if (states.size() != t.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one state per chain node is required");
  }
  if (i >= states.size()) throw Error(ErrorKind::kOutOfRange, "node index out of range");
  Vec3 n;
  if (i + 1 < states.size()) n += t.weight(i, i + 1) * cross_terms(states[i], states[i + 1]);
  if (i > 0) n -= t.weight(i - 1, i) * cross_terms(states[i - 1], states[i]);
  return {n};
}

Vec3 two_qubit_closed_form_axis(double theta_i, double phi_i, double theta_j, double phi_j) {
  const double dtheta = 0.5 * (theta_i - theta_j);
  const double sphi = 0.5 * (phi_i + phi_j);
  const double dphi = 0.5 * (phi_i - phi_j);
  return {std::sin(sphi) * std::sin(dtheta), -std::cos(sphi) * std::sin(dtheta),
          -std::sin(dphi) * std::cos(dtheta)};
}

Vec3 geometry_axis(const BlochVector& x_i, std::span<const WeightedBloch> neighbors) {
  Vec3 u;
  for (const auto& nb : neighbors) u += nb.weight * nb.x;
  const Vec3 projected = u - dot(x_i, u) * x_i;
  return cross(x_i, projected);
}

AxisHamiltonian hamiltonian_to_body_frame(const AxisHamiltonian& h_world, const Unitary2& u) {
  const Mat2 hb = u.matrix().adjoint() * h_world.matrix() * u.matrix();
  Vec3 axis;
  for (int k = 0; k < 3; ++k) axis[k] = 0.5 * (pauli(k + 1) * hb).trace().real();
  return {axis};
}

Vec3 axis_to_body_frame(const Vec3& n_world, const Rotation3& r) { return r.apply_transpose(n_world); }

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kChain: return "chain";
    case ProtocolKind::kGeometry: return "geometry";
    case ProtocolKind::kMinTimePair: return "min-time";
  }
  return "unknown";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "chain") return ProtocolKind::kChain;
  if (name == "geometry") return ProtocolKind::kGeometry;
  if (name == "min-time" || name == "two-qubit-min-time") return ProtocolKind::kMinTimePair;
  throw Error(ErrorKind::kConfig, "unknown protocol '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

std::vector<Eigen::Index> swap_permutation(std::size_t n, std::size_t j, std::size_t k) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const unsigned bj = static_cast<unsigned>(n - 1 - j);
  const unsigned bk = static_cast<unsigned>(n - 1 - k);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Eigen::Index vj = (s >> bj) & 1;
    const Eigen::Index vk = (s >> bk) & 1;
    Eigen::Index t = s;
    if (vj != vk) t ^= (Eigen::Index{1} << bj) | (Eigen::Index{1} << bk);
    perm[static_cast<std::size_t>(s)] = t;
  }
  return perm;
}

QcmeGenerator::QcmeGenerator(const Topology& t) : n_(t.size()), dim_(0) {
  if (n_ > kMaxQcmeQubits) {
    throw Error(ErrorKind::kDimensionTooLarge,
                "QCME generator limited to " + std::to_string(kMaxQcmeQubits) + " qubits");
  }
  dim_ = Eigen::Index{1} << n_;
  for (const Edge& e : t.edges()) terms_.push_back({e.weight, swap_permutation(n_, e.i, e.j)});
}

Eigen::MatrixXcd QcmeGenerator::apply(const Eigen::MatrixXcd& rho) const {
  Eigen::MatrixXcd out(dim_, dim_);
  kernels::serial::qcme_apply(*this, rho, out);
  return out;
}

Eigen::MatrixXcd QcmeGenerator::apply_parallel(const Eigen::MatrixXcd& rho) const {
  Eigen::MatrixXcd out(dim_, dim_);
  kernels::omp::qcme_apply(*this, rho, out);
  return out;
}

}  // namespace qconsensus
