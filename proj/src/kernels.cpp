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

#include "qconsensus/kernels.hpp"

#include <omp.h>

#include <string>

#include "qconsensus/dynamics.hpp"
#include "qconsensus/error.hpp"

namespace qconsensus::kernels {

CompiledProtocol::CompiledProtocol(const ProtocolSpec& spec, const Topology& topology)
    : spec_(spec), n_(topology.size()) {
  switch (spec_.kind) {
    case ProtocolKind::kChain:
      if (!topology.is_chain()) {
        throw Error(ErrorKind::kIncompatibleTopology,
                    "chain protocol requires a chain topology, got " + topology.label());
      }
      break;
    case ProtocolKind::kGeometry:
      if (!topology.is_connected()) {
        throw Error(ErrorKind::kDisconnectedTopology,
                    "geometric protocol requires a connected topology");
      }
      break;
    case ProtocolKind::kMinTimePair:
      if (n_ != 2 || !topology.is_connected()) {
        throw Error(ErrorKind::kIncompatibleTopology,
                    "minimum-time protocol is defined for a connected pair of qubits");
      }
      break;
  }
  if (!spec_.body_frames.empty() && spec_.body_frames.size() != n_) {
    throw Error(ErrorKind::kInvalidArgument, "need one body frame per qubit");
  }
  offsets_.reserve(n_ + 1);
  offsets_.push_back(0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (const Neighbor& nb : topology.neighbors(i)) {
      index_.push_back(nb.index);
      weight_.push_back(nb.weight);
    }
    offsets_.push_back(index_.size());
  }
  links_.assign(n_, 0.0);
  for (std::size_t i = 0; i + 1 < n_; ++i) links_[i] = topology.weight(i, i + 1);
  rotations_.reserve(spec_.body_frames.size());
  for (const Unitary2& u : spec_.body_frames) rotations_.push_back(so3_from_su2(u));
}

namespace {

Vec3 chain_axis(const CompiledProtocol& p, std::span<const Ket> kets, std::size_t i) {
  const std::size_t n = kets.size();
  Vec3 axis;
  if (!p.has_frames()) {
    if (i + 1 < n) axis += p.link_weight(i) * cross_terms(kets[i], kets[i + 1]);
    if (i > 0) axis -= p.link_weight(i - 1) * cross_terms(kets[i - 1], kets[i]);
    return axis;
  }
  // Neighbours' kets expressed in frame i.
  const Mat2 to_body = p.frame(i).matrix().adjoint();
  const Ket self = kets[i].evolved(to_body);
  if (i + 1 < n) axis += p.link_weight(i) * cross_terms(self, kets[i + 1].evolved(to_body));
  if (i > 0) axis -= p.link_weight(i - 1) * cross_terms(kets[i - 1].evolved(to_body), self);
  return p.rotation(i).apply(axis);
}

Vec3 geometric_axis(const CompiledProtocol& p, std::span<const BlochVector> bloch,
                    std::size_t i) {
  const auto idx = p.neighbor_index(i);
  const auto w = p.neighbor_weight(i);
  const auto& shape = p.spec().distance_weight;
  const BlochVector xi = bloch[i];
  Vec3 u;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const BlochVector& xj = bloch[idx[k]];
    const double wk = shape ? w[k] * shape(norm(xi - xj)) : w[k];
    u += wk * xj;
  }
  if (!p.has_frames()) {
    const WeightedBloch sum{u, 1.0};
    return geometry_axis(xi, {&sum, 1});
  }
  const Rotation3& r = p.rotation(i);
  const WeightedBloch sum{r.apply_transpose(u), 1.0};
  return r.apply(geometry_axis(r.apply_transpose(xi), {&sum, 1}));
}

}  // namespace

Vec3 node_axis(const CompiledProtocol& p, std::span<const Ket> kets,
               std::span<const BlochVector> bloch, std::size_t i) {
  Vec3 axis;
  switch (p.spec().kind) {
    case ProtocolKind::kChain: axis = chain_axis(p, kets, i); break;
    case ProtocolKind::kGeometry: axis = geometric_axis(p, bloch, i); break;
    case ProtocolKind::kMinTimePair:
      throw Error(ErrorKind::kInvalidArgument,
                  "minimum-time protocol is open loop and has no per-node feedback axis");
  }
  return p.spec().gain * axis;
}

namespace {

void qcme_column(const QcmeGenerator& g, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out,
                 Eigen::Index b) {
  const Eigen::Index dim = g.dimension();
  for (Eigen::Index a = 0; a < dim; ++a) out(a, b) = 0.0;
  for (const auto& term : g.terms()) {
    const Eigen::Index pb = term.permutation[static_cast<std::size_t>(b)];
    for (Eigen::Index a = 0; a < dim; ++a) {
      const Eigen::Index pa = term.permutation[static_cast<std::size_t>(a)];
      out(a, b) += term.weight * (rho(pa, pb) - rho(a, b));
    }
  }
}

void check_qcme_shapes(const QcmeGenerator& g, const Eigen::MatrixXcd& rho,
                       Eigen::MatrixXcd& out) {
  if (rho.rows() != g.dimension() || rho.cols() != g.dimension()) {
    throw Error(ErrorKind::kInvalidArgument, "joint state dimension does not match generator");
  }
  out.resize(g.dimension(), g.dimension());
}

}  // namespace

namespace serial {

void bloch_vectors(std::span<const Ket> kets, std::span<BlochVector> out) {
  for (std::size_t i = 0; i < kets.size(); ++i) out[i] = bloch_from_ket(kets[i]);
}

void protocol_axes(const CompiledProtocol& p, std::span<const Ket> kets,
                   std::span<BlochVector> bloch, std::span<Vec3> axes) {
  if (p.spec().kind == ProtocolKind::kGeometry) bloch_vectors(kets, bloch);
  for (std::size_t i = 0; i < kets.size(); ++i) axes[i] = node_axis(p, kets, bloch, i);
}

void advance(std::span<const Ket> in, std::span<const Vec3> axes, double dt, std::span<Ket> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = step_ket(in[i], AxisHamiltonian{axes[i]}, dt);
}

void qcme_apply(const QcmeGenerator& g, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
  check_qcme_shapes(g, rho, out);
  for (Eigen::Index b = 0; b < g.dimension(); ++b) qcme_column(g, rho, out, b);
}

}  // namespace serial

namespace omp {

void bloch_vectors(std::span<const Ket> kets, std::span<BlochVector> out) {
  const auto n = static_cast<std::ptrdiff_t>(kets.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = bloch_from_ket(kets[i]);
}

void protocol_axes(const CompiledProtocol& p, std::span<const Ket> kets,
                   std::span<BlochVector> bloch, std::span<Vec3> axes) {
  if (p.spec().kind == ProtocolKind::kGeometry) omp::bloch_vectors(kets, bloch);
  const auto n = static_cast<std::ptrdiff_t>(kets.size());
  std::span<const BlochVector> snapshot = bloch;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) axes[i] = node_axis(p, kets, snapshot, i);
}

void advance(std::span<const Ket> in, std::span<const Vec3> axes, double dt, std::span<Ket> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = step_ket(in[i], AxisHamiltonian{axes[i]}, dt);
}

void qcme_apply(const QcmeGenerator& g, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
  check_qcme_shapes(g, rho, out);
  const Eigen::Index dim = g.dimension();
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < dim; ++b) qcme_column(g, rho, out, b);
}

}  // namespace omp

}  // namespace qconsensus::kernels
