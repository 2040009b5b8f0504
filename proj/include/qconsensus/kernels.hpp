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

// Data-parallel inner loops of the simulators.
//
// Every kernel comes in two flavours with identical signatures: `serial` is
// the reference implementation, `omp` splits the independent outer loop
// across OpenMP threads. Each output element is computed by exactly the same
// arithmetic in both, so results agree bit for bit.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "qconsensus/graph.hpp"
#include "qconsensus/protocols.hpp"
#include "qconsensus/qubit.hpp"

namespace qconsensus::kernels {

// A protocol bound to a topology, with adjacency flattened to CSR and the
// body-frame rotations precomputed.
class CompiledProtocol {
 public:
  CompiledProtocol(const ProtocolSpec& spec, const Topology& topology);

  const ProtocolSpec& spec() const { return spec_; }
  std::size_t size() const { return n_; }

  std::span<const std::size_t> neighbor_index(std::size_t i) const {
    return {index_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> neighbor_weight(std::size_t i) const {
    return {weight_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  bool has_frames() const { return !rotations_.empty(); }
  const Rotation3& rotation(std::size_t i) const { return rotations_[i]; }
  const Unitary2& frame(std::size_t i) const { return spec_.body_frames[i]; }
  // Chain weights a_{i,i+1}.
  double link_weight(std::size_t i) const { return links_[i]; }

 private:
  ProtocolSpec spec_;
  std::size_t n_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> index_;
  std::vector<double> weight_;
  std::vector<double> links_;
  std::vector<Rotation3> rotations_;
};

// Control axis of node i given all kets and their Bloch vectors (same
// snapshot). Gain is applied.
Vec3 node_axis(const CompiledProtocol& p, std::span<const Ket> kets,
               std::span<const BlochVector> bloch, std::size_t i);

namespace serial {

void bloch_vectors(std::span<const Ket> kets, std::span<BlochVector> out);
// axes[i] = node_axis(i); `bloch` is scratch of size n.
void protocol_axes(const CompiledProtocol& p, std::span<const Ket> kets,
                   std::span<BlochVector> bloch, std::span<Vec3> axes);
// out[i] = exp(-i dt axes[i].sigma) in[i]
void advance(std::span<const Ket> in, std::span<const Vec3> axes, double dt, std::span<Ket> out);
void qcme_apply(const QcmeGenerator& g, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out);

}  // namespace serial

namespace omp {

void bloch_vectors(std::span<const Ket> kets, std::span<BlochVector> out);
void protocol_axes(const CompiledProtocol& p, std::span<const Ket> kets,
                   std::span<BlochVector> bloch, std::span<Vec3> axes);
void advance(std::span<const Ket> in, std::span<const Vec3> axes, double dt, std::span<Ket> out);
void qcme_apply(const QcmeGenerator& g, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out);

}  // namespace omp

}  // namespace qconsensus::kernels
