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

// Undirected weighted network topologies over qubit indices.
//
// Indices are 0-based in the API. Edge-list files and CLI output use 1-based
// indices.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace qconsensus {

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;
};

struct Neighbor {
  std::size_t index = 0;
  double weight = 0.0;
};

// Symmetric, zero-diagonal, nonnegative weight matrix a_ij.
class Topology {
 public:
  // Validates symmetry, zero diagonal and nonnegativity.
  Topology(std::size_t n, std::vector<double> weights, std::string label = "custom");

  static Topology from_edges(std::size_t n, const std::vector<Edge>& edges,
                             std::string label = "custom");

  std::size_t size() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  const std::string& label() const { return label_; }

  std::vector<Neighbor> neighbors(std::size_t i) const;
  // Each undirected edge once, i < j, ordered lexicographically.
  std::vector<Edge> edges() const;

  bool is_connected() const;
  // True when the edge set is exactly {(k, k+1)}.
  bool is_chain() const;

  // Second-smallest eigenvalue of the weighted Laplacian.
  double algebraic_connectivity() const;

  // FNV-1a over n and the raw weights; stable across platforms with IEEE doubles.
  std::uint64_t hash() const;

 private:
  std::size_t n_;
  std::vector<double> w_;
  std::string label_;
};

Topology chain(std::size_t n);
Topology grid(std::size_t side);
Topology complete(std::size_t n);

// `i j weight` per line, 1-based, '#' starts a comment. The node count is the
// largest index seen unless `n` is given.
Topology read_edge_list(std::istream& in, std::size_t n = 0, std::string label = "custom");
Topology load_edge_list(const std::string& path, std::size_t n = 0);

// "chain:5", "grid:3", "complete:4" or "file:<path>".
Topology parse_topology(const std::string& spec);

}  // namespace qconsensus
