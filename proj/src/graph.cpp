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

#include "qconsensus/graph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <queue>
#include <sstream>

#include "qconsensus/error.hpp"

namespace qconsensus {

Topology::Topology(std::size_t n, std::vector<double> weights, std::string label)
    : n_(n), w_(std::move(weights)), label_(std::move(label)) {
  if (n_ == 0) throw Error(ErrorKind::kInvalidArgument, "topology needs at least one node");
  if (w_.size() != n_ * n_) {
    throw Error(ErrorKind::kInvalidArgument, "weight matrix must be n x n");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (w_[i * n_ + i] != 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "topology has a self loop");
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const double a = w_[i * n_ + j];
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw Error(ErrorKind::kInvalidArgument, "edge weights must be finite and nonnegative");
      }
      if (a != w_[j * n_ + i]) {
        throw Error(ErrorKind::kInvalidArgument, "weight matrix is not symmetric");
      }
    }
  }
}

Topology Topology::from_edges(std::size_t n, const std::vector<Edge>& edges, std::string label) {
  std::vector<double> w(n * n, 0.0);
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) {
      throw Error(ErrorKind::kOutOfRange, "edge endpoint out of range");
    }
    if (e.i == e.j) throw Error(ErrorKind::kInvalidArgument, "topology has a self loop");
    w[e.i * n + e.j] = e.weight;
    w[e.j * n + e.i] = e.weight;
  }
  return Topology(n, std::move(w), std::move(label));
}

std::vector<Neighbor> Topology::neighbors(std::size_t i) const {
  if (i >= n_) throw Error(ErrorKind::kOutOfRange, "node index out of range");
  std::vector<Neighbor> out;
  for (std::size_t j = 0; j < n_; ++j) {
    if (w_[i * n_ + j] > 0.0) out.push_back({j, w_[i * n_ + j]});
  }
  return out;
}

std::vector<Edge> Topology::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (w_[i * n_ + j] > 0.0) out.push_back({i, j, w_[i * n_ + j]});
  return out;
}

bool Topology::is_connected() const {
  std::vector<char> seen(n_, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < n_; ++j) {
      if (!seen[j] && w_[i * n_ + j] > 0.0) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n_;
}

bool Topology::is_chain() const {
  if (n_ < 2) return false;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const bool adjacent = (j == i + 1);
      if ((w_[i * n_ + j] > 0.0) != adjacent) return false;
    }
  }
  return true;
}

double Topology::algebraic_connectivity() const {
  if (n_ < 2) return 0.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                              static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      lap(ii, jj) = -w_[i * n_ + j];
      lap(ii, ii) += w_[i * n_ + j];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(1);
}

std::uint64_t Topology::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t n64 = n_;
  mix(&n64, sizeof n64);
  for (double w : w_) {
    std::uint64_t bits;
    std::memcpy(&bits, &w, sizeof bits);
    mix(&bits, sizeof bits);
  }
  return h;
}

Topology chain(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "chain needs at least 2 nodes");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Topology::from_edges(n, edges, "chain:" + std::to_string(n));
}

Topology grid(std::size_t side) {
  if (side < 2) throw Error(ErrorKind::kInvalidArgument, "grid side must be at least 2");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t k = r * side + c;
      if (c + 1 < side) edges.push_back({k, k + 1, 1.0});
      if (r + 1 < side) edges.push_back({k, k + side, 1.0});
    }
  }
  return Topology::from_edges(side * side, edges, "grid:" + std::to_string(side));
}

Topology complete(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "complete graph needs at least 2 nodes");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Topology::from_edges(n, edges, "complete:" + std::to_string(n));
}

Topology read_edge_list(std::istream& in, std::size_t n, std::string label) {
  std::vector<Edge> edges;
  std::size_t max_index = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long i = 0;
    long long j = 0;
    double w = 0.0;
    if (!(fields >> i)) continue;  // blank line
    std::string extra;
    if (!(fields >> j >> w) || (fields >> extra)) {
      throw Error(ErrorKind::kConfig,
                  "edge list line " + std::to_string(line_no) + ": expected `i j weight`");
    }
    if (i < 1 || j < 1) {
      throw Error(ErrorKind::kOutOfRange,
                  "edge list line " + std::to_string(line_no) + ": indices are 1-based");
    }
    edges.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), w});
    max_index = std::max({max_index, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  }
  if (n == 0) n = max_index;
  if (n == 0) throw Error(ErrorKind::kConfig, "edge list is empty");
  return Topology::from_edges(n, edges, std::move(label));
}

Topology load_edge_list(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open edge list: " + path);
  return read_edge_list(in, n, "file:" + path);
}

Topology parse_topology(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::kConfig, "topology spec must look like kind:arg, got '" + spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "file") return load_edge_list(arg);
  std::size_t value = 0;
  try {
    std::size_t used = 0;
    value = std::stoul(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kConfig, "topology size must be an integer, got '" + arg + "'");
  }
  if (kind == "chain") return chain(value);
  if (kind == "grid") return grid(value);
  if (kind == "complete") return complete(value);
  throw Error(ErrorKind::kConfig, "unknown topology kind '" + kind + "'");
}

}  // namespace qconsensus
