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

#include "qconsensus/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qconsensus/error.hpp"
#include "qconsensus/protocols.hpp"

namespace qconsensus {

namespace {

void require_chain(std::span<const Ket> states, const Topology& t) {
  if (states.size() < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two states");
  if (states.size() != t.size()) {
    throw Error(ErrorKind::kInvalidArgument, "state count does not match topology");
  }
  if (!t.is_chain()) {
    throw Error(ErrorKind::kIncompatibleTopology, "Lyapunov diagnostics need a chain topology");
  }
}

std::size_t qubit_count(Eigen::Index dim) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || dim < 2) {
    throw Error(ErrorKind::kInvalidArgument, "dimension is not a power of two");
  }
  return n;
}

std::string canonical_metric(const std::string& name) {
  if (name == "pureStateError") return metric_names::kPureStateError;
  if (name == "compositeDistance") return metric_names::kCompositeDistance;
  return name;
}

}  // namespace

double lyapunov_V(std::span<const Ket> states, const Topology& t) {
  require_chain(states, t);
  double v = static_cast<double>(states.size() - 1);
  for (std::size_t i = 0; i + 1 < states.size(); ++i) v -= states[i].inner(states[i + 1]).real();
  return v;
}

std::vector<double> lyapunov_decay_terms(std::span<const Ket> states, const Topology& t) {
  require_chain(states, t);
  const std::size_t n = states.size();
  std::vector<Vec3> c(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) c[i] = cross_terms(states[i], states[i + 1]);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 h = chain_hamiltonian(states, i, t).axis;
    Vec3 g;
    if (i + 1 < n) g -= c[i];
    if (i > 0) g += c[i - 1];
    w[i] = dot(h, g);
  }
  return w;
}

double pure_state_error(std::span<const Ket> states) {
  if (states.size() < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two states");
  std::vector<Mat2> rho;
  rho.reserve(states.size());
  for (const Ket& k : states) rho.push_back(DensityMatrix::from_pure(k).matrix());
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    for (std::size_t j = i + 1; j < rho.size(); ++j) {
      worst = std::max(worst, frobenius_norm(rho[i] - rho[j]));
    }
  }
  return worst;
}

std::optional<double> settling_time(const Trajectory& traj, const SettlingSpec& spec) {
  if (!(spec.threshold > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "settling threshold must be positive");
  }
  const auto& series = traj.metric(canonical_metric(spec.metric));
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] < spec.threshold) return traj.times[k];
  }
  return std::nullopt;
}

double composite_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& rho_bar) {
  if (rho.rows() != rho_bar.rows() || rho.cols() != rho_bar.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "composite_distance: dimension mismatch");
  }
  const Eigen::MatrixXcd d = rho - rho_bar;
  if ((d - d.adjoint()).cwiseAbs().maxCoeff() <= 1e-12) {
    const Eigen::MatrixXcd h = 0.5 * (d + d.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .cwiseAbs()
        .maxCoeff();
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues()(0);
}

Eigen::MatrixXcd permute_qubits(const Eigen::MatrixXcd& rho, std::span<const std::size_t> perm) {
  const std::size_t n = qubit_count(rho.rows());
  if (perm.size() != n) throw Error(ErrorKind::kInvalidArgument, "permutation size mismatch");
  const Eigen::Index dim = rho.rows();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    Eigen::Index t = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const auto bit = (s >> (n - 1 - q)) & 1;
      t |= bit << (n - 1 - perm[q]);
    }
    map[static_cast<std::size_t>(s)] = t;
  }
  Eigen::MatrixXcd out(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      out(map[static_cast<std::size_t>(a)], map[static_cast<std::size_t>(b)]) = rho(a, b);
    }
  }
  return out;
}

Eigen::MatrixXcd quantum_average(const Eigen::MatrixXcd& rho0) {
  if (rho0.rows() != rho0.cols()) throw Error(ErrorKind::kInvalidArgument, "matrix not square");
  const std::size_t n = qubit_count(rho0.rows());
  if (n > kMaxAverageQubits) {
    throw Error(ErrorKind::kDimensionTooLarge, "quantum_average is limited to 6 qubits");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(rho0.rows(), rho0.cols());
  double count = 0.0;
  do {
    sum += permute_qubits(rho0, perm);
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / count;
}

namespace {

Eigen::Matrix2cd to_eigen(const Mat2& m) {
  Eigen::Matrix2cd e;
  e << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
  return e;
}

template <class Range, class ToMat>
Eigen::MatrixXcd kron_all(const Range& items, ToMat to_mat) {
  if (items.empty()) throw Error(ErrorKind::kInvalidArgument, "product of zero factors");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& it : items) {
    const Eigen::Matrix2cd f = to_eigen(to_mat(it));
    // acc (x) f
    Eigen::MatrixXcd next(acc.rows() * 2, acc.cols() * 2);
    for (Eigen::Index a = 0; a < acc.rows(); ++a) {
      for (Eigen::Index b = 0; b < acc.cols(); ++b) next.block<2, 2>(2 * a, 2 * b) = acc(a, b) * f;
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

Eigen::MatrixXcd product_state(std::span<const Ket> states) {
  return kron_all(states, [](const Ket& k) { return DensityMatrix::from_pure(k).matrix(); });
}

Eigen::MatrixXcd product_state(std::span<const DensityMatrix> states) {
  return kron_all(states, [](const DensityMatrix& d) { return d.matrix(); });
}

double min_eigenvalue(const Eigen::MatrixXcd& h) {
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double coherence(const DensityMatrix& rho) {
  const BlochVector b = bloch_from_density(rho);
  return std::hypot(b.x, b.y);
}

}  // namespace qconsensus
