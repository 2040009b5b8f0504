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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qconsensus/metrics.hpp"
#include "test_util.hpp"

using namespace qconsensus;

namespace {

Trajectory series(std::vector<double> values, const std::string& name = metric_names::kLyapunov) {
  Trajectory tr;
  for (std::size_t k = 0; k < values.size(); ++k) tr.times.push_back(0.5 * static_cast<double>(k));
  tr.metrics[name] = std::move(values);
  return tr;
}

}  // namespace

TEST_CASE("lyapunov_V") {
  const Ket psi = ket_from_angles(0.9, 0.4);
  CHECK(lyapunov_V(std::vector<Ket>(4, psi), chain(4)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(lyapunov_V(std::vector<Ket>{Ket::zero_state(), Ket::one_state()}, chain(2)) == doctest::Approx(1.0));
  const Ket minus(-psi.a0(), -psi.a1());
  CHECK(lyapunov_V(std::vector<Ket>{psi, minus}, chain(2)) == doctest::Approx(2.0));
  CHECK_THROWS_KIND(lyapunov_V(std::vector<Ket>{psi}, chain(2)), ErrorKind::kInvalidArgument);
  CHECK_THROWS_KIND(lyapunov_V(std::vector<Ket>(4, psi), grid(2)), ErrorKind::kIncompatibleTopology);
}

TEST_CASE("property: V lies in [0, 2(N-1)]") {
  std::mt19937_64 g(51);
  for (int k = 0; k < 500; ++k) {
    const auto kets = testutil::random_kets(6, g);
    const double v = lyapunov_V(kets, chain(6));
    CHECK(v >= -1e-15);
    CHECK(v <= 10.0 + 1e-15);
  }
}

TEST_CASE("lyapunov_decay_terms") {
  for (double w : lyapunov_decay_terms(std::vector<Ket>(3, ket_from_angles(2.0, 1.0)), chain(3)))
    CHECK(w == 0.0);
  const auto w = lyapunov_decay_terms(std::vector<Ket>{Ket::zero_state(), Ket::one_state()}, chain(2));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(-1.0));
  std::mt19937_64 g(52);
  for (int k = 0; k < 500; ++k)
    for (double x : lyapunov_decay_terms(testutil::random_kets(5, g), chain(5))) CHECK(x <= 1e-15);
}

TEST_CASE("pure_state_error") {
  CHECK(pure_state_error(std::vector<Ket>(3, ket_from_angles(1, 1))) < 1e-15);
  CHECK(pure_state_error(std::vector<Ket>{Ket::zero_state(), Ket::one_state()}) ==
        doctest::Approx(std::sqrt(2.0)));
  std::mt19937_64 g(53);
  for (int k = 0; k < 200; ++k) {
    auto kets = testutil::random_kets(4, g);
    const double before = pure_state_error(kets);
    const Unitary2 u = testutil::random_unitary(g);
    for (Ket& psi : kets) psi = u.apply(psi);
    CHECK(pure_state_error(kets) == doctest::Approx(before).epsilon(1e-12));
  }
  CHECK_THROWS_KIND(pure_state_error(std::vector<Ket>{Ket::zero_state()}), ErrorKind::kInvalidArgument);
}

TEST_CASE("settling_time") {
  CHECK(*settling_time(series({1e-3, 1e-4}), {1e-2, "V"}) == 0.0);
  CHECK_FALSE(settling_time(series({1.0, 0.5, 0.2}), {1e-2, "V"}).has_value());
  CHECK(*settling_time(series({1.0, 0.5, 1e-6}), {1e-5, "V"}) == 1.0);
  const Trajectory p = series({1.0, 1e-3}, metric_names::kPureStateError);
  CHECK(*settling_time(p, {1e-2, "pureStateError"}) == 0.5);
  const Trajectory c = series({1.0, 1e-3}, metric_names::kCompositeDistance);
  CHECK(*settling_time(c, {1e-2, "compositeDistance"}) == 0.5);
  CHECK_THROWS_KIND(settling_time(p, {1e-2, "V"}), ErrorKind::kUnknownMetric);
  CHECK_THROWS_KIND(settling_time(p, {0.0, "pure_state_error"}), ErrorKind::kInvalidArgument);
}

TEST_CASE("property: settling time is monotone in the threshold") {
  std::mt19937_64 g(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> v(50);
    for (double& x : v) x = std::pow(10.0, -6.0 * u(g));
    const Trajectory tr = series(v);
    double prev = -1.0;
    for (double th : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 2.0}) {
      const auto t = settling_time(tr, {th, "V"});
      const double tt = t ? *t : 1e300;
      if (prev >= 0.0) CHECK(tt <= prev);
      prev = tt;
    }
  }
}

TEST_CASE("composite_distance") {
  std::mt19937_64 g(55);
  const Eigen::MatrixXcd rho = product_state(testutil::random_kets(2, g));
  CHECK(composite_distance(rho, rho) == 0.0);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2), b = a;
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  CHECK(composite_distance(a, b) == doctest::Approx(1.0));
  const Eigen::MatrixXcd other = product_state(testutil::random_kets(2, g));
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd::Random(4, 4)).householderQ();
  CHECK(std::abs(composite_distance(u * rho * u.adjoint(), u * other * u.adjoint()) -
                 composite_distance(rho, other)) < 1e-12);
  CHECK_THROWS_KIND(composite_distance(a, Eigen::MatrixXcd::Zero(4, 4)), ErrorKind::kInvalidArgument);
}

TEST_CASE("quantum_average") {
  Eigen::MatrixXcd e01 = Eigen::MatrixXcd::Zero(4, 4);
  e01(1, 1) = 1.0;
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
  want(1, 1) = want(2, 2) = 0.5;
  CHECK((quantum_average(e01) - want).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 g(56);
  const Eigen::MatrixXcd sym = product_state(std::vector<Ket>(3, testutil::random_ket(g)));
  CHECK((quantum_average(sym) - sym).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXcd avg = quantum_average(product_state(testutil::random_kets(3, g)));
  CHECK(std::abs(avg.trace() - 1.0) < 1e-12);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = j + 1; k < 3; ++k) {
      std::vector<std::size_t> perm{0, 1, 2};
      std::swap(perm[j], perm[k]);
      CHECK((permute_qubits(avg, perm) - avg).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK_THROWS_KIND(quantum_average(Eigen::MatrixXcd::Identity(128, 128) / 128.0),
                    ErrorKind::kDimensionTooLarge);
}

TEST_CASE("coherence") {
  CHECK(coherence(density_from_bloch({0, 0, 1})) == doctest::Approx(0.0));
  CHECK(coherence(density_from_bloch({0.6, 0.8, 0})) == doctest::Approx(1.0));
  CHECK(coherence(density_from_bloch({0, 0, 0})) == 0.0);
}

TEST_CASE("product_state ordering") {
  const Eigen::MatrixXcd r = product_state(std::vector<Ket>{Ket::zero_state(), Ket::one_state()});
  CHECK(std::abs(r(1, 1) - cplx(1.0)) < 1e-15);  // |01>, qubit 0 most significant
  const std::vector<DensityMatrix> rs{density_from_bloch({0, 0, 1}), density_from_bloch({0, 0, -1})};
  CHECK((product_state(rs) - r).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(min_eigenvalue(r) == doctest::Approx(0.0));
}
