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

// Frozen reference values, computed once with an independent numpy/scipy
// implementation of the same conventions. Do not regenerate from this library.

#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qconsensus/decoherence.hpp"
#include "qconsensus/metrics.hpp"
#include "qconsensus/protocols.hpp"

using namespace qconsensus;

namespace {

void check_vec(const Vec3& got, std::array<double, 3> want, double tol) {
  for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - want[static_cast<std::size_t>(k)]) < tol);
}

std::vector<Ket> three_kets() {
  return {ket_from_angles(0.3, 0.2), ket_from_angles(1.7, 2.9), ket_from_angles(2.6, 4.4)};
}

}  // namespace

TEST_CASE("oracle: ket and Bloch image") {
  const Ket k = ket_from_angles(1.1, 0.7);
  CHECK(std::abs(k.a0() - cplx(0.800838273055953, -0.29232878941621104)) < 1e-15);
  CHECK(std::abs(k.a1() - cplx(0.4909981202112723, 0.1792283047852886)) < 1e-15);
  check_vec(bloch_from_ket(k), {0.6816329865934229, 0.574131544347986, 0.4535961214255773}, 1e-15);
}

TEST_CASE("oracle: cross terms") {
  check_vec(cross_terms(ket_from_angles(0.4, 1.3), ket_from_angles(2.2, 5.1)),
            {0.04572603737327746, -0.7819911616205654, 0.5882295674819006}, 1e-15);
}

TEST_CASE("oracle: chain axes, V, decay terms, pure-state error") {
  const auto ks = three_kets();
  const Topology t = chain(3);
  check_vec(chain_hamiltonian(ks, 0, t).axis,
            {-0.6440783843038606, 0.013396395873814304, 0.7462743871847075}, 1e-14);
  check_vec(chain_hamiltonian(ks, 1, t).axis,
            {0.8558137989346026, -0.3933478796922296, -0.13249474087042445}, 1e-14);
  check_vec(chain_hamiltonian(ks, 2, t).axis,
            {-0.2117354146307421, 0.3799514838184153, -0.6137796463142831}, 1e-14);
  CHECK(std::abs(lyapunov_V(ks, t) - 1.1736473246126888) < 1e-14);
  const auto w = lyapunov_decay_terms(ks, t);
  const std::array<double, 3> want{-0.9719418895177901, -0.9046946692635701, -0.5659204700943542};
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w[i] - want[i]) < 1e-14);
  CHECK(std::abs(pure_state_error(ks) - 1.3759738196148303) < 1e-14);
}

TEST_CASE("oracle: minimum time") {
  CHECK(std::abs(min_time({0.6, 0.0, 0.8}, {0.0, -0.28, 0.96}) - 0.34754192716488624) < 1e-15);
}

TEST_CASE("oracle: SU(2) to SO(3)") {
  const Vec3 n = (1.0 / std::sqrt(14.0)) * Vec3{1, 2, 3};
  const Rotation3 r = so3_from_su2(su2_from_axis_angle(n, 0.9));
  const std::array<double, 9> want{0.6486378276799027,   -0.5740030492529113, 0.49978942360864004,
                                   0.6821144868898643,   0.7297214059076174,  -0.04718576623503308,
                                   -0.33762226715321053, 0.37152007914589213, 0.8648607029538087};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(r(i, j) - want[static_cast<std::size_t>(3 * i + j)]) < 1e-14);
    }
  }
}

TEST_CASE("oracle: QCME generator and permutation average") {
  const auto ks = three_kets();
  const Eigen::MatrixXcd rho = product_state(ks);
  const Eigen::MatrixXcd g = QcmeGenerator(chain(3)).apply(rho);
  CHECK(std::abs(g.norm() - 2.0807689399086704) < 1e-13);
  CHECK(std::abs(g(1, 2) - cplx(-0.016971393090370622, -0.38836102710980314)) < 1e-14);
  CHECK(std::abs(g(3, 5) - cplx(0.05095786382334554, -0.10594896188046643)) < 1e-14);
  const Eigen::MatrixXcd avg = quantum_average(rho);
  CHECK(std::abs(composite_distance(rho, avg) - 0.7655338061348799) < 1e-13);
  CHECK(std::abs(avg(1, 2) - cplx(-0.0013447147021414928, 0.0)) < 1e-14);
}

TEST_CASE("oracle: one SME step") {
  const NoiseParams p;  // 10, 10, 0.1, 1
  const DensityMatrix r0 = density_from_bloch({0.3, 0.5, -0.2});
  const SmeStep s = sme_step(r0, AxisHamiltonian{{0.7, -1.2, 0.4}}, p, 0.013, 1e-3);
  CHECK(std::abs(s.rho(0, 0).real() - 0.42800138876073124) < 1e-13);
  CHECK(std::abs(s.rho(0, 1) - cplx(0.14430762826529486, -0.24076095308373016)) < 1e-13);
  CHECK(std::abs(s.rho(1, 1).real() - 0.5719986112392688) < 1e-13);
  REQUIRE(s.dy.has_value());
  CHECK(std::abs(*s.dy - 0.020354804791094465) < 1e-15);
}

TEST_CASE("oracle: deterministic Lindblad solution") {
  const DensityMatrix r = lindblad_evolve(density_from_bloch({1, 0, 0}), NoiseParams{}, 0.1);
  const BlochVector b = bloch_from_density(r);
  CHECK(std::abs(b.x - 0.017952964939502866) < 1e-9);
  CHECK(std::abs(b.z - 0.9816843611112658) < 1e-9);
}

TEST_CASE("oracle: geometry axis") {
  const std::vector<WeightedBloch> nb{{{1, 0, 0}, 1.0}, {{0, 0.6, 0.8}, 2.0}};
  check_vec(geometry_axis({0, 0, 1}, nb), {-1.2, 1.0, 0.0}, 1e-15);
}
