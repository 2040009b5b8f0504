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

// Single-qubit state algebra: kets, density matrices, Pauli operators, the
// Bloch-ball map and the SU(2) -> SO(3) covering map.
//
// Conventions:
//   |0> is the +z pole of the Bloch sphere, |1> the -z pole.
//   ket_from_angles(theta, phi) = (e^{-i phi/2} cos(theta/2), e^{i phi/2} sin(theta/2)).
//   A Hamiltonian n.sigma rotates the Bloch vector as dx/dt = 2 n x x.

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace qconsensus {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerance tiers: algebraic identities vs composed mappings.
inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr double kComposedTol = 1e-9;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
double max_abs_diff(const Vec3& a, const Vec3& b);

// Points of the closed unit ball; unit vectors are pure states.
using BlochVector = Vec3;

// Dense 2x2 complex matrix, row-major.
class Mat2 {
 public:
  constexpr Mat2() = default;
  constexpr Mat2(cplx a00, cplx a01, cplx a10, cplx a11) : a_{a00, a01, a10, a11} {}

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }

  constexpr cplx operator()(int r, int c) const { return a_[2 * r + c]; }
  constexpr cplx& operator()(int r, int c) { return a_[2 * r + c]; }

  Mat2 adjoint() const;
  cplx trace() const { return a_[0] + a_[3]; }
  cplx det() const { return a_[0] * a_[3] - a_[1] * a_[2]; }

  Mat2& operator+=(const Mat2& o);
  Mat2& operator-=(const Mat2& o);
  Mat2& operator*=(cplx s);

  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
  friend Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
  friend Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b);

 private:
  std::array<cplx, 4> a_{};
};

double max_abs_diff(const Mat2& a, const Mat2& b);
double frobenius_norm(const Mat2& a);

// sigma_x, sigma_y, sigma_z for p = 1, 2, 3. Other p throws kOutOfRange.
Mat2 pauli(int p);
// n . sigma
Mat2 pauli_dot(const Vec3& n);

// Normalized qubit ket. Construction checks |a0|^2 + |a1|^2 = 1 within 1e-12.
class Ket {
 public:
  Ket(cplx a0, cplx a1);

  static Ket zero_state() { return Ket(1.0, 0.0); }
  static Ket one_state() { return Ket(0.0, 1.0); }
  // Rescales (a0, a1) to unit norm; rejects the zero vector.
  static Ket normalized(cplx a0, cplx a1);

  cplx a0() const { return a0_; }
  cplx a1() const { return a1_; }
  double norm() const { return std::sqrt(std::norm(a0_) + std::norm(a1_)); }

  // <this|other>
  cplx inner(const Ket& other) const;
  // <this| M |other>
  cplx sandwich(const Mat2& m, const Ket& other) const;

  // M|this>, without renormalizing. M must be unitary.
  Ket evolved(const Mat2& unitary) const;

 private:
  struct Unchecked {};
  Ket(cplx a0, cplx a1, Unchecked) : a0_(a0), a1_(a1) {}

  cplx a0_;
  cplx a1_;
};

// Hermitian, trace-one, PSD 2x2 matrix. The PSD tolerance is a parameter so
// that stochastic integrators can carry states a hair outside the ball.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Mat2& m, double psd_tol = kAlgebraicTol);

  static DensityMatrix from_pure(const Ket& psi);

  const Mat2& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }
  double purity() const;
  // Sorted ascending.
  std::array<double, 2> eigenvalues() const;

 private:
  Mat2 m_;
};

struct MixedDecomposition {
  double mixed_weight = 0.0;  // P in [0, 1]
  BlochVector pure_direction;  // unit norm
};

class Unitary2 {
 public:
  explicit Unitary2(const Mat2& m);

  static Unitary2 identity() { return Unitary2(Mat2::identity()); }

  const Mat2& matrix() const { return m_; }
  Unitary2 adjoint() const;
  Ket apply(const Ket& psi) const { return psi.evolved(m_); }

  friend Unitary2 operator*(const Unitary2& a, const Unitary2& b);

 private:
  struct Unchecked {};
  Unitary2(const Mat2& m, Unchecked) : m_(m) {}

  Mat2 m_;
};

class Rotation3 {
 public:
  // Row-major entries; checked orthogonal with det +1.
  explicit Rotation3(const std::array<double, 9>& r);

  static Rotation3 identity();
  // Right-handed rotation by angle about unit axis.
  static Rotation3 about_axis(const Vec3& axis, double angle);

  double operator()(int r, int c) const { return r_[3 * r + c]; }
  Rotation3 transpose() const;
  Vec3 apply(const Vec3& v) const;
  Vec3 apply_transpose(const Vec3& v) const;

  friend Rotation3 operator*(const Rotation3& a, const Rotation3& b);

 private:
  struct Unchecked {};
  Rotation3(const std::array<double, 9>& r, Unchecked) : r_(r) {}

  std::array<double, 9> r_;
};

double max_abs_diff(const Rotation3& a, const Rotation3& b);

Ket ket_from_angles(double theta, double phi);
BlochVector bloch_from_ket(const Ket& psi);
// Inverse of bloch_from_ket with theta = acos z, phi = atan2(y, x) in [0, 2 pi).
Ket ket_from_bloch(const BlochVector& u);

DensityMatrix density_from_bloch(const BlochVector& p);
BlochVector bloch_from_density(const DensityMatrix& rho);
MixedDecomposition decompose(const DensityMatrix& rho);

// exp(-i theta/2 n.sigma)
Unitary2 su2_from_axis_angle(const Vec3& n, double theta);
// R_kl = 1/2 tr(sigma_k U sigma_l U^dagger)
Rotation3 so3_from_su2(const Unitary2& u);

// U rho U^dagger
DensityMatrix conjugate(const DensityMatrix& rho, const Unitary2& u);

// Re(i <psi_i| sigma_p |psi_j>), p in {1, 2, 3}.
double cross_term(const Ket& psi_i, const Ket& psi_j, int p);
// All three cross terms at once, (p = 1, 2, 3) as a vector.
Vec3 cross_terms(const Ket& psi_i, const Ket& psi_j);

// Pure-state check used by protocol code: |u| = 1 within 1e-9.
bool is_unit(const Vec3& u, double tol = kComposedTol);

}  // namespace qconsensus
