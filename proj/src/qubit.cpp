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

#include "qconsensus/qubit.hpp"

#include <algorithm>
#include <string>

#include "qconsensus/error.hpp"

namespace qconsensus {

namespace {

constexpr cplx kI{0.0, 1.0};

double max_abs(std::initializer_list<double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double max_abs_diff(const Vec3& a, const Vec3& b) {
  return max_abs({a.x - b.x, a.y - b.y, a.z - b.z});
}

bool is_unit(const Vec3& u, double tol) { return std::abs(norm(u) - 1.0) <= tol; }

// ---------------------------------------------------------------------------
// Mat2

Mat2 Mat2::adjoint() const {
  return {std::conj(a_[0]), std::conj(a_[2]), std::conj(a_[1]), std::conj(a_[3])};
}

Mat2& Mat2::operator+=(const Mat2& o) {
  for (int k = 0; k < 4; ++k) a_[k] += o.a_[k];
  return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) {
  for (int k = 0; k < 4; ++k) a_[k] -= o.a_[k];
  return *this;
}

Mat2& Mat2::operator*=(cplx s) {
  for (auto& v : a_) v *= s;
  return *this;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
          a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
  double m = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

double frobenius_norm(const Mat2& a) {
  double s = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

Mat2 pauli(int p) {
  switch (p) {
    case 1: return {0.0, 1.0, 1.0, 0.0};
    case 2: return {0.0, -kI, kI, 0.0};
    case 3: return {1.0, 0.0, 0.0, -1.0};
    default:
      throw Error(ErrorKind::kOutOfRange, "Pauli axis must be 1, 2 or 3, got " + std::to_string(p));
  }
}

Mat2 pauli_dot(const Vec3& n) {
  return {n.z, cplx(n.x, -n.y), cplx(n.x, n.y), -n.z};
}

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(cplx a0, cplx a1) : a0_(a0), a1_(a1) {
  const double n2 = std::norm(a0) + std::norm(a1);
  if (!(std::abs(n2 - 1.0) <= kAlgebraicTol)) {
    throw Error(ErrorKind::kNotNormalized,
                "ket is not normalized: |a0|^2 + |a1|^2 = " + std::to_string(n2));
  }
}

Ket Ket::normalized(cplx a0, cplx a1) {
  const double n = std::sqrt(std::norm(a0) + std::norm(a1));
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::kNotNormalized, "cannot normalize a zero or non-finite ket");
  }
  return Ket(a0 / n, a1 / n, Unchecked{});
}

cplx Ket::inner(const Ket& other) const {
  return std::conj(a0_) * other.a0_ + std::conj(a1_) * other.a1_;
}

cplx Ket::sandwich(const Mat2& m, const Ket& other) const {
  const cplx b0 = m(0, 0) * other.a0_ + m(0, 1) * other.a1_;
  const cplx b1 = m(1, 0) * other.a0_ + m(1, 1) * other.a1_;
  return std::conj(a0_) * b0 + std::conj(a1_) * b1;
}

Ket Ket::evolved(const Mat2& u) const {
  return Ket(u(0, 0) * a0_ + u(0, 1) * a1_, u(1, 0) * a0_ + u(1, 1) * a1_, Unchecked{});
}

// ---------------------------------------------------------------------------
// DensityMatrix

namespace {

std::array<double, 2> hermitian_eigenvalues(const Mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
  const double mean = 0.5 * (a + d);
  return {mean - half_gap, mean + half_gap};
}

}  // namespace

DensityMatrix::DensityMatrix(const Mat2& m, double psd_tol) : m_(m) {
  if (max_abs_diff(m, m.adjoint()) > kAlgebraicTol) {
    throw Error(ErrorKind::kInvalidArgument, "density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - 1.0) > kAlgebraicTol) {
    throw Error(ErrorKind::kInvalidArgument, "density matrix trace is not 1");
  }
  if (hermitian_eigenvalues(m)[0] < -psd_tol) {
    throw Error(ErrorKind::kInvalidArgument, "density matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_pure(const Ket& psi) {
  const cplx a = psi.a0();
  const cplx b = psi.a1();
  return DensityMatrix(Mat2(std::norm(a), a * std::conj(b), b * std::conj(a), std::norm(b)));
}

double DensityMatrix::purity() const {
  return (m_ * m_).trace().real();
}

std::array<double, 2> DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

// ---------------------------------------------------------------------------
// Unitary2

Unitary2::Unitary2(const Mat2& m) : m_(m) {
  if (max_abs_diff(m * m.adjoint(), Mat2::identity()) > kAlgebraicTol ||
      std::abs(std::abs(m.det()) - 1.0) > kAlgebraicTol) {
    throw Error(ErrorKind::kInvalidArgument, "matrix is not unitary");
  }
}

Unitary2 Unitary2::adjoint() const { return Unitary2(m_.adjoint(), Unchecked{}); }

Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
  return Unitary2(a.m_ * b.m_, Unitary2::Unchecked{});
}

// ---------------------------------------------------------------------------
// Rotation3

Rotation3::Rotation3(const std::array<double, 9>& r) : r_(r) {
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r[3 * i + k] * r[3 * j + k];
      err = std::max(err, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                     r[2] * (r[3] * r[7] - r[4] * r[6]);
  if (err > kAlgebraicTol || std::abs(det - 1.0) > kComposedTol) {
    throw Error(ErrorKind::kInvalidArgument, "matrix is not a proper rotation");
  }
}

Rotation3 Rotation3::identity() { return Rotation3({1, 0, 0, 0, 1, 0, 0, 0, 1}, Unchecked{}); }

Rotation3 Rotation3::about_axis(const Vec3& axis, double angle) {
  if (!is_unit(axis)) throw Error(ErrorKind::kNotNormalized, "rotation axis must be a unit vector");
  // Rodrigues
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const auto [x, y, z] = axis;
  return Rotation3({t * x * x + c, t * x * y - s * z, t * x * z + s * y,
                    t * x * y + s * z, t * y * y + c, t * y * z - s * x,
                    t * x * z - s * y, t * y * z + s * x, t * z * z + c},
                   Unchecked{});
}

Rotation3 Rotation3::transpose() const {
  return Rotation3({r_[0], r_[3], r_[6], r_[1], r_[4], r_[7], r_[2], r_[5], r_[8]}, Unchecked{});
}

Vec3 Rotation3::apply(const Vec3& v) const {
  return {r_[0] * v.x + r_[1] * v.y + r_[2] * v.z, r_[3] * v.x + r_[4] * v.y + r_[5] * v.z,
          r_[6] * v.x + r_[7] * v.y + r_[8] * v.z};
}

Vec3 Rotation3::apply_transpose(const Vec3& v) const {
  return {r_[0] * v.x + r_[3] * v.y + r_[6] * v.z, r_[1] * v.x + r_[4] * v.y + r_[7] * v.z,
          r_[2] * v.x + r_[5] * v.y + r_[8] * v.z};
}

Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
  std::array<double, 9> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[3 * i + j] += a.r_[3 * i + k] * b.r_[3 * k + j];
  return Rotation3(out, Rotation3::Unchecked{});
}

double max_abs_diff(const Rotation3& a, const Rotation3& b) {
  double m = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

// ---------------------------------------------------------------------------
// Operations

Ket ket_from_angles(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi) || !(phi >= 0.0 && phi < 2.0 * kPi)) {
    throw Error(ErrorKind::kOutOfRange, "ket_from_angles: need theta in [0, pi], phi in [0, 2pi)");
  }
  const cplx half_phase = std::polar(1.0, 0.5 * phi);
  return Ket::normalized(std::conj(half_phase) * std::cos(0.5 * theta),
                         half_phase * std::sin(0.5 * theta));
}

BlochVector bloch_from_ket(const Ket& psi) {
  const cplx a = psi.a0();
  const cplx b = psi.a1();
  const cplx ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

Ket ket_from_bloch(const BlochVector& u) {
  if (!is_unit(u)) throw Error(ErrorKind::kNotNormalized, "ket_from_bloch: vector is not unit");
  const double theta = std::acos(std::clamp(u.z, -1.0, 1.0));
  double phi = std::atan2(u.y, u.x);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return ket_from_angles(theta, phi);
}

DensityMatrix density_from_bloch(const BlochVector& p) {
  if (norm(p) > 1.0 + kAlgebraicTol) {
    throw Error(ErrorKind::kOutOfRange, "density_from_bloch: vector lies outside the Bloch ball");
  }
  Mat2 m = Mat2::identity() + pauli_dot(p);
  m *= 0.5;
  return DensityMatrix(m);
}

BlochVector bloch_from_density(const DensityMatrix& rho) {
  const Mat2& m = rho.matrix();
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

MixedDecomposition decompose(const DensityMatrix& rho) {
  const BlochVector p = bloch_from_density(rho);
  const double len = norm(p);
  if (len <= kComposedTol) {
    throw Error(ErrorKind::kMaximallyMixed,
                "decompose: maximally mixed state has no pure direction");
  }
  return {std::clamp(1.0 - len, 0.0, 1.0), (1.0 / len) * p};
}

Unitary2 su2_from_axis_angle(const Vec3& n, double theta) {
  if (!is_unit(n)) throw Error(ErrorKind::kNotNormalized, "su2_from_axis_angle: axis is not unit");
  Mat2 u = Mat2::identity() * std::cos(0.5 * theta);
  u -= (kI * std::sin(0.5 * theta)) * pauli_dot(n);
  return Unitary2(u);
}

Rotation3 so3_from_su2(const Unitary2& u) {
  const Mat2& m = u.matrix();
  const Mat2 md = m.adjoint();
  std::array<Mat2, 3> rotated;
  for (int l = 0; l < 3; ++l) rotated[l] = m * pauli(l + 1) * md;
  std::array<double, 9> r{};
  for (int k = 0; k < 3; ++k) {
    const Mat2 sk = pauli(k + 1);
    for (int l = 0; l < 3; ++l) r[3 * k + l] = 0.5 * (sk * rotated[l]).trace().real();
  }
  return Rotation3(r);
}

DensityMatrix conjugate(const DensityMatrix& rho, const Unitary2& u) {
  Mat2 out = u.matrix() * rho.matrix() * u.matrix().adjoint();
  // Exact Hermiticity; rounding only touches the off-diagonal pair.
  const cplx off = 0.5 * (out(1, 0) + std::conj(out(0, 1)));
  out(1, 0) = off;
  out(0, 1) = std::conj(off);
  out(0, 0) = out(0, 0).real();
  out(1, 1) = out(1, 1).real();
  return DensityMatrix(out);
}

double cross_term(const Ket& psi_i, const Ket& psi_j, int p) {
  return (kI * psi_i.sandwich(pauli(p), psi_j)).real();
}

Vec3 cross_terms(const Ket& psi_i, const Ket& psi_j) {
  const cplx a0 = std::conj(psi_i.a0());
  const cplx a1 = std::conj(psi_i.a1());
  const cplx b0 = psi_j.a0();
  const cplx b1 = psi_j.a1();
  const cplx s01 = a0 * b1;
  const cplx s10 = a1 * b0;
  // Re(i z) = -Im z
  return {-(s01 + s10).imag(), -(kI * (s10 - s01)).imag(), -(a0 * b0 - a1 * b1).imag()};
}

}  // namespace qconsensus
