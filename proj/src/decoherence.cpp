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

#include "qconsensus/decoherence.hpp"

#include <cmath>
#include <exception>
#include <random>
#include <string>

#include "qconsensus/error.hpp"
#include "qconsensus/metrics.hpp"

namespace qconsensus {

namespace {

constexpr double kSmePsdAbort = -1e-6;

const Mat2 kLower(0.0, 1.0, 0.0, 0.0);  // |0><1|
const Mat2 kSz(1.0, 0.0, 0.0, -1.0);

Mat2 dissipator(const Mat2& l, const Mat2& rho) {
  const Mat2 ld = l.adjoint();
  const Mat2 ldl = ld * l;
  return l * rho * ld - 0.5 * (ldl * rho + rho * ldl);
}

Mat2 innovation(const Mat2& l, const Mat2& rho) {
  const Mat2 m = l * rho + rho * l.adjoint();
  return m - m.trace() * rho;
}

Mat2 drift(const Mat2& rho, const NoiseParams& p) {
  return 4.0 * p.gamma_r * dissipator(kLower, rho) +
         (p.gamma_phi + p.gamma_z) * dissipator(kSz, rho);
}

// Exact flow of the drift over dt. Amplitude damping and dephasing commute,
// so in matrix elements: rho11 decays at 4 gr, coherences at
// 2 gr + 2 (gp + gz), trace is preserved.
Mat2 drift_flow(const Mat2& rho, const NoiseParams& p, double dt) {
  const double pop = std::exp(-4.0 * p.gamma_r * dt);
  const double coh = std::exp(-2.0 * (p.gamma_r + p.gamma_phi + p.gamma_z) * dt);
  const cplx tr = rho.trace();
  const cplx r11 = pop * rho(1, 1);
  return Mat2(tr - r11, coh * rho(0, 1), coh * rho(1, 0), r11);
}

// Hermitian part with unit trace.
Mat2 clean(Mat2 m) {
  const cplx off = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double tr = a + d;
  return Mat2(a / tr, off / tr, std::conj(off) / tr, d / tr);
}

Mat2 exact_unitary(const Vec3& n, double dt) {
  const double len = norm(n);
  if (len == 0.0) return Mat2::identity();
  const double c = std::cos(len * dt);
  const double s = std::sin(len * dt) / len;
  return Mat2(cplx(c, -s * n.z), cplx(-s * n.y, -s * n.x), cplx(s * n.y, -s * n.x),
              cplx(c, s * n.z));
}

double lowest_eigenvalue(const Mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  return mean - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
}

}  // namespace

void NoiseParams::validate() const {
  for (double r : {gamma_r, gamma_phi, gamma_z}) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorKind::kInvalidArgument, "noise rates must be finite and nonnegative");
    }
  }
  if (!(eta_z > 0.0 && eta_z <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "detection efficiency must lie in (0, 1]");
  }
}

void SdeConfig::validate() const {
  if (!(dt > 0.0) || !(t_max >= dt)) {
    throw Error(ErrorKind::kInvalidArgument, "SDE needs dt > 0 and t_max >= dt");
  }
  if (sample_every == 0) throw Error(ErrorKind::kInvalidArgument, "sample_every must be >= 1");
  if (warmup < 0.0 || floor < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "warm-up and floor must be nonnegative");
  }
}

SmeStep sme_step(const DensityMatrix& rho, const AxisHamiltonian& h, const NoiseParams& p,
                 double dW, double dt) {
  const Mat2& r = rho.matrix();
  const double strength = std::sqrt(p.eta_z * p.gamma_z);
  Mat2 next = r;
  if (strength > 0.0) next += (strength * dW) * innovation(kSz, r);
  next = drift_flow(next, p, dt);
  const Mat2 u = exact_unitary(h.axis, dt);
  next = clean(u * clean(next) * u.adjoint());
  const double lowest = lowest_eigenvalue(next);
  if (lowest < kSmePsdAbort) {
    throw Error(ErrorKind::kNumericalBreakdown,
                "SME step lost positivity (eigenvalue " + std::to_string(lowest) + ", dt = " +
                    std::to_string(dt) + "); reduce the step size");
  }
  std::optional<double> dy;
  if (strength > 0.0) dy = (r(0, 0).real() - r(1, 1).real()) * dt + dW / (2.0 * strength);
  return {DensityMatrix(next, -kSmePsdAbort), dy};
}

DensityMatrix lindblad_evolve(const DensityMatrix& rho, const NoiseParams& p, double t,
                              double dt) {
  p.validate();
  if (!(dt > 0.0) || t < 0.0) throw Error(ErrorKind::kInvalidArgument, "bad Lindblad horizon");
  Mat2 r = rho.matrix();
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  const double h = steps ? t / static_cast<double>(steps) : 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Mat2 k1 = drift(r, p);
    const Mat2 k2 = drift(r + (0.5 * h) * k1, p);
    const Mat2 k3 = drift(r + (0.5 * h) * k2, p);
    const Mat2 k4 = drift(r + h * k3, p);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return DensityMatrix(clean(r));
}

Feedback feedback_hamiltonian(const DensityMatrix& rho_i, const DensityMatrix& rho_j, double c0_i,
                              double yz_i, const NoiseParams& p, double floor) {
  const BlochVector bi = bloch_from_density(rho_i);
  const BlochVector bj = bloch_from_density(rho_j);
  if (!(std::abs(yz_i) > floor) || std::hypot(bi.x, bi.y) == 0.0 ||
      std::hypot(bj.x, bj.y) == 0.0) {
    return {AxisHamiltonian{}, true};
  }
  const double mu = p.total() * c0_i / yz_i;
  const double phi = 0.5 * std::atan2(-bi.x, bi.y) + 0.5 * std::atan2(-bj.x, bj.y);
  return {AxisHamiltonian{Vec3{mu * std::cos(phi), mu * std::sin(phi), 0.0}}, false};
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

PairTrajectory simulate_protected_pair(const DensityMatrix& rho0_i, const DensityMatrix& rho0_j,
                                       const NoiseParams& p, const SdeConfig& cfg,
                                       std::uint64_t seed) {
  p.validate();
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.dt));

  DensityMatrix ri = rho0_i;
  DensityMatrix rj = rho0_j;
  const double c0_i = coherence(ri);
  const double c0_j = coherence(rj);
  double sum_dy_i = 0.0;
  double sum_dy_j = 0.0;

  PairTrajectory out;
  auto record = [&](double t) {
    out.times.push_back(t);
    out.coherence_i.push_back(coherence(ri));
    out.coherence_j.push_back(coherence(rj));
    out.target_i.push_back(c0_i);
    out.target_j.push_back(c0_j);
    out.distance.push_back(frobenius_norm(ri.matrix() - rj.matrix()));
    out.bloch_i.push_back(bloch_from_density(ri));
    out.bloch_j.push_back(bloch_from_density(rj));
  };
  auto log_output = [&](MeasurementRecord& rec, double t, double dy, double sum) {
    if (!cfg.keep_records) return;
    rec.times.push_back(t);
    rec.dy.push_back(dy);
    rec.running_average.push_back(sum / t);
  };

  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    AxisHamiltonian hi;
    AxisHamiltonian hj;
    if (cfg.feedback && t >= cfg.warmup && t > 0.0) {
      const Feedback fi = feedback_hamiltonian(ri, rj, c0_i, sum_dy_i / t, p, cfg.floor);
      const Feedback fj = feedback_hamiltonian(rj, ri, c0_j, sum_dy_j / t, p, cfg.floor);
      hi = fi.h;
      hj = fj.h;
      out.suspended_steps += fi.suspended + fj.suspended;
    }
    const double dwi = normal(rng);
    const double dwj = normal(rng);
    SmeStep si = sme_step(ri, hi, p, dwi, cfg.dt);
    SmeStep sj = sme_step(rj, hj, p, dwj, cfg.dt);
    ri = si.rho;
    rj = sj.rho;
    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    if (si.dy) {
      sum_dy_i += *si.dy;
      log_output(out.record_i, t_next, *si.dy, sum_dy_i);
    }
    if (sj.dy) {
      sum_dy_j += *sj.dy;
      log_output(out.record_j, t_next, *sj.dy, sum_dy_j);
    }
    if ((k + 1) % cfg.sample_every == 0 || k + 1 == steps) record(t_next);
  }
  return out;
}

SeriesStats summarize(const std::vector<std::vector<double>>& runs) {
  SeriesStats s;
  if (runs.empty()) return s;
  const std::size_t len = runs.front().size();
  const auto m = static_cast<double>(runs.size());
  s.mean.assign(len, 0.0);
  s.std_error.assign(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r[k];
    const double mean = sum / m;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r[k] - mean) * (r[k] - mean);
    s.mean[k] = mean;
    s.std_error[k] = runs.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  }
  return s;
}

PairEnsemble simulate_protected_ensemble(const DensityMatrix& rho0_i, const DensityMatrix& rho0_j,
                                         const NoiseParams& p, const SdeConfig& cfg,
                                         std::uint64_t seed, std::size_t trajectories,
                                         Execution execution) {
  if (trajectories == 0) throw Error(ErrorKind::kInvalidArgument, "need at least one trajectory");
  p.validate();
  cfg.validate();
  SdeConfig run_cfg = cfg;
  run_cfg.keep_records = false;
  std::vector<PairTrajectory> runs(trajectories);
  const auto m = static_cast<std::int64_t>(trajectories);
  auto one = [&](std::int64_t k) {
    runs[static_cast<std::size_t>(k)] = simulate_protected_pair(
        rho0_i, rho0_j, p, run_cfg, trajectory_seed(seed, static_cast<std::uint64_t>(k)));
  };
  if (execution == Execution::kParallel) {
    // Exceptions must not escape the parallel region.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < m; ++k) {
      try {
        one(k);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::int64_t k = 0; k < m; ++k) one(k);
  }

  PairEnsemble e;
  e.times = runs.front().times;
  e.trajectories = trajectories;
  std::vector<std::vector<double>> ci, cj, d, bx, by, bz;
  for (const auto& r : runs) {
    ci.push_back(r.coherence_i);
    cj.push_back(r.coherence_j);
    d.push_back(r.distance);
    std::vector<double> x, y, z;
    for (const auto& b : r.bloch_i) {
      x.push_back(b.x);
      y.push_back(b.y);
      z.push_back(b.z);
    }
    bx.push_back(std::move(x));
    by.push_back(std::move(y));
    bz.push_back(std::move(z));
  }
  e.coherence_i = summarize(ci);
  e.coherence_j = summarize(cj);
  e.distance = summarize(d);
  e.bloch_i[0] = summarize(bx);
  e.bloch_i[1] = summarize(by);
  e.bloch_i[2] = summarize(bz);
  return e;
}

}  // namespace qconsensus
