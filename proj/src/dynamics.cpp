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

#include "qconsensus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qconsensus/error.hpp"
#include "qconsensus/kernels.hpp"
#include "qconsensus/metrics.hpp"

namespace qconsensus {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::kInvalidArgument, "integrator dt must be positive");
  }
  if (!(t_max >= dt)) throw Error(ErrorKind::kInvalidArgument, "integrator t_max must be >= dt");
  if (sample_every == 0) throw Error(ErrorKind::kInvalidArgument, "sample_every must be >= 1");
  if (stop_threshold && !(*stop_threshold > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "stop threshold must be positive");
  }
}

const std::vector<double>& Trajectory::metric(const std::string& name) const {
  auto it = metrics.find(name);
  if (it == metrics.end()) {
    throw Error(ErrorKind::kUnknownMetric, "trajectory has no metric series '" + name + "'");
  }
  return it->second;
}

Ket step_ket(const Ket& psi, const AxisHamiltonian& h, double dt) {
  const double len = norm(h.axis);
  if (len == 0.0) return psi;
  const double angle = len * dt;
  const double c = std::cos(angle);
  const double s = std::sin(angle) / len;
  // c I - i s (n . sigma)
  const Vec3& n = h.axis;
  const Mat2 u(cplx(c, -s * n.z), cplx(-s * n.y, -s * n.x), cplx(s * n.y, -s * n.x),
               cplx(c, s * n.z));
  return psi.evolved(u);
}

std::optional<Vec3> open_hemisphere_direction(std::span<const BlochVector> points) {
  if (points.empty()) return std::nullopt;
  Vec3 c;
  for (const auto& x : points) c += x;
  // Perceptron: converges whenever a strictly separating direction exists.
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t worst = 0;
    double worst_margin = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const double m = dot(c, points[k]);
      if (k == 0 || m < worst_margin) {
        worst_margin = m;
        worst = k;
      }
    }
    const double len = norm(c);
    if (len > 0.0 && worst_margin > 1e-12 * len) return (1.0 / len) * c;
    c += points[worst];
  }
  return std::nullopt;
}

double max_pairwise_angle(std::span<const BlochVector> xs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      // atan2 form stays accurate near 0 and pi.
      const double a = std::atan2(norm(cross(xs[i], xs[j])), dot(xs[i], xs[j]));
      worst = std::max(worst, a);
    }
  }
  return worst;
}

namespace {

struct NetworkStepper {
  NetworkStepper(const kernels::CompiledProtocol& protocol, Execution exec, std::size_t n)
      : p(protocol), parallel(exec == Execution::kParallel), bloch(n), a1(n), a2(n), a3(n), a4(n),
        mix(n) {}

  void axes(std::span<const Ket> kets, std::span<Vec3> out) {
    if (parallel) {
      kernels::omp::protocol_axes(p, kets, bloch, out);
    } else {
      kernels::serial::protocol_axes(p, kets, bloch, out);
    }
  }

  void advance(std::span<const Ket> in, std::span<const Vec3> ax, double dt, std::span<Ket> out) {
    if (parallel) {
      kernels::omp::advance(in, ax, dt, out);
    } else {
      kernels::serial::advance(in, ax, dt, out);
    }
  }

  void frozen(std::vector<Ket>& y, std::vector<Ket>& scratch, double dt) {
    axes(y, a1);
    advance(y, a1, dt, scratch);
    y.swap(scratch);
  }

  // Commutator-free 4th order (Celledoni, Marthinsen, Owren):
  //   Y2 = exp(F1/2) y, Y3 = exp(F2/2) y, Y4 = exp(F3 - F1/2) Y2,
  //   y' = exp((-F1 + 2F2 + 2F3 + 3F4)/12) exp((3F1 + 2F2 + 2F3 - F4)/12) y.
  void cf4(std::vector<Ket>& y, std::vector<Ket>& y2, std::vector<Ket>& y3,
           std::vector<Ket>& y4, double dt) {
    const std::size_t n = y.size();
    axes(y, a1);
    advance(y, a1, 0.5 * dt, y2);
    axes(y2, a2);
    advance(y, a2, 0.5 * dt, y3);
    axes(y3, a3);
    for (std::size_t i = 0; i < n; ++i) mix[i] = a3[i] - 0.5 * a1[i];
    advance(y2, mix, dt, y4);
    axes(y4, a4);
    for (std::size_t i = 0; i < n; ++i) {
      mix[i] = (1.0 / 12.0) * (3.0 * a1[i] + 2.0 * a2[i] + 2.0 * a3[i] - a4[i]);
    }
    advance(y, mix, dt, y2);
    for (std::size_t i = 0; i < n; ++i) {
      mix[i] = (1.0 / 12.0) * (-a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + 3.0 * a4[i]);
    }
    advance(y2, mix, dt, y);
  }

  const kernels::CompiledProtocol& p;
  bool parallel;
  std::vector<BlochVector> bloch;
  std::vector<Vec3> a1, a2, a3, a4, mix;
};

class NetworkRecorder {
 public:
  NetworkRecorder(Trajectory& traj, const Topology& t, const IntegratorConfig& cfg)
      : traj_(traj), topology_(t), cfg_(cfg), chain_(t.is_chain()) {
    traj_.metrics[metric_names::kPureStateError];
    if (chain_) traj_.metrics[metric_names::kLyapunov];
    if (cfg.stop_threshold && !traj_.has_metric(cfg.stop_metric)) {
      throw Error(ErrorKind::kUnknownMetric,
                  "stop metric '" + cfg.stop_metric + "' is not recorded for this run");
    }
  }

  // Returns true when the stop criterion is met.
  bool record(double time, const std::vector<Ket>& kets) {
    traj_.times.push_back(time);
    if (cfg_.record_states) traj_.kets.push_back(kets);
    std::vector<BlochVector> b(kets.size());
    kernels::serial::bloch_vectors(kets, b);
    traj_.bloch.push_back(std::move(b));
    traj_.metrics[metric_names::kPureStateError].push_back(pure_state_error(kets));
    if (chain_) traj_.metrics[metric_names::kLyapunov].push_back(lyapunov_V(kets, topology_));
    return cfg_.stop_threshold && traj_.metrics[cfg_.stop_metric].back() < *cfg_.stop_threshold;
  }

 private:
  Trajectory& traj_;
  const Topology& topology_;
  const IntegratorConfig& cfg_;
  bool chain_;
};

}  // namespace

Trajectory simulate_network(const NetworkState& initial, const Topology& t,
                            const ProtocolSpec& protocol, const IntegratorConfig& cfg) {
  cfg.validate();
  const std::size_t n = t.size();
  if (initial.kets.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "initial state must hold one ket per node");
  }
  for (const Ket& k : initial.kets) {
    if (std::abs(k.norm() - 1.0) > kComposedTol) {
      throw Error(ErrorKind::kNotNormalized, "initial ket is not normalized");
    }
  }
  const kernels::CompiledProtocol compiled(protocol, t);
  NetworkStepper stepper(compiled, cfg.execution, n);

  Trajectory traj;
  NetworkRecorder recorder(traj, t, cfg);

  std::vector<Ket> y = initial.kets;
  std::vector<Ket> s1 = y, s2 = y, s3 = y;

  // Open-loop rendezvous: constant axes until the meeting time, then idle.
  double switch_off = initial.time;
  std::vector<Vec3> open_loop(n);
  if (protocol.kind == ProtocolKind::kMinTimePair) {
    const BlochVector b0 = bloch_from_ket(y[0]);
    const BlochVector b1 = bloch_from_ket(y[1]);
    if (norm(cross(b0, b1)) > 1e-9 || dot(b0, b1) < 0.0) {
      const auto [h0, h1] = min_time_pair_hamiltonians(b0, b1);
      open_loop = {h0.axis, h1.axis};
      switch_off = initial.time + min_time(b0, b1);
    }
  } else if (protocol.kind == ProtocolKind::kGeometry) {
    std::vector<BlochVector> b(n);
    kernels::serial::bloch_vectors(y, b);
    if (!open_hemisphere_direction(b)) {
      traj.warnings.push_back(
          "initial Bloch vectors are not contained in an open hemisphere; "
          "convergence of the geometric protocol is not guaranteed");
    }
  }

  double time = initial.time;
  const double t_end = initial.time + cfg.t_max;
  const double eps = 1e-12 * std::max(1.0, t_end);
  bool stop = recorder.record(time, y);
  std::size_t step = 0;
  // Times are base + k dt, rebased at breakpoints, so they do not drift.
  double base = time;
  std::size_t since = 0;
  while (!stop && time < t_end - eps) {
    double h = std::min(cfg.dt, t_end - time);
    bool breakpoint = false;
    if (protocol.kind == ProtocolKind::kMinTimePair) {
      if (time < switch_off - eps) {
        if (switch_off - time <= h + eps) {
          h = switch_off - time;
          breakpoint = true;
        }
        stepper.advance(y, open_loop, h, s1);
        y.swap(s1);
      }
    } else if (cfg.stepper == Stepper::kFrozenSnapshot) {
      stepper.frozen(y, s1, h);
    } else {
      stepper.cf4(y, s1, s2, s3, h);
    }
    ++step;
    if (breakpoint) {
      time = base = switch_off;
      since = 0;
    } else if (h < cfg.dt) {
      time = t_end;
    } else {
      time = base + static_cast<double>(++since) * cfg.dt;
    }
    const bool last = time >= t_end - eps;
    if (step % cfg.sample_every == 0 || breakpoint || last) stop = recorder.record(time, y);
  }
  return traj;
}

// ---------------------------------------------------------------------------

namespace {

struct SphereField {
  const Topology& t;
  double gain;
  const DistanceWeight& shape;
  std::vector<std::vector<Neighbor>> nbrs;

  void operator()(const std::vector<BlochVector>& x, std::vector<Vec3>& dx) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vec3 u;
      for (const Neighbor& nb : nbrs[i]) {
        const double w = shape ? nb.weight * shape(norm(x[i] - x[nb.index])) : nb.weight;
        u += w * x[nb.index];
      }
      dx[i] = gain * (u - dot(x[i], u) * x[i]);
    }
  }
};

}  // namespace

Trajectory simulate_sphere(std::span<const BlochVector> x0, const Topology& t,
                           const IntegratorConfig& cfg, double gain,
                           const DistanceWeight& distance_weight) {
  cfg.validate();
  const std::size_t n = t.size();
  if (x0.size() != n) throw Error(ErrorKind::kInvalidArgument, "need one vector per node");
  for (const auto& x : x0) {
    if (!is_unit(x)) throw Error(ErrorKind::kNotNormalized, "sphere states must be unit vectors");
  }
  SphereField field{t, gain, distance_weight, {}};
  for (std::size_t i = 0; i < n; ++i) field.nbrs.push_back(t.neighbors(i));

  Trajectory traj;
  auto& angle = traj.metrics[metric_names::kMaxPairAngle];
  if (cfg.stop_threshold && cfg.stop_metric != metric_names::kMaxPairAngle) {
    throw Error(ErrorKind::kUnknownMetric, "sphere runs only record max_pair_angle");
  }
  std::vector<BlochVector> x(x0.begin(), x0.end());
  auto record = [&](double time) {
    traj.times.push_back(time);
    traj.bloch.push_back(x);
    angle.push_back(max_pairwise_angle(x));
    return cfg.stop_threshold && angle.back() < *cfg.stop_threshold;
  };

  std::vector<Vec3> k1(n), k2(n), k3(n), k4(n);
  std::vector<BlochVector> tmp(n);
  double time = 0.0;
  const double eps = 1e-12 * std::max(1.0, cfg.t_max);
  bool stop = record(time);
  std::size_t step = 0;
  while (!stop && time < cfg.t_max - eps) {
    const double h = std::min(cfg.dt, cfg.t_max - time);
    field(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + (0.5 * h) * k1[i];
    field(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + (0.5 * h) * k2[i];
    field(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    field(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      x[i] *= 1.0 / norm(x[i]);
    }
    ++step;
    time = h < cfg.dt ? cfg.t_max : static_cast<double>(step) * cfg.dt;
    if (step % cfg.sample_every == 0 || time >= cfg.t_max - eps) stop = record(time);
  }
  return traj;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kQcmePsdAbort = -1e-6;

std::size_t qubits_for_dimension(Eigen::Index dim) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) {
    throw Error(ErrorKind::kInvalidArgument, "joint state dimension is not a power of two");
  }
  return n;
}

}  // namespace

Trajectory simulate_qcme(const Eigen::MatrixXcd& rho0, const Topology& t,
                         const IntegratorConfig& cfg,
                         const std::optional<Eigen::MatrixXcd>& reference) {
  cfg.validate();
  if (t.size() > kMaxQcmeQubits) {
    throw Error(ErrorKind::kDimensionTooLarge, "QCME runs are limited to 12 qubits");
  }
  if (rho0.rows() != rho0.cols() || qubits_for_dimension(rho0.rows()) != t.size()) {
    throw Error(ErrorKind::kInvalidArgument, "joint state must be 2^N x 2^N for the topology");
  }
  if (std::abs(rho0.trace() - cplx(1.0)) > kComposedTol ||
      (rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > kComposedTol) {
    throw Error(ErrorKind::kInvalidArgument, "joint state must be Hermitian with unit trace");
  }
  if (min_eigenvalue(rho0) < -kComposedTol) {
    throw Error(ErrorKind::kInvalidArgument, "joint state is not positive semidefinite");
  }
  const QcmeGenerator gen(t);
  const Eigen::MatrixXcd target = reference ? *reference : quantum_average(rho0);
  if (target.rows() != rho0.rows() || target.cols() != rho0.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "reference state dimension mismatch");
  }
  const bool parallel = cfg.execution == Execution::kParallel;
  auto apply = [&](const Eigen::MatrixXcd& r, Eigen::MatrixXcd& out) {
    if (parallel) {
      kernels::omp::qcme_apply(gen, r, out);
    } else {
      kernels::serial::qcme_apply(gen, r, out);
    }
  };

  Trajectory traj;
  auto& dist = traj.metrics[metric_names::kCompositeDistance];
  auto& trace_err = traj.metrics["trace_error"];
  auto& herm_err = traj.metrics["hermiticity_error"];
  if (cfg.stop_threshold && cfg.stop_metric != metric_names::kCompositeDistance) {
    throw Error(ErrorKind::kUnknownMetric, "QCME runs stop on composite_distance only");
  }
  Eigen::MatrixXcd rho = rho0;
  auto record = [&](double time) {
    const double lowest = min_eigenvalue(rho);
    if (lowest < kQcmePsdAbort) {
      throw Error(ErrorKind::kNumericalBreakdown,
                  "QCME state lost positivity (eigenvalue " + std::to_string(lowest) +
                      ") at t = " + std::to_string(time) + "; reduce dt");
    }
    traj.times.push_back(time);
    if (cfg.record_states) traj.joint.push_back(rho);
    dist.push_back(composite_distance(rho, target));
    trace_err.push_back(std::abs(rho.trace() - cplx(1.0)));
    herm_err.push_back((rho - rho.adjoint()).cwiseAbs().maxCoeff());
    return cfg.stop_threshold && dist.back() < *cfg.stop_threshold;
  };

  const Eigen::Index dim = rho0.rows();
  Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim);
  double time = 0.0;
  const double eps = 1e-12 * std::max(1.0, cfg.t_max);
  bool stop = record(time);
  std::size_t step = 0;
  while (!stop && time < cfg.t_max - eps) {
    const double h = std::min(cfg.dt, cfg.t_max - time);
    apply(rho, k1);
    apply(rho + (0.5 * h) * k1, k2);
    apply(rho + (0.5 * h) * k2, k3);
    apply(rho + h * k3, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    ++step;
    time = h < cfg.dt ? cfg.t_max : static_cast<double>(step) * cfg.dt;
    if (step % cfg.sample_every == 0 || time >= cfg.t_max - eps) stop = record(time);
  }
  return traj;
}

std::optional<double> meeting_time(const Trajectory& traj, double angle_tol) {
  if (traj.bloch.empty()) return std::nullopt;
  if (traj.bloch.front().size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "meeting_time needs at least two qubits");
  }
  double prev_angle = 0.0;
  for (std::size_t k = 0; k < traj.bloch.size(); ++k) {
    const double a = max_pairwise_angle(traj.bloch[k]);
    if (a < angle_tol) {
      if (k == 0) return traj.times[0];
      const double frac = (prev_angle - angle_tol) / (prev_angle - a);
      return traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]);
    }
    prev_angle = a;
  }
  return std::nullopt;
}

}  // namespace qconsensus
