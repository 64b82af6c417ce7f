#include "ffosc/classical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ffosc {

namespace {

double resolve_step(const FrequencyProtocol& protocol, const IntegratorConfig& config) {
  const double step = config.step > 0.0 ? config.step : default_step(protocol);
  if (!std::isfinite(step)) throw std::invalid_argument("integrator step must be finite");
  return step;
}

std::size_t step_count(double t0, double t1, double step) {
  const double span = std::abs(t1 - t0);
  if (span == 0.0) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(span / step - 1e-9)));
}

void check_finite(std::span<const double> p, std::span<const double> q) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || !std::isfinite(q[i]))
      throw IntegrationError("integration diverged: non-finite state at trajectory " +
                             std::to_string(i));
  }
}

}  // namespace

double default_step(const FrequencyProtocol& protocol) {
  validate(protocol);
  return std::min(protocol.tau, 2.0 * std::numbers::pi / max_omega(protocol)) / 200.0;
}

double control_rate(const FrequencyProtocol& protocol, double t, DriveMode mode) {
  if (mode == DriveMode::Bare) return 0.0;
  return omega_dot_at(protocol, t) / (2.0 * omega_at(protocol, t));
}

simd::LinearCoeffs flow_coeffs(const FrequencyProtocol& protocol, const OscillatorParams& params,
                               DriveMode mode, double t) {
  const double w = omega_at(protocol, t);
  const double g = control_rate(protocol, t, mode);
  // dp/dt = -m w^2 q + g p,   dq/dt = p/m - g q
  return {g, -params.mass * w * w, 1.0 / params.mass, -g};
}

PhaseVelocity eom_rhs(PhasePoint point, double t, const FrequencyProtocol& protocol,
                      const OscillatorParams& params, DriveMode mode) {
  const auto a = flow_coeffs(protocol, params, mode, t);
  return {a.pp * point.p + a.pq * point.q, a.qp * point.p + a.qq * point.q};
}

std::vector<simd::Rk4Step> rk4_table(const FrequencyProtocol& protocol,
                                     const OscillatorParams& params, DriveMode mode, double t0,
                                     double t1, double step) {
  validate(protocol);
  validate(params);
  const std::size_t n = step_count(t0, t1, step);
  std::vector<simd::Rk4Step> table(n);
  const double h = n ? (t1 - t0) / static_cast<double>(n) : 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double ta = t0 + static_cast<double>(s) * h;
    const double tb = (s + 1 == n) ? t1 : t0 + static_cast<double>(s + 1) * h;
    table[s].h = tb - ta;
    table[s].start = flow_coeffs(protocol, params, mode, ta);
    table[s].mid = flow_coeffs(protocol, params, mode, 0.5 * (ta + tb));
    table[s].end = flow_coeffs(protocol, params, mode, tb);
  }
  return table;
}

std::vector<simd::StepMatrix> midpoint_table(const FrequencyProtocol& protocol,
                                             const OscillatorParams& params, DriveMode mode,
                                             double t0, double t1, double step) {
  validate(protocol);
  validate(params);
  const std::size_t n = step_count(t0, t1, step);
  std::vector<simd::StepMatrix> table(n);
  const double h = n ? (t1 - t0) / static_cast<double>(n) : 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double ta = t0 + static_cast<double>(s) * h;
    const double tb = (s + 1 == n) ? t1 : t0 + static_cast<double>(s + 1) * h;
    const double hs = 0.5 * (tb - ta);
    const auto a = flow_coeffs(protocol, params, mode, 0.5 * (ta + tb));
    // M = (I - hs A)^{-1} (I + hs A)
    const double l00 = 1.0 - hs * a.pp, l01 = -hs * a.pq;
    const double l10 = -hs * a.qp, l11 = 1.0 - hs * a.qq;
    const double r00 = 1.0 + hs * a.pp, r01 = hs * a.pq;
    const double r10 = hs * a.qp, r11 = 1.0 + hs * a.qq;
    const double det = l00 * l11 - l01 * l10;
    const double i00 = l11 / det, i01 = -l01 / det, i10 = -l10 / det, i11 = l00 / det;
    table[s] = {i00 * r00 + i01 * r10, i00 * r01 + i01 * r11, i10 * r00 + i11 * r10,
                i10 * r01 + i11 * r11};
  }
  return table;
}

TrajectoryPropagator::TrajectoryPropagator(const FrequencyProtocol& protocol,
                                           const OscillatorParams& params, DriveMode mode,
                                           const IntegratorConfig& config, double t0, double t1)
    : method_(config.method) {
  const double step = resolve_step(protocol, config);
  if (method_ == IntegratorMethod::RK4)
    rk4_ = rk4_table(protocol, params, mode, t0, t1, step);
  else
    midpoint_ = midpoint_table(protocol, params, mode, t0, t1, step);
}

TrajectoryPropagator::TrajectoryPropagator(const FrequencyProtocol& protocol,
                                           const OscillatorParams& params, DriveMode mode,
                                           const IntegratorConfig& config)
    : TrajectoryPropagator(protocol, params, mode, config, 0.0, protocol.tau) {}

void TrajectoryPropagator::apply(std::span<double> p, std::span<double> q) const {
  if (p.size() != q.size()) throw std::invalid_argument("trajectory batch: size mismatch");
  if (method_ == IntegratorMethod::RK4)
    simd::rk4_linear(p, q, rk4_);
  else
    simd::apply_step_matrices(p, q, midpoint_);
  check_finite(p, q);
}

std::size_t TrajectoryPropagator::steps() const noexcept {
  return method_ == IntegratorMethod::RK4 ? rk4_.size() : midpoint_.size();
}

void integrate_batch(std::span<double> p, std::span<double> q, const FrequencyProtocol& protocol,
                     const OscillatorParams& params, DriveMode mode,
                     const IntegratorConfig& config, double t0, double t1) {
  TrajectoryPropagator(protocol, params, mode, config, t0, t1).apply(p, q);
}

void integrate_batch(std::span<double> p, std::span<double> q, const FrequencyProtocol& protocol,
                     const OscillatorParams& params, DriveMode mode,
                     const IntegratorConfig& config) {
  integrate_batch(p, q, protocol, params, mode, config, 0.0, protocol.tau);
}

PhasePoint integrate_between(PhasePoint initial, double t0, double t1,
                             const FrequencyProtocol& protocol, const OscillatorParams& params,
                             DriveMode mode, const IntegratorConfig& config) {
  double p = initial.p;
  double q = initial.q;
  integrate_batch({&p, 1}, {&q, 1}, protocol, params, mode, config, t0, t1);
  return {p, q};
}

PhasePoint integrate_trajectory(PhasePoint initial, const FrequencyProtocol& protocol,
                                const OscillatorParams& params, DriveMode mode,
                                const IntegratorConfig& config) {
  return integrate_between(initial, 0.0, protocol.tau, protocol, params, mode, config);
}

FundamentalSolutions fundamental_solutions(const FrequencyProtocol& protocol,
                                           const IntegratorConfig& config) {
  // With m = 1 the momentum is the velocity, so (p, q) = (q', q).
  const OscillatorParams unit{1.0, 1.0};
  double p[2] = {0.0, 1.0};  // C: q'(0)=0, S: q'(0)=1
  double q[2] = {1.0, 0.0};  // C: q(0)=1,  S: q(0)=0
  IntegratorConfig fine = config;
  if (fine.step <= 0.0) fine.step = 0.25 * default_step(protocol);
  integrate_batch(p, q, protocol, unit, DriveMode::Bare, fine);
  return {q[0], p[0], q[1], p[1]};
}

double trajectory_work(PhasePoint initial, PhasePoint final, const FrequencyProtocol& protocol,
                       const OscillatorParams& params) {
  return energy(final, final_omega(protocol), params) -
         energy(initial, initial_omega(protocol), params);
}

}  // namespace ffosc
