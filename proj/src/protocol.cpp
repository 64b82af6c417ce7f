#include "ffosc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ffosc {

namespace {

constexpr double kTimeSlack = 1e-12;

double checked_time(const FrequencyProtocol& protocol, double t) {
  const double slack = kTimeSlack * protocol.tau;
  if (!(t >= -slack && t <= protocol.tau + slack)) {
    throw std::domain_error("time " + std::to_string(t) + " outside [0, tau]");
  }
  return std::clamp(t, 0.0, protocol.tau);
}

}  // namespace

FrequencyProtocol FrequencyProtocol::from_tau_omega(double omega0, double f, double tau_omega,
                                                    int harmonic_index) {
  FrequencyProtocol protocol{omega0, f, harmonic_index, tau_omega / omega0};
  validate(protocol);
  return protocol;
}

void validate(const FrequencyProtocol& protocol) {
  if (!(protocol.omega0 > 0.0) || !std::isfinite(protocol.omega0))
    throw std::invalid_argument("protocol.omega0 must be positive");
  if (!(protocol.f > 0.0) || !std::isfinite(protocol.f))
    throw std::invalid_argument("protocol.f must be positive");
  if (protocol.harmonic_index < 1)
    throw std::invalid_argument("protocol.harmonic_index must be a positive integer");
  if (!(protocol.tau > 0.0) || !std::isfinite(protocol.tau))
    throw std::invalid_argument("protocol.tau must be positive");
}

void validate(const OscillatorParams& params) {
  if (!(params.mass > 0.0)) throw std::invalid_argument("params.mass must be positive");
  if (!(params.hbar > 0.0)) throw std::invalid_argument("params.hbar must be positive");
}

void validate(const GibbsSpec& spec) {
  if (!(spec.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  validate(spec.protocol);
  validate(spec.params);
}

double omega_at(const FrequencyProtocol& protocol, double t) {
  t = checked_time(protocol, t);
  const double f2 = protocol.f * protocol.f;
  const double phase = protocol.harmonic_index * std::numbers::pi * t / protocol.tau;
  return protocol.omega0 * std::sqrt(0.5 * (f2 + 1.0) - 0.5 * (f2 - 1.0) * std::cos(phase));
}

double omega_dot_at(const FrequencyProtocol& protocol, double t) {
  t = checked_time(protocol, t);
  const double f2 = protocol.f * protocol.f;
  const double rate = protocol.harmonic_index * std::numbers::pi / protocol.tau;
  // d(omega^2)/dt / (2 omega)
  const double d_omega2 = protocol.omega0 * protocol.omega0 * 0.5 * (f2 - 1.0) * rate *
                          std::sin(rate * t);
  return d_omega2 / (2.0 * omega_at(protocol, t));
}

double initial_omega(const FrequencyProtocol& protocol) noexcept { return protocol.omega0; }

double final_omega(const FrequencyProtocol& protocol) noexcept {
  return protocol.harmonic_index % 2 == 1 ? protocol.f * protocol.omega0 : protocol.omega0;
}

double max_omega(const FrequencyProtocol& protocol) noexcept {
  return protocol.omega0 * std::max(1.0, protocol.f);
}

double min_omega(const FrequencyProtocol& protocol) noexcept {
  return protocol.omega0 * std::min(1.0, protocol.f);
}

double energy(PhasePoint point, double omega, const OscillatorParams& params) {
  const double m = params.mass;
  return point.p * point.p / (2.0 * m) + 0.5 * m * omega * omega * point.q * point.q;
}

double action_of(PhasePoint point, double omega, const OscillatorParams& params) {
  return energy(point, omega, params) / omega;
}

double angle_of(PhasePoint point, double omega, const OscillatorParams& params) {
  if (point.p == 0.0 && point.q == 0.0) return 0.0;
  // sin(theta) ~ sqrt(m omega) q, cos(theta) ~ p / sqrt(m omega); common factor dropped.
  const double s = std::sqrt(params.mass * omega);
  double theta = std::atan2(s * point.q, point.p / s);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return theta;
}

ActionAngle to_action_angle(PhasePoint point, double omega, const OscillatorParams& params) {
  return {action_of(point, omega, params), angle_of(point, omega, params)};
}

PhasePoint from_action_angle(ActionAngle aa, double omega, const OscillatorParams& params) {
  const double m = params.mass;
  return {std::sqrt(2.0 * m * omega * aa.action) * std::cos(aa.angle),
          std::sqrt(2.0 * aa.action / (m * omega)) * std::sin(aa.angle)};
}

PhasePoint sample_gibbs(const GibbsSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  double p = 0.0;
  double q = 0.0;
  sample_gibbs(spec, rng, {&p, 1}, {&q, 1});
  return {p, q};
}

void sample_gibbs(const GibbsSpec& spec, Rng& rng, std::span<double> p, std::span<double> q) {
  validate(spec);
  if (p.size() != q.size()) throw std::invalid_argument("sample_gibbs: p and q sizes differ");
  // p ~ N(0, m/beta), q ~ N(0, 1/(beta m omega0^2))
  const double m = spec.params.mass;
  const double sigma_p = std::sqrt(m / spec.beta);
  const double sigma_q = 1.0 / (spec.protocol.omega0 * std::sqrt(spec.beta * m));
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = sigma_p * rng.normal();
    q[i] = sigma_q * rng.normal();
  }
}

}  // namespace ffosc
