#pragma once

// Driving schedule, oscillator Hamiltonian, Gibbs sampling and action-angle
// variables shared by the classical and quantum solvers.

#include <cstdint>
#include <numbers>
#include <span>

#include "ffosc/rng.hpp"

namespace ffosc {

/// Frequency schedule
///   omega(t) = omega0 * sqrt((f^2+1)/2 - (f^2-1)/2 * cos(n*pi*t/tau)),  t in [0, tau].
/// The rate d(omega)/dt vanishes at both ends, so any control term proportional
/// to it is switched off at t = 0 and t = tau.
struct FrequencyProtocol {
  double omega0 = 10.0;
  double f = std::numbers::sqrt3;
  int harmonic_index = 1;
  double tau = 1e-3;

  /// Builds the schedule from the dimensionless adiabaticity product tau*omega0.
  static FrequencyProtocol from_tau_omega(double omega0, double f, double tau_omega,
                                          int harmonic_index = 1);

  [[nodiscard]] double tau_omega() const noexcept { return tau * omega0; }
};

struct OscillatorParams {
  double mass = 1.0;
  double hbar = 1.0 / (2.0 * std::numbers::pi);
};

struct GibbsSpec {
  double beta = 1.0;
  FrequencyProtocol protocol;
  OscillatorParams params;
};

struct PhasePoint {
  double p = 0.0;
  double q = 0.0;
};

struct ActionAngle {
  double action = 0.0;
  double angle = 0.0;  // [0, 2*pi)
};

// Throw std::invalid_argument on non-physical parameters.
void validate(const FrequencyProtocol& protocol);
void validate(const OscillatorParams& params);
void validate(const GibbsSpec& spec);

/// Throws std::domain_error for t outside [0, tau]. Stage times that overshoot
/// tau by rounding (relative 1e-12) are clamped.
[[nodiscard]] double omega_at(const FrequencyProtocol& protocol, double t);
[[nodiscard]] double omega_dot_at(const FrequencyProtocol& protocol, double t);

[[nodiscard]] double initial_omega(const FrequencyProtocol& protocol) noexcept;
[[nodiscard]] double final_omega(const FrequencyProtocol& protocol) noexcept;
/// Largest frequency reached on [0, tau].
[[nodiscard]] double max_omega(const FrequencyProtocol& protocol) noexcept;
[[nodiscard]] double min_omega(const FrequencyProtocol& protocol) noexcept;

[[nodiscard]] double energy(PhasePoint point, double omega, const OscillatorParams& params);

[[nodiscard]] double action_of(PhasePoint point, double omega, const OscillatorParams& params);
/// Angle defined through (sin, cos) = (q*sqrt(m*omega/2I), p/sqrt(2*m*omega*I)).
/// Returns 0 at the origin.
[[nodiscard]] double angle_of(PhasePoint point, double omega, const OscillatorParams& params);
[[nodiscard]] ActionAngle to_action_angle(PhasePoint point, double omega,
                                          const OscillatorParams& params);
[[nodiscard]] PhasePoint from_action_angle(ActionAngle aa, double omega,
                                           const OscillatorParams& params);

/// One draw from exp(-beta*H0(p, q, omega0))/Z0. Deterministic in the seed.
[[nodiscard]] PhasePoint sample_gibbs(const GibbsSpec& spec, std::uint64_t seed);

/// Fills p[i], q[i] with independent Gibbs draws from the given stream.
void sample_gibbs(const GibbsSpec& spec, Rng& rng, std::span<double> p, std::span<double> q);

}  // namespace ffosc
