#pragma once

// Classical trajectories of the driven oscillator under H0 alone or under the
// fast-forward Hamiltonian H0 + HC with HC = -(omega_dot / 2 omega) p q.

#include <span>
#include <stdexcept>
#include <vector>

#include "ffosc/protocol.hpp"
#include "ffosc/simd/kernels.hpp"

namespace ffosc {

enum class DriveMode { Bare, FastForward };

enum class IntegratorMethod {
  RK4,
  Symplectic2,  // implicit midpoint (Cayley transform of the frozen flow)
};

struct IntegratorConfig {
  double step = 0.0;  // <= 0 selects default_step()
  IntegratorMethod method = IntegratorMethod::RK4;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhaseVelocity {
  double dp = 0.0;
  double dq = 0.0;
};

/// C, S solve q'' + omega(t)^2 q = 0 with C(0)=1, C'(0)=0, S(0)=0, S'(0)=1;
/// all four values are taken at t = tau.
struct FundamentalSolutions {
  double C = 1.0;
  double C_dot = 0.0;
  double S = 0.0;
  double S_dot = 1.0;

  [[nodiscard]] double wronskian() const noexcept { return C * S_dot - C_dot * S; }
};

/// min(tau, 2 pi / omega_max) / 200
[[nodiscard]] double default_step(const FrequencyProtocol& protocol);

/// Control-field rate g(t) = omega_dot / (2 omega); zero in Bare mode.
[[nodiscard]] double control_rate(const FrequencyProtocol& protocol, double t, DriveMode mode);

/// Linear flow matrix A(t) with (dp/dt, dq/dt) = A (p, q).
[[nodiscard]] simd::LinearCoeffs flow_coeffs(const FrequencyProtocol& protocol,
                                            const OscillatorParams& params, DriveMode mode,
                                            double t);

[[nodiscard]] PhaseVelocity eom_rhs(PhasePoint point, double t, const FrequencyProtocol& protocol,
                                    const OscillatorParams& params, DriveMode mode);

/// Shared step tables from t0 to t1 (t1 < t0 integrates backwards).
[[nodiscard]] std::vector<simd::Rk4Step> rk4_table(const FrequencyProtocol& protocol,
                                                  const OscillatorParams& params, DriveMode mode,
                                                  double t0, double t1, double step);
[[nodiscard]] std::vector<simd::StepMatrix> midpoint_table(const FrequencyProtocol& protocol,
                                                          const OscillatorParams& params,
                                                          DriveMode mode, double t0, double t1,
                                                          double step);

/// Step table for one (protocol, mode, integrator) combination, built once and
/// applied to any number of trajectories.
class TrajectoryPropagator {
 public:
  TrajectoryPropagator(const FrequencyProtocol& protocol, const OscillatorParams& params,
                       DriveMode mode, const IntegratorConfig& config, double t0, double t1);
  TrajectoryPropagator(const FrequencyProtocol& protocol, const OscillatorParams& params,
                       DriveMode mode, const IntegratorConfig& config);

  /// Advances (p[i], q[i]) in place; throws IntegrationError on non-finite output.
  void apply(std::span<double> p, std::span<double> q) const;
  [[nodiscard]] std::size_t steps() const noexcept;

 private:
  IntegratorMethod method_;
  std::vector<simd::Rk4Step> rk4_;
  std::vector<simd::StepMatrix> midpoint_;
};

/// Integrates every (p[i], q[i]) from t0 to t1 in place.
void integrate_batch(std::span<double> p, std::span<double> q, const FrequencyProtocol& protocol,
                     const OscillatorParams& params, DriveMode mode,
                     const IntegratorConfig& config, double t0, double t1);

/// Integrates every (p[i], q[i]) over [0, tau] in place.
void integrate_batch(std::span<double> p, std::span<double> q, const FrequencyProtocol& protocol,
                     const OscillatorParams& params, DriveMode mode,
                     const IntegratorConfig& config);

[[nodiscard]] PhasePoint integrate_trajectory(PhasePoint initial,
                                              const FrequencyProtocol& protocol,
                                              const OscillatorParams& params, DriveMode mode,
                                              const IntegratorConfig& config = {});

[[nodiscard]] PhasePoint integrate_between(PhasePoint initial, double t0, double t1,
                                           const FrequencyProtocol& protocol,
                                           const OscillatorParams& params, DriveMode mode,
                                           const IntegratorConfig& config = {});

/// Only two trajectories are needed, so an unset step defaults to default_step() / 4.
[[nodiscard]] FundamentalSolutions fundamental_solutions(const FrequencyProtocol& protocol,
                                                         const IntegratorConfig& config = {});

/// W = H0(final, omega(tau)) - H0(initial, omega0). HC vanishes at both ends.
[[nodiscard]] double trajectory_work(PhasePoint initial, PhasePoint final,
                                     const FrequencyProtocol& protocol,
                                     const OscillatorParams& params);

}  // namespace ffosc
