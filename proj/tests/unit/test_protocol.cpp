#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ffosc/protocol.hpp"
#include "ffosc/stat_tests.hpp"

using namespace ffosc;

namespace {

FrequencyProtocol reference_protocol(double tau_omega = 0.01) {
  return FrequencyProtocol::from_tau_omega(10.0, std::numbers::sqrt3, tau_omega);
}

}  // namespace

TEST_CASE("schedule endpoints and extrema") {
  const auto p = reference_protocol();
  CHECK(omega_at(p, 0.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(omega_at(p, p.tau) == doctest::Approx(10.0 * std::numbers::sqrt3).epsilon(1e-14));
  CHECK(initial_omega(p) == doctest::Approx(10.0));
  CHECK(final_omega(p) == doctest::Approx(10.0 * std::numbers::sqrt3));
  CHECK(max_omega(p) == doctest::Approx(final_omega(p)));
  CHECK(min_omega(p) == doctest::Approx(initial_omega(p)));
  CHECK(p.tau_omega() == doctest::Approx(0.01));
}

TEST_CASE("even harmonic returns to the start frequency") {
  auto p = reference_protocol();
  p.harmonic_index = 2;
  CHECK(final_omega(p) == doctest::Approx(10.0));
  CHECK(max_omega(p) == doctest::Approx(10.0 * std::numbers::sqrt3));
}

TEST_CASE("rate matches a central difference and vanishes at the ends") {
  for (const int n : {1, 2, 3}) {
    auto p = reference_protocol(0.37);
    p.harmonic_index = n;
    for (int i = 1; i < 20; ++i) {
      const double t = p.tau * i / 20.0;
      const double h = p.tau * 1e-6;
      const double fd = (omega_at(p, t + h) - omega_at(p, t - h)) / (2 * h);
      CHECK(omega_dot_at(p, t) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(std::abs(omega_dot_at(p, 0.0)) < 1e-12);
    CHECK(std::abs(omega_dot_at(p, p.tau)) < 1e-9 * std::abs(omega_dot_at(p, 0.5 * p.tau)) + 1e-9);
  }
}

TEST_CASE("out-of-range times are rejected, rounding overshoot is clamped") {
  const auto p = reference_protocol();
  CHECK_THROWS_AS((void)omega_at(p, -0.1 * p.tau), std::domain_error);
  CHECK_THROWS_AS((void)omega_at(p, 1.1 * p.tau), std::domain_error);
  CHECK_NOTHROW((void)omega_at(p, p.tau * (1.0 + 1e-14)));
}

TEST_CASE("invalid parameters") {
  FrequencyProtocol p;
  p.tau = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.omega0 = -1.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  OscillatorParams o;
  o.mass = 0.0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
}

TEST_CASE("action-angle round trip") {
  OscillatorParams params;
  params.mass = 1.7;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const PhasePoint x{rng.normal(), rng.normal()};
    const double w = 0.5 + 5 * rng.uniform();
    const ActionAngle aa = to_action_angle(x, w, params);
    CHECK(aa.action == doctest::Approx(energy(x, w, params) / w).epsilon(1e-13));
    CHECK(aa.angle >= 0.0);
    CHECK(aa.angle < 2 * std::numbers::pi);
    const PhasePoint y = from_action_angle(aa, w, params);
    CHECK(y.p == doctest::Approx(x.p).epsilon(1e-12));
    CHECK(y.q == doctest::Approx(x.q).epsilon(1e-12));
  }
  CHECK(angle_of({0.0, 0.0}, 1.0, params) == 0.0);
}

TEST_CASE("Gibbs sampler: deterministic, equipartition, exponential action") {
  GibbsSpec spec;
  spec.beta = 2.5;
  spec.protocol = reference_protocol();
  const PhasePoint a = sample_gibbs(spec, 42), b = sample_gibbs(spec, 42);
  CHECK(a.p == b.p);
  CHECK(a.q == b.q);

  constexpr std::size_t n = 200000;
  std::vector<double> p(n), q(n);
  Rng rng(7, 1);
  sample_gibbs(spec, rng, p, q);
  double e = 0.0, e2 = 0.0;
  const double w0 = spec.protocol.omega0;
  std::vector<double> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = energy({p[i], q[i]}, w0, spec.params);
    e += h;
    e2 += h * h;
    actions[i] = h / w0;
  }
  e /= n;
  e2 /= n;
  // H ~ Gamma(1, 1/beta): mean 1/beta, variance 1/beta^2
  CHECK(e == doctest::Approx(1.0 / spec.beta).epsilon(0.01));
  CHECK(e2 - e * e == doctest::Approx(1.0 / (spec.beta * spec.beta)).epsilon(0.03));

  const double rate = spec.beta * w0;
  const TestResult ks = ks_one_sample(actions, [rate](double i) { return -std::expm1(-rate * i); });
  CHECK(ks.p_value > 0.001);
}
