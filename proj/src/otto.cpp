#include "ffosc/otto.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ffosc {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("otto: ") + what + " must be positive and finite");
}

void require_engine_temperatures(double beta1, double beta2) {
  require_positive(beta1, "beta1");
  require_positive(beta2, "beta2");
  if (!(beta1 > beta2))
    throw std::domain_error("otto: need beta1 > beta2 (hot bath hotter than cold bath)");
}

double output_at(double beta1, double beta2, OttoMode mode, double log_ratio) {
  OttoCycleSpec s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.omega1 = 1.0;
  s.omega2 = std::exp(log_ratio);
  s.mode = mode;
  return cycle_averages(s).output;
}

}  // namespace

std::string_view otto_mode_name(OttoMode mode) noexcept {
  switch (mode) {
    case OttoMode::AdiabaticLimit: return "adiabatic";
    case OttoMode::SuddenLimit: return "sudden";
    case OttoMode::FastForward: return "fast-forward";
  }
  return "unknown";
}

void validate(const OttoCycleSpec& spec) {
  require_positive(spec.beta1, "beta1");
  require_positive(spec.beta2, "beta2");
  require_positive(spec.omega1, "omega1");
  require_positive(spec.omega2, "omega2");
  for (const double t : spec.stroke_times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("otto: stroke times must be finite and non-negative");
}

OttoResult cycle_averages(const OttoCycleSpec& spec) {
  validate(spec);
  const double b1 = spec.beta1, b2 = spec.beta2;
  const double w1 = spec.omega1, w2 = spec.omega2;
  OttoResult r;
  if (spec.mode == OttoMode::SuddenLimit) {
    const double a = w1 * w1, b = w2 * w2;
    r.W1 = (b - a) / (2.0 * b1 * a);
    r.Q2 = 1.0 / b2 - (b + a) / (2.0 * b1 * a);
    r.W3 = (a - b) / (2.0 * b2 * b);
    // W = (s / 2) chi2(1) with s = (w_end^2 - w_start^2) / (beta w_start^2)
    r.W1_variance = 0.5 * std::pow((b - a) / (b1 * a), 2);
    r.W3_variance = 0.5 * std::pow((a - b) / (b2 * b), 2);
  } else {
    r.W1 = (w2 - w1) / (b1 * w1);
    r.Q2 = 1.0 / b2 - w2 / (b1 * w1);
    r.W3 = (w1 - w2) / (b2 * w2);
    // exponential law: variance = mean^2
    r.W1_variance = r.W1 * r.W1;
    r.W3_variance = r.W3 * r.W3;
  }
  r.Q4 = -(r.W1 + r.Q2 + r.W3);
  r.output = -(r.W1 + r.W3);
  const auto& t = spec.stroke_times;
  r.cycle_time = spec.mode == OttoMode::AdiabaticLimit ? t[0] + t[1] + t[2] + t[3] : t[1] + t[3];
  r.power = r.cycle_time > 0.0 ? r.output / r.cycle_time
                               : std::copysign(HUGE_VAL, r.output);
  if (r.Q2 > 0.0) r.eta = r.output / r.Q2;
  return r;
}

OttoOptimum optimal_ratio(double beta1, double beta2, OttoMode mode) {
  require_engine_temperatures(beta1, beta2);
  const double s = std::sqrt(beta2 / beta1);
  const double gap = 1.0 / beta1 + 1.0 / beta2 - 2.0 / std::sqrt(beta1 * beta2);
  OttoOptimum o;
  if (mode == OttoMode::SuddenLimit) {
    o.ratio = std::sqrt(std::sqrt(beta1 / beta2));
    o.output = 0.5 * gap;
    o.eta = (1.0 - s) / (2.0 + s);
  } else {
    o.ratio = std::sqrt(beta1 / beta2);
    o.output = gap;
    o.eta = 1.0 - s;
  }
  return o;
}

double numerical_optimal_ratio(double beta1, double beta2, OttoMode mode, double log_tolerance) {
  require_engine_temperatures(beta1, beta2);
  constexpr double lo0 = -6.0, hi0 = 6.0;
  // Unimodality: the sign of the finite-difference slope changes exactly once.
  constexpr int kProbe = 240;
  int sign_changes = 0;
  double prev_slope = 0.0;
  for (int i = 0; i < kProbe; ++i) {
    const double a = lo0 + (hi0 - lo0) * i / kProbe;
    const double b = lo0 + (hi0 - lo0) * (i + 1) / kProbe;
    const double slope = output_at(beta1, beta2, mode, b) - output_at(beta1, beta2, mode, a);
    if (i > 0 && (slope > 0.0) != (prev_slope > 0.0)) ++sign_changes;
    prev_slope = slope;
  }
  if (sign_changes != 1)
    throw std::runtime_error("otto: output is not unimodal on log ratio [-6, 6]");

  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = lo0, hi = hi0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = output_at(beta1, beta2, mode, x1), f2 = output_at(beta1, beta2, mode, x2);
  while (hi - lo > log_tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = output_at(beta1, beta2, mode, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = output_at(beta1, beta2, mode, x1);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

const ModeRow& ModeComparison::row(OttoMode mode) const {
  for (const auto& r : rows)
    if (r.mode == mode) return r;
  throw std::out_of_range("ModeComparison::row: mode missing");
}

ModeComparison compare_modes(double beta1, double beta2, double relaxation_time,
                             double adiabatic_stroke_time) {
  require_engine_temperatures(beta1, beta2);
  require_positive(relaxation_time, "relaxation_time");
  if (!(adiabatic_stroke_time >= 0.0))
    throw std::invalid_argument("otto: adiabatic_stroke_time must be non-negative");
  ModeComparison c;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.relaxation_time = relaxation_time;
  c.adiabatic_stroke_time = adiabatic_stroke_time;
  for (const OttoMode mode : {OttoMode::AdiabaticLimit, OttoMode::SuddenLimit, OttoMode::FastForward}) {
    const OttoOptimum opt = optimal_ratio(beta1, beta2, mode);
    OttoCycleSpec s;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.omega1 = 1.0;
    s.omega2 = opt.ratio;
    s.mode = mode;
    s.stroke_times = {0.5 * adiabatic_stroke_time, 0.5 * relaxation_time,
                      0.5 * adiabatic_stroke_time, 0.5 * relaxation_time};
    if (mode != OttoMode::AdiabaticLimit) s.stroke_times[0] = s.stroke_times[2] = 0.0;
    const OttoResult r = cycle_averages(s);
    c.rows.push_back({mode, opt.ratio, r.output, r.eta.value_or(0.0), r.power});
  }
  return c;
}

}  // namespace ffosc
