#include <numbers>
#include "ffosc/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace ffosc {

double kolmogorov_survival(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) {
    // Jacobi-transformed series, converges fast for small lambda.
    // 1 - Q = sqrt(2 pi)/lambda * sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k < 20; ++k) {
      const double t = std::exp(c * (2.0 * k - 1.0) * (2.0 * k - 1.0));
      s += t;
      if (t < 1e-18 * s) break;
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * t;
    if (t < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double sn = std::sqrt(n_eff);
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

TestResult ks_one_sample(std::span<const double> samples,
                         const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n), 0};
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb)), 0};
}

TestResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> expected,
                          std::size_t fitted_parameters, double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch or empty input");
  // Pool left to right until each group reaches min_expected; a short final
  // group is folded into the previous one.
  std::vector<double> obs, exp;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += expected[i];
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }
  if (obs.size() < 2 + fitted_parameters)
    throw std::invalid_argument("chi_square_gof: too few bins after pooling");
  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  const std::size_t dof = obs.size() - 1 - fitted_parameters;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat)), dof};
}

std::vector<double> poisson_z_scores(std::span<const std::size_t> observed,
                                     std::span<const double> expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("poisson_z_scores: size mismatch");
  std::vector<double> z(observed.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double o = static_cast<double>(observed[i]);
    if (expected[i] > 0.0)
      z[i] = (o - expected[i]) / std::sqrt(expected[i]);
    else
      z[i] = o == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return z;
}

std::vector<double> two_sample_z_scores(std::span<const std::size_t> a,
                                        std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("two_sample_z_scores: size mismatch");
  std::vector<double> z(a.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = static_cast<double>(a[i]), y = static_cast<double>(b[i]);
    z[i] = (x + y) > 0.0 ? (x - y) / std::sqrt(x + y) : 0.0;
  }
  return z;
}

double max_abs(std::span<const double> values) noexcept {
  double m = 0.0;
  for (const double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace ffosc
