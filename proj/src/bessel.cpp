#include "ffosc/bessel.hpp"

#include <cmath>
#include <numbers>

namespace ffosc {

namespace {
constexpr double kSeriesLimit = 15.0;
}

double bessel_i0_scaled(double x) noexcept {
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) {
    const double y = 0.25 * ax * ax;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= y / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-ax);
  }
  // e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * ax);
    if (next > term) break;  // asymptotic series starts diverging
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * ax);
}

double log_bessel_i0(double x) noexcept { return std::abs(x) + std::log(bessel_i0_scaled(x)); }

}  // namespace ffosc
