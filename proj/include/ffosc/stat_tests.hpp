#pragma once

// Goodness-of-fit and two-sample tests used to compare work samples with each
// other and with closed-form laws.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ffosc {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;  // chi-square only
};

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), the Kolmogorov survival function.
[[nodiscard]] double kolmogorov_survival(double lambda) noexcept;

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
[[nodiscard]] TestResult ks_one_sample(std::span<const double> samples,
                                       const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
[[nodiscard]] TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square of observed counts against expected counts. Bins with
/// expected < min_expected are pooled into their neighbours first.
/// dof = (pooled bins) - 1 - fitted_parameters.
[[nodiscard]] TestResult chi_square_gof(std::span<const std::size_t> observed,
                                        std::span<const double> expected,
                                        std::size_t fitted_parameters = 0,
                                        double min_expected = 5.0);

/// Per-bin z-scores (observed - expected) / sqrt(expected); bins with expected == 0
/// get z = 0 if observed == 0 and +inf otherwise.
[[nodiscard]] std::vector<double> poisson_z_scores(std::span<const std::size_t> observed,
                                                   std::span<const double> expected);

/// Per-bin z-scores for two histograms with equal sample size:
/// (a - b) / sqrt(a + b), 0 where both are empty.
[[nodiscard]] std::vector<double> two_sample_z_scores(std::span<const std::size_t> a,
                                                      std::span<const std::size_t> b);

[[nodiscard]] double max_abs(std::span<const double> values) noexcept;

}  // namespace ffosc
