#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "ffosc/rng.hpp"
#include "ffosc/stat_tests.hpp"

using namespace ffosc;

TEST_CASE("Kolmogorov survival against its defining series") {
  for (const double l : {0.3, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0}) {
    double q = 0.0;
    for (int k = 1; k < 200; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * l * l);
    CHECK(kolmogorov_survival(l) == doctest::Approx(q).epsilon(1e-12));
  }
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.05) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(2e-3));
}

TEST_CASE("one-sample KS: calibrated under the null, sensitive under the alternative") {
  boost::math::normal n01;
  auto cdf = [&](double x) { return boost::math::cdf(n01, x); };
  int rejections = 0;
  for (int r = 0; r < 200; ++r) {
    Rng rng(100 + r);
    std::vector<double> x(500);
    for (auto& v : x) v = rng.normal();
    rejections += ks_one_sample(x, cdf).p_value < 0.05;
  }
  CHECK(rejections > 2);
  CHECK(rejections < 22);

  Rng rng(5);
  std::vector<double> y(2000);
  for (auto& v : y) v = 1.1 * rng.normal();
  CHECK(ks_one_sample(y, cdf).p_value < 0.01);
}

TEST_CASE("one-sample KS statistic by brute force") {
  const std::vector<double> x{0.1, 0.4, 0.45, 0.9};
  auto cdf = [](double v) { return v; };  // uniform(0, 1)
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, (i + 1) / 4.0 - x[i]);
    d = std::max(d, x[i] - i / 4.0);
  }
  CHECK(ks_one_sample(x, cdf).statistic == doctest::Approx(d));
}

TEST_CASE("two-sample KS") {
  Rng rng(6);
  std::vector<double> a(3000), b(3000), c(3000);
  for (auto& v : a) v = rng.exponential(1.0);
  for (auto& v : b) v = rng.exponential(1.0);
  for (auto& v : c) v = rng.exponential(1.3);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  const std::vector<double> u{1, 2, 3}, v{4, 5, 6};
  CHECK(ks_two_sample(u, v).statistic == doctest::Approx(1.0));
}

TEST_CASE("chi-square goodness of fit") {
  const std::vector<std::size_t> obs{10, 20, 30, 40};
  const std::vector<double> exp{25, 25, 25, 25};
  const TestResult r = chi_square_gof(obs, exp);
  const double stat = (225 + 25 + 25 + 225) / 25.0;
  CHECK(r.statistic == doctest::Approx(stat));
  CHECK(r.dof == 3);
  CHECK(r.p_value == doctest::Approx(boost::math::cdf(boost::math::complement(boost::math::chi_squared(3), stat))));

  // Bins below the pooling threshold are merged.
  const std::vector<std::size_t> o2{50, 48, 1, 1};
  const std::vector<double> e2{49, 49, 1, 1};
  const TestResult p = chi_square_gof(o2, e2);
  CHECK(p.dof < 3);
  CHECK(p.p_value > 0.5);
  CHECK(chi_square_gof(obs, exp, 1).dof == 2);
}

TEST_CASE("z-scores") {
  const std::vector<std::size_t> o{9, 0, 4};
  const std::vector<double> e{4, 0, 4};
  const auto z = poisson_z_scores(o, e);
  CHECK(z[0] == doctest::Approx(2.5));
  CHECK(z[1] == 0.0);
  CHECK(z[2] == 0.0);
  const std::vector<std::size_t> a{10, 0, 5}, b{6, 0, 5};
  const auto t = two_sample_z_scores(a, b);
  CHECK(t[0] == doctest::Approx(4.0 / 4.0));
  CHECK(t[1] == 0.0);
  CHECK(max_abs(std::vector<double>{-3.0, 2.0}) == 3.0);
}
