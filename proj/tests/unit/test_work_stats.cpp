#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "ffosc/bessel.hpp"
#include "ffosc/ensemble.hpp"
#include "ffosc/stat_tests.hpp"
#include "ffosc/work_stats.hpp"

using namespace ffosc;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double integrate(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("scaled I0 against Boost") {
  for (const double x : {0.0, 1e-8, 0.3, 1.0, 5.0, 14.9, 15.0, 15.1, 30.0, 100.0, 600.0}) {
    const double ref = boost::math::cyl_bessel_i(0, x) * std::exp(-x);
    CHECK(bessel_i0_scaled(x) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(bessel_i0_scaled(-x) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(log_bessel_i0(x) == doctest::Approx(std::log(ref) + x).epsilon(1e-12));
  }
  CHECK(std::isfinite(log_bessel_i0(1e5)));
}

TEST_CASE("adiabatic law") {
  const auto d = std::get<AdiabaticExponential>(adiabatic_work_pdf(1.0, 10.0, 10.0 * std::numbers::sqrt3));
  CHECK(d.mean() == doctest::Approx(std::numbers::sqrt3 - 1.0).epsilon(1e-15));
  CHECK(std::sqrt(d.variance()) == doctest::Approx(std::numbers::sqrt3 - 1.0).epsilon(1e-15));
  CHECK(integrate([&](double w) { return d.pdf(w); }, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.cdf(0.5) == doctest::Approx(integrate([&](double w) { return d.pdf(w); }, 0.0, 0.5)).epsilon(1e-12));
  CHECK(d.pdf(-0.1) == 0.0);
  CHECK(std::holds_alternative<PointMass>(adiabatic_work_pdf(1.0, 2.0, 2.0)));

  const auto c = std::get<AdiabaticExponential>(adiabatic_work_pdf(2.0, 3.0, 1.0));
  CHECK(c.mean() < 0.0);
  CHECK(integrate([&](double w) { return c.pdf(w); }, -kInf, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.cdf(-0.1) == doctest::Approx(integrate([&](double w) { return c.pdf(w); }, -kInf, -0.1)).epsilon(1e-12));
}

TEST_CASE("sudden law against a scaled chi-square with one degree of freedom") {
  const double beta = 1.0, w0 = 10.0, wf = 10.0 * std::numbers::sqrt3;
  const auto d = std::get<SuddenChi>(sudden_work_pdf(beta, w0, wf));
  CHECK(std::abs(d.scale() - 2.0) < 1e-12);
  CHECK(std::abs(d.mean() - 1.0) < 1e-12);
  CHECK(std::abs(d.second_moment() - 3.0) < 1e-12);
  CHECK(std::abs(std::sqrt(d.variance()) - std::numbers::sqrt2) < 1e-12);
  // W = (s / 2) X with X ~ chi2(1)
  const boost::math::chi_squared chi(1.0);
  for (const double w : {1e-6, 0.01, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(d.cdf(w) == doctest::Approx(boost::math::cdf(chi, 2.0 * w / d.scale())).epsilon(1e-13));
    CHECK(d.pdf(w) == doctest::Approx(2.0 / d.scale() * boost::math::pdf(chi, 2.0 * w / d.scale())).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)sudden_work_pdf(1.0, 2.0, 1.0), UnsupportedBranch);
}

TEST_CASE("Bessel law: equal eigenvalues collapse to an exponential") {
  const FiniteTimeBessel d{0.7, 0.7};
  for (const double w : {0.01, 0.5, 2.0, 9.0}) {
    CHECK(d.pdf(w) == doctest::Approx(std::exp(-w / 0.7) / 0.7).epsilon(1e-12));
    CHECK(d.cdf(w) == doctest::Approx(-std::expm1(-w / 0.7)).epsilon(1e-10));
  }
}

TEST_CASE("Bessel law: normalisation, moments and CDF by quadrature") {
  for (const auto [mp, mm] : {std::pair{2.0, 1e-5}, std::pair{1.5, 0.4}, std::pair{3.0, 2.9}}) {
    const FiniteTimeBessel d{mp, mm};
    auto pdf = [&](double w) { return d.pdf(w); };
    CHECK(integrate(pdf, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(integrate([&](double w) { return w * d.pdf(w); }, 0.0, kInf) == doctest::Approx(d.mean()).epsilon(1e-8));
    CHECK(integrate([&](double w) { return w * w * d.pdf(w); }, 0.0, kInf) ==
          doctest::Approx(d.variance() + d.mean() * d.mean()).epsilon(1e-8));
    for (const double w : {0.1, 1.0, 4.0})
      CHECK(d.cdf(w) == doctest::Approx(integrate(pdf, 0.0, w)).epsilon(1e-8));
    CHECK(std::isfinite(d.log_pdf(500.0)));
  }
}

TEST_CASE("Bessel law matches a Gaussian quadratic form") {
  const double mp = 1.8, mm = 0.3;
  const FiniteTimeBessel d{mp, mm};
  Rng rng(77);
  std::vector<double> w(100000);
  const double s = std::sqrt(0.5);
  for (auto& x : w) {
    const double a = s * rng.normal(), b = s * rng.normal();
    x = mp * a * a + mm * b * b;
  }
  const TestResult ks = ks_one_sample(w, [&](double x) { return d.cdf(x); });
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("quadratic form reproduces trajectory work") {
  const auto p = FrequencyProtocol::from_tau_omega(10.0, std::numbers::sqrt3, 0.3);
  const double beta = 1.3;
  const FundamentalSolutions fs = fundamental_solutions(p);
  const QuadraticFormCoeffs q = quadratic_form_coeffs(fs, beta, initial_omega(p), final_omega(p));
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint x{rng.normal(), 0.1 * rng.normal()};
    const PhasePoint y = integrate_trajectory(x, p, {}, DriveMode::Bare);
    const double w = trajectory_work(x, y, p, {});
    CHECK(q.work(x, initial_omega(p), beta) == doctest::Approx(w).epsilon(1e-8));
  }
  const MuEigenvalues mu = mu_eigenvalues(q);
  CHECK(mu.plus + mu.minus == doctest::Approx(q.trace()).epsilon(1e-13));
  CHECK(mu.plus * mu.minus == doctest::Approx(q.determinant()).epsilon(1e-12));
  CHECK(mu.plus >= mu.minus);
}

TEST_CASE("finite-time law branches") {
  CHECK_THROWS_AS((void)finite_time_work_pdf(1.0, -0.1), UnsupportedBranch);
  CHECK(std::holds_alternative<FiniteTimeBessel>(finite_time_work_pdf(1.0, 0.5)));
}

TEST_CASE("discrete distributions") {
  const DiscreteWorkDistribution d = make_discrete({{2.0, 0.25}, {-1.0, 0.25}, {2.0 + 1e-14, 0.5}});
  REQUIRE(d.atoms.size() == 2);
  CHECK(d.atoms[0].work == -1.0);
  CHECK(d.atoms[1].probability == doctest::Approx(0.75));
  CHECK(d.total_probability() == doctest::Approx(1.0));
  CHECK(d.mean() == doctest::Approx(0.25 * -1.0 + 0.75 * 2.0));
  CHECK(d.second_moment() == doctest::Approx(0.25 + 0.75 * 4.0));
  CHECK(d.variance() == doctest::Approx(d.second_moment() - d.mean() * d.mean()));
  CHECK(d.exp_average(0.5) == doctest::Approx(0.25 * std::exp(0.5) + 0.75 * std::exp(-1.0)));
  CHECK(d.negative_work_probability() == doctest::Approx(0.25));
  const DiscreteWorkDistribution e = make_discrete({{2.0, 0.7}, {5.0, 0.3}});
  CHECK(max_atom_difference(d, e) == doctest::Approx(0.3));
  CHECK(max_atom_difference(d, d) == 0.0);
}

TEST_CASE("moment accumulator: merge is equivalent to a single pass") {
  Rng rng(4);
  std::vector<double> x(10001);
  for (auto& v : x) v = std::exp(rng.normal());
  MomentAccumulator all, a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    all.add(x[i]);
    (i < 3777 ? a : b).add(x[i]);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK(a.skewness() == doctest::Approx(all.skewness()).epsilon(1e-10));
  CHECK(a.excess_kurtosis() == doctest::Approx(all.excess_kurtosis()).epsilon(1e-10));
  CHECK(a.min() == all.min());
  CHECK(a.max() == all.max());

  // Two-pass oracle.
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double m2 = 0, m3 = 0, m4 = 0;
  for (const double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  CHECK(all.mean() == doctest::Approx(m).epsilon(1e-13));
  CHECK(all.variance() == doctest::Approx(m2 / (n - 1)).epsilon(1e-12));
  CHECK(all.skewness() == doctest::Approx(std::sqrt(n) * m3 / std::pow(m2, 1.5)).epsilon(1e-10));
  CHECK(all.excess_kurtosis() == doctest::Approx(n * m4 / (m2 * m2) - 3.0).epsilon(1e-10));
  CHECK(all.raw_second_moment() == doctest::Approx(m2 / n + m * m).epsilon(1e-12));

  MomentAccumulator empty;
  a.merge(empty);
  CHECK(a.count() == all.count());
}

TEST_CASE("histogram conventions") {
  const std::vector<double> x{0.0, 0.5, 1.0, 1.0, 2.0};
  const EmpiricalHistogram h = make_histogram(x, {.bins = 2});
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 2.0);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 3);  // default range closes the top bin
  CHECK(h.below + h.above == 0);

  const EmpiricalHistogram g = make_histogram(x, {.bins = 4, .lo = 0.5, .hi = 2.0});
  CHECK(g.below == 1);
  CHECK(g.above == 1);  // an explicit hi is excluded
  CHECK(g.n_samples == 5);
  double area = 0.0;
  for (std::size_t i = 0; i < g.bins(); ++i) area += g.density(i) * g.width(i);
  CHECK(area == doctest::Approx(3.0 / 5.0));
  CHECK_THROWS_AS((void)make_histogram(std::vector<double>{}, {}), std::invalid_argument);
}

TEST_CASE("bin probabilities sum to the range mass") {
  const WorkDistribution d = FiniteTimeBessel{2.0, 0.1};
  std::vector<double> edges;
  for (int i = 0; i <= 50; ++i) edges.push_back(0.2 * i);
  const auto p = bin_probabilities(d, edges);
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  CHECK(sum == doctest::Approx(probability_between(d, 0.0, 10.0)).epsilon(1e-10));
  CHECK(probability_between(d, 0.0, 10.0) == doctest::Approx(std::get<FiniteTimeBessel>(d).cdf(10.0)).epsilon(1e-10));
  CHECK(mean(d) == doctest::Approx(1.05));
}

TEST_CASE("Jarzynski trace against a naive running mean") {
  Rng rng(8);
  std::vector<double> w(5000);
  for (auto& x : w) x = rng.exponential(1.0);
  const JarzynskiTrace t = jarzynski_trace(w, 1.0, 1.0, 2.0);
  CHECK(t.target == doctest::Approx(0.5));
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    s += std::exp(-w[k]);
    CHECK(t.running_mean[k] == doctest::Approx(s / (k + 1)).epsilon(1e-13));
  }
  const auto settled = t.settled_after(0.02);
  REQUIRE(settled);
  for (std::size_t k = *settled; k <= t.size(); ++k)
    CHECK(std::abs(t.running_mean[k - 1] / t.target - 1.0) <= 0.02);
  CHECK_FALSE(t.settled_after(1e-9).has_value());
  CHECK(classical_partition_ratio(10.0, 10.0 * std::numbers::sqrt3) == doctest::Approx(1.0 / std::numbers::sqrt3));
}

TEST_CASE("summary of an ensemble") {
  const WorkSummary s = summarize(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.second_moment == doctest::Approx(7.5));
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
}
