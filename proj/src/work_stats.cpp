#include "ffosc/work_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ffosc/bessel.hpp"

namespace ffosc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

double histogram_mean(const EmpiricalHistogram& h) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    s += static_cast<double>(h.counts[i]) * 0.5 * (h.edges[i] + h.edges[i + 1]);
    n += h.counts[i];
  }
  if (n == 0) throw std::invalid_argument("histogram has no in-range samples");
  return s / static_cast<double>(n);
}

double histogram_variance(const EmpiricalHistogram& h) {
  const double m = histogram_mean(h);
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double d = 0.5 * (h.edges[i] + h.edges[i + 1]) - m;
    s += static_cast<double>(h.counts[i]) * d * d;
    n += h.counts[i];
  }
  return s / static_cast<double>(n);
}

}  // namespace

// ---- laws ------------------------------------------------------------------

double AdiabaticExponential::pdf(double w) const noexcept {
  const double s = scale();
  const double x = w / s;
  if (x < 0.0) return 0.0;
  return std::exp(-x) / std::abs(s);
}

double AdiabaticExponential::cdf(double w) const noexcept {
  const double s = scale();
  if (s > 0.0) return w <= 0.0 ? 0.0 : -std::expm1(-w / s);
  return w >= 0.0 ? 1.0 : std::exp(-w / s);
}

double FiniteTimeBessel::log_pdf(double w) const noexcept {
  if (w < 0.0) return -std::numeric_limits<double>::infinity();
  const double prod = mu_plus * mu_minus;
  const double a = (mu_plus + mu_minus) * w / (2.0 * prod);
  const double b = (mu_plus - mu_minus) * w / (2.0 * prod);
  return -0.5 * std::log(prod) - a + log_bessel_i0(b);
}

double FiniteTimeBessel::pdf(double w) const noexcept {
  if (w < 0.0) return 0.0;
  return std::exp(log_pdf(w));
}

double FiniteTimeBessel::cdf(double w) const {
  if (w <= 0.0) return 0.0;
  // x = r cos(phi), y = r sin(phi): P(W > w) = (2/pi) int_0^{pi/2} exp(-w / d(phi)) dphi
  // with d = mu_plus cos^2 + mu_minus sin^2. The integrand peaks at pi/2 when mu_minus << mu_plus.
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return std::exp(-w / (mu_plus * c * c + mu_minus * s * s));
  };
  const double tail = (2.0 / std::numbers::pi) * integrator.integrate(f, 0.0, 0.5 * std::numbers::pi);
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double SuddenChi::scale() const noexcept {
  return (omega_f * omega_f - omega0 * omega0) / (beta * omega0 * omega0);
}

double SuddenChi::pdf(double w) const noexcept {
  if (w <= 0.0) return w == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  const double s = scale();
  return std::exp(-w / s) / std::sqrt(std::numbers::pi * w * s);
}

double SuddenChi::cdf(double w) const noexcept {
  if (w <= 0.0) return 0.0;
  return std::erf(std::sqrt(w / scale()));
}

double DiscreteWorkDistribution::total_probability() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability;
  return s;
}

double DiscreteWorkDistribution::mean() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability * a.work;
  return s;
}

double DiscreteWorkDistribution::second_moment() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability * a.work * a.work;
  return s;
}

double DiscreteWorkDistribution::variance() const noexcept {
  const double m = mean();
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability * (a.work - m) * (a.work - m);
  return s;
}

double DiscreteWorkDistribution::exp_average(double beta) const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability * std::exp(-beta * a.work);
  return s;
}

double DiscreteWorkDistribution::negative_work_probability() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.work < 0.0) s += a.probability;
  return s;
}

DiscreteWorkDistribution make_discrete(std::vector<WorkAtom> atoms, double merge_tol) {
  std::sort(atoms.begin(), atoms.end(),
            [](const WorkAtom& a, const WorkAtom& b) { return a.work < b.work; });
  DiscreteWorkDistribution out;
  for (const auto& a : atoms) {
    if (!out.atoms.empty() &&
        std::abs(a.work - out.atoms.back().work) <= merge_tol * std::max(1.0, std::abs(a.work)))
      out.atoms.back().probability += a.probability;
    else
      out.atoms.push_back(a);
  }
  return out;
}

double max_atom_difference(const DiscreteWorkDistribution& a, const DiscreteWorkDistribution& b,
                           double work_tol) {
  // both atom lists are sorted by work
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    if (i < a.atoms.size() && j < b.atoms.size()) {
      const double wa = a.atoms[i].work, wb = b.atoms[j].work;
      if (std::abs(wa - wb) <= work_tol * std::max(1.0, std::abs(wa))) {
        worst = std::max(worst, std::abs(a.atoms[i].probability - b.atoms[j].probability));
        ++i;
        ++j;
      } else if (wa < wb) {
        worst = std::max(worst, std::abs(a.atoms[i++].probability));
      } else {
        worst = std::max(worst, std::abs(b.atoms[j++].probability));
      }
    } else if (i < a.atoms.size()) {
      worst = std::max(worst, std::abs(a.atoms[i++].probability));
    } else {
      worst = std::max(worst, std::abs(b.atoms[j++].probability));
    }
  }
  return worst;
}

double EmpiricalHistogram::density(std::size_t bin) const {
  if (n_samples == 0) return 0.0;
  return static_cast<double>(counts.at(bin)) / (static_cast<double>(n_samples) * width(bin));
}

double mean(const WorkDistribution& dist) {
  return std::visit(overloaded{[](const PointMass& d) { return d.at; },
                               [](const EmpiricalHistogram& h) { return histogram_mean(h); },
                               [](const auto& d) { return d.mean(); }},
                    dist);
}

double variance(const WorkDistribution& dist) {
  return std::visit(overloaded{[](const PointMass&) { return 0.0; },
                               [](const EmpiricalHistogram& h) { return histogram_variance(h); },
                               [](const auto& d) { return d.variance(); }},
                    dist);
}

double stddev(const WorkDistribution& dist) { return std::sqrt(variance(dist)); }

double probability_between(const WorkDistribution& dist, double a, double b) {
  if (!(b >= a)) throw std::invalid_argument("probability_between: need a <= b");
  return std::visit(
      overloaded{
          [&](const PointMass& d) { return (d.at >= a && d.at < b) ? 1.0 : 0.0; },
          [&](const DiscreteWorkDistribution& d) {
            double s = 0.0;
            for (const auto& atom : d.atoms)
              if (atom.work >= a && atom.work < b) s += atom.probability;
            return s;
          },
          [&](const EmpiricalHistogram&) -> double {
            throw std::invalid_argument("probability_between: not defined for histograms");
          },
          [&](const auto& d) { return d.cdf(b) - d.cdf(a); }},
      dist);
}

std::vector<double> bin_probabilities(const WorkDistribution& dist,
                                      std::span<const double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("bin_probabilities: need at least 2 edges");
  std::vector<double> out(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    out[i] = probability_between(dist, edges[i], edges[i + 1]);
  return out;
}

// ---- closed forms ------------------------------------------------------------

WorkDistribution adiabatic_work_pdf(double beta, double omega0, double omega_f) {
  require_positive(beta, "beta");
  require_positive(omega0, "omega0");
  require_positive(omega_f, "omega_f");
  if (omega_f == omega0) return PointMass{0.0};
  return AdiabaticExponential{beta, omega0, omega_f - omega0};
}

double QuadraticFormCoeffs::work(PhasePoint initial, double omega0, double beta) const noexcept {
  const double p = initial.p, q = initial.q;
  return 0.5 * beta * (K * p * p + L * omega0 * omega0 * q * q + 2.0 * M * omega0 * p * q);
}

QuadraticFormCoeffs quadratic_form_coeffs(const FundamentalSolutions& fund, double beta,
                                          double omega0, double omega_f) {
  require_positive(beta, "beta");
  require_positive(omega0, "omega0");
  require_positive(omega_f, "omega_f");
  const double wf2 = omega_f * omega_f;
  const double w02 = omega0 * omega0;
  QuadraticFormCoeffs c;
  c.K = (fund.S_dot * fund.S_dot + wf2 * fund.S * fund.S - 1.0) / beta;
  c.L = (fund.C_dot * fund.C_dot / w02 + wf2 * fund.C * fund.C / w02 - 1.0) / beta;
  c.M = (fund.C_dot * fund.S_dot + wf2 * fund.C * fund.S) / (beta * omega0);
  return c;
}

MuEigenvalues mu_eigenvalues(const QuadraticFormCoeffs& c) noexcept {
  const double half_trace = 0.5 * (c.K + c.L);
  const double half_diff = 0.5 * (c.K - c.L);
  const double r = std::hypot(half_diff, c.M);
  MuEigenvalues mu;
  if (half_trace >= 0.0) {
    mu.plus = half_trace + r;
    mu.minus = mu.plus != 0.0 ? c.determinant() / mu.plus : 0.0;
  } else {
    mu.minus = half_trace - r;
    mu.plus = mu.minus != 0.0 ? c.determinant() / mu.minus : 0.0;
  }
  return mu;
}

WorkDistribution finite_time_work_pdf(double mu_plus, double mu_minus) {
  if (!std::isfinite(mu_plus) || !std::isfinite(mu_minus))
    throw std::invalid_argument("finite_time_work_pdf: non-finite eigenvalue");
  if (!(mu_minus > 0.0))
    throw UnsupportedBranch(
        "finite_time_work_pdf: quadratic form is not positive definite (mu_minus <= 0); "
        "contracting protocols are served by Monte Carlo only");
  if (mu_plus < mu_minus) throw std::invalid_argument("finite_time_work_pdf: need mu_plus >= mu_minus");
  return FiniteTimeBessel{mu_plus, mu_minus};
}

WorkDistribution sudden_work_pdf(double beta, double omega0, double omega_f) {
  require_positive(beta, "beta");
  require_positive(omega0, "omega0");
  require_positive(omega_f, "omega_f");
  if (!(omega_f > omega0))
    throw UnsupportedBranch("sudden_work_pdf: requires omega_f > omega0");
  return SuddenChi{beta, omega0, omega_f};
}

// ---- samples -------------------------------------------------------------------

void MomentAccumulator::add(double x) noexcept {
  MomentAccumulator one;
  one.n_ = 1;
  one.mean_ = x;
  one.min_ = one.max_ = x;
  merge(one);
}

void MomentAccumulator::merge(const MomentAccumulator& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  const double d2 = d * d;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d * d2 * na * nb * (na - nb) / (n * n) +
                    3.0 * d * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * d * (na * o.m3_ - nb * m3_) / n;
  mean_ += d * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  min_ = std::min(min_, o.min_);
  max_ = std::max(max_, o.max_);
  n_ += o.n_;
}

double MomentAccumulator::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double MomentAccumulator::stddev() const noexcept { return std::sqrt(variance()); }

double MomentAccumulator::raw_second_moment() const noexcept {
  return n_ ? mean_ * mean_ + m2_ / static_cast<double>(n_) : 0.0;
}

double MomentAccumulator::skewness() const noexcept {
  if (n_ < 2 || m2_ == 0.0) return 0.0;
  const double n = static_cast<double>(n_);
  return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
}

double MomentAccumulator::excess_kurtosis() const noexcept {
  if (n_ < 2 || m2_ == 0.0) return 0.0;
  const double n = static_cast<double>(n_);
  return n * m4_ / (m2_ * m2_) - 3.0;
}

EmpiricalHistogram make_histogram(std::span<const double> samples, const HistogramSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("make_histogram: empty sample");
  if (spec.bins == 0) throw std::invalid_argument("make_histogram: bins must be positive");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  double lo = spec.lo.value_or(*mn);
  double hi = spec.hi.value_or(*mx);
  if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("make_histogram: invalid range");
  if (hi == lo) {
    // all samples equal: one unit-width bin around the value
    lo -= 0.5;
    hi += 0.5;
  }
  EmpiricalHistogram h;
  h.edges.resize(spec.bins + 1);
  const double width = (hi - lo) / static_cast<double>(spec.bins);
  for (std::size_t i = 0; i <= spec.bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(spec.bins, 0);
  h.n_samples = samples.size();
  const bool closed_top = !spec.hi.has_value();
  for (const double x : samples) {
    if (x < lo) {
      ++h.below;
    } else if (x > hi || (x == hi && !closed_top)) {
      ++h.above;
    } else {
      auto bin = static_cast<std::size_t>((x - lo) / width);
      bin = std::min(bin, spec.bins - 1);
      // guard against rounding at bin boundaries
      while (bin > 0 && x < h.edges[bin]) --bin;
      while (bin + 1 < spec.bins && x >= h.edges[bin + 1]) ++bin;
      ++h.counts[bin];
    }
  }
  return h;
}

WorkSummary summarize(std::span<const double> samples, const HistogramSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("summarize: empty sample");
  MomentAccumulator acc;
  for (const double x : samples) acc.add(x);
  WorkSummary s;
  s.n = acc.count();
  s.mean = acc.mean();
  s.variance = acc.variance();
  s.stddev = acc.stddev();
  s.second_moment = acc.raw_second_moment();
  s.skewness = acc.skewness();
  s.excess_kurtosis = acc.excess_kurtosis();
  s.min = acc.min();
  s.max = acc.max();
  s.histogram = make_histogram(samples, spec);
  return s;
}

std::optional<std::size_t> JarzynskiTrace::settled_after(double rel_tol) const {
  std::optional<std::size_t> k;
  for (std::size_t i = running_mean.size(); i-- > 0;) {
    if (std::abs(running_mean[i] - target) > rel_tol * std::abs(target)) break;
    k = i + 1;
  }
  return k;
}

JarzynskiTrace jarzynski_trace(std::span<const double> samples, double beta, double omega0,
                               double omega_f) {
  require_positive(beta, "beta");
  JarzynskiTrace t;
  t.beta = beta;
  t.target = classical_partition_ratio(omega0, omega_f);
  t.running_mean.resize(samples.size());
  MomentAccumulator acc;
  // Neumaier-compensated prefix sum
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = std::exp(-beta * samples[i]);
    acc.add(x);
    const double y = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - y) + x : (x - y) + sum;
    sum = y;
    t.running_mean[i] = (sum + comp) / static_cast<double>(i + 1);
  }
  t.exp_work_stddev = acc.stddev();
  return t;
}

double classical_partition_ratio(double omega0, double omega_f) noexcept {
  return omega0 / omega_f;
}

}  // namespace ffosc
