#pragma once

// Closed-form work distributions, sample summaries and the Jarzynski running
// estimator.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ffosc/classical.hpp"

namespace ffosc {

/// Raised when a closed form is requested outside the branch it covers
/// (contracting protocols, indefinite quadratic forms).
class UnsupportedBranch : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PointMass {
  double at = 0.0;
};

/// Exponential law with signed scale s = delta_omega / (omega0 * beta),
/// supported on W / s >= 0.
struct AdiabaticExponential {
  double beta = 1.0;
  double omega0 = 1.0;
  double delta_omega = 0.0;

  [[nodiscard]] double scale() const noexcept { return delta_omega / (omega0 * beta); }
  [[nodiscard]] double pdf(double w) const noexcept;
  [[nodiscard]] double cdf(double w) const noexcept;
  [[nodiscard]] double mean() const noexcept { return scale(); }
  [[nodiscard]] double variance() const noexcept { return scale() * scale(); }
};

/// Law of mu_plus * x^2 + mu_minus * y^2 with x, y ~ N(0, 1/2).
struct FiniteTimeBessel {
  double mu_plus = 1.0;
  double mu_minus = 1.0;

  [[nodiscard]] double log_pdf(double w) const noexcept;
  [[nodiscard]] double pdf(double w) const noexcept;
  [[nodiscard]] double cdf(double w) const;
  [[nodiscard]] double mean() const noexcept { return 0.5 * (mu_plus + mu_minus); }
  [[nodiscard]] double variance() const noexcept {
    return 0.5 * (mu_plus * mu_plus + mu_minus * mu_minus);
  }
};

/// Work of an instantaneous quench omega0 -> omega_f from a Gibbs state.
struct SuddenChi {
  double beta = 1.0;
  double omega0 = 1.0;
  double omega_f = 1.0;

  /// (omega_f^2 - omega0^2) / (beta * omega0^2)
  [[nodiscard]] double scale() const noexcept;
  [[nodiscard]] double pdf(double w) const noexcept;
  [[nodiscard]] double cdf(double w) const noexcept;
  [[nodiscard]] double mean() const noexcept { return 0.5 * scale(); }
  [[nodiscard]] double second_moment() const noexcept { return 0.75 * scale() * scale(); }
  [[nodiscard]] double variance() const noexcept { return 0.5 * scale() * scale(); }
};

struct WorkAtom {
  double work = 0.0;
  double probability = 0.0;
};

/// Sorted by work; equal work values are merged into one atom.
struct DiscreteWorkDistribution {
  std::vector<WorkAtom> atoms;

  [[nodiscard]] double total_probability() const noexcept;
  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] double second_moment() const noexcept;
  [[nodiscard]] double variance() const noexcept;
  /// sum_k p_k exp(-beta W_k)
  [[nodiscard]] double exp_average(double beta) const noexcept;
  [[nodiscard]] double negative_work_probability() const noexcept;
};

/// Largest |p_a - p_b| over the union of atoms, matching atoms whose work
/// differs by at most work_tol (relative to max(1, |W|)).
[[nodiscard]] double max_atom_difference(const DiscreteWorkDistribution& a,
                                         const DiscreteWorkDistribution& b,
                                         double work_tol = 1e-9);

/// Builds a sorted distribution, merging atoms closer than merge_tol in work.
[[nodiscard]] DiscreteWorkDistribution make_discrete(std::vector<WorkAtom> atoms,
                                                     double merge_tol = 1e-12);

struct EmpiricalHistogram {
  std::vector<double> edges;  // counts.size() + 1 entries
  std::vector<std::size_t> counts;
  std::size_t n_samples = 0;  // all samples, including below/above the range
  std::size_t below = 0;
  std::size_t above = 0;

  [[nodiscard]] std::size_t bins() const noexcept { return counts.size(); }
  [[nodiscard]] double width(std::size_t bin) const { return edges.at(bin + 1) - edges.at(bin); }
  /// counts / (n_samples * width)
  [[nodiscard]] double density(std::size_t bin) const;
};

using WorkDistribution = std::variant<PointMass, AdiabaticExponential, FiniteTimeBessel,
                                      SuddenChi, DiscreteWorkDistribution, EmpiricalHistogram>;

[[nodiscard]] double mean(const WorkDistribution& dist);
[[nodiscard]] double variance(const WorkDistribution& dist);
[[nodiscard]] double stddev(const WorkDistribution& dist);

/// Probability mass in [a, b). Closed-form CDFs where available, adaptive
/// quadrature for the Bessel law.
[[nodiscard]] double probability_between(const WorkDistribution& dist, double a, double b);

/// Mass in each [edges[i], edges[i+1]).
[[nodiscard]] std::vector<double> bin_probabilities(const WorkDistribution& dist,
                                                    std::span<const double> edges);

// ---- closed forms ---------------------------------------------------------

/// Slow-adiabatic (equivalently fast-forward) law; PointMass at 0 if omega_f == omega0.
[[nodiscard]] WorkDistribution adiabatic_work_pdf(double beta, double omega0, double omega_f);

struct QuadraticFormCoeffs {
  double K = 0.0;
  double L = 0.0;
  double M = 0.0;

  [[nodiscard]] double trace() const noexcept { return K + L; }
  [[nodiscard]] double determinant() const noexcept { return K * L - M * M; }
  [[nodiscard]] bool positive_definite() const noexcept { return K > 0.0 && determinant() > 0.0; }
  /// W = (beta/2)(K p0^2 + L omega0^2 q0^2 + 2 M omega0 p0 q0), unit mass.
  [[nodiscard]] double work(PhasePoint initial, double omega0, double beta) const noexcept;
};

/// K = [S'^2 + wf^2 S^2 - 1]/beta,  L = [C'^2/w0^2 + wf^2 C^2/w0^2 - 1]/beta,
/// M = [C' S' + wf^2 C S]/(beta w0),  with the unit-mass solutions at tau.
[[nodiscard]] QuadraticFormCoeffs quadratic_form_coeffs(const FundamentalSolutions& fund,
                                                        double beta, double omega0,
                                                        double omega_f);

struct MuEigenvalues {
  double plus = 0.0;
  double minus = 0.0;
};

[[nodiscard]] MuEigenvalues mu_eigenvalues(const QuadraticFormCoeffs& coeffs) noexcept;

/// Throws UnsupportedBranch unless mu_plus >= mu_minus > 0.
[[nodiscard]] WorkDistribution finite_time_work_pdf(double mu_plus, double mu_minus);

/// Throws UnsupportedBranch unless omega_f > omega0.
[[nodiscard]] WorkDistribution sudden_work_pdf(double beta, double omega0, double omega_f);

// ---- samples ---------------------------------------------------------------

/// Mergeable central-moment accumulator (pairwise update formulas).
class MomentAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MomentAccumulator& other) noexcept;

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  /// Unbiased (n - 1) estimator.
  [[nodiscard]] double variance() const noexcept;
  [[nodiscard]] double stddev() const noexcept;
  [[nodiscard]] double raw_second_moment() const noexcept;
  [[nodiscard]] double skewness() const noexcept;
  [[nodiscard]] double excess_kurtosis() const noexcept;
  [[nodiscard]] double min() const noexcept { return min_; }
  [[nodiscard]] double max() const noexcept { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct HistogramSpec {
  std::size_t bins = 200;
  std::optional<double> lo;  // defaults to the sample minimum
  std::optional<double> hi;  // defaults to the sample maximum
};

/// Throws std::invalid_argument on empty input or an empty range.
[[nodiscard]] EmpiricalHistogram make_histogram(std::span<const double> samples,
                                                const HistogramSpec& spec = {});

struct WorkSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double min = 0.0;
  double max = 0.0;
  EmpiricalHistogram histogram;
};

/// Throws std::invalid_argument on empty input.
[[nodiscard]] WorkSummary summarize(std::span<const double> samples,
                                    const HistogramSpec& spec = {});

struct JarzynskiTrace {
  std::vector<double> running_mean;  // running_mean[k-1]: mean of exp(-beta W) over k samples
  double beta = 1.0;
  double target = 1.0;  // omega0 / omega_f
  double exp_work_stddev = 0.0;  // sample std of exp(-beta W) over all samples

  [[nodiscard]] std::size_t size() const noexcept { return running_mean.size(); }
  /// Smallest k such that every running mean from k samples on is within
  /// rel_tol of target; nullopt if the final value is not.
  [[nodiscard]] std::optional<std::size_t> settled_after(double rel_tol) const;
};

[[nodiscard]] JarzynskiTrace jarzynski_trace(std::span<const double> samples, double beta,
                                             double omega0, double omega_f);

/// exp(-beta * delta F) = Z(tau) / Z(0) = omega0 / omega_f for the classical oscillator.
[[nodiscard]] double classical_partition_ratio(double omega0, double omega_f) noexcept;

}  // namespace ffosc
