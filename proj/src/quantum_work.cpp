#include <algorithm>
#include <cmath>
#include <string>

#include "ffosc/quantum.hpp"
#include "ffosc/simd/kernels.hpp"

namespace ffosc {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

double thermal_ratio(double beta, double omega0, const OscillatorParams& params) {
  return std::exp(-beta * params.hbar * omega0);
}

}  // namespace

double TransitionMatrix::row_sum(std::size_t n) const {
  if (n >= n_max) throw std::out_of_range("TransitionMatrix::row_sum");
  double s = 0.0;
  for (std::size_t m = 0; m < m_max; ++m) s += P[n * m_max + m];
  return s;
}

double TransitionMatrix::min_row_sum() const {
  double lo = 1.0;
  for (std::size_t n = 0; n < n_max; ++n) lo = std::min(lo, row_sum(n));
  return lo;
}

TransitionMatrix project_populations(const StateBatch& states, const EigenBasis& basis) {
  if (states.grid.n_points != basis.grid.n_points)
    throw std::invalid_argument("project_populations: grid mismatch");
  TransitionMatrix t;
  t.n_max = states.count;
  t.m_max = basis.n_levels;
  t.P.resize(t.n_max * t.m_max);
  const double dx = basis.grid.dx();
  for (std::size_t n = 0; n < t.n_max; ++n) {
    const auto psi = states.state(n);
    for (std::size_t m = 0; m < t.m_max; ++m)
      t.P[n * t.m_max + m] = std::norm(simd::real_complex_dot(basis.level(m), psi) * dx);
  }
  return t;
}

TransitionResult transition_matrix(const FrequencyProtocol& protocol,
                                   const OscillatorParams& params, DriveMode mode,
                                   const TransitionConfig& config) {
  validate(protocol);
  validate(params);
  if (config.n_max == 0 || config.m_max == 0)
    throw std::invalid_argument("transition_matrix: n_max and m_max must be positive");
  const std::size_t top = std::max(config.n_max, config.m_max) - 1;
  TransitionResult r;
  r.grid = config.grid ? *config.grid
                       : default_grid(protocol, params, top, config.propagation.fd_order);
  const EigenBasis initial = eigen_basis(config.n_max, initial_omega(protocol), params, r.grid);
  const EigenBasis final = eigen_basis(config.m_max, final_omega(protocol), params, r.grid);
  StateBatch batch = batch_from_basis(initial);
  r.report = propagate(batch, protocol, params, mode, config.propagation, top);
  r.matrix = project_populations(batch, final);
  if (config.keep_final_states) r.final_states = std::move(batch);
  for (std::size_t n = 0; n < r.matrix.n_max; ++n) {
    const double s = r.matrix.row_sum(n);
    if (s < config.min_row_sum)
      throw TruncationError("transition_matrix: row " + std::to_string(n) + " sums to " +
                            std::to_string(s) + " < " + std::to_string(config.min_row_sum) +
                            "; increase m_max beyond " + std::to_string(config.m_max));
  }
  return r;
}

std::size_t thermal_levels(double beta, double omega0, const OscillatorParams& params,
                           double tail) {
  require_positive(beta, "beta");
  require_positive(omega0, "omega0");
  if (!(tail > 0.0 && tail < 1.0)) throw std::invalid_argument("thermal_levels: tail in (0, 1)");
  const double x = beta * params.hbar * omega0;
  // exp(-x n) < tail
  return static_cast<std::size_t>(std::floor(-std::log(tail) / x)) + 1;
}

double thermal_captured_weight(double beta, double omega0, const OscillatorParams& params,
                               std::size_t n_max) {
  return -std::expm1(-beta * params.hbar * omega0 * static_cast<double>(n_max));
}

double partition_function(double beta, double omega, const OscillatorParams& params) {
  const double x = beta * params.hbar * omega;
  return std::exp(-0.5 * x) / -std::expm1(-x);
}

DiscreteWorkDistribution quantum_work_distribution(double beta, const FrequencyProtocol& protocol,
                                                   const TransitionMatrix& transition,
                                                   const OscillatorParams& params) {
  require_positive(beta, "beta");
  validate(protocol);
  const double w0 = initial_omega(protocol), wf = final_omega(protocol);
  const double r = thermal_ratio(beta, w0, params);
  std::vector<WorkAtom> atoms;
  atoms.reserve(transition.n_max * transition.m_max);
  double pn = -std::expm1(-beta * params.hbar * w0);
  for (std::size_t n = 0; n < transition.n_max; ++n, pn *= r) {
    const double e0 = params.hbar * w0 * (static_cast<double>(n) + 0.5);
    for (std::size_t m = 0; m < transition.m_max; ++m) {
      const double ef = params.hbar * wf * (static_cast<double>(m) + 0.5);
      atoms.push_back({ef - e0, pn * transition(n, m)});
    }
  }
  return make_discrete(std::move(atoms));
}

DiscreteWorkDistribution quantum_adiabatic_work_distribution(double beta, double omega0,
                                                             double omega_f,
                                                             const OscillatorParams& params,
                                                             std::size_t n_max) {
  require_positive(beta, "beta");
  require_positive(omega0, "omega0");
  require_positive(omega_f, "omega_f");
  const double r = thermal_ratio(beta, omega0, params);
  std::vector<WorkAtom> atoms;
  atoms.reserve(n_max);
  double pn = -std::expm1(-beta * params.hbar * omega0);
  for (std::size_t n = 0; n < n_max; ++n, pn *= r)
    atoms.push_back({params.hbar * (omega_f - omega0) * (static_cast<double>(n) + 0.5), pn});
  return make_discrete(std::move(atoms));
}

PerStateWork per_state_mean_work(const TransitionMatrix& transition, double beta,
                                 const FrequencyProtocol& protocol,
                                 const OscillatorParams& params) {
  require_positive(beta, "beta");
  const double w0 = initial_omega(protocol), wf = final_omega(protocol);
  const double r = thermal_ratio(beta, w0, params);
  PerStateWork out;
  out.mean_work.resize(transition.n_max);
  std::vector<WorkAtom> atoms;
  double pn = -std::expm1(-beta * params.hbar * w0);
  for (std::size_t n = 0; n < transition.n_max; ++n, pn *= r) {
    double e = 0.0;
    for (std::size_t m = 0; m < transition.m_max; ++m)
      e += transition(n, m) * params.hbar * wf * (static_cast<double>(m) + 0.5);
    out.mean_work[n] = e - params.hbar * w0 * (static_cast<double>(n) + 0.5);
    atoms.push_back({out.mean_work[n], pn});
  }
  out.distribution = make_discrete(std::move(atoms));
  return out;
}

}  // namespace ffosc
