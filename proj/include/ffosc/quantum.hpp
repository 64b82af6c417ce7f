#pragma once

// Grid quantum mechanics of the driven oscillator: Hermite eigenbases,
// finite-difference Hamiltonians with the counterdiabatic dilation term,
// unitary time propagation, transition matrices and two-time-measurement work
// statistics.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ffosc/classical.hpp"
#include "ffosc/work_stats.hpp"

namespace ffosc {

using cplx = std::complex<double>;

class GridAccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cell-centred uniform grid x_i = x_min + (i + 1/2) dx, i < n_points. A grid
/// symmetric about 0 maps onto itself under x -> -x, so parity is exact.
struct SpatialGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_points = 256;

  [[nodiscard]] double dx() const noexcept {
    return (x_max - x_min) / static_cast<double>(n_points);
  }
  [[nodiscard]] double x(std::size_t i) const noexcept {
    return x_min + (static_cast<double>(i) + 0.5) * dx();
  }
  /// Largest wavenumber representable, pi / dx.
  [[nodiscard]] double k_nyquist() const noexcept;
};

void validate(const SpatialGrid& grid);

[[nodiscard]] SpatialGrid symmetric_grid(double half_width, std::size_t n_points);

/// Centred finite-difference weights w_k, k = 1..p, of accuracy order 2p:
///   f'(x)  ~ sum_k w1_k (f(x+kh) - f(x-kh)) / h
///   f''(x) ~ (w2_0 f(x) + sum_k w2_k (f(x+kh) + f(x-kh))) / h^2
struct Stencil {
  int half_width = 6;  // p
  std::vector<double> first;   // size p + 1, first[0] unused (0)
  std::vector<double> second;  // size p + 1
};

/// order must be even, 2..16.
[[nodiscard]] Stencil centered_stencil(int order);

/// Leading relative symbol error of the stencil at k*dx = 1, worst of the two
/// derivatives; the error at k*dx = s is this value times s^order.
[[nodiscard]] double stencil_error_constant(int order);

struct GridRequest {
  std::size_t max_level = 20;  // highest eigenstate index that must be represented
  double omega_min = 10.0;
  double omega_max = 10.0;
  int fd_order = 12;
  double symbol_tolerance = 1e-8;  // stencil error allowed at the top turning wavenumber
  std::size_t min_points = 256;
};

/// Smallest power-of-two grid that holds state max_level at omega_min (turning
/// point plus 12 ground-state widths) and resolves it at omega_max, both for the
/// spectral propagator (Nyquist with margin) and for the stencil.
[[nodiscard]] SpatialGrid suggest_grid(const GridRequest& request, const OscillatorParams& params);

/// suggest_grid for a protocol, covering levels up to max_level at every frequency reached.
[[nodiscard]] SpatialGrid default_grid(const FrequencyProtocol& protocol,
                                       const OscillatorParams& params, std::size_t max_level,
                                       int fd_order = 12);

struct WaveFunction {
  SpatialGrid grid;
  std::vector<cplx> psi;

  /// sum |psi|^2 dx
  [[nodiscard]] double norm_squared() const noexcept;
};

[[nodiscard]] cplx inner_product(const WaveFunction& a, const WaveFunction& b);

/// First n_levels Hermite functions at frequency omega, sampled on the grid and
/// normalised there. functions is row-major (level, point).
struct EigenBasis {
  SpatialGrid grid;
  double omega = 1.0;
  std::size_t n_levels = 0;
  std::vector<double> energies;
  std::vector<double> functions;

  [[nodiscard]] std::span<const double> level(std::size_t n) const;
  /// max |<m|n> - delta_mn| over the basis.
  [[nodiscard]] double orthonormality_error() const;
};

/// Throws GridAccuracyError if orthonormality fails to check_tolerance
/// (pass a negative tolerance to skip the check).
[[nodiscard]] EigenBasis eigen_basis(std::size_t n_levels, double omega,
                                     const OscillatorParams& params, const SpatialGrid& grid,
                                     double check_tolerance = 1e-8);

struct Eigenstate {
  WaveFunction state;
  double energy = 0.0;
};

[[nodiscard]] Eigenstate eigenstate(std::size_t n, double omega, const OscillatorParams& params,
                                    const SpatialGrid& grid);

/// Counterdiabatic term c(t) (q p + p q) with c = -omega_dot / (4 omega).
struct CounterdiabaticTerm {
  double coefficient = 0.0;

  /// <m| c (qp + pq) |n> in the Hermite basis at frequency omega:
  /// i hbar c (sqrt((n+1)(n+2)) delta_{m,n+2} - sqrt(n(n-1)) delta_{m,n-2}).
  [[nodiscard]] cplx matrix_element(std::size_t m, std::size_t n, double hbar) const noexcept;
};

[[nodiscard]] CounterdiabaticTerm counterdiabatic_term(double omega, double omega_dot);

/// Banded finite-difference Hamiltonian
///   H = -hbar^2/(2m) D2 + m omega^2 x^2 / 2 - i hbar c (X D + D X),
/// Hermitian by construction (D antisymmetric, D2 symmetric, Dirichlet ends).
class GridHamiltonian {
 public:
  GridHamiltonian(const SpatialGrid& grid, const OscillatorParams& params, int fd_order);

  /// Rebuilds the band for the given frequency and dilation coefficient c.
  void set(double omega, double dilation_coefficient);

  [[nodiscard]] int half_bandwidth() const noexcept { return p_; }
  [[nodiscard]] const SpatialGrid& grid() const noexcept { return grid_; }
  /// band(i, k) = H(i, i + k - p)
  [[nodiscard]] cplx band(std::size_t i, int k) const noexcept {
    return band_[i * static_cast<std::size_t>(2 * p_ + 1) + static_cast<std::size_t>(k)];
  }

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  [[nodiscard]] cplx expectation(std::span<const cplx> psi) const;

 private:
  SpatialGrid grid_;
  OscillatorParams params_;
  int p_;
  Stencil stencil_;
  std::vector<double> x_;
  std::vector<cplx> band_;
};

/// Several wave functions on one grid, stored state after state.
struct StateBatch {
  SpatialGrid grid;
  std::size_t count = 0;
  std::vector<cplx> data;

  [[nodiscard]] std::span<cplx> state(std::size_t i);
  [[nodiscard]] std::span<const cplx> state(std::size_t i) const;
  [[nodiscard]] double norm_squared(std::size_t i) const;
};

[[nodiscard]] StateBatch batch_from_basis(const EigenBasis& basis);

enum class QuantumScheme {
  CrankNicolson,  // Cayley step with H at the step midpoint; any mode
  SplitOperator,  // Strang splitting with FFT kinetic step; Bare mode only
};

struct PropagationConfig {
  QuantumScheme scheme = QuantumScheme::CrankNicolson;
  std::size_t steps = 0;  // 0: chosen so that delta_E_max * dt / hbar <= phase_per_step
  double phase_per_step = 0.05;
  /// Symmetric composition order: 2 (plain step), 4 or 6 (triple-jump compositions).
  int order = 4;
  int fd_order = 12;
  double norm_tolerance = 1e-6;  // larger norm drift raises InstabilityError
};

struct PropagationReport {
  std::size_t steps = 0;
  double max_norm_drift = 0.0;
};

/// Step count for a batch whose highest populated level is top_level.
[[nodiscard]] std::size_t auto_steps(const FrequencyProtocol& protocol,
                                     const OscillatorParams& params, DriveMode mode,
                                     std::size_t top_level, double phase_per_step);

/// Propagates every state of the batch from 0 to tau in place.
PropagationReport propagate(StateBatch& batch, const FrequencyProtocol& protocol,
                            const OscillatorParams& params, DriveMode mode,
                            const PropagationConfig& config, std::size_t top_level);

[[nodiscard]] WaveFunction propagate(const WaveFunction& psi0, const FrequencyProtocol& protocol,
                                     const OscillatorParams& params, DriveMode mode,
                                     const PropagationConfig& config, std::size_t top_level);

/// Probabilities P[n][m] = |<m(tau)|psi_n(tau)>|^2.
struct TransitionMatrix {
  std::size_t n_max = 0;
  std::size_t m_max = 0;
  std::vector<double> P;  // row-major, n_max x m_max

  [[nodiscard]] double operator()(std::size_t n, std::size_t m) const { return P.at(n * m_max + m); }
  [[nodiscard]] double row_sum(std::size_t n) const;
  [[nodiscard]] double min_row_sum() const;
};

struct TransitionConfig {
  std::size_t n_max = 8;
  std::size_t m_max = 20;
  std::optional<SpatialGrid> grid;  // default_grid() if empty
  PropagationConfig propagation;
  double min_row_sum = 0.999;  // smaller row sums raise TruncationError
  bool keep_final_states = false;
};

struct TransitionResult {
  TransitionMatrix matrix;
  SpatialGrid grid;
  PropagationReport report;
  std::optional<StateBatch> final_states;
};

[[nodiscard]] TransitionResult transition_matrix(const FrequencyProtocol& protocol,
                                                 const OscillatorParams& params, DriveMode mode,
                                                 const TransitionConfig& config);

/// Projects each state of the batch onto the basis.
[[nodiscard]] TransitionMatrix project_populations(const StateBatch& states,
                                                   const EigenBasis& basis);

/// Level count n_max with Gibbs tail weight exp(-beta hbar omega0 n_max) < tail.
[[nodiscard]] std::size_t thermal_levels(double beta, double omega0, const OscillatorParams& params,
                                         double tail = 1e-6);

/// Gibbs weight captured by levels below n_max.
[[nodiscard]] double thermal_captured_weight(double beta, double omega0,
                                             const OscillatorParams& params, std::size_t n_max);

/// Z = exp(-beta hbar omega / 2) / (1 - exp(-beta hbar omega))
[[nodiscard]] double partition_function(double beta, double omega, const OscillatorParams& params);

/// Atoms at hbar omega_f (m + 1/2) - hbar omega0 (n + 1/2) with weight P_n P[n][m].
[[nodiscard]] DiscreteWorkDistribution quantum_work_distribution(double beta,
                                                                 const FrequencyProtocol& protocol,
                                                                 const TransitionMatrix& transition,
                                                                 const OscillatorParams& params);

/// Geometric law: atoms hbar (omega_f - omega0)(n + 1/2), weights (1 - r) r^n, r = exp(-beta hbar omega0).
[[nodiscard]] DiscreteWorkDistribution quantum_adiabatic_work_distribution(
    double beta, double omega0, double omega_f, const OscillatorParams& params, std::size_t n_max);

struct PerStateWork {
  std::vector<double> mean_work;  // <W>_n
  DiscreteWorkDistribution distribution;  // atoms at <W>_n with weight P_n
};

[[nodiscard]] PerStateWork per_state_mean_work(const TransitionMatrix& transition, double beta,
                                               const FrequencyProtocol& protocol,
                                               const OscillatorParams& params);

}  // namespace ffosc
