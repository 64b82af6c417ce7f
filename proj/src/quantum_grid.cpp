#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "ffosc/quantum.hpp"
#include "ffosc/simd/kernels.hpp"

namespace ffosc {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

double ground_width(double omega, const OscillatorParams& params) {
  return std::sqrt(params.hbar / (2.0 * params.mass * omega));
}

double turning_point(std::size_t n, double omega, const OscillatorParams& params) {
  return std::sqrt((2.0 * static_cast<double>(n) + 1.0) * params.hbar / (params.mass * omega));
}

double turning_wavenumber(std::size_t n, double omega, const OscillatorParams& params) {
  return std::sqrt((2.0 * static_cast<double>(n) + 1.0) * params.mass * omega / params.hbar);
}

}  // namespace

double SpatialGrid::k_nyquist() const noexcept { return std::numbers::pi / dx(); }

void validate(const SpatialGrid& grid) {
  if (!(grid.x_max > grid.x_min)) throw std::invalid_argument("grid: need x_max > x_min");
  if (grid.n_points < 16 || !std::has_single_bit(grid.n_points))
    throw std::invalid_argument("grid: n_points must be a power of two >= 16");
}

SpatialGrid symmetric_grid(double half_width, std::size_t n_points) {
  SpatialGrid g{-half_width, half_width, n_points};
  validate(g);
  return g;
}

Stencil centered_stencil(int order) {
  if (order < 2 || order > 16 || order % 2)
    throw std::invalid_argument("stencil order must be even and in [2, 16]");
  const int p = order / 2;
  Stencil s;
  s.half_width = p;
  s.first.assign(static_cast<std::size_t>(p + 1), 0.0);
  s.second.assign(static_cast<std::size_t>(p + 1), 0.0);
  const double pf2 = factorial(p) * factorial(p);
  double centre = 0.0;
  for (int k = 1; k <= p; ++k) {
    const double sign = (k % 2) ? 1.0 : -1.0;
    const double common = sign * pf2 / (factorial(p - k) * factorial(p + k));
    s.first[static_cast<std::size_t>(k)] = common / k;
    s.second[static_cast<std::size_t>(k)] = 2.0 * common / (static_cast<double>(k) * k);
    centre -= 2.0 * s.second[static_cast<std::size_t>(k)];
  }
  s.second[0] = centre;
  return s;
}

double stencil_error_constant(int order) {
  const int p = order / 2;
  const double pf2 = factorial(p) * factorial(p);
  const double d1 = pf2 / factorial(2 * p + 1);
  const double d2 = 2.0 * pf2 / factorial(2 * p + 2);
  return std::max(d1, d2);
}

SpatialGrid suggest_grid(const GridRequest& r, const OscillatorParams& params) {
  validate(params);
  if (!(r.omega_min > 0.0) || !(r.omega_max >= r.omega_min))
    throw std::invalid_argument("suggest_grid: need 0 < omega_min <= omega_max");
  const double half_width =
      turning_point(r.max_level, r.omega_min, params) + 12.0 * ground_width(r.omega_min, params);
  const double k_turn = turning_wavenumber(r.max_level, r.omega_max, params);
  const double k_spread = std::sqrt(params.mass * r.omega_max / (2.0 * params.hbar));
  const double dx_spectral = std::numbers::pi / (k_turn + 12.0 * k_spread);
  const double s = std::pow(r.symbol_tolerance / stencil_error_constant(r.fd_order),
                            1.0 / static_cast<double>(r.fd_order));
  const double dx_stencil = s / k_turn;
  const double dx = std::min(dx_spectral, dx_stencil);
  const auto needed = static_cast<std::size_t>(std::ceil(2.0 * half_width / dx));
  return symmetric_grid(half_width, std::bit_ceil(std::max(needed, r.min_points)));
}

SpatialGrid default_grid(const FrequencyProtocol& protocol, const OscillatorParams& params,
                         std::size_t max_level, int fd_order) {
  GridRequest r;
  r.max_level = max_level;
  r.omega_min = min_omega(protocol);
  r.omega_max = max_omega(protocol);
  r.fd_order = fd_order;
  return suggest_grid(r, params);
}

double WaveFunction::norm_squared() const noexcept {
  return simd::norm_squared(psi) * grid.dx();
}

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (a.psi.size() != b.psi.size()) throw std::invalid_argument("inner_product: grid mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) s += std::conj(a.psi[i]) * b.psi[i];
  return s * a.grid.dx();
}

std::span<const double> EigenBasis::level(std::size_t n) const {
  if (n >= n_levels) throw std::out_of_range("EigenBasis::level: index out of range");
  return {functions.data() + n * grid.n_points, grid.n_points};
}

double EigenBasis::orthonormality_error() const {
  const double dx = grid.dx();
  double worst = 0.0;
  for (std::size_t m = 0; m < n_levels; ++m) {
    const auto a = level(m);
    for (std::size_t n = m; n < n_levels; ++n) {
      const auto b = level(n);
      double s = 0.0;
      for (std::size_t i = 0; i < grid.n_points; ++i) s += a[i] * b[i];
      worst = std::max(worst, std::abs(s * dx - (m == n ? 1.0 : 0.0)));
    }
  }
  return worst;
}

EigenBasis eigen_basis(std::size_t n_levels, double omega, const OscillatorParams& params,
                       const SpatialGrid& grid, double check_tolerance) {
  validate(params);
  validate(grid);
  if (!(omega > 0.0)) throw std::invalid_argument("eigen_basis: omega must be positive");
  EigenBasis b;
  b.grid = grid;
  b.omega = omega;
  b.n_levels = n_levels;
  b.energies.resize(n_levels);
  for (std::size_t n = 0; n < n_levels; ++n)
    b.energies[n] = params.hbar * omega * (static_cast<double>(n) + 0.5);
  b.functions.assign(n_levels * grid.n_points, 0.0);

  const double scale = std::sqrt(params.mass * omega / params.hbar);
  const double log_norm0 = 0.25 * std::log(params.mass * omega / (std::numbers::pi * params.hbar));
  constexpr double kBig = 1e150;
  const double log_big = std::log(kBig);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double xi = grid.x(i) * scale;
    // psi_n = h_n * exp(log_s); h is rescaled whenever it grows large
    double log_s = log_norm0 - 0.5 * xi * xi;
    double prev = 0.0, cur = 1.0;
    for (std::size_t n = 0; n < n_levels; ++n) {
      b.functions[n * grid.n_points + i] = cur * std::exp(log_s);
      const double nn = static_cast<double>(n);
      const double next = std::sqrt(2.0 / (nn + 1.0)) * xi * cur - std::sqrt(nn / (nn + 1.0)) * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > kBig) {
        cur /= kBig;
        prev /= kBig;
        log_s += log_big;
      }
    }
  }
  const double dx = grid.dx();
  for (std::size_t n = 0; n < n_levels; ++n) {
    double s = 0.0;
    double* f = b.functions.data() + n * grid.n_points;
    for (std::size_t i = 0; i < grid.n_points; ++i) s += f[i] * f[i];
    const double inv = 1.0 / std::sqrt(s * dx);
    for (std::size_t i = 0; i < grid.n_points; ++i) f[i] *= inv;
  }
  if (check_tolerance >= 0.0) {
    const double err = b.orthonormality_error();
    if (!(err <= check_tolerance))
      throw GridAccuracyError("eigen_basis: orthonormality error " + std::to_string(err) +
                              " exceeds " + std::to_string(check_tolerance) + " for " +
                              std::to_string(n_levels) + " levels; enlarge the grid");
  }
  return b;
}

Eigenstate eigenstate(std::size_t n, double omega, const OscillatorParams& params,
                      const SpatialGrid& grid) {
  const EigenBasis b = eigen_basis(n + 1, omega, params, grid, -1.0);
  Eigenstate e;
  e.state.grid = grid;
  const auto f = b.level(n);
  e.state.psi.assign(f.begin(), f.end());
  e.energy = b.energies[n];
  return e;
}

cplx CounterdiabaticTerm::matrix_element(std::size_t m, std::size_t n, double hbar) const noexcept {
  const double nn = static_cast<double>(n);
  if (m == n + 2) return cplx(0.0, hbar * coefficient * std::sqrt((nn + 1.0) * (nn + 2.0)));
  if (n >= 2 && m == n - 2) return cplx(0.0, -hbar * coefficient * std::sqrt(nn * (nn - 1.0)));
  return 0.0;
}

CounterdiabaticTerm counterdiabatic_term(double omega, double omega_dot) {
  if (!(omega > 0.0)) throw std::invalid_argument("counterdiabatic_term: omega must be positive");
  return {-omega_dot / (4.0 * omega)};
}

GridHamiltonian::GridHamiltonian(const SpatialGrid& grid, const OscillatorParams& params,
                                 int fd_order)
    : grid_(grid), params_(params), p_(fd_order / 2), stencil_(centered_stencil(fd_order)) {
  validate(grid);
  validate(params);
  x_.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) x_[i] = grid.x(i);
  band_.assign(grid.n_points * static_cast<std::size_t>(2 * p_ + 1), 0.0);
}

void GridHamiltonian::set(double omega, double c) {
  const std::size_t n = grid_.n_points;
  const double dx = grid_.dx();
  const double kin = -params_.hbar * params_.hbar / (2.0 * params_.mass * dx * dx);
  const double pot = 0.5 * params_.mass * omega * omega;
  const double dil = -params_.hbar * c / dx;  // times i
  const auto width = static_cast<std::size_t>(2 * p_ + 1);
  for (std::size_t i = 0; i < n; ++i) {
    cplx* row = band_.data() + i * width;
    for (int k = 0; k <= 2 * p_; ++k) {
      const long j = static_cast<long>(i) + k - p_;
      if (j < 0 || j >= static_cast<long>(n)) {
        row[k] = 0.0;
        continue;
      }
      const int off = k - p_;
      const auto a = static_cast<std::size_t>(std::abs(off));
      double re = kin * stencil_.second[a];
      double im = 0.0;
      if (off == 0) {
        re += pot * x_[i] * x_[i];
      } else {
        const double d1 = (off > 0 ? 1.0 : -1.0) * stencil_.first[a];
        im = dil * d1 * (x_[i] + x_[static_cast<std::size_t>(j)]);
      }
      row[k] = cplx(re, im);
    }
  }
}

void GridHamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t n = grid_.n_points;
  if (in.size() != n || out.size() != n) throw std::invalid_argument("GridHamiltonian: size mismatch");
  const auto width = static_cast<std::size_t>(2 * p_ + 1);
  const auto p = static_cast<std::size_t>(p_);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx* row = band_.data() + i * width;
    const std::size_t k0 = i < p ? p - i : 0;
    const std::size_t k1 = std::min(width, n + p - i);
    cplx s = 0.0;
    for (std::size_t k = k0; k < k1; ++k) s += row[k] * in[i + k - p];
    out[i] = s;
  }
}

cplx GridHamiltonian::expectation(std::span<const cplx> psi) const {
  std::vector<cplx> h(psi.size());
  apply(psi, h);
  cplx s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += std::conj(psi[i]) * h[i];
  return s * grid_.dx();
}

std::span<cplx> StateBatch::state(std::size_t i) {
  if (i >= count) throw std::out_of_range("StateBatch::state");
  return {data.data() + i * grid.n_points, grid.n_points};
}

std::span<const cplx> StateBatch::state(std::size_t i) const {
  if (i >= count) throw std::out_of_range("StateBatch::state");
  return {data.data() + i * grid.n_points, grid.n_points};
}

double StateBatch::norm_squared(std::size_t i) const {
  return simd::norm_squared(state(i)) * grid.dx();
}

StateBatch batch_from_basis(const EigenBasis& basis) {
  StateBatch b;
  b.grid = basis.grid;
  b.count = basis.n_levels;
  b.data.resize(basis.functions.size());
  std::transform(basis.functions.begin(), basis.functions.end(), b.data.begin(),
                 [](double v) { return cplx(v, 0.0); });
  return b;
}

}  // namespace ffosc
