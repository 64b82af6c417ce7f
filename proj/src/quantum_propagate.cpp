#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <fftw3.h>
#include <lapacke.h>

#include "ffosc/quantum.hpp"
#include "ffosc/simd/kernels.hpp"

namespace ffosc {

namespace {

std::vector<double> composition_weights(int order) {
  switch (order) {
    case 2: return {1.0};
    case 4: {
      const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
      return {g1, 1.0 - 2.0 * g1, g1};
    }
    case 6: {
      const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
      const double g0 = 1.0 - 2.0 * g1;
      const double w1 = 1.0 / (2.0 - std::pow(2.0, 0.2));
      const double w0 = 1.0 - 2.0 * w1;
      std::vector<double> out;
      for (const double w : {w1, w0, w1})
        for (const double g : {g1, g0, g1}) out.push_back(w * g);
      return out;
    }
    default: throw std::invalid_argument("composition order must be 2, 4 or 6");
  }
}

double dilation_coefficient(const FrequencyProtocol& protocol, double t, DriveMode mode) {
  if (mode == DriveMode::Bare) return 0.0;
  return counterdiabatic_term(omega_at(protocol, t), omega_dot_at(protocol, t)).coefficient;
}

/// Cayley steps (I + i h H/2hbar) psi' = (I - i h H/2hbar) psi with a banded LU.
class CrankNicolsonStepper {
 public:
  CrankNicolsonStepper(const SpatialGrid& grid, const OscillatorParams& params, int fd_order)
      : h_(grid, params, fd_order),
        hbar_(params.hbar),
        n_(grid.n_points),
        p_(h_.half_bandwidth()),
        ldab_(3 * p_ + 1),
        ab_(static_cast<std::size_t>(ldab_) * n_),
        ipiv_(n_),
        tmp_(n_) {}

  void step(StateBatch& batch, double omega, double c, double h) {
    h_.set(omega, c);
    const cplx alpha(0.0, 0.5 * h / hbar_);  // i h / 2 hbar
    std::fill(ab_.begin(), ab_.end(), cplx(0.0));
    const int kl = p_, ku = p_;
    for (std::size_t i = 0; i < n_; ++i) {
      for (int k = 0; k <= 2 * p_; ++k) {
        const long j = static_cast<long>(i) + k - p_;
        if (j < 0 || j >= static_cast<long>(n_)) continue;
        cplx a = alpha * h_.band(i, k);
        if (k == p_) a += 1.0;
        ab_[static_cast<std::size_t>(kl + ku + static_cast<long>(i) - j) +
            static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_)] = a;
      }
    }
    const auto n = static_cast<lapack_int>(n_);
    lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab_.data(), ldab_, ipiv_.data());
    if (info != 0) throw InstabilityError("Crank-Nicolson: singular step matrix (zgbtrf info " +
                                          std::to_string(info) + ")");
    for (std::size_t s = 0; s < batch.count; ++s) {
      auto psi = batch.state(s);
      h_.apply(psi, tmp_);
      for (std::size_t i = 0; i < n_; ++i) psi[i] -= alpha * tmp_[i];
    }
    info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, static_cast<lapack_int>(batch.count),
                          ab_.data(), ldab_, ipiv_.data(), batch.data.data(), n);
    if (info != 0) throw InstabilityError("Crank-Nicolson: zgbtrs failed");
  }

 private:
  GridHamiltonian h_;
  double hbar_;
  std::size_t n_;
  int p_;
  int ldab_;
  std::vector<cplx> ab_;
  std::vector<lapack_int> ipiv_;
  std::vector<cplx> tmp_;
};

/// Strang step exp(-iV h/2) exp(-iT h) exp(-iV h/2), FFT kinetic factor.
class SplitOperatorStepper {
 public:
  SplitOperatorStepper(StateBatch& batch, const OscillatorParams& params)
      : params_(params), n_(batch.grid.n_points), vphase_(n_), kphase_(n_), k2_(n_), x2_(n_) {
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n_) * batch.grid.dx());
    for (std::size_t j = 0; j < n_; ++j) {
      const double idx = j < n_ / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n_);
      k2_[j] = (idx * dk) * (idx * dk);
      x2_[j] = batch.grid.x(j) * batch.grid.x(j);
    }
    int len = static_cast<int>(n_);
    auto* data = reinterpret_cast<fftw_complex*>(batch.data.data());
    const int howmany = static_cast<int>(batch.count);
    forward_ = fftw_plan_many_dft(1, &len, howmany, data, nullptr, 1, len, data, nullptr, 1, len,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_many_dft(1, &len, howmany, data, nullptr, 1, len, data, nullptr, 1, len,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw std::runtime_error("split operator: FFTW planning failed");
  }
  SplitOperatorStepper(const SplitOperatorStepper&) = delete;
  SplitOperatorStepper& operator=(const SplitOperatorStepper&) = delete;
  ~SplitOperatorStepper() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void step(StateBatch& batch, double omega, double h) {
    const double hb = params_.hbar;
    const double v = 0.5 * params_.mass * omega * omega;
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      vphase_[j] = std::polar(1.0, -0.5 * h * v * x2_[j] / hb);
      kphase_[j] = std::polar(inv_n, -h * hb * k2_[j] / (2.0 * params_.mass));
    }
    for (std::size_t s = 0; s < batch.count; ++s) simd::complex_multiply(batch.state(s), vphase_);
    fftw_execute(forward_);
    for (std::size_t s = 0; s < batch.count; ++s) simd::complex_multiply(batch.state(s), kphase_);
    fftw_execute(backward_);
    for (std::size_t s = 0; s < batch.count; ++s) simd::complex_multiply(batch.state(s), vphase_);
  }

 private:
  OscillatorParams params_;
  std::size_t n_;
  std::vector<cplx> vphase_, kphase_;
  std::vector<double> k2_, x2_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

std::size_t auto_steps(const FrequencyProtocol& protocol, const OscillatorParams& params,
                       DriveMode mode, std::size_t top_level, double phase_per_step) {
  validate(protocol);
  validate(params);
  if (!(phase_per_step > 0.0)) throw std::invalid_argument("phase_per_step must be positive");
  const double level = static_cast<double>(top_level);
  double e_max = params.hbar * max_omega(protocol) * (level + 0.5);
  if (mode == DriveMode::FastForward) {
    double c_max = 0.0;
    constexpr int kSamples = 1024;
    for (int s = 0; s <= kSamples; ++s) {
      const double t = protocol.tau * s / kSamples;
      c_max = std::max(c_max, std::abs(dilation_coefficient(protocol, t, mode)));
    }
    // |<n+2|c(qp+pq)|n>| <= hbar c (n + 2); two such couplings per row
    e_max += 2.0 * params.hbar * c_max * (level + 2.0);
  }
  const double dt = phase_per_step * params.hbar / e_max;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(protocol.tau / dt)));
}

PropagationReport propagate(StateBatch& batch, const FrequencyProtocol& protocol,
                            const OscillatorParams& params, DriveMode mode,
                            const PropagationConfig& config, std::size_t top_level) {
  validate(protocol);
  validate(params);
  validate(batch.grid);
  if (batch.data.size() != batch.count * batch.grid.n_points)
    throw std::invalid_argument("propagate: batch storage does not match grid");
  if (config.scheme == QuantumScheme::SplitOperator && mode != DriveMode::Bare)
    throw std::invalid_argument(
        "split-operator propagation covers Bare mode only; the dilation term is diagonal in "
        "neither representation");
  std::vector<double> norms0(batch.count);
  for (std::size_t s = 0; s < batch.count; ++s) norms0[s] = batch.norm_squared(s);

  const std::size_t steps =
      config.steps ? config.steps : auto_steps(protocol, params, mode, top_level, config.phase_per_step);
  const std::vector<double> weights = composition_weights(config.order);
  const double dt = protocol.tau / static_cast<double>(steps);

  auto run = [&](auto&& substep) {
    for (std::size_t k = 0; k < steps; ++k) {
      double t = static_cast<double>(k) * dt;
      for (const double w : weights) {
        const double h = w * dt;
        substep(t + 0.5 * h, h);
        t += h;
      }
    }
  };
  if (config.scheme == QuantumScheme::CrankNicolson) {
    CrankNicolsonStepper cn(batch.grid, params, config.fd_order);
    run([&](double tm, double h) {
      cn.step(batch, omega_at(protocol, tm), dilation_coefficient(protocol, tm, mode), h);
    });
  } else {
    SplitOperatorStepper so(batch, params);
    run([&](double tm, double h) { so.step(batch, omega_at(protocol, tm), h); });
  }

  PropagationReport report;
  report.steps = steps;
  for (std::size_t s = 0; s < batch.count; ++s) {
    const double drift = std::abs(batch.norm_squared(s) - norms0[s]);
    if (!std::isfinite(drift))
      throw InstabilityError("propagate: non-finite amplitudes in state " + std::to_string(s));
    report.max_norm_drift = std::max(report.max_norm_drift, drift);
  }
  if (report.max_norm_drift > config.norm_tolerance)
    throw InstabilityError("propagate: norm drift " + std::to_string(report.max_norm_drift) +
                           " exceeds tolerance " + std::to_string(config.norm_tolerance));
  return report;
}

WaveFunction propagate(const WaveFunction& psi0, const FrequencyProtocol& protocol,
                       const OscillatorParams& params, DriveMode mode,
                       const PropagationConfig& config, std::size_t top_level) {
  StateBatch batch;
  batch.grid = psi0.grid;
  batch.count = 1;
  batch.data = psi0.psi;
  propagate(batch, protocol, params, mode, config, top_level);
  return {batch.grid, std::move(batch.data)};
}

}  // namespace ffosc
