#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2 version; the active table is picked at runtime from CPU
// features and can be overridden for equivalence testing.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace ffosc::simd {

enum class Backend { Scalar, Avx2 };

/// Coefficients of the linear phase-space flow (dp/dt, dq/dt) = A (p, q).
struct LinearCoeffs {
  double pp = 0.0, pq = 0.0, qp = 0.0, qq = 0.0;
};

/// One classical RK4 step of the linear flow; A is sampled at the step start,
/// midpoint and end. The table is shared by every trajectory of an ensemble.
struct Rk4Step {
  double h = 0.0;
  LinearCoeffs start, mid, end;
};

/// Precomputed one-step propagator (p, q) <- M (p, q).
struct StepMatrix {
  double pp = 1.0, pq = 0.0, qp = 0.0, qq = 1.0;
};

struct KernelTable {
  Backend backend;
  void (*rk4_linear)(double* p, double* q, std::size_t n, const Rk4Step* steps,
                     std::size_t n_steps);
  void (*apply_step_matrices)(double* p, double* q, std::size_t n, const StepMatrix* steps,
                              std::size_t n_steps);
  /// w[i] = (p1^2 - p0^2) * inv_2m + k1 * q1^2 - k0 * q0^2, with k = m omega^2 / 2.
  void (*oscillator_work)(const double* p0, const double* q0, const double* p1,
                          const double* q1, double* w, std::size_t n, double inv_2m, double k0,
                          double k1);
  /// psi[i] *= phase[i]
  void (*complex_multiply)(std::complex<double>* psi, const std::complex<double>* phase,
                           std::size_t n);
  /// sum_i a[i] * b[i] for real a.
  std::complex<double> (*real_complex_dot)(const double* a, const std::complex<double>* b,
                                           std::size_t n);
  /// sum_i |a[i]|^2
  double (*norm_squared)(const std::complex<double>* a, std::size_t n);
};

[[nodiscard]] const KernelTable& scalar_kernels() noexcept;
#if defined(FFOSC_HAVE_AVX2)
[[nodiscard]] const KernelTable& avx2_kernels() noexcept;
#endif

[[nodiscard]] bool backend_available(Backend backend) noexcept;
[[nodiscard]] const KernelTable& kernels_for(Backend backend);
/// Active table: AVX2 when compiled in and supported by the CPU, unless the
/// environment variable FFOSC_SIMD=scalar or set_backend() says otherwise.
[[nodiscard]] const KernelTable& kernels() noexcept;
[[nodiscard]] Backend active_backend() noexcept;
void set_backend(Backend backend);
[[nodiscard]] std::string_view backend_name(Backend backend) noexcept;

// Span front-ends over the active table.

inline void rk4_linear(std::span<double> p, std::span<double> q, std::span<const Rk4Step> steps) {
  kernels().rk4_linear(p.data(), q.data(), p.size(), steps.data(), steps.size());
}

inline void apply_step_matrices(std::span<double> p, std::span<double> q,
                                std::span<const StepMatrix> steps) {
  kernels().apply_step_matrices(p.data(), q.data(), p.size(), steps.data(), steps.size());
}

inline void complex_multiply(std::span<std::complex<double>> psi,
                             std::span<const std::complex<double>> phase) {
  kernels().complex_multiply(psi.data(), phase.data(), psi.size());
}

inline std::complex<double> real_complex_dot(std::span<const double> a,
                                             std::span<const std::complex<double>> b) {
  return kernels().real_complex_dot(a.data(), b.data(), a.size());
}

inline double norm_squared(std::span<const std::complex<double>> a) {
  return kernels().norm_squared(a.data(), a.size());
}

}  // namespace ffosc::simd
