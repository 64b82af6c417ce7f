// Scalar reference kernels. The AVX2 variants must reproduce these to
// rounding (see tests/unit/test_simd.cpp).

#include "ffosc/simd/kernels.hpp"

namespace ffosc::simd {

namespace {

void rk4_linear_scalar(double* p, double* q, std::size_t n, const Rk4Step* steps,
                       std::size_t n_steps) {
  for (std::size_t i = 0; i < n; ++i) {
    double x = p[i];
    double y = q[i];
    for (std::size_t s = 0; s < n_steps; ++s) {
      const Rk4Step& st = steps[s];
      const double h = st.h;
      const double hh = 0.5 * h;

      const double k1p = st.start.pp * x + st.start.pq * y;
      const double k1q = st.start.qp * x + st.start.qq * y;
      const double x2 = x + hh * k1p;
      const double y2 = y + hh * k1q;

      const double k2p = st.mid.pp * x2 + st.mid.pq * y2;
      const double k2q = st.mid.qp * x2 + st.mid.qq * y2;
      const double x3 = x + hh * k2p;
      const double y3 = y + hh * k2q;

      const double k3p = st.mid.pp * x3 + st.mid.pq * y3;
      const double k3q = st.mid.qp * x3 + st.mid.qq * y3;
      const double x4 = x + h * k3p;
      const double y4 = y + h * k3q;

      const double k4p = st.end.pp * x4 + st.end.pq * y4;
      const double k4q = st.end.qp * x4 + st.end.qq * y4;

      const double h6 = h / 6.0;
      x = x + h6 * ((k1p + k4p) + 2.0 * (k2p + k3p));
      y = y + h6 * ((k1q + k4q) + 2.0 * (k2q + k3q));
    }
    p[i] = x;
    q[i] = y;
  }
}

void apply_step_matrices_scalar(double* p, double* q, std::size_t n, const StepMatrix* steps,
                                std::size_t n_steps) {
  for (std::size_t i = 0; i < n; ++i) {
    double x = p[i];
    double y = q[i];
    for (std::size_t s = 0; s < n_steps; ++s) {
      const StepMatrix& m = steps[s];
      const double xn = m.pp * x + m.pq * y;
      const double yn = m.qp * x + m.qq * y;
      x = xn;
      y = yn;
    }
    p[i] = x;
    q[i] = y;
  }
}

void oscillator_work_scalar(const double* p0, const double* q0, const double* p1,
                            const double* q1, double* w, std::size_t n, double inv_2m, double k0,
                            double k1) {
  for (std::size_t i = 0; i < n; ++i) {
    const double kinetic = (p1[i] * p1[i] - p0[i] * p0[i]) * inv_2m;
    const double potential = k1 * (q1[i] * q1[i]) - k0 * (q0[i] * q0[i]);
    w[i] = kinetic + potential;
  }
}

void complex_multiply_scalar(std::complex<double>* psi, const std::complex<double>* phase,
                             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = psi[i].real(), ai = psi[i].imag();
    const double br = phase[i].real(), bi = phase[i].imag();
    psi[i] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

std::complex<double> real_complex_dot_scalar(const double* a, const std::complex<double>* b,
                                             std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i] * b[i].real();
    im += a[i] * b[i].imag();
  }
  return {re, im};
}

double norm_squared_scalar(const std::complex<double>* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Backend::Scalar,         rk4_linear_scalar,
                                 apply_step_matrices_scalar, oscillator_work_scalar,
                                 complex_multiply_scalar, real_complex_dot_scalar,
                                 norm_squared_scalar};
  return table;
}

}  // namespace ffosc::simd
