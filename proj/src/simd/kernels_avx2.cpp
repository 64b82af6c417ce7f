// AVX2 kernels. Compiled with -mavx2 -mfma -ffp-contract=off; the element-wise
// kernels perform the same operations in the same order as the scalar
// versions, so they agree bit for bit. Reductions differ only by summation order.

#include <immintrin.h>

#include "ffosc/simd/kernels.hpp"

namespace ffosc::simd {

namespace {

struct Lane4 {
  __m256d x, y;
};

inline __m256d bcast(double v) { return _mm256_set1_pd(v); }

inline void rk4_step(Lane4& s, const Rk4Step& st) {
  const __m256d h = bcast(st.h);
  const __m256d hh = bcast(0.5 * st.h);
  const __m256d h6 = bcast(st.h / 6.0);
  const __m256d two = bcast(2.0);

  const __m256d a0pp = bcast(st.start.pp), a0pq = bcast(st.start.pq);
  const __m256d a0qp = bcast(st.start.qp), a0qq = bcast(st.start.qq);
  const __m256d ampp = bcast(st.mid.pp), ampq = bcast(st.mid.pq);
  const __m256d amqp = bcast(st.mid.qp), amqq = bcast(st.mid.qq);
  const __m256d a1pp = bcast(st.end.pp), a1pq = bcast(st.end.pq);
  const __m256d a1qp = bcast(st.end.qp), a1qq = bcast(st.end.qq);

  const __m256d k1p = _mm256_add_pd(_mm256_mul_pd(a0pp, s.x), _mm256_mul_pd(a0pq, s.y));
  const __m256d k1q = _mm256_add_pd(_mm256_mul_pd(a0qp, s.x), _mm256_mul_pd(a0qq, s.y));
  const __m256d x2 = _mm256_add_pd(s.x, _mm256_mul_pd(hh, k1p));
  const __m256d y2 = _mm256_add_pd(s.y, _mm256_mul_pd(hh, k1q));

  const __m256d k2p = _mm256_add_pd(_mm256_mul_pd(ampp, x2), _mm256_mul_pd(ampq, y2));
  const __m256d k2q = _mm256_add_pd(_mm256_mul_pd(amqp, x2), _mm256_mul_pd(amqq, y2));
  const __m256d x3 = _mm256_add_pd(s.x, _mm256_mul_pd(hh, k2p));
  const __m256d y3 = _mm256_add_pd(s.y, _mm256_mul_pd(hh, k2q));

  const __m256d k3p = _mm256_add_pd(_mm256_mul_pd(ampp, x3), _mm256_mul_pd(ampq, y3));
  const __m256d k3q = _mm256_add_pd(_mm256_mul_pd(amqp, x3), _mm256_mul_pd(amqq, y3));
  const __m256d x4 = _mm256_add_pd(s.x, _mm256_mul_pd(h, k3p));
  const __m256d y4 = _mm256_add_pd(s.y, _mm256_mul_pd(h, k3q));

  const __m256d k4p = _mm256_add_pd(_mm256_mul_pd(a1pp, x4), _mm256_mul_pd(a1pq, y4));
  const __m256d k4q = _mm256_add_pd(_mm256_mul_pd(a1qp, x4), _mm256_mul_pd(a1qq, y4));

  const __m256d sp = _mm256_add_pd(_mm256_add_pd(k1p, k4p),
                                   _mm256_mul_pd(two, _mm256_add_pd(k2p, k3p)));
  const __m256d sq = _mm256_add_pd(_mm256_add_pd(k1q, k4q),
                                   _mm256_mul_pd(two, _mm256_add_pd(k2q, k3q)));
  s.x = _mm256_add_pd(s.x, _mm256_mul_pd(h6, sp));
  s.y = _mm256_add_pd(s.y, _mm256_mul_pd(h6, sq));
}

void rk4_linear_avx2(double* p, double* q, std::size_t n, const Rk4Step* steps,
                     std::size_t n_steps) {
  std::size_t i = 0;
  // Two independent register sets per pass keep both FP pipes busy.
  for (; i + 8 <= n; i += 8) {
    Lane4 a{_mm256_loadu_pd(p + i), _mm256_loadu_pd(q + i)};
    Lane4 b{_mm256_loadu_pd(p + i + 4), _mm256_loadu_pd(q + i + 4)};
    for (std::size_t s = 0; s < n_steps; ++s) {
      rk4_step(a, steps[s]);
      rk4_step(b, steps[s]);
    }
    _mm256_storeu_pd(p + i, a.x);
    _mm256_storeu_pd(q + i, a.y);
    _mm256_storeu_pd(p + i + 4, b.x);
    _mm256_storeu_pd(q + i + 4, b.y);
  }
  for (; i + 4 <= n; i += 4) {
    Lane4 a{_mm256_loadu_pd(p + i), _mm256_loadu_pd(q + i)};
    for (std::size_t s = 0; s < n_steps; ++s) rk4_step(a, steps[s]);
    _mm256_storeu_pd(p + i, a.x);
    _mm256_storeu_pd(q + i, a.y);
  }
  if (i < n) scalar_kernels().rk4_linear(p + i, q + i, n - i, steps, n_steps);
}

void apply_step_matrices_avx2(double* p, double* q, std::size_t n, const StepMatrix* steps,
                              std::size_t n_steps) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(p + i);
    __m256d y = _mm256_loadu_pd(q + i);
    for (std::size_t s = 0; s < n_steps; ++s) {
      const StepMatrix& m = steps[s];
      const __m256d xn = _mm256_add_pd(_mm256_mul_pd(bcast(m.pp), x), _mm256_mul_pd(bcast(m.pq), y));
      const __m256d yn = _mm256_add_pd(_mm256_mul_pd(bcast(m.qp), x), _mm256_mul_pd(bcast(m.qq), y));
      x = xn;
      y = yn;
    }
    _mm256_storeu_pd(p + i, x);
    _mm256_storeu_pd(q + i, y);
  }
  if (i < n) scalar_kernels().apply_step_matrices(p + i, q + i, n - i, steps, n_steps);
}

void oscillator_work_avx2(const double* p0, const double* q0, const double* p1, const double* q1,
                          double* w, std::size_t n, double inv_2m, double k0, double k1) {
  const __m256d vinv = bcast(inv_2m), vk0 = bcast(k0), vk1 = bcast(k1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_loadu_pd(p0 + i), b0 = _mm256_loadu_pd(q0 + i);
    const __m256d a1 = _mm256_loadu_pd(p1 + i), b1 = _mm256_loadu_pd(q1 + i);
    const __m256d kinetic =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(a1, a1), _mm256_mul_pd(a0, a0)), vinv);
    const __m256d potential =
        _mm256_sub_pd(_mm256_mul_pd(vk1, _mm256_mul_pd(b1, b1)), _mm256_mul_pd(vk0, _mm256_mul_pd(b0, b0)));
    _mm256_storeu_pd(w + i, _mm256_add_pd(kinetic, potential));
  }
  if (i < n)
    scalar_kernels().oscillator_work(p0 + i, q0 + i, p1 + i, q1 + i, w + i, n - i, inv_2m, k0, k1);
}

// Two complex numbers per register: [re0, im0, re1, im1].
void complex_multiply_avx2(std::complex<double>* psi, const std::complex<double>* phase,
                           std::size_t n) {
  auto* a = reinterpret_cast<double*>(psi);
  const auto* b = reinterpret_cast<const double*>(phase);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    const __m256d br = _mm256_movedup_pd(vb);         // [br0, br0, br1, br1]
    const __m256d bi = _mm256_permute_pd(vb, 0b1111);  // [bi0, bi0, bi1, bi1]
    const __m256d a_swap = _mm256_permute_pd(va, 0b0101);  // [ai0, ar0, ai1, ar1]
    const __m256d t1 = _mm256_mul_pd(va, br);          // [ar*br, ai*br]
    const __m256d t2 = _mm256_mul_pd(a_swap, bi);      // [ai*bi, ar*bi]
    // [ar*br - ai*bi, ai*br + ar*bi]
    _mm256_storeu_pd(a + 2 * i, _mm256_addsub_pd(t1, t2));
  }
  if (i < n) scalar_kernels().complex_multiply(psi + i, phase + i, n - i);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

std::complex<double> real_complex_dot_avx2(const double* a, const std::complex<double>* b,
                                           std::size_t n) {
  const auto* bd = reinterpret_cast<const double*>(b);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // a[i], a[i+1] duplicated into [a0, a0, a1, a1]
    const __m128d a01 = _mm_loadu_pd(a + i);
    const __m128d a23 = _mm_loadu_pd(a + i + 2);
    const __m256d va01 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(a01), 0b01010000);
    const __m256d va23 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(a23), 0b01010000);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(va01, _mm256_loadu_pd(bd + 2 * i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(va23, _mm256_loadu_pd(bd + 2 * i + 4)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  std::complex<double> sum{lanes[0] + lanes[2], lanes[1] + lanes[3]};
  if (i < n) sum += scalar_kernels().real_complex_dot(a + i, b + i, n - i);
  return sum;
}

double norm_squared_avx2(const std::complex<double>* a, std::size_t n) {
  const auto* d = reinterpret_cast<const double*>(a);
  const std::size_t len = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(d + i);
    const __m256d v1 = _mm256_loadu_pd(d + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(v0, v0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(v1, v1));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  if (i < len) sum += scalar_kernels().norm_squared(a + i / 2, n - i / 2);
  return sum;
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{Backend::Avx2,         rk4_linear_avx2,
                                 apply_step_matrices_avx2, oscillator_work_avx2,
                                 complex_multiply_avx2, real_complex_dot_avx2,
                                 norm_squared_avx2};
  return table;
}

}  // namespace ffosc::simd
