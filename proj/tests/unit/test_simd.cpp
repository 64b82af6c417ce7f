#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <complex>
#include <vector>

#include "ffosc/rng.hpp"
#include "ffosc/simd/kernels.hpp"

using namespace ffosc;
using namespace ffosc::simd;

namespace {

std::vector<double> randoms(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<std::complex<double>> crandoms(std::size_t n, Rng& rng) {
  std::vector<std::complex<double>> v(n);
  for (auto& x : v) x = {rng.normal(), rng.normal()};
  return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i] - b[i]) <= tol * (1.0 + std::abs(a[i])));
}

// Lengths that exercise the vector body and every remainder.
constexpr std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 31, 64, 1001};

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(backend_available(Backend::Scalar));
  CHECK(kernels_for(Backend::Scalar).backend == Backend::Scalar);
  CHECK(backend_name(Backend::Scalar) == "scalar");
}

TEST_CASE("set_backend switches the active table") {
  const Backend before = active_backend();
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  CHECK(kernels().backend == Backend::Scalar);
  set_backend(before);
  CHECK(active_backend() == before);
}

#if defined(FFOSC_HAVE_AVX2)
TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!backend_available(Backend::Avx2)) {
    MESSAGE("CPU lacks AVX2; equivalence not exercised");
    return;
  }
  const KernelTable& s = scalar_kernels();
  const KernelTable& v = avx2_kernels();
  Rng rng(2024);

  std::vector<Rk4Step> rk(37);
  for (auto& st : rk) {
    st.h = 1e-3 * (1.0 + rng.uniform());
    for (auto* c : {&st.start, &st.mid, &st.end}) *c = {rng.normal(), -50 - rng.uniform(), 1.0, -rng.normal()};
  }
  std::vector<StepMatrix> sm(29);
  for (auto& m : sm) m = {1 + 1e-3 * rng.normal(), 1e-2 * rng.normal(), 1e-2 * rng.normal(), 1 + 1e-3 * rng.normal()};

  for (const std::size_t n : kLengths) {
    CAPTURE(n);
    const auto p0 = randoms(n, rng), q0 = randoms(n, rng);

    auto ps = p0, qs = q0, pv = p0, qv = q0;
    s.rk4_linear(ps.data(), qs.data(), n, rk.data(), rk.size());
    v.rk4_linear(pv.data(), qv.data(), n, rk.data(), rk.size());
    check_close(ps, pv, 1e-14);
    check_close(qs, qv, 1e-14);

    ps = p0, qs = q0, pv = p0, qv = q0;
    s.apply_step_matrices(ps.data(), qs.data(), n, sm.data(), sm.size());
    v.apply_step_matrices(pv.data(), qv.data(), n, sm.data(), sm.size());
    check_close(ps, pv, 1e-14);
    check_close(qs, qv, 1e-14);

    const auto p1 = randoms(n, rng), q1 = randoms(n, rng);
    std::vector<double> ws(n), wv(n);
    s.oscillator_work(p0.data(), q0.data(), p1.data(), q1.data(), ws.data(), n, 0.5, 50.0, 150.0);
    v.oscillator_work(p0.data(), q0.data(), p1.data(), q1.data(), wv.data(), n, 0.5, 50.0, 150.0);
    check_close(ws, wv, 1e-14);

    const auto z0 = crandoms(n, rng), ph = crandoms(n, rng);
    auto zs = z0, zv = z0;
    s.complex_multiply(zs.data(), ph.data(), n);
    v.complex_multiply(zv.data(), ph.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(zs[i] - zv[i]) <= 1e-14 * (1 + std::abs(zs[i])));

    const auto dot_s = s.real_complex_dot(p0.data(), z0.data(), n);
    const auto dot_v = v.real_complex_dot(p0.data(), z0.data(), n);
    CHECK(std::abs(dot_s - dot_v) <= 1e-13 * (1.0 + static_cast<double>(n)));

    const double ns = s.norm_squared(z0.data(), n), nv = v.norm_squared(z0.data(), n);
    CHECK(std::abs(ns - nv) <= 1e-14 * (1.0 + ns));
  }
}
#endif

TEST_CASE("scalar kernels against direct formulas") {
  const KernelTable& s = scalar_kernels();
  Rng rng(9);
  const std::size_t n = 17;
  const auto a = randoms(n, rng);
  const auto z = crandoms(n, rng);
  std::complex<double> dot = 0.0;
  double nn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * z[i];
    nn += std::norm(z[i]);
  }
  CHECK(std::abs(s.real_complex_dot(a.data(), z.data(), n) - dot) < 1e-13);
  CHECK(s.norm_squared(z.data(), n) == doctest::Approx(nn).epsilon(1e-14));

  // One step matrix is a plain 2x2 product.
  std::vector<double> p{1.0}, q{2.0};
  const StepMatrix m{0.5, 0.25, -1.0, 3.0};
  s.apply_step_matrices(p.data(), q.data(), 1, &m, 1);
  CHECK(p[0] == doctest::Approx(0.5 * 1 + 0.25 * 2));
  CHECK(q[0] == doctest::Approx(-1.0 * 1 + 3.0 * 2));

  // RK4 with constant A = [[0, -w^2], [1, 0]] over one tiny step ~ exp(hA).
  const double w = 2.0, h = 1e-3;
  const LinearCoeffs A{0.0, -w * w, 1.0, 0.0};
  const Rk4Step st{h, A, A, A};
  p = {0.0};
  q = {1.0};
  s.rk4_linear(p.data(), q.data(), 1, &st, 1);
  CHECK(q[0] == doctest::Approx(std::cos(w * h)).epsilon(1e-13));
  CHECK(p[0] == doctest::Approx(-w * std::sin(w * h)).epsilon(1e-12));
}
