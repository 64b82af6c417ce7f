#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ffosc/simd/kernels.hpp"

namespace ffosc::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(FFOSC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() noexcept {
  if (const char* env = std::getenv("FFOSC_SIMD")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const KernelTable*>& active_table() noexcept {
  static std::atomic<const KernelTable*> table{&kernels_for(detect())};
  return table;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
  }
  return false;
}

const KernelTable& kernels_for(Backend backend) {
  if (!backend_available(backend))
    throw std::runtime_error("SIMD backend " + std::string(backend_name(backend)) +
                             " not available on this CPU/build");
#if defined(FFOSC_HAVE_AVX2)
  if (backend == Backend::Avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

const KernelTable& kernels() noexcept {
  return *active_table().load(std::memory_order_acquire);
}

Backend active_backend() noexcept { return kernels().backend; }

void set_backend(Backend backend) {
  active_table().store(&kernels_for(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace ffosc::simd
