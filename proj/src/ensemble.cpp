#include "ffosc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ffosc {

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleResult run_work_ensemble(const FrequencyProtocol& protocol,
                                 const OscillatorParams& params, DriveMode mode,
                                 const IntegratorConfig& integrator,
                                 const EnsembleConfig& config) {
  if (config.n_trajectories == 0) throw std::invalid_argument("ensemble needs trajectories");
  if (config.chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
  const GibbsSpec gibbs{config.beta, protocol, params};
  validate(gibbs);

  const TrajectoryPropagator propagator(protocol, params, mode, integrator);
  const double w0 = initial_omega(protocol);
  const double wf = final_omega(protocol);
  const double m = params.mass;

  EnsembleResult result;
  result.work.resize(config.n_trajectories);
  result.integrator_steps = propagator.steps();

  const std::size_t n_chunks = (config.n_trajectories + config.chunk_size - 1) / config.chunk_size;
  std::vector<double> chunk_drift(n_chunks, 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::vector<double> p0, q0, p, q;
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      const std::size_t begin = c * config.chunk_size;
      const std::size_t len = std::min(config.chunk_size, config.n_trajectories - begin);
      p0.resize(len);
      q0.resize(len);
      Rng rng(config.seed, c);
      sample_gibbs(gibbs, rng, p0, q0);
      p = p0;
      q = q0;
      try {
        propagator.apply(p, q);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      simd::kernels().oscillator_work(p0.data(), q0.data(), p.data(), q.data(),
                                      result.work.data() + begin, len, 0.5 / m,
                                      0.5 * m * w0 * w0, 0.5 * m * wf * wf);
      double drift = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        const double i0 = energy({p0[i], q0[i]}, w0, params) / w0;
        const double i1 = energy({p[i], q[i]}, wf, params) / wf;
        if (i0 > 0.0) drift = std::max(drift, std::abs(i1 - i0) / i0);
      }
      chunk_drift[c] = drift;
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(config.threads), n_chunks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.max_relative_action_drift = *std::max_element(chunk_drift.begin(), chunk_drift.end());
  return result;
}

}  // namespace ffosc
