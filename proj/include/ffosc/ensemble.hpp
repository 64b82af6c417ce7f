#pragma once

// Gibbs-sampled ensembles of classical trajectories and their work values.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ffosc/classical.hpp"

namespace ffosc {

struct EnsembleConfig {
  std::size_t n_trajectories = 100000;
  std::uint64_t seed = 0;
  double beta = 1.0;
  /// Trajectory i belongs to chunk i / chunk_size, whose initial conditions
  /// come from stream (seed, chunk). Changing chunk_size changes the draws;
  /// changing threads does not.
  std::size_t chunk_size = 8192;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct EnsembleResult {
  std::vector<double> work;  // trajectory order
  /// max_i |I(tau) - I(0)| / I(0) with I = H0 / omega
  double max_relative_action_drift = 0.0;
  std::size_t integrator_steps = 0;
};

[[nodiscard]] EnsembleResult run_work_ensemble(const FrequencyProtocol& protocol,
                                               const OscillatorParams& params, DriveMode mode,
                                               const IntegratorConfig& integrator,
                                               const EnsembleConfig& config);

[[nodiscard]] unsigned resolve_threads(unsigned requested) noexcept;

}  // namespace ffosc
