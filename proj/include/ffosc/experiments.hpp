#pragma once

// Experiment configuration, validation and execution for the command-line runner.

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ffosc/ensemble.hpp"
#include "ffosc/otto.hpp"
#include "ffosc/quantum.hpp"
#include "ffosc/work_stats.hpp"

namespace ffosc {

enum class ExperimentKind { ClassicalEnsemble, QuantumTransitions, Jarzynski, AnalyticWorkfn, Otto };

[[nodiscard]] std::string_view kind_name(ExperimentKind kind) noexcept;
[[nodiscard]] std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept;
[[nodiscard]] std::string_view mode_name(DriveMode mode) noexcept;
[[nodiscard]] std::optional<DriveMode> parse_mode(std::string_view name) noexcept;

/// Invalid configuration; field() is the JSON path of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct QuantumSettings {
  std::size_t n_max = 0;  // 0: thermal_levels(beta, omega0, tail)
  std::size_t m_max = 0;  // 0: ceil(max(1, omega_f/omega0) * (n_max + 1)) + 30
  double thermal_tail = 1e-6;
  std::optional<double> half_width;      // explicit grid; both or neither
  std::optional<std::size_t> n_points;
  PropagationConfig propagation;
  bool classical_comparison = false;
};

struct OttoSettings {
  double beta1 = 4.0;
  double beta2 = 1.0;
  double relaxation_time = 1.0;
  double adiabatic_stroke_time = 1e6;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ClassicalEnsemble;
  FrequencyProtocol protocol = FrequencyProtocol::from_tau_omega(10.0, std::numbers::sqrt3, 0.01);
  OscillatorParams params;
  double beta = 1.0;
  DriveMode mode = DriveMode::FastForward;
  std::vector<DriveMode> modes{DriveMode::Bare, DriveMode::FastForward};  // jarzynski
  std::optional<std::uint64_t> seed;
  EnsembleConfig ensemble;  // ensemble.seed and ensemble.beta are taken from seed / beta
  IntegratorConfig integrator;
  HistogramSpec histogram;
  std::size_t trace_rows = 2000;
  QuantumSettings quantum;
  OttoSettings otto;
  std::filesystem::path output_dir = "out";
};

/// Parses a JSON config. Unknown keys and ill-typed values raise ConfigError.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& doc,
                                                ExperimentConfig base = {});
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);

struct Finding {
  enum class Severity { Info, Warning, Error };
  Severity severity = Severity::Info;
  std::string field;
  std::string message;
};

[[nodiscard]] std::string_view severity_name(Finding::Severity s) noexcept;

/// Regime, resolution and truncation diagnostics; never throws for physical
/// parameter combinations (invalid values become Error findings).
[[nodiscard]] std::vector<Finding> validate(const ExperimentConfig& config);

struct RunResult {
  std::vector<std::filesystem::path> artifacts;  // relative to output_dir
  nlohmann::json summary;
};

/// Runs the experiment and writes manifest.json, summary.json and data files
/// into config.output_dir. Throws ConfigError if validate() reports errors.
RunResult run(const ExperimentConfig& config);

/// Resolved quantum truncation for a config.
struct QuantumPlan {
  std::size_t n_max = 0;
  std::size_t m_max = 0;
  double captured_weight = 1.0;
  SpatialGrid grid;
};

[[nodiscard]] QuantumPlan plan_quantum(const ExperimentConfig& config);

}  // namespace ffosc
