#pragma once

// Classical-limit Otto cycle: two frequency strokes between two isochoric
// thermalisations at inverse temperatures beta1 (cold) and beta2 (hot).

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace ffosc {

enum class OttoMode { AdiabaticLimit, SuddenLimit, FastForward };

[[nodiscard]] std::string_view otto_mode_name(OttoMode mode) noexcept;

struct OttoCycleSpec {
  double beta1 = 4.0;  // cold bath, stroke 4
  double beta2 = 1.0;  // hot bath, stroke 2
  double omega1 = 1.0;
  double omega2 = 2.0;
  std::array<double, 4> stroke_times{1.0, 0.5, 1.0, 0.5};
  OttoMode mode = OttoMode::FastForward;
};

/// Throws std::invalid_argument for non-positive or non-finite parameters.
/// beta1 > beta2 and omega2 > omega1 are not enforced here: the optimiser
/// scans ratios on both sides of 1.
void validate(const OttoCycleSpec& spec);

struct OttoResult {
  double W1 = 0.0;  // compression omega1 -> omega2
  double Q2 = 0.0;  // heat from the hot bath
  double W3 = 0.0;  // expansion omega2 -> omega1
  double Q4 = 0.0;  // heat to the cold bath, from cycle closure
  double W1_variance = 0.0;  // single-cycle work fluctuations of the two strokes
  double W3_variance = 0.0;
  double output = 0.0;  // -(W1 + W3)
  double cycle_time = 0.0;
  double power = 0.0;  // output / cycle_time
  std::optional<double> eta;  // empty unless Q2 > 0

  [[nodiscard]] bool is_engine() const noexcept { return eta.has_value() && output > 0.0; }
};

[[nodiscard]] OttoResult cycle_averages(const OttoCycleSpec& spec);

struct OttoOptimum {
  double ratio = 1.0;  // omega2 / omega1
  double output = 0.0;
  double eta = 0.0;
};

/// Closed-form maximum of the output over omega2/omega1. Throws
/// std::domain_error unless beta1 > beta2 > 0.
[[nodiscard]] OttoOptimum optimal_ratio(double beta1, double beta2, OttoMode mode);

/// Golden-section maximisation of the output over log(omega2/omega1) in
/// [-6, 6]. Throws std::runtime_error if the output is not unimodal there.
[[nodiscard]] double numerical_optimal_ratio(double beta1, double beta2, OttoMode mode,
                                             double log_tolerance = 1e-10);

struct ModeRow {
  OttoMode mode;
  double ratio = 1.0;
  double output = 0.0;
  double eta = 0.0;
  double power = 0.0;
};

struct ModeComparison {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double relaxation_time = 0.0;   // tau2 + tau4
  double adiabatic_stroke_time = 0.0;  // tau1 + tau3 for the adiabatic limit
  std::vector<ModeRow> rows;  // AdiabaticLimit, SuddenLimit, FastForward

  [[nodiscard]] const ModeRow& row(OttoMode mode) const;
};

/// Evaluates each mode at its optimum. The fast-forward and sudden cycles run
/// their compression strokes in zero time; the adiabatic limit takes
/// adiabatic_stroke_time on top of the relaxation time (power -> 0 as it grows).
[[nodiscard]] ModeComparison compare_modes(double beta1, double beta2, double relaxation_time,
                                           double adiabatic_stroke_time = 1e6);

}  // namespace ffosc
