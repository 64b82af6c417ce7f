#pragma once

// CSV and JSON artifact writers.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffosc/otto.hpp"
#include "ffosc/quantum.hpp"
#include "ffosc/work_stats.hpp"

namespace ffosc::io {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimal CSV writer: header on construction, full precision doubles.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;
  ~CsvWriter();

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string format_double(double v);

void write_json(const std::filesystem::path& path, const json& doc);
[[nodiscard]] json read_json(const std::filesystem::path& path);

/// bin_left, bin_right, count, fraction (= count / n_samples) and optional
/// extra columns of per-bin values (for example analytic probabilities).
void write_histogram_csv(const std::filesystem::path& path, const EmpiricalHistogram& hist,
                         const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

/// Bin edges with one probability column per named law.
void write_law_table_csv(const std::filesystem::path& path, const std::vector<double>& edges,
                         const std::vector<std::pair<std::string, std::vector<double>>>& columns);

/// n, running_mean, target. Rows at roughly max_rows log-spaced sample counts
/// (every row if the trace is shorter), always including the last.
void write_trace_csv(const std::filesystem::path& path, const JarzynskiTrace& trace,
                     std::size_t max_rows = 2000);

/// n, m, P
void write_transitions_csv(const std::filesystem::path& path, const TransitionMatrix& matrix);

/// W, prob
void write_atoms_csv(const std::filesystem::path& path, const DiscreteWorkDistribution& dist);

/// mode, ratio, output, eta, power
void write_comparison_csv(const std::filesystem::path& path, const ModeComparison& comparison);

[[nodiscard]] json to_json(const FrequencyProtocol& protocol);
[[nodiscard]] json to_json(const OscillatorParams& params);
[[nodiscard]] json to_json(const WorkSummary& summary);
[[nodiscard]] json to_json(const SpatialGrid& grid);
[[nodiscard]] json to_json(const ModeComparison& comparison);

}  // namespace ffosc::io
