#include "ffosc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace ffosc::io {

struct CsvWriter::Impl {
  std::ofstream out;
  std::filesystem::path path;
  std::size_t columns = 0;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->out.open(path);
  if (!impl_->out) throw IoError("cannot open " + path.string() + " for writing");
  impl_->columns = header.size();
  row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != impl_->columns)
    throw IoError(impl_->path.string() + ": row has " + std::to_string(values.size()) +
                  " fields, expected " + std::to_string(impl_->columns));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << values[i];
  }
  impl_->out << '\n';
  if (!impl_->out) throw IoError("write failed: " + impl_->path.string());
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  s.reserve(values.size());
  for (const double v : values) s.push_back(format_double(v));
  row(s);
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_histogram_csv(const std::filesystem::path& path, const EmpiricalHistogram& hist,
                         const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  std::vector<std::string> header{"bin_left", "bin_right", "count", "fraction"};
  for (const auto& [name, values] : extra) {
    if (values.size() != hist.bins()) throw IoError("histogram column " + name + ": size mismatch");
    header.push_back(name);
  }
  CsvWriter csv(path, header);
  const double n = static_cast<double>(hist.n_samples);
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double c = static_cast<double>(hist.counts[i]);
    std::vector<double> r{hist.edges[i], hist.edges[i + 1], c, n > 0 ? c / n : 0.0};
    for (const auto& col : extra) r.push_back(col.second[i]);
    csv.row(r);
  }
}

void write_law_table_csv(const std::filesystem::path& path, const std::vector<double>& edges,
                         const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  std::vector<std::string> header{"bin_left", "bin_right"};
  for (const auto& c : columns) {
    if (c.second.size() + 1 != edges.size()) throw IoError("law column " + c.first + ": size mismatch");
    header.push_back(c.first);
  }
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    std::vector<double> r{edges[i], edges[i + 1]};
    for (const auto& c : columns) r.push_back(c.second[i]);
    csv.row(r);
  }
}

void write_trace_csv(const std::filesystem::path& path, const JarzynskiTrace& trace,
                     std::size_t max_rows) {
  CsvWriter csv(path, {"n", "running_mean", "target"});
  const std::size_t n = trace.size();
  std::set<std::size_t> rows;
  if (n <= max_rows) {
    for (std::size_t k = 1; k <= n; ++k) rows.insert(k);
  } else {
    const double logn = std::log(static_cast<double>(n));
    for (std::size_t i = 0; i < max_rows; ++i)
      rows.insert(static_cast<std::size_t>(
          std::llround(std::exp(logn * static_cast<double>(i) / static_cast<double>(max_rows - 1)))));
    rows.insert(n);
  }
  for (const std::size_t k : rows) {
    if (k == 0 || k > n) continue;
    csv.row({static_cast<double>(k), trace.running_mean[k - 1], trace.target});
  }
}

void write_transitions_csv(const std::filesystem::path& path, const TransitionMatrix& matrix) {
  CsvWriter csv(path, {"n", "m", "P"});
  for (std::size_t n = 0; n < matrix.n_max; ++n)
    for (std::size_t m = 0; m < matrix.m_max; ++m)
      csv.row({static_cast<double>(n), static_cast<double>(m), matrix(n, m)});
}

void write_atoms_csv(const std::filesystem::path& path, const DiscreteWorkDistribution& dist) {
  CsvWriter csv(path, {"W", "prob"});
  for (const auto& a : dist.atoms) csv.row({a.work, a.probability});
}

void write_comparison_csv(const std::filesystem::path& path, const ModeComparison& comparison) {
  CsvWriter csv(path, {"mode", "ratio", "output", "eta", "power"});
  for (const auto& r : comparison.rows)
    csv.row(std::vector<std::string>{std::string(otto_mode_name(r.mode)), format_double(r.ratio),
                                     format_double(r.output), format_double(r.eta),
                                     format_double(r.power)});
}

json to_json(const FrequencyProtocol& p) {
  return {{"omega0", p.omega0},
          {"f", p.f},
          {"harmonic_index", p.harmonic_index},
          {"tau", p.tau},
          {"tau_omega", p.tau_omega()}};
}

json to_json(const OscillatorParams& p) { return {{"mass", p.mass}, {"hbar", p.hbar}}; }

json to_json(const WorkSummary& s) {
  return {{"n", s.n},
          {"mean", s.mean},
          {"std", s.stddev},
          {"variance", s.variance},
          {"second_moment", s.second_moment},
          {"skewness", s.skewness},
          {"excess_kurtosis", s.excess_kurtosis},
          {"min", s.min},
          {"max", s.max}};
}

json to_json(const SpatialGrid& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_points", g.n_points}, {"dx", g.dx()}};
}

json to_json(const ModeComparison& c) {
  json rows = json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"mode", otto_mode_name(r.mode)},
                    {"ratio", r.ratio},
                    {"output", r.output},
                    {"eta", r.eta},
                    {"power", r.power}});
  return {{"beta1", c.beta1},
          {"beta2", c.beta2},
          {"relaxation_time", c.relaxation_time},
          {"adiabatic_stroke_time", c.adiabatic_stroke_time},
          {"modes", rows}};
}

}  // namespace ffosc::io
