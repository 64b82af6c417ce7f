#include "ffosc/experiments.hpp"

#include <boost/version.hpp>
#include <cmath>
#include <fftw3.h>
#include <set>

#include "ffosc/io.hpp"
#include "ffosc/simd/kernels.hpp"

namespace ffosc {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Reads one JSON object, tracking its path and rejecting unknown keys.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [key, value] : doc_.items())
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
  }

  [[nodiscard]] std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[nodiscard]] const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() || it->is_null() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        if constexpr (std::is_same_v<T, double>) {
          if (!v->is_number()) throw ConfigError(field(key), "expected a number");
        } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
          if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
          if (std::is_unsigned_v<T> && v->is_number_integer() && !v->is_number_unsigned())
            throw ConfigError(field(key), "expected a non-negative integer");
        } else if constexpr (std::is_same_v<T, bool>) {
          if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v->is_string()) throw ConfigError(field(key), "expected a string");
        }
        out = v->get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(field(key), e.what());
      }
    }
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (find(key)) {
      T v{};
      get(key, v);
      out = v;
    }
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

DriveMode mode_from(const std::string& field, const std::string& name) {
  const auto m = parse_mode(name);
  if (!m) throw ConfigError(field, "unknown mode '" + name + "' (bare | ff)");
  return *m;
}

IntegratorMethod method_from(const std::string& field, const std::string& name) {
  if (name == "rk4") return IntegratorMethod::RK4;
  if (name == "symplectic2") return IntegratorMethod::Symplectic2;
  throw ConfigError(field, "unknown integrator '" + name + "' (rk4 | symplectic2)");
}

QuantumScheme scheme_from(const std::string& field, const std::string& name) {
  if (name == "crank-nicolson") return QuantumScheme::CrankNicolson;
  if (name == "split-operator") return QuantumScheme::SplitOperator;
  throw ConfigError(field, "unknown scheme '" + name + "' (crank-nicolson | split-operator)");
}

std::string_view method_name(IntegratorMethod m) {
  return m == IntegratorMethod::RK4 ? "rk4" : "symplectic2";
}

std::string_view scheme_name(QuantumScheme s) {
  return s == QuantumScheme::CrankNicolson ? "crank-nicolson" : "split-operator";
}

bool is_stochastic(ExperimentKind k) {
  return k == ExperimentKind::ClassicalEnsemble || k == ExperimentKind::Jarzynski;
}

json versions() {
  return {{"ffosc", kVersion},
          {"compiler", __VERSION__},
          {"boost", BOOST_LIB_VERSION},
          {"fftw", std::string(fftw_version)},
          {"simd_backend", std::string(simd::backend_name(simd::active_backend()))}};
}

EnsembleConfig ensemble_for(const ExperimentConfig& c) {
  EnsembleConfig e = c.ensemble;
  e.seed = c.seed.value_or(0);
  e.beta = c.beta;
  return e;
}

/// Theory law that a classical ensemble should follow.
std::optional<WorkDistribution> classical_theory(const ExperimentConfig& c, DriveMode mode,
                                                 json& info) {
  const double w0 = initial_omega(c.protocol), wf = final_omega(c.protocol);
  if (mode == DriveMode::FastForward) {
    info = {{"law", "adiabatic-exponential"}};
    return adiabatic_work_pdf(c.beta, w0, wf);
  }
  const FundamentalSolutions fund = fundamental_solutions(c.protocol, c.integrator);
  const QuadraticFormCoeffs q = quadratic_form_coeffs(fund, c.beta, w0, wf);
  const MuEigenvalues mu = mu_eigenvalues(q);
  info = {{"law", "finite-time-bessel"}, {"K", q.K},          {"L", q.L},
          {"M", q.M},                     {"mu_plus", mu.plus}, {"mu_minus", mu.minus},
          {"wronskian", fund.wronskian()}};
  try {
    return finite_time_work_pdf(mu.plus, mu.minus);
  } catch (const UnsupportedBranch& e) {
    info["unsupported"] = e.what();
    return std::nullopt;
  }
}

struct Artifacts {
  std::filesystem::path root;
  std::vector<std::filesystem::path> files;

  std::filesystem::path add(const std::filesystem::path& rel) {
    files.push_back(rel);
    std::filesystem::create_directories((root / rel).parent_path());
    return root / rel;
  }
};

json run_classical(const ExperimentConfig& c, Artifacts& out, DriveMode mode,
                   const std::filesystem::path& prefix) {
  const EnsembleResult ens = run_work_ensemble(c.protocol, c.params, mode, c.integrator, ensemble_for(c));
  const WorkSummary s = summarize(ens.work, c.histogram);
  json theory;
  const auto law = classical_theory(c, mode, theory);
  std::vector<std::pair<std::string, std::vector<double>>> extra;
  if (law) {
    theory["mean"] = mean(*law);
    theory["std"] = stddev(*law);
    extra.emplace_back("model_prob", bin_probabilities(*law, s.histogram.edges));
  }
  io::write_histogram_csv(out.add(prefix / "histogram.csv"), s.histogram, extra);
  const double w0 = initial_omega(c.protocol), wf = final_omega(c.protocol);
  const JarzynskiTrace trace = jarzynski_trace(ens.work, c.beta, w0, wf);
  json j = io::to_json(s);
  j["mode"] = std::string(mode_name(mode));
  j["theory"] = theory;
  j["max_relative_action_drift"] = ens.max_relative_action_drift;
  j["integrator_steps"] = ens.integrator_steps;
  j["exp_work_mean"] = trace.running_mean.back();
  j["exp_work_std"] = trace.exp_work_stddev;
  j["jarzynski_target"] = trace.target;
  j["fraction_above_4_mean"] = [&] {
    std::size_t k = 0;
    for (const double w : ens.work) k += w > 4.0 * s.mean;
    return static_cast<double>(k) / static_cast<double>(ens.work.size());
  }();
  return j;
}

json run_jarzynski(const ExperimentConfig& c, Artifacts& out) {
  json modes = json::object();
  const double w0 = initial_omega(c.protocol), wf = final_omega(c.protocol);
  for (const DriveMode mode : c.modes) {
    const EnsembleResult ens =
        run_work_ensemble(c.protocol, c.params, mode, c.integrator, ensemble_for(c));
    const JarzynskiTrace t = jarzynski_trace(ens.work, c.beta, w0, wf);
    const std::string name(mode_name(mode));
    io::write_trace_csv(out.add(std::filesystem::path(name) / "trace.csv"), t, c.trace_rows);
    const auto settled = t.settled_after(0.01);
    modes[name] = {{"final_running_mean", t.running_mean.back()},
                   {"relative_error", std::abs(t.running_mean.back() / t.target - 1.0)},
                   {"exp_work_std", t.exp_work_stddev},
                   {"settled_within_1pct_after", settled ? json(*settled) : json(nullptr)},
                   {"n", t.size()}};
  }
  return {{"target", classical_partition_ratio(w0, wf)}, {"modes", modes}};
}

json run_workfn(const ExperimentConfig& c, Artifacts& out) {
  const double w0 = initial_omega(c.protocol), wf = final_omega(c.protocol);
  std::vector<std::pair<std::string, WorkDistribution>> laws;
  json j = json::object();
  laws.emplace_back("adiabatic", adiabatic_work_pdf(c.beta, w0, wf));
  json bessel;
  if (auto law = classical_theory(c, DriveMode::Bare, bessel)) laws.emplace_back("finite_time", *law);
  j["finite_time"] = bessel;
  if (wf > w0) laws.emplace_back("sudden", sudden_work_pdf(c.beta, w0, wf));
  double hi = 0.0;
  for (const auto& [name, law] : laws) {
    hi = std::max(hi, mean(law) + 8.0 * stddev(law));
    j[name]["mean"] = mean(law);
    j[name]["std"] = stddev(law);
    j[name]["second_moment"] = variance(law) + mean(law) * mean(law);
  }
  const double lo = std::min(0.0, wf > w0 ? 0.0 : -hi);
  const double top = c.histogram.hi.value_or(hi);
  const double bottom = c.histogram.lo.value_or(lo);
  std::vector<double> edges(c.histogram.bins + 1);
  for (std::size_t i = 0; i <= c.histogram.bins; ++i)
    edges[i] = bottom + (top - bottom) * static_cast<double>(i) / static_cast<double>(c.histogram.bins);
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  for (const auto& [name, law] : laws) cols.emplace_back(name, bin_probabilities(law, edges));
  io::write_law_table_csv(out.add("histogram.csv"), edges, cols);
  j["jarzynski_target"] = classical_partition_ratio(w0, wf);
  return j;
}

json run_quantum(const ExperimentConfig& c, Artifacts& out) {
  const QuantumPlan plan = plan_quantum(c);
  TransitionConfig tc;
  tc.n_max = plan.n_max;
  tc.m_max = plan.m_max;
  tc.grid = plan.grid;
  tc.propagation = c.quantum.propagation;
  const TransitionResult tr = transition_matrix(c.protocol, c.params, c.mode, tc);
  io::write_transitions_csv(out.add("transitions.csv"), tr.matrix);
  const DiscreteWorkDistribution dist = quantum_work_distribution(c.beta, c.protocol, tr.matrix, c.params);
  io::write_atoms_csv(out.add("work_atoms.csv"), dist);
  const double w0 = initial_omega(c.protocol), wf = final_omega(c.protocol);
  const DiscreteWorkDistribution geometric =
      quantum_adiabatic_work_distribution(c.beta, w0, wf, c.params, plan.n_max);
  const PerStateWork per_state = per_state_mean_work(tr.matrix, c.beta, c.protocol, c.params);
  const double z_ratio = partition_function(c.beta, wf, c.params) / partition_function(c.beta, w0, c.params);
  double max_diag_defect = 0.0;
  for (std::size_t n = 0; n < std::min(tr.matrix.n_max, tr.matrix.m_max); ++n)
    max_diag_defect = std::max(max_diag_defect, std::abs(tr.matrix(n, n) - 1.0));
  return {{"mode", std::string(mode_name(c.mode))},
          {"n_max", plan.n_max},
          {"m_max", plan.m_max},
          {"captured_thermal_weight", plan.captured_weight},
          {"grid", io::to_json(tr.grid)},
          {"steps", tr.report.steps},
          {"max_norm_drift", tr.report.max_norm_drift},
          {"min_row_sum", tr.matrix.min_row_sum()},
          {"mean", dist.mean()},
          {"second_moment", dist.second_moment()},
          {"std", std::sqrt(dist.variance())},
          {"total_probability", dist.total_probability()},
          {"negative_work_probability", dist.negative_work_probability()},
          {"jarzynski_sum", dist.exp_average(c.beta)},
          {"partition_ratio", z_ratio},
          {"max_atom_difference_vs_geometric", max_atom_difference(dist, geometric)},
          {"max_diagonal_defect", max_diag_defect},
          {"per_state_mean_work_mean", per_state.distribution.mean()},
          {"geometric_mean", geometric.mean()}};
}

json run_otto(const ExperimentConfig& c, Artifacts& out) {
  const ModeComparison cmp =
      compare_modes(c.otto.beta1, c.otto.beta2, c.otto.relaxation_time, c.otto.adiabatic_stroke_time);
  io::write_comparison_csv(out.add("comparison.csv"), cmp);
  json j = io::to_json(cmp);
  j["numerical_ratio"] = {
      {"adiabatic", numerical_optimal_ratio(c.otto.beta1, c.otto.beta2, OttoMode::AdiabaticLimit)},
      {"sudden", numerical_optimal_ratio(c.otto.beta1, c.otto.beta2, OttoMode::SuddenLimit)}};
  j["power_ratio_ff_over_sudden"] =
      cmp.row(OttoMode::FastForward).power / cmp.row(OttoMode::SuddenLimit).power;
  return j;
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::ClassicalEnsemble: return "classical-ensemble";
    case ExperimentKind::QuantumTransitions: return "quantum-transitions";
    case ExperimentKind::Jarzynski: return "jarzynski";
    case ExperimentKind::AnalyticWorkfn: return "analytic-workfn";
    case ExperimentKind::Otto: return "otto";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept {
  for (const auto k : {ExperimentKind::ClassicalEnsemble, ExperimentKind::QuantumTransitions,
                       ExperimentKind::Jarzynski, ExperimentKind::AnalyticWorkfn, ExperimentKind::Otto})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

std::string_view mode_name(DriveMode mode) noexcept {
  return mode == DriveMode::Bare ? "bare" : "ff";
}

std::optional<DriveMode> parse_mode(std::string_view name) noexcept {
  if (name == "bare") return DriveMode::Bare;
  if (name == "ff" || name == "fast-forward") return DriveMode::FastForward;
  return std::nullopt;
}

std::string_view severity_name(Finding::Severity s) noexcept {
  switch (s) {
    case Finding::Severity::Info: return "info";
    case Finding::Severity::Warning: return "warning";
    case Finding::Severity::Error: return "error";
  }
  return "unknown";
}

ExperimentConfig config_from_json(const json& doc, ExperimentConfig c) {
  Reader root(doc, "");
  std::string s;
  if (root.find("kind")) {
    root.get("kind", s);
    const auto k = parse_kind(s);
    if (!k) throw ConfigError("kind", "unknown experiment kind '" + s + "'");
    c.kind = *k;
  }
  if (const json* p = root.find("protocol")) {
    Reader r(*p, "protocol");
    r.get("omega0", c.protocol.omega0);
    r.get("f", c.protocol.f);
    r.get("harmonic_index", c.protocol.harmonic_index);
    std::optional<double> tau, tau_omega;
    r.get("tau", tau);
    r.get("tau_omega", tau_omega);
    require(!(tau && tau_omega), "protocol", "give either tau or tau_omega, not both");
    if (tau) c.protocol.tau = *tau;
    if (tau_omega) c.protocol.tau = *tau_omega / c.protocol.omega0;
  }
  if (const json* p = root.find("oscillator")) {
    Reader r(*p, "oscillator");
    r.get("mass", c.params.mass);
    r.get("hbar", c.params.hbar);
  }
  root.get("beta", c.beta);
  if (root.find("mode")) {
    root.get("mode", s);
    c.mode = mode_from("mode", s);
  }
  if (const json* m = root.find("modes")) {
    require(m->is_array() && !m->empty(), "modes", "expected a non-empty array of modes");
    c.modes.clear();
    for (std::size_t i = 0; i < m->size(); ++i) {
      const std::string f = "modes[" + std::to_string(i) + "]";
      require((*m)[i].is_string(), f, "expected a string");
      c.modes.push_back(mode_from(f, (*m)[i].get<std::string>()));
    }
  }
  root.get("seed", c.seed);
  std::string out_dir;
  if (root.find("output_dir")) {
    root.get("output_dir", out_dir);
    c.output_dir = out_dir;
  }
  if (const json* e = root.find("ensemble")) {
    Reader r(*e, "ensemble");
    r.get("n_trajectories", c.ensemble.n_trajectories);
    r.get("chunk_size", c.ensemble.chunk_size);
    r.get("threads", c.ensemble.threads);
  }
  if (const json* e = root.find("integrator")) {
    Reader r(*e, "integrator");
    r.get("step", c.integrator.step);
    if (r.find("method")) {
      r.get("method", s);
      c.integrator.method = method_from("integrator.method", s);
    }
  }
  if (const json* h = root.find("histogram")) {
    Reader r(*h, "histogram");
    r.get("bins", c.histogram.bins);
    r.get("lo", c.histogram.lo);
    r.get("hi", c.histogram.hi);
  }
  root.get("trace_rows", c.trace_rows);
  if (const json* q = root.find("quantum")) {
    Reader r(*q, "quantum");
    r.get("n_max", c.quantum.n_max);
    r.get("m_max", c.quantum.m_max);
    r.get("thermal_tail", c.quantum.thermal_tail);
    r.get("classical_comparison", c.quantum.classical_comparison);
    if (const json* g = r.find("grid")) {
      Reader gr(*g, "quantum.grid");
      gr.get("half_width", c.quantum.half_width);
      gr.get("n_points", c.quantum.n_points);
    }
    auto& pc = c.quantum.propagation;
    if (r.find("scheme")) {
      r.get("scheme", s);
      pc.scheme = scheme_from("quantum.scheme", s);
    }
    r.get("steps", pc.steps);
    r.get("phase_per_step", pc.phase_per_step);
    r.get("order", pc.order);
    r.get("fd_order", pc.fd_order);
    r.get("norm_tolerance", pc.norm_tolerance);
  }
  if (const json* o = root.find("otto")) {
    Reader r(*o, "otto");
    r.get("beta1", c.otto.beta1);
    r.get("beta2", c.otto.beta2);
    r.get("relaxation_time", c.otto.relaxation_time);
    r.get("adiabatic_stroke_time", c.otto.adiabatic_stroke_time);
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json modes = json::array();
  for (const auto m : c.modes) modes.push_back(std::string(mode_name(m)));
  json grid = json::object();
  if (c.quantum.half_width) grid["half_width"] = *c.quantum.half_width;
  if (c.quantum.n_points) grid["n_points"] = *c.quantum.n_points;
  json hist = {{"bins", c.histogram.bins}};
  if (c.histogram.lo) hist["lo"] = *c.histogram.lo;
  if (c.histogram.hi) hist["hi"] = *c.histogram.hi;
  const auto& pc = c.quantum.propagation;
  return {{"kind", std::string(kind_name(c.kind))},
          {"protocol",
           {{"omega0", c.protocol.omega0},
            {"f", c.protocol.f},
            {"harmonic_index", c.protocol.harmonic_index},
            {"tau", c.protocol.tau}}},
          {"oscillator", io::to_json(c.params)},
          {"beta", c.beta},
          {"mode", std::string(mode_name(c.mode))},
          {"modes", modes},
          {"seed", c.seed ? json(*c.seed) : json(nullptr)},
          {"output_dir", c.output_dir.string()},
          {"ensemble",
           {{"n_trajectories", c.ensemble.n_trajectories},
            {"chunk_size", c.ensemble.chunk_size},
            {"threads", c.ensemble.threads}}},
          {"integrator", {{"step", c.integrator.step}, {"method", std::string(method_name(c.integrator.method))}}},
          {"histogram", hist},
          {"trace_rows", c.trace_rows},
          {"quantum",
           {{"n_max", c.quantum.n_max},
            {"m_max", c.quantum.m_max},
            {"thermal_tail", c.quantum.thermal_tail},
            {"classical_comparison", c.quantum.classical_comparison},
            {"grid", grid},
            {"scheme", std::string(scheme_name(pc.scheme))},
            {"steps", pc.steps},
            {"phase_per_step", pc.phase_per_step},
            {"order", pc.order},
            {"fd_order", pc.fd_order},
            {"norm_tolerance", pc.norm_tolerance}}},
          {"otto",
           {{"beta1", c.otto.beta1},
            {"beta2", c.otto.beta2},
            {"relaxation_time", c.otto.relaxation_time},
            {"adiabatic_stroke_time", c.otto.adiabatic_stroke_time}}}};
}

QuantumPlan plan_quantum(const ExperimentConfig& c) {
  QuantumPlan p;
  const double w0 = initial_omega(c.protocol), wf = final_omega(c.protocol);
  p.n_max = c.quantum.n_max ? c.quantum.n_max
                            : thermal_levels(c.beta, w0, c.params, c.quantum.thermal_tail);
  p.m_max = c.quantum.m_max
                ? c.quantum.m_max
                : static_cast<std::size_t>(std::ceil(std::max(1.0, wf / w0) *
                                                     static_cast<double>(p.n_max + 1))) + 30;
  p.captured_weight = thermal_captured_weight(c.beta, w0, c.params, p.n_max);
  if (c.quantum.half_width && c.quantum.n_points)
    p.grid = symmetric_grid(*c.quantum.half_width, *c.quantum.n_points);
  else
    p.grid = default_grid(c.protocol, c.params, std::max(p.n_max, p.m_max) - 1,
                          c.quantum.propagation.fd_order);
  return p;
}

std::vector<Finding> validate(const ExperimentConfig& c) {
  using S = Finding::Severity;
  std::vector<Finding> f;
  auto add = [&](S s, std::string field, std::string msg) {
    f.push_back({s, std::move(field), std::move(msg)});
  };
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      add(S::Error, field, "must be positive and finite");
      return false;
    }
    return true;
  };
  bool ok = positive(c.protocol.omega0, "protocol.omega0") & positive(c.protocol.f, "protocol.f") &
            positive(c.protocol.tau, "protocol.tau") & positive(c.params.mass, "oscillator.mass") &
            positive(c.params.hbar, "oscillator.hbar") & positive(c.beta, "beta");
  if (c.protocol.harmonic_index < 1) {
    add(S::Error, "protocol.harmonic_index", "must be a positive integer");
    ok = false;
  }
  if (is_stochastic(c.kind) && !c.seed)
    add(S::Error, "seed", "mandatory for stochastic experiments");
  if (is_stochastic(c.kind) && c.ensemble.n_trajectories == 0)
    add(S::Error, "ensemble.n_trajectories", "must be positive");
  if (c.histogram.bins == 0) add(S::Error, "histogram.bins", "must be positive");
  if (c.kind == ExperimentKind::Otto) {
    positive(c.otto.beta1, "otto.beta1");
    positive(c.otto.beta2, "otto.beta2");
    positive(c.otto.relaxation_time, "otto.relaxation_time");
    if (!(c.otto.beta1 > c.otto.beta2))
      add(S::Error, "otto.beta1", "must exceed otto.beta2 (beta2 is the hot bath)");
  }
  if (!ok) return f;

  const double tw = c.protocol.tau_omega();
  if (c.kind != ExperimentKind::Otto) {
    if (tw <= 0.1)
      add(S::Info, "protocol.tau", "fast regime (tau*omega0 = " + io::format_double(tw) +
                                       "); Bare work approaches the sudden law");
    else if (tw >= 50.0)
      add(S::Info, "protocol.tau", "adiabatic regime (tau*omega0 = " + io::format_double(tw) + ")");
    else
      add(S::Info, "protocol.tau", "intermediate regime; no closed-form comparison (tau*omega0 = " +
                                       io::format_double(tw) + ")");
  }
  if (c.kind == ExperimentKind::ClassicalEnsemble || c.kind == ExperimentKind::Jarzynski ||
      c.kind == ExperimentKind::AnalyticWorkfn) {
    const double h = c.integrator.step > 0.0 ? c.integrator.step : default_step(c.protocol);
    if (h * max_omega(c.protocol) > 0.1)
      add(S::Warning, "integrator.step", "step * omega_max = " + io::format_double(h * max_omega(c.protocol)) +
                                              " exceeds 0.1");
  }
  if (c.kind == ExperimentKind::QuantumTransitions) {
    const double x = c.beta * c.params.hbar * c.protocol.omega0;
    if (c.quantum.classical_comparison && x > 1.0)
      add(S::Warning, "beta", "not in classical limit (beta*hbar*omega0 = " + io::format_double(x) + ")");
    if (c.quantum.propagation.scheme == QuantumScheme::SplitOperator && c.mode != DriveMode::Bare)
      add(S::Error, "quantum.scheme", "split-operator propagation supports Bare mode only");
    if (c.quantum.half_width.has_value() != c.quantum.n_points.has_value())
      add(S::Error, "quantum.grid", "give both half_width and n_points, or neither");
    try {
      const QuantumPlan plan = plan_quantum(c);
      if (plan.captured_weight < 1.0 - 1e-6)
        add(S::Warning, "quantum.n_max",
            "captures Gibbs weight " + io::format_double(plan.captured_weight) + " (tail " +
                io::format_double(1.0 - plan.captured_weight) + ")");
      else
        add(S::Info, "quantum.n_max",
            std::to_string(plan.n_max) + " levels capture Gibbs weight " +
                io::format_double(plan.captured_weight));
      if (c.quantum.half_width) {
        const std::size_t top = std::max(plan.n_max, plan.m_max) - 1;
        const SpatialGrid need = default_grid(c.protocol, c.params, top, c.quantum.propagation.fd_order);
        const double err =
            eigen_basis(plan.m_max, final_omega(c.protocol), c.params, plan.grid, -1.0).orthonormality_error();
        if (err > 1e-8)
          add(S::Error, "quantum.grid",
              "grid does not hold state m_max - 1 = " + std::to_string(plan.m_max - 1) +
                  " (orthonormality error " + io::format_double(err) + ")");
        if (plan.grid.dx() > need.dx() * (1.0 + 1e-12))
          add(S::Warning, "quantum.grid",
              "under-resolved: dx = " + io::format_double(plan.grid.dx()) + ", suggested <= " +
                  io::format_double(need.dx()));
      }
    } catch (const std::exception& e) {
      add(S::Error, "quantum.grid", e.what());
    }
  }
  return f;
}

RunResult run(const ExperimentConfig& c) {
  for (const auto& finding : validate(c))
    if (finding.severity == Finding::Severity::Error) throw ConfigError(finding.field, finding.message);
  std::filesystem::create_directories(c.output_dir);
  Artifacts out{c.output_dir, {}};
  json summary;
  switch (c.kind) {
    case ExperimentKind::ClassicalEnsemble: summary = run_classical(c, out, c.mode, ""); break;
    case ExperimentKind::Jarzynski: summary = run_jarzynski(c, out); break;
    case ExperimentKind::AnalyticWorkfn: summary = run_workfn(c, out); break;
    case ExperimentKind::QuantumTransitions: summary = run_quantum(c, out); break;
    case ExperimentKind::Otto: summary = run_otto(c, out); break;
  }
  summary["kind"] = std::string(kind_name(c.kind));
  summary["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  summary["parameters"] = {{"protocol", io::to_json(c.protocol)},
                           {"oscillator", io::to_json(c.params)},
                           {"beta", c.beta}};
  io::write_json(out.add("summary.json"), summary);

  json artifacts = json::array();
  for (const auto& p : out.files) artifacts.push_back(p.generic_string());
  artifacts.push_back("manifest.json");
  const json manifest = {{"program", "ffosc"},
                         {"kind", std::string(kind_name(c.kind))},
                         {"seed", c.seed ? json(*c.seed) : json(nullptr)},
                         {"config", config_to_json(c)},
                         {"versions", versions()},
                         {"artifacts", artifacts}};
  io::write_json(c.output_dir / "manifest.json", manifest);
  out.files.emplace_back("manifest.json");
  return {out.files, summary};
}

}  // namespace ffosc
