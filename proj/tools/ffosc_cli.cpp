// ffosc: experiment runner.
//
// Precedence: built-in defaults < --config file < command-line flags. The
// subcommand fixes the experiment kind; validate takes it from the config or --kind.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ffosc/classical.hpp"
#include "ffosc/experiments.hpp"
#include "ffosc/io.hpp"
#include "ffosc/quantum.hpp"

namespace {

enum Exit { kOk = 0, kFindings = 1, kUsage = 2, kNumerical = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::size_t> trajectories;
  std::optional<double> tau_omega;
  std::optional<std::string> kind;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "RNG seed (U64)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--mode", o.mode, "drive mode")->check(CLI::IsMember({"bare", "ff"}));
  sub->add_option("--trajectories", o.trajectories, "ensemble size")->check(CLI::PositiveNumber);
  sub->add_option("--tau-omega", o.tau_omega, "stroke duration as tau*omega0")
      ->check(CLI::PositiveNumber);
}

ffosc::ExperimentConfig build_config(ffosc::ExperimentKind kind, const Options& o) {
  ffosc::ExperimentConfig c;
  c.kind = kind;
  if (!o.config.empty()) c = ffosc::config_from_json(ffosc::io::read_json(o.config), c);
  if (o.kind) {
    const auto k = ffosc::parse_kind(*o.kind);
    if (!k) throw ffosc::ConfigError("--kind", "unknown experiment kind '" + *o.kind + "'");
    c.kind = *k;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.mode) {
    const auto m = *ffosc::parse_mode(*o.mode);
    c.mode = m;
    c.modes = {m};
  }
  if (o.trajectories) c.ensemble.n_trajectories = *o.trajectories;
  if (o.tau_omega) c.protocol.tau = *o.tau_omega / c.protocol.omega0;
  return c;
}

int print_findings(const std::vector<ffosc::Finding>& findings) {
  int errors = 0;
  for (const auto& f : findings) {
    std::cout << ffosc::severity_name(f.severity) << ": " << f.field << ": " << f.message << "\n";
    errors += f.severity == ffosc::Finding::Severity::Error;
  }
  return errors;
}

int execute(ffosc::ExperimentKind kind, const Options& o, bool validate_only) {
  try {
    const ffosc::ExperimentConfig c = build_config(kind, o);
    const auto findings = ffosc::validate(c);
    if (validate_only) {
      const int errors = print_findings(findings);
      std::cout << "kind: " << ffosc::kind_name(c.kind) << ", " << errors << " error(s)\n";
      return errors ? kFindings : kOk;
    }
    for (const auto& f : findings)
      if (f.severity != ffosc::Finding::Severity::Info)
        std::cerr << ffosc::severity_name(f.severity) << ": " << f.field << ": " << f.message << "\n";
    const ffosc::RunResult r = ffosc::run(c);
    std::cout << r.summary.dump(2) << "\n";
    for (const auto& a : r.artifacts) std::cerr << "wrote " << (c.output_dir / a).string() << "\n";
    return kOk;
  } catch (const ffosc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ffosc::io::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-forward driving of a harmonic oscillator: work statistics and Otto cycles"};
  app.require_subcommand(1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
    ffosc::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"classical", "classical Gibbs ensemble work histogram", ffosc::ExperimentKind::ClassicalEnsemble},
      {"quantum", "quantum transition matrix and work distribution", ffosc::ExperimentKind::QuantumTransitions},
      {"jarzynski", "running Jarzynski estimator for each mode", ffosc::ExperimentKind::Jarzynski},
      {"workfn", "closed-form work laws on a common grid", ffosc::ExperimentKind::AnalyticWorkfn},
      {"otto", "Otto cycle optima and mode comparison", ffosc::ExperimentKind::Otto},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, o);
    sub->callback([&o, k = s.kind] { o.kind = std::string(ffosc::kind_name(k)); });
  }
  bool validate_only = false;
  auto* val = app.add_subcommand("validate", "print config findings without running");
  add_common(val, o);
  val->add_option("--kind", o.kind, "experiment kind when the config omits it");
  val->callback([&] { validate_only = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  return execute(ffosc::ExperimentKind::ClassicalEnsemble, o, validate_only);
}
