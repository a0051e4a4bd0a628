// Command-line front end: simulate, stability, kinetic, suite.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "invasion/config.hpp"
#include "invasion/output.hpp"
#include "invasion/suite.hpp"

using namespace invasion;

namespace {

struct Options {
  std::string config_path;
  std::string suite_name;
  std::optional<std::string> out;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

RunConfig load(const Options& opt, RunMode mode) {
  RunConfig c = load_config(opt.config_path);
  c.mode = mode;
  if (opt.out) c.output.directory = *opt.out;
  if (opt.seed) c.seed = *opt.seed;
  validate(c);
  for (const auto& w : c.warnings) std::cerr << "warning: " << w << '\n';
  return c;
}

int cmd_simulate(const Options& opt) {
  const RunConfig c = load(opt, RunMode::simulate);
  const SimulationResult r = run_simulation(c, c.output.directory);
  const RunSummary& s = r.summary;
  std::cout << "final t=" << s.final_time << " max variance=" << s.max_variance
            << " sup|u-" << s.limit_constant << "|=" << s.final_metrics.sup_u;
  if (s.blow_up_time) std::cout << " blow-up at t=" << *s.blow_up_time;
  std::cout << "\noutput: " << c.output.directory << '\n';
  if (s.exit_code == kExitBlowUp) std::cerr << "error: blow-up in a run without blow_up_study\n";
  return s.exit_code;
}

int cmd_stability(const Options& opt) {
  const RunConfig c = load(opt, RunMode::stability);
  const InstabilityReport rep = run_stability(c, c.output.directory);
  std::cout << "verdict=" << (rep.stable ? "stable" : "unstable") << " critical points=" << rep.critical.size()
            << "\noutput: " << c.output.directory << '\n';
  return kExitOk;
}

int cmd_kinetic(const Options& opt) {
  const RunConfig c = load(opt, RunMode::kinetic);
  const KineticResult r = run_kinetic(c, c.output.directory, opt.threads);
  std::cout << "D=" << r.coefficients.D << " chi=" << r.coefficients.chi;
  if (r.l1_error) std::cout << " L1=" << *r.l1_error;
  std::cout << "\noutput: " << c.output.directory << '\n';
  return kExitOk;
}

int cmd_suite(const Options& opt) {
  const std::string root = opt.out.value_or("suite_" + opt.suite_name);
  const auto results = run_experiment_suite(opt.suite_name, root, opt.threads);
  int code = kExitOk;
  for (const RunSummary& s : results) {
    std::cout << s.name << ": exit=" << s.exit_code;
    if (s.blow_up_time) std::cout << " blow-up t=" << *s.blow_up_time;
    if (!s.error.empty()) std::cout << " error: " << s.error;
    std::cout << '\n';
    if (s.exit_code != kExitOk && code == kExitOk) code = s.exit_code;
  }
  std::cout << "summary: " << root << "/summary.csv\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal invasion model toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory (overrides [output] directory)");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Random seed (kinetic mode)");
  };

  auto* sim = app.add_subcommand("simulate", "Integrate the PDE system");
  sim->add_option("config", opt.config_path, "Config file")->required();
  common(sim);
  auto* stab = app.add_subcommand("stability", "Dispersion sweep around the homogeneous state");
  stab->add_option("config", opt.config_path, "Config file")->required();
  common(stab);
  auto* kin = app.add_subcommand("kinetic", "Velocity-jump particle validation");
  kin->add_option("config", opt.config_path, "Config file")->required();
  common(kin);
  auto* suite = app.add_subcommand("suite", "Run a preset experiment grid");
  suite->add_option("name", opt.suite_name, "fig1, fig2, fig3 or dispersion-table")->required();
  common(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(opt);
    if (*stab) return cmd_stability(opt);
    if (*kin) return cmd_kinetic(opt);
    return cmd_suite(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NoEquilibrium& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}
