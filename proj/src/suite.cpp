#include "invasion/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "invasion/output.hpp"

namespace invasion {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty() || dir.back() == '/') return dir + file;
  return dir + "/" + file;
}

std::string flag(bool b) { return b ? "true" : "false"; }

void theory_block(std::ostringstream& m, const ModelParams& params) {
  const TheoryFlags f = theory_flags(params);
  m << "[theory]\n"
    << "instability_permitted=" << flag(f.instability_permitted) << '\n'
    << "theory_not_applicable=" << flag(f.theory_not_applicable) << '\n'
    << "transport_only=" << flag(f.transport_only) << '\n'
    << "beyond_existence_range=" << flag(f.beyond_existence_range) << '\n';
}

void warnings_block(std::ostringstream& m, const std::vector<std::string>& warnings) {
  m << "[warnings]\n";
  for (const auto& w : warnings) m << w << '\n';
}

std::string manifest_header(const RunConfig& config, double wall) {
  std::ostringstream m;
  m << "invasion run manifest\n"
    << "version=" << kVersion << '\n'
    << "mode=" << to_string(config.mode) << '\n'
    << "wall_clock_seconds=" << wall << '\n';
  return m.str();
}

std::string fmt_name(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

RunConfig base_config() {
  RunConfig c;
  c.output.snapshot_stride = 10;
  return c;
}

std::string kernel_tag(const KernelSpec& k) {
  if (k.family == KernelFamily::uniform) return "uniform" + fmt_name(k.rho);
  return to_string(k.family);
}

std::vector<std::pair<std::string, RunConfig>> fig2_configs(RunMode mode) {
  std::vector<std::pair<std::string, RunConfig>> out;
  std::vector<KernelSpec> kernels{{KernelFamily::logistic, 1.0, 1.0},
                                  {KernelFamily::uniform, 1.0, 1.0},
                                  {KernelFamily::uniform, 0.6, 1.0},
                                  {KernelFamily::uniform, 0.05, 1.0}};
  for (double alpha : {2.0, 10.0}) {
    for (const KernelSpec& k : kernels) {
      for (double d : {1.0, 0.01}) {
        RunConfig c = base_config();
        c.mode = mode;
        c.model.alpha = alpha;
        c.model.beta = 20.0;
        c.model.growth.mu0 = 100.0;
        c.model.kernel = k;
        c.model.diffusion.value = d * c.model.D_H;
        // The narrowest kernel needs dx <= rho.
        c.n_cells = 800;
        c.integrator.t_end = 200.0;
        out.emplace_back("fig2_alpha" + fmt_name(alpha) + "_" + kernel_tag(k) + "_d" + fmt_name(d), c);
      }
    }
  }
  return out;
}

}  // namespace

std::string kernel_line(const ModelParams& params, bool local) {
  if (local) return "local (F = 1)";
  const KernelSpec& k = params.kernel;
  switch (k.family) {
    case KernelFamily::uniform:
    case KernelFamily::cosine:
    case KernelFamily::epanechnikov:
      return to_string(k.family) + " rho=" + g17(k.rho);
    case KernelFamily::gaussian:
    case KernelFamily::mexican_hat:
      return to_string(k.family) + " sigma=" + g17(k.sigma);
    default:
      return to_string(k.family);
  }
}

SimulationResult run_simulation(const RunConfig& config, const std::string& directory, const std::string& name) {
  const auto start = std::chrono::steady_clock::now();
  const Grid1D grid = config.grid();
  ensure_directory(directory);

  State initial;
  initial.u = eval_initial_u(config.ic, grid);
  initial.h = eval_initial_h(config.ic, grid, config.model.source.H);
  Simulation sim(config.model, grid, config.integrator);

  SimulationResult result;
  result.trajectory = sim.run(std::move(initial));
  const Trajectory& traj = result.trajectory;
  RunSummary& s = result.summary;
  s.name = name;
  s.directory = directory;
  s.blow_up_study = config.model.blow_up_study;
  s.blow_up_time = detect_blowup(traj, config.integrator.blowup_threshold);
  s.steady_state = traj.reached_steady_state();
  s.final_time = traj.snapshots.back().t;
  for (const State& st : traj.snapshots) {
    s.max_variance = std::max(s.max_variance, pattern_metrics(st.u, grid).spatial_variance);
  }

  std::optional<double> h_star;
  try {
    h_star = find_h_star(config.model.source).h_star;
  } catch (const NoEquilibrium&) {
  }
  const State& last = traj.snapshots.back();
  const ConvergenceMetrics to_one = convergence_metrics(last, 1.0, h_star.value_or(0.0));
  const ConvergenceMetrics to_zero = convergence_metrics(last, 0.0, h_star.value_or(0.0));
  s.limit_constant = to_one.sup_u <= to_zero.sup_u ? 1.0 : 0.0;
  s.final_metrics = s.limit_constant == 1.0 ? to_one : to_zero;
  if (s.blow_up_time && !s.blow_up_study) s.exit_code = kExitBlowUp;

  // Files.
  std::ostringstream snaps;
  const size_t count = traj.snapshots.size();
  const size_t stride = static_cast<size_t>(config.output.snapshot_stride);
  for (size_t i = 0; i < count; ++i) {
    if (i % stride != 0 && i + 1 != count) continue;
    char file[48];
    std::snprintf(file, sizeof file, "snapshot_%05zu.csv", i);
    write_snapshot(traj.snapshots[i], grid, join_path(directory, file));
    snaps << file << " t=" << g17(traj.snapshots[i].t) << '\n';
  }
  std::string heatmap_note = "none";
  if (config.output.heatmap && count >= 2) {
    const double scale = write_heatmap(traj, join_path(directory, "heatmap_u.pgm"));
    heatmap_note = "heatmap_u.pgm u_max=" + g17(scale);
  }
  std::string dispersion_note = "not requested";
  if (config.output.dispersion) {
    try {
      const Equilibrium eq = make_equilibrium(config.model);
      const InstabilityReport rep =
          classify(config.model, eq, config.half_length, config.stability.z_max, config.stability.local);
      write_dispersion_report(rep, kernel_line(config.model, config.stability.local),
                              join_path(directory, "dispersion.csv"));
      dispersion_note = std::string("dispersion.csv verdict=") + (rep.stable ? "stable" : "unstable");
    } catch (const std::exception& e) {
      dispersion_note = std::string("unavailable: ") + e.what();
    }
  }
  const LyapunovParams lp = lyapunov_params_for(config.model, grid, 1.0);

  write_text(join_path(directory, "config.ini"), echo_config(config));

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream m;
  m << manifest_header(config, wall);
  m << "[events]\n";
  for (const Event& e : traj.events) m << "t=" << g17(e.t) << " kind=" << to_string(e.kind) << " " << e.detail << '\n';
  m << "[stats]\n"
    << "accepted_steps=" << traj.stats.accepted_steps << '\n'
    << "rejected_steps=" << traj.stats.rejected_steps << '\n'
    << "clipped_values=" << traj.stats.clipped_values << '\n'
    << "min_u_before_clip=" << g17(traj.stats.min_u_before_clip) << '\n'
    << "h_clipped_values=" << traj.stats.h_clipped_values << '\n';
  theory_block(m, config.model);
  m << "lyapunov=" << (lp.valid ? "valid" : lp.reason) << '\n';
  warnings_block(m, config.warnings);
  m << "[diagnostics]\n"
    << "final_time=" << g17(s.final_time) << '\n'
    << "blow_up_time=" << (s.blow_up_time ? g17(*s.blow_up_time) : "none") << '\n'
    << "steady_state=" << flag(s.steady_state) << '\n'
    << "max_spatial_variance=" << g17(s.max_variance) << '\n'
    << "limit_constant=" << g17(s.limit_constant) << '\n'
    << "sup_u_minus_c=" << g17(s.final_metrics.sup_u) << '\n'
    << "sup_h_minus_h_star=" << (h_star ? g17(s.final_metrics.sup_h) : "n/a") << '\n'
    << "heatmap=" << heatmap_note << '\n'
    << "dispersion=" << dispersion_note << '\n';
  m << "[snapshots]\n" << snaps.str();
  m << "[config]\n" << echo_config(config);
  write_text(join_path(directory, "manifest.txt"), m.str());
  return result;
}

InstabilityReport run_stability(const RunConfig& config, const std::string& directory) {
  const auto start = std::chrono::steady_clock::now();
  ensure_directory(directory);
  const Equilibrium eq = make_equilibrium(config.model);
  const InstabilityReport rep =
      classify(config.model, eq, config.half_length, config.stability.z_max, config.stability.local);
  write_dispersion_report(rep, kernel_line(config.model, config.stability.local),
                          join_path(directory, "dispersion.csv"));
  write_text(join_path(directory, "config.ini"), echo_config(config));

  const auto [l1, l2] = local_eigenvalues(eq, config.model);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream m;
  m << manifest_header(config, wall);
  m << "[equilibrium]\n"
    << "u_star=" << g17(eq.u_star) << '\n'
    << "h_star=" << g17(eq.h_star) << '\n'
    << "local_eigenvalues=" << g17(l1) << "," << g17(l2) << '\n'
    << "verdict=" << (rep.stable ? "stable" : "unstable") << '\n';
  theory_block(m, config.model);
  warnings_block(m, config.warnings);
  m << "[config]\n" << echo_config(config);
  write_text(join_path(directory, "manifest.txt"), m.str());
  return rep;
}

Field pure_diffusion_reference(const Grid1D& grid, double D, double x0, double t_end) {
  ModelParams p;
  p.diffusion.form = DiffusionForm::constant;
  p.diffusion.value = D;
  p.growth.form = GrowthForm::constant;
  p.growth.mu0 = 0.0;
  p.source.form = SourceForm::none;
  p.kernel.family = KernelFamily::dirac;
  IntegratorConfig integ;
  integ.t_end = t_end;
  integ.snapshot_every = t_end > 0.0 ? t_end : 1.0;
  integ.steady_tol = 0.0;

  // Unit mass split between the two nearest cell centers so its mean sits at x0.
  const int n = grid.n_cells();
  const double pos = std::clamp((x0 + grid.half_length()) / grid.dx() - 0.5, 0.0, double(n - 1));
  const int left = std::min(static_cast<int>(std::floor(pos)), n - 1);
  const double w = pos - left;
  State s;
  s.u.assign(static_cast<size_t>(n), 0.0);
  s.u[static_cast<size_t>(left)] = (1.0 - w) / grid.dx();
  if (w > 0.0) s.u[static_cast<size_t>(left + 1)] = w / grid.dx();
  s.h.assign(static_cast<size_t>(n), 0.0);
  if (t_end <= 0.0) return s.u;
  Simulation sim(p, grid, integ);
  return sim.run(std::move(s)).snapshots.back().u;
}

KineticResult run_kinetic(const RunConfig& config, const std::string& directory, int threads) {
  const auto start = std::chrono::steady_clock::now();
  ensure_directory(directory);
  const Grid1D grid = config.grid();
  const KineticConfig& k = config.kinetic;

  KineticResult r;
  r.coefficients = macroscopic_coefficients(k.equilibrium, k.velocities, k.turning);
  const FrozenAcid acid(eval_initial_h(config.ic, grid, config.model.source.H), grid);
  ParticleEnsemble e = point_cloud(static_cast<size_t>(k.particles), k.x0, config.half_length, k.equilibrium,
                                   k.velocities, config.seed);
  e = simulate(std::move(e), k.equilibrium, k.velocities, k.turning, acid, k.t_end, threads);
  r.histogram = histogram(e, grid);
  double vsum = 0.0;
  for (double v : e.velocities) vsum += v;
  r.mean_velocity = vsum / static_cast<double>(e.velocities.size());

  const bool unbiased = (k.turning.a_coef == 0.0 && k.turning.b_coef == 0.0) || acid.max_abs_gradient() == 0.0;
  if (unbiased) {
    r.pde = pure_diffusion_reference(grid, r.coefficients.D, k.x0, k.t_end);
    r.l1_error = compare_to_pde(e, *r.pde, grid);
  }

  std::string csv = r.pde ? "x,particles,pde\n" : "x,particles\n";
  for (int i = 0; i < grid.n_cells(); ++i) {
    const size_t j = static_cast<size_t>(i);
    csv += g17(grid.node(i)) + ',' + g17(r.histogram[j]);
    if (r.pde) csv += ',' + g17((*r.pde)[j]);
    csv += '\n';
  }
  write_text(join_path(directory, "kinetic_histogram.csv"), csv);
  write_text(join_path(directory, "config.ini"), echo_config(config));

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream m;
  m << manifest_header(config, wall);
  m << "[kinetic]\n"
    << "seed=" << config.seed << '\n'
    << "threads=" << threads << '\n'
    << "D=" << g17(r.coefficients.D) << '\n'
    << "chi=" << g17(r.coefficients.chi) << '\n'
    << "mean_velocity=" << g17(r.mean_velocity) << '\n'
    << "l1_error=" << (r.l1_error ? g17(*r.l1_error) : "n/a (bias active: no pure-diffusion reference)") << '\n';
  warnings_block(m, config.warnings);
  m << "[config]\n" << echo_config(config);
  write_text(join_path(directory, "manifest.txt"), m.str());
  return r;
}

std::vector<std::pair<std::string, RunConfig>> suite_configs(const std::string& name) {
  std::vector<std::pair<std::string, RunConfig>> out;
  if (name == "fig1") {
    for (double alpha : {2.0, 6.2, 8.15}) {
      for (KernelFamily fam : {KernelFamily::logistic, KernelFamily::uniform}) {
        RunConfig c = base_config();
        c.model.alpha = alpha;
        c.model.blow_up_study = !exponents_admissible(alpha, c.model.beta);
        c.model.kernel.family = fam;
        c.model.kernel.rho = 1.0;
        c.integrator.t_end = 50.0;
        out.emplace_back("fig1_alpha" + fmt_name(alpha) + "_" + to_string(fam), c);
      }
    }
  } else if (name == "fig2") {
    out = fig2_configs(RunMode::simulate);
  } else if (name == "fig3") {
    for (SourceForm src : {SourceForm::logistic_acid, SourceForm::destabilizing}) {
      RunConfig c = base_config();
      c.model.beta = 20.0;
      c.model.growth.mu0 = 100.0;
      c.model.kernel.family = KernelFamily::dirac;
      c.model.source.form = src;
      c.model.source.gamma = 0.8;
      // The destabilizing source settles at h* ~ 1.9; leave room above it.
      if (src == SourceForm::destabilizing) c.model.source.H = 4.0;
      c.integrator.t_end = 200.0;
      out.emplace_back(src == SourceForm::logistic_acid ? "fig3_logistic_acid" : "fig3_destabilizing", c);
    }
  } else if (name == "dispersion-table") {
    out = fig2_configs(RunMode::stability);
  } else {
    throw ConfigError("unknown suite '" + name + "' (allowed: fig1, fig2, fig3, dispersion-table)");
  }
  for (auto& [entry, c] : out) {
    c.mode = name == "dispersion-table" ? RunMode::stability : RunMode::simulate;
    validate(c);
  }
  return out;
}

std::vector<RunSummary> run_experiment_suite(const std::string& name, const std::string& out_root, int threads) {
  const auto entries = suite_configs(name);
  ensure_directory(out_root);
  std::vector<RunSummary> results(entries.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < entries.size(); i = next++) {
      const auto& [entry, cfg] = entries[i];
      RunConfig c = cfg;
      c.output.directory = join_path(out_root, entry);
      RunSummary& s = results[i];
      s.name = entry;
      s.directory = c.output.directory;
      try {
        if (c.mode == RunMode::stability) {
          const InstabilityReport rep = run_stability(c, c.output.directory);
          s.dispersion_stable = rep.stable;
        } else {
          s = run_simulation(c, c.output.directory, entry).summary;
        }
      } catch (const IoError& e) {
        s.exit_code = kExitIo;
        s.error = e.what();
      } catch (const std::exception& e) {
        s.exit_code = kExitConfig;
        s.error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(entries.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv =
      "name,exit_code,blow_up_time,steady_state,final_time,max_variance,limit_constant,sup_u,sup_h,dispersion\n";
  for (const RunSummary& s : results) {
    csv += s.name + ',' + std::to_string(s.exit_code) + ',' + (s.blow_up_time ? g17(*s.blow_up_time) : "none") + ',' +
           flag(s.steady_state) + ',' + g17(s.final_time) + ',' + g17(s.max_variance) + ',' + g17(s.limit_constant) +
           ',' + g17(s.final_metrics.sup_u) + ',' + g17(s.final_metrics.sup_h) + ',' +
           (s.dispersion_stable ? (*s.dispersion_stable ? "stable" : "unstable") : "n/a") + '\n';
  }
  write_text(join_path(out_root, "summary.csv"), csv);
  return results;
}

}  // namespace invasion
