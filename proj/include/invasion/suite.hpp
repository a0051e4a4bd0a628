#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invasion/analysis.hpp"
#include "invasion/config.hpp"
#include "invasion/kinetic.hpp"
#include "invasion/solver.hpp"
#include "invasion/stability.hpp"

namespace invasion {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitBlowUp = 3, kExitIo = 4 };

struct RunSummary {
  std::string name;
  std::string directory;
  int exit_code = kExitOk;
  bool blow_up_study = false;
  std::optional<double> blow_up_time;
  bool steady_state = false;
  double final_time = 0.0;
  double max_variance = 0.0;
  /// Constant (0 or 1) the final density is closest to, with distances.
  double limit_constant = 1.0;
  ConvergenceMetrics final_metrics;
  /// Verdict of a stability-only entry.
  std::optional<bool> dispersion_stable;
  std::string error;
};

struct SimulationResult {
  Trajectory trajectory;
  RunSummary summary;
};

/// Runs one simulation and writes manifest, config echo, snapshot CSVs and
/// the optional heatmap and dispersion report into `directory`.
SimulationResult run_simulation(const RunConfig& config, const std::string& directory, const std::string& name = "");

/// Kernel description used in dispersion report headers.
std::string kernel_line(const ModelParams& params, bool local);

/// Dispersion sweep for the configured model, written as dispersion.csv
/// with manifest and config echo.
InstabilityReport run_stability(const RunConfig& config, const std::string& directory);

struct KineticResult {
  MacroCoefficients coefficients;
  Field histogram;
  std::optional<Field> pde;
  std::optional<double> l1_error;
  double mean_velocity = 0.0;
};

/// Solution of u_t = D u_xx from a unit mass in the cell containing x0,
/// no-flux walls, integrated with the PDE solver.
Field pure_diffusion_reference(const Grid1D& grid, double D, double x0, double t_end);

/// Particle run from a point cloud at x0 against the frozen initial acidity;
/// compared with the pure-diffusion PDE when the bias is off.
KineticResult run_kinetic(const RunConfig& config, const std::string& directory, int threads);

/// Named preset configurations: fig1, fig2, fig3, dispersion-table.
std::vector<std::pair<std::string, RunConfig>> suite_configs(const std::string& name);

/// Runs every entry of a preset (one worker per entry, up to `threads`),
/// each in `<out_root>/<entry>`, and writes `<out_root>/summary.csv`.
std::vector<RunSummary> run_experiment_suite(const std::string& name, const std::string& out_root, int threads);

}  // namespace invasion
