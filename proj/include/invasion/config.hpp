#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invasion/core.hpp"
#include "invasion/kinetic.hpp"
#include "invasion/model.hpp"
#include "invasion/solver.hpp"

namespace invasion {

enum class RunMode { simulate, stability, kinetic, suite };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct OutputConfig {
  std::string directory = "out";
  /// Write every k-th stored snapshot as CSV (the last one always).
  int snapshot_stride = 1;
  bool heatmap = true;
  /// Also write the dispersion report of the configured model in simulate mode.
  bool dispersion = false;
};

struct StabilityConfig {
  int z_max = 200;
  /// Use F = 1 at every wavenumber (local model).
  bool local = false;
};

struct KineticConfig {
  VelocitySpace1D velocities;
  EquilibriumDist equilibrium;
  TurningParams turning;
  long particles = 100000;
  double t_end = 1.0;
  double x0 = 0.0;
};

/// Full parameterization of one run.
struct RunConfig {
  RunMode mode = RunMode::simulate;
  double half_length = 20.0;
  int n_cells = 400;
  ModelParams model;
  InitialCondition ic;
  IntegratorConfig integrator;
  OutputConfig output;
  StabilityConfig stability;
  KineticConfig kinetic;
  std::uint64_t seed = 0;

  /// Filled by validation (blow-up study, theory flags).
  std::vector<std::string> warnings;

  Grid1D grid() const { return Grid1D(Domain1D{half_length}, n_cells); }
};

/// Parses the sectioned key = value format. Unknown sections or keys,
/// malformed values, and missing tables for tabulated forms all throw
/// ConfigError. The result is validated.
RunConfig parse_config(const std::string& text);

/// Checks every sub-configuration, refreshing `warnings`.
void validate(RunConfig& config);

/// Canonical text with every key and its resolved value; parse(echo(c))
/// reproduces c.
std::string echo_config(const RunConfig& config);

RunConfig load_config(const std::string& path);

}  // namespace invasion
