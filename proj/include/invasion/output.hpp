#pragma once

#include <string>
#include <vector>

#include "invasion/core.hpp"
#include "invasion/solver.hpp"
#include "invasion/stability.hpp"

namespace invasion {

/// CSV `x,u,h`, one row per cell, 17 significant digits, LF endings.
std::string format_snapshot(const State& state, const Grid1D& grid);
void write_snapshot(const State& state, const Grid1D& grid, const std::string& path);

struct SnapshotData {
  Field x;
  Field u;
  Field h;
};

SnapshotData read_snapshot(const std::string& path);

/// Binary PGM (P5, maxval 65535, big-endian samples): one row per snapshot,
/// top row t = 0, u mapped linearly from [0, max over the trajectory].
/// Returns that maximum; a sidecar `<path>.scale.csv` records the scale.
double write_heatmap(const Trajectory& traj, const std::string& path);

/// Dispersion table plus a summary block (verdict, critical wavenumbers,
/// notes). `kernel_line` names the kernel used for the Fourier factor.
std::string format_dispersion_report(const InstabilityReport& report, const std::string& kernel_line);
void write_dispersion_report(const InstabilityReport& report, const std::string& kernel_line,
                             const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Creates the directory (and parents); IoError on failure.
void ensure_directory(const std::string& path);

}  // namespace invasion
