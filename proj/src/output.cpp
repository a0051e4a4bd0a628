#include "invasion/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace invasion {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec || !std::filesystem::is_directory(path)) {
    throw IoError("cannot create directory '" + path + "': " + ec.message());
  }
}

std::string format_snapshot(const State& state, const Grid1D& grid) {
  std::string out = "x,u,h\n";
  for (int i = 0; i < grid.n_cells(); ++i) {
    const size_t k = static_cast<size_t>(i);
    out += g17(grid.node(i));
    out += ',';
    out += g17(state.u[k]);
    out += ',';
    out += g17(state.h[k]);
    out += '\n';
  }
  return out;
}

void write_snapshot(const State& state, const Grid1D& grid, const std::string& path) {
  write_text(path, format_snapshot(state, grid));
}

SnapshotData read_snapshot(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "x,u,h") throw IoError("'" + path + "': missing x,u,h header");
  SnapshotData d;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    double x, u, h;
    char c1, c2;
    std::istringstream ls(line);
    if (!(ls >> x >> c1 >> u >> c2 >> h) || c1 != ',' || c2 != ',') {
      throw IoError("'" + path + "': malformed row " + std::to_string(row));
    }
    d.x.push_back(x);
    d.u.push_back(u);
    d.h.push_back(h);
  }
  return d;
}

double write_heatmap(const Trajectory& traj, const std::string& path) {
  if (traj.snapshots.size() < 2) throw ConfigError("heatmap needs at least two snapshots");
  const size_t width = traj.snapshots.front().u.size();
  double u_max = 0.0;
  for (const State& s : traj.snapshots) {
    for (double v : s.u) {
      if (std::isfinite(v)) u_max = std::max(u_max, v);
    }
  }
  std::string bytes = "P5\n" + std::to_string(width) + " " + std::to_string(traj.snapshots.size()) + "\n65535\n";
  bytes.reserve(bytes.size() + 2 * width * traj.snapshots.size());
  for (const State& s : traj.snapshots) {
    for (double v : s.u) {
      double level = u_max > 0.0 && std::isfinite(v) ? std::clamp(v / u_max, 0.0, 1.0) : 0.0;
      if (!std::isfinite(v) && v > 0.0) level = 1.0;
      const auto q = static_cast<unsigned>(std::lround(level * 65535.0));
      bytes += static_cast<char>((q >> 8) & 0xff);
      bytes += static_cast<char>(q & 0xff);
    }
  }
  write_text(path, bytes);
  write_text(path + ".scale.csv", "quantity,black,white\nu,0," + g17(u_max) + "\n");
  return u_max;
}

std::string format_dispersion_report(const InstabilityReport& report, const std::string& kernel_line) {
  std::string out = "# kernel: " + kernel_line + "\n";
  out += "k,trace,det,re_lambda1,im_lambda1,re_lambda2,im_lambda2,class\n";
  for (const DispersionPoint& p : report.modes) {
    out += g17(p.k) + ',' + g17(p.trace) + ',' + g17(p.det) + ',' + g17(p.lambda1.real()) + ',' +
           g17(p.lambda1.imag()) + ',' + g17(p.lambda2.real()) + ',' + g17(p.lambda2.imag()) + ',' +
           to_string(p.classification) + (p.marginal ? "-marginal" : "") + '\n';
  }
  out += "# verdict=" + std::string(report.stable ? "stable" : "unstable") + "\n";
  std::string unstable;
  for (const DispersionPoint& p : report.modes) {
    if (p.classification != ModeClass::stable) {
      if (!unstable.empty()) unstable += ';';
      unstable += g17(p.k) + ':' + to_string(p.classification);
    }
  }
  out += "# unstable_modes=" + unstable + "\n";
  std::string crit;
  for (const CriticalPoint& c : report.critical) {
    if (!crit.empty()) crit += ';';
    crit += g17(c.k) + ':' + c.quantity;
  }
  out += "# critical_k=" + crit + "\n";
  for (const std::string& note : report.notes) out += "# note: " + note + "\n";
  return out;
}

void write_dispersion_report(const InstabilityReport& report, const std::string& kernel_line,
                             const std::string& path) {
  write_text(path, format_dispersion_report(report, kernel_line));
}

}  // namespace invasion
