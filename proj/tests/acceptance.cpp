// Acceptance run: one PASS/FAIL line per criterion, with the measured
// quantities and wall time. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "invasion/analysis.hpp"
#include "invasion/config.hpp"
#include "invasion/kinetic.hpp"
#include "invasion/output.hpp"
#include "invasion/stability.hpp"
#include "invasion/suite.hpp"
#include "manufactured.hpp"

using namespace invasion;
namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "invasion_acceptance";

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string timing;
  if (budget_s > 0.0) {
    std::ostringstream s;
    s << "; " << secs << " s of " << budget_s << " s";
    timing = s.str();
    if (secs > budget_s) {
      o.pass = false;
      timing += " (over budget)";
    }
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s%s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Linearized symbol eigenproblem, written out independently of the analyzer.
struct Symbol {
  double tr, det;
  std::complex<double> l1, l2;
};

Symbol symbol(double d, double DH, double beta, double mu, double gu, double gh, double k, double F) {
  const double a11 = -d * k * k - beta * mu * F, a12 = -d * k * k, a21 = gu, a22 = -DH * k * k + gh;
  Symbol s{a11 + a22, a11 * a22 - a12 * a21, {}, {}};
  const auto r = std::sqrt(std::complex<double>(s.tr * s.tr - 4.0 * s.det));
  s.l1 = 0.5 * (s.tr + r);
  s.l2 = 0.5 * (s.tr - r);
  return s;
}

struct RandomDraw {
  ModelParams p;
  Equilibrium eq;
};

// Parameters satisfying d_u g >= 0, d_h g < 0, mu(h*) > 0.
RandomDraw draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.01, 10.0), gu(0.0, 5.0), gh(-5.0, -1e-3), mu(1e-3, 200.0);
  RandomDraw r;
  r.p.kernel.family = KernelFamily::dirac;
  r.p.diffusion.value = pos(rng);
  r.p.D_H = pos(rng);
  r.p.beta = pos(rng) * 3.0;
  r.eq.dg_du = gu(rng);
  r.eq.dg_dh = gh(rng);
  r.eq.mu = mu(rng);
  r.eq.h_star = 1.0;
  return r;
}

std::string read_without_wall_clock(const fs::path& p) {
  std::istringstream in(read_text(p.string()));
  std::string out, line;
  while (std::getline(in, line)) {
    if (line.rfind("wall_clock_seconds", 0) == 0) continue;
    out += line + '\n';
  }
  return out;
}

// Every file of two run directories, byte for byte; the manifest wall-clock
// line and the output directory echo are the only run-specific lines.
bool same_tree(const fs::path& a, const fs::path& b, std::string* why) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  size_t count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
  if (names.size() != count_b) {
    *why = "file count differs";
    return false;
  }
  for (const std::string& n : names) {
    std::string x, y;
    if (n == "manifest.txt" || n == "config.ini") {
      x = read_without_wall_clock(a / n);
      y = read_without_wall_clock(b / n);
      auto strip = [&](std::string& s, const fs::path& dir) {
        for (size_t pos; (pos = s.find(dir.string())) != std::string::npos;) s.replace(pos, dir.string().size(), "<dir>");
      };
      strip(x, a);
      strip(y, b);
    } else {
      x = read_text((a / n).string());
      y = read_text((b / n).string());
    }
    if (x != y) {
      *why = n + " differs";
      return false;
    }
  }
  return true;
}

RunConfig config(const std::string& text) { return parse_config(text); }

const char* kGlobalExistence =
    "[model]\nalpha = 2\nbeta = 1\n[model.growth]\nmu0 = 1\n[model.kernel]\nfamily = logistic\n"
    "[domain]\na = 20\nn_cells = 400\n[initial]\nform = paper\n[integrator]\nt_end = 50\n";

const char* kBlowUp =
    "[model]\nalpha = 8.15\nbeta = 1\nblow_up_study = true\n[model.growth]\nmu0 = 1\n"
    "[model.kernel]\nfamily = uniform\nrho = 1\n[domain]\na = 20\nn_cells = 400\n[integrator]\nt_end = 50\n";

// Homogeneous state with a small bump; acidity just below its equilibrium.
std::string pattern_config(const std::string& family) {
  return "[model]\nalpha = 2\nbeta = 20\n[model.growth]\nmu0 = 100\n[model.kernel]\nfamily = " + family +
         "\nrho = 1\n[domain]\na = 20\nn_cells = 400\n[initial]\nform = perturbed\nu_value = 1\n"
         "bump_amplitude = 0.01\nh_value = 0.99\n[integrator]\nt_end = 200\n[output]\nsnapshot_stride = 10\n";
}

double max_variance(const Trajectory& t, const Grid1D& g, double* at = nullptr) {
  double m = 0.0;
  for (const State& s : t.snapshots) {
    const double v = pattern_metrics(s.u, g).spatial_variance;
    if (v > m) {
      m = v;
      if (at) *at = s.t;
    }
  }
  return m;
}

}  // namespace

int main() {
  fs::remove_all(kOut);
  fs::create_directories(kOut);

  report(1, 1.0, [] {
    ModelParams p;
    p.kernel.family = KernelFamily::dirac;
    const Equilibrium eq = make_equilibrium(p);
    const auto [l1, l2] = local_eigenvalues(eq, p);
    const DispersionPoint d = dispersion_local(eq, p, 1.0);
    // Oracle: mu(1) = 1/2, d_h g = -u = -1, d_u g = 1 - h = 0 at (1, 1).
    const Symbol o0 = symbol(1.0, 1.0, 1.0, 0.5, 0.0, -1.0, 0.0, 1.0);
    const Symbol o1 = symbol(1.0, 1.0, 1.0, 0.5, 0.0, -1.0, 1.0, 1.0);
    const double tol = 1e-12;
    const double err = std::max({std::abs(eq.h_star - 1.0), std::abs(std::max(l1, l2) - o0.l1.real()),
                                 std::abs(std::min(l1, l2) - o0.l2.real()), std::abs(d.trace - o1.tr),
                                 std::abs(d.det - o1.det), std::abs(o1.tr + 3.5), std::abs(o1.det - 3.0)});
    return Outcome{err <= tol, "h*=" + fmt(eq.h_star) + " eig=(" + fmt(l1) + "," + fmt(l2) + ") tr=" + fmt(d.trace) +
                                   " det=" + fmt(d.det) + " max err=" + fmt(err)};
  });

  report(2, 10.0, [] {
    std::mt19937_64 rng(2024);
    int unstable = 0;
    for (int i = 0; i < 200; ++i) {
      const RandomDraw r = draw(rng);
      if (!classify(r.p, r.eq, 20.0, 200, true).stable) ++unstable;
    }
    return Outcome{unstable == 0, "200 draws, z<=200, unstable draws=" + std::to_string(unstable)};
  });

  report(3, 10.0, [] {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> sig(0.1, 3.0);
    int unstable = 0, draws = 0;
    for (KernelFamily fam : {KernelFamily::gaussian, KernelFamily::logistic}) {
      for (int i = 0; i < 200; ++i, ++draws) {
        RandomDraw r = draw(rng);
        r.p.kernel = {fam, 1.0, sig(rng)};
        if (!classify(r.p, r.eq, 20.0, 200).stable) ++unstable;
      }
    }
    return Outcome{unstable == 0, std::to_string(draws) + " draws (gaussian, logistic), unstable=" +
                                      std::to_string(unstable)};
  });

  report(4, 30.0, [] {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    const std::vector<KernelSpec> kernels = {{KernelFamily::uniform, 1.0, 1.0},
                                             {KernelFamily::logistic, 1.0, 1.0},
                                             {KernelFamily::gaussian, 1.0, 0.7},
                                             {KernelFamily::mexican_hat, 1.0, 0.5},
                                             {KernelFamily::epanechnikov, 2.0, 1.0}};
    double worst = 0.0;
    for (int n : {100, 400, 1000}) {
      const Grid1D g(Domain1D{20.0}, n);
      for (const KernelSpec& k : kernels) {
        const KernelStencil st = discretize(k, g, true);
        for (int rep = 0; rep < 100; ++rep) {
          Field f(static_cast<size_t>(n));
          for (double& v : f) v = U(rng);
          const Field a = convolve_direct(st, f, g), b = convolve_spectral(st, f, g);
          for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        }
      }
    }
    return Outcome{worst <= 1e-10, "max |direct - spectral| = " + fmt(worst)};
  });

  report(5, 30.0, [] {
    const auto o = manufactured::observed_orders(20.0, 100);
    const bool ok = std::abs(o.diffusion_coarse - 2.0) <= 0.2 && std::abs(o.diffusion_fine - 2.0) <= 0.2 &&
                    o.taxis_coarse >= 0.9 && o.taxis_fine >= 0.9;
    return Outcome{ok, "diffusion orders " + fmt(o.diffusion_coarse) + ", " + fmt(o.diffusion_fine) +
                           "; taxis orders " + fmt(o.taxis_coarse) + ", " + fmt(o.taxis_fine)};
  });

  // Criterion 6 run is reused by 9 and 11.
  const RunConfig c6 = config(kGlobalExistence);
  SimulationResult r6;
  report(6, 120.0, [&] {
    r6 = run_simulation(c6, (kOut / "c6").string(), "c6");
    const State& last = r6.trajectory.snapshots.back();
    const ConvergenceMetrics m = convergence_metrics(last, 1.0, 1.0);
    const bool blew = r6.trajectory.blow_up_time().has_value();
    const bool ok = !blew && m.sup_u < 0.1 && m.sup_h < 0.1;
    return Outcome{ok, std::string("blow-up=") + (blew ? "yes" : "no") + " t=" + fmt(last.t) +
                           " sup|u-1|=" + fmt(m.sup_u) + " sup|h-1|=" + fmt(m.sup_h) +
                           " max u=" + fmt(*std::max_element(last.u.begin(), last.u.end()))};
  });

  report(7, 120.0, [] {
    const RunConfig c = config(kBlowUp);
    const SimulationResult r = run_simulation(c, (kOut / "c7").string(), "c7");
    const auto t = r.trajectory.blow_up_time();
    const State& last = r.trajectory.snapshots.back();
    const auto it = std::max_element(last.u.begin(), last.u.end());
    const double x = c.grid().node(static_cast<int>(it - last.u.begin()));
    const bool ok = t && std::abs(x) <= 7.0;
    return Outcome{ok, std::string("blow-up ") + (t ? "at t=" + fmt(*t) : "not detected") + "; final t=" + fmt(last.t) +
                           " max u=" + fmt(*it) + " at x=" + fmt(x)};
  });

  const RunConfig c8 = config(pattern_config("uniform"));
  SimulationResult r8;
  report(8, 300.0, [&] {
    r8 = run_simulation(c8, (kOut / "c8").string(), "c8");
    const RunConfig twin = config(pattern_config("dirac"));
    const SimulationResult rt = run_simulation(twin, (kOut / "c8_local").string(), "c8_local");
    double at = 0.0;
    const double nonlocal = max_variance(r8.trajectory, c8.grid(), &at);
    const double local = max_variance(rt.trajectory, twin.grid());
    const bool ok = nonlocal > 1e-3 && local < 1e-4 && !r8.trajectory.blow_up_time();
    return Outcome{ok, "nonlocal max variance=" + fmt(nonlocal) + " (t=" + fmt(at) + "), local twin max variance=" +
                           fmt(local)};
  });

  report(9, 0.0, [&] {
    if (r6.trajectory.snapshots.empty()) return Outcome{false, "criterion 6 run unavailable"};
    double U = 1.0;
    for (const State& s : r6.trajectory.snapshots) U = std::max(U, *std::max_element(s.u.begin(), s.u.end()));
    const LyapunovParams lp = lyapunov_params_for(c6.model, c6.grid(), U);
    if (!lp.valid) return Outcome{false, "LyapunovParams not valid: " + lp.reason};
    const auto& snaps = r6.trajectory.snapshots;
    const size_t start = snaps.size() * 4 / 5;
    double worst = 0.0;
    for (size_t i = start + 1; i < snaps.size(); ++i) {
      const double a = lyapunov(snaps[i - 1], lp, c6.model.beta, c6.grid());
      const double b = lyapunov(snaps[i], lp, c6.model.beta, c6.grid());
      worst = std::max(worst, (b - a) / (1.0 + std::abs(a)));
    }
    return Outcome{worst <= 1e-8, "max relative increase over tail = " + fmt(worst)};
  });

  // Kinetic diffusion limit; the fixed-seed rerun feeds criterion 11.
  const std::string kinetic_text =
      "[run]\nmode = kinetic\nseed = 12345\n[domain]\na = 20\nn_cells = 400\n[kinetic]\nparticles = 100000\n"
      "epsilon = 0.1\nt_end = 1\nlambda0 = 1\ns1 = 0\ns2 = 1\n";
  report(10, 180.0, [&] {
    const RunConfig kc = config(kinetic_text);
    const Grid1D g = kc.grid();
    const KineticResult base = run_kinetic(kc, (kOut / "c10").string(), 1);
    const double D = base.coefficients.D;
    const Field pde = pure_diffusion_reference(g, D, 0.0, 1.0);
    const FrozenAcid flat(Field(static_cast<size_t>(g.n_cells()), 0.0), g);
    std::vector<double> medians;
    for (double eps : {0.4, 0.2, 0.1}) {
      TurningParams tp = kc.kinetic.turning;
      tp.epsilon = eps;
      std::vector<double> errs;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ParticleEnsemble e0 =
            point_cloud(100000, 0.0, g.half_length(), kc.kinetic.equilibrium, kc.kinetic.velocities, seed);
        const ParticleEnsemble e = simulate(e0, kc.kinetic.equilibrium, kc.kinetic.velocities, tp, flat, 1.0);
        errs.push_back(compare_to_pde(e, pde, g));
      }
      std::nth_element(errs.begin(), errs.begin() + 5, errs.end());
      const double hi = errs[5];
      std::nth_element(errs.begin(), errs.begin() + 4, errs.begin() + 5);
      medians.push_back(0.5 * (hi + errs[4]));
    }
    const double l1 = base.l1_error.value_or(1e9);
    const bool monotone = medians[1] <= medians[0] && medians[2] <= medians[1];
    const bool ok = std::abs(D - 1.0 / 3.0) < 1e-14 && l1 < 0.05 && monotone;
    return Outcome{ok, "D=" + fmt(D) + " L1(eps=0.1, N=1e5)=" + fmt(l1) + "; median L1 over eps {0.4,0.2,0.1} = " +
                           fmt(medians[0]) + ", " + fmt(medians[1]) + ", " + fmt(medians[2])};
  });

  report(11, 0.0, [&] {
    std::string why;
    run_simulation(c6, (kOut / "c6_again").string(), "c6");
    if (!same_tree(kOut / "c6", kOut / "c6_again", &why)) return Outcome{false, "criterion 6 rerun: " + why};
    run_simulation(c8, (kOut / "c8_again").string(), "c8");
    if (!same_tree(kOut / "c8", kOut / "c8_again", &why)) return Outcome{false, "criterion 8 rerun: " + why};
    run_kinetic(config(kinetic_text), (kOut / "c10_again").string(), 1);
    if (!same_tree(kOut / "c10", kOut / "c10_again", &why)) return Outcome{false, "criterion 10 rerun: " + why};
    return Outcome{true, "runs 6, 8 and 10 reproduce byte for byte"};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
