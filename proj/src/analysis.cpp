#include "invasion/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fftw3.h>

#include "fftw_lock.hpp"
#include "invasion/kernels.hpp"
#include "invasion/stability.hpp"

namespace invasion {

namespace {

constexpr double kUFloor = 1e-30;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct SampleGrid {
  std::vector<double> u;
  std::vector<double> h;
};

SampleGrid assg_grid(double h_star, double H, double U, int n, double u_min, int near_one_digits) {
  SampleGrid s;
  const double log_lo = std::log(u_min);
  for (int i = 0; i <= n; ++i) s.u.push_back(std::exp(log_lo * (1.0 - double(i) / n)));
  if (U > 1.0) {
    for (int i = 1; i <= n; ++i) s.u.push_back(1.0 + (U - 1.0) * i / n);
  }
  for (int k = 1; k <= near_one_digits; ++k) {
    const double e = std::pow(10.0, -k);
    s.u.push_back(1.0 - e);
    if (1.0 + e <= U) s.u.push_back(1.0 + e);
  }
  for (int i = 0; i <= n; ++i) s.h.push_back(H * i / n);
  s.h.push_back(h_star);
  for (int k = 1; k <= near_one_digits; ++k) {
    for (double sgn : {-1.0, 1.0}) {
      const double h = h_star + sgn * std::pow(10.0, -k);
      if (h >= 0.0 && h <= H) s.h.push_back(h);
    }
  }
  return s;
}

// Smallest C_U making the inequality hold on the sample grid for this C_H;
// infinity when a point with positive slack has a vanishing weight.
double minimal_cu(const SourceSpec& g, double h_star, double alpha, double beta, double C_H, const SampleGrid& s) {
  double cu = 0.0;
  for (double u : s.u) {
    const double weight = std::pow(u, alpha - 1.0) * std::pow(std::pow(u, beta) - 1.0, 2);
    for (double h : s.h) {
      const double d = h - h_star;
      const double lhs = eval_g(g, u, h) * d;
      const double excess = lhs + C_H * d * d;
      if (excess <= 1e-12 * (1.0 + std::abs(lhs) + C_H * d * d)) continue;
      if (weight <= 0.0) return kInf;
      cu = std::max(cu, excess / weight);
    }
  }
  return cu;
}

}  // namespace

double a_of_s(double s, double beta) {
  if (!(s > 0.0)) throw DomainError("a(s) requires s > 0");
  return (s - std::log(s) - 1.0) / beta;
}

AssgFit check_assg(const SourceSpec& g, double h_star, double H, double U, double alpha, double beta,
                   int sample_density) {
  const int n = std::max(sample_density, 10);
  const SampleGrid coarse = assg_grid(h_star, H, U, n, 1e-6, 6);
  const SampleGrid fine = assg_grid(h_star, H, U, 2 * n, 1e-9, 9);

  AssgFit fit;
  for (int k = 10; k >= -20; --k) {
    const double C_H = std::ldexp(1.0, k);
    const double cu = minimal_cu(g, h_star, alpha, beta, C_H, coarse);
    if (!std::isfinite(cu)) continue;
    const double cu_fine = minimal_cu(g, h_star, alpha, beta, C_H, fine);
    if (!std::isfinite(cu_fine) || cu_fine > 1.5 * cu + 1e-12) continue;
    fit.holds = C_H >= 1e-6;
    fit.C_H = C_H;
    fit.C_U = cu_fine;
    break;
  }
  if (!fit.holds) {
    fit.C_H = 0.0;
    fit.C_U = 0.0;
    fit.detail = "no C_H >= 1e-6 with a bounded C_U on the sample grid";
  }
  return fit;
}

LyapunovParams make_lyapunov_params(const LyapunovInputs& in) {
  LyapunovParams lp;
  lp.h_star = in.h_star;
  lp.C_H = in.C_H;
  lp.C_U = in.C_U;
  lp.U = in.U;

  const double Ub = std::pow(in.U, in.beta);
  const double spread = in.diameter * in.beta * Ub;
  lp.C_B = (in.lipschitz_mu * in.H + in.mu_at_zero) * spread * spread / (4.0 * in.D1);
  const double growth_term = in.C_bd * ((in.beta - 1.0) * Ub + 1.0);
  double coupling = 0.0;
  if (in.C_U > 0.0) {
    const double denom = 4.0 * in.delta * in.eta * in.volume * in.D_H * in.D1;
    coupling = denom > 0.0 ? in.C_U * growth_term / denom : kInf;
  }
  lp.C_A = coupling - 1.0 - lp.C_B;

  auto fail = [&](const char* why) {
    lp.valid = false;
    lp.reason = std::string("asymptotic theory not applicable: ") + why;
    return lp;
  };
  if (!(lp.C_B > 0.0 && lp.C_B < 1.0)) return fail("C_B outside (0, 1)");
  if (!(lp.C_A < 0.0)) return fail("C_A >= 0");
  const double disc = lp.C_A * lp.C_A / 4.0 - lp.C_B;
  if (!(disc > 0.0)) return fail("C_A^2 <= 4 C_B");
  const double r = std::sqrt(disc);
  if (!(lp.C_B < -lp.C_A / 2.0 + r)) return fail("C_B above the admissible interval");
  const double lo = std::max(-lp.C_A / 2.0 - r, lp.C_B);
  const double hi = std::min(-lp.C_A / 2.0 + r, 1.0);
  if (!(lo < hi)) return fail("empty interval for epsilon");

  lp.epsilon = 0.5 * (lo + hi);
  lp.C_eqh = lp.epsilon * growth_term * growth_term / (4.0 * in.D1 * in.D_H * (lp.epsilon - lp.C_B));
  lp.valid = true;
  return lp;
}

LyapunovParams lyapunov_params_for(const ModelParams& params, const Grid1D& grid, double U) {
  LyapunovInputs in;
  in.U = std::max(1.0, U);
  in.beta = params.beta;
  in.H = params.source.H;
  in.D_H = params.D_H;
  in.volume = grid.domain().length();
  in.diameter = grid.domain().length();

  const Field d = diffusion_field(params.diffusion, grid);
  in.D1 = *std::min_element(d.begin(), d.end());
  in.C_bd = *std::max_element(d.begin(), d.end());

  const GrowthBounds gb = sample_growth(params.growth, in.H);
  in.lipschitz_mu = gb.lipschitz;
  in.mu_at_zero = gb.at_zero;
  in.delta = params.growth.delta > 0.0 ? params.growth.delta : gb.min_value;

  if (params.kernel.family == KernelFamily::dirac) {
    in.eta = 0.0;
  } else {
    double eta = kInf;
    constexpr int kSamples = 4000;
    for (int i = 0; i <= kSamples; ++i) {
      eta = std::min(eta, kernel_eval(params.kernel, in.diameter * (2.0 * i / kSamples - 1.0)));
    }
    in.eta = eta;
  }

  LyapunovParams lp;
  try {
    in.h_star = find_h_star(params.source).h_star;
  } catch (const NoEquilibrium& e) {
    lp.reason = std::string("asymptotic theory not applicable: ") + e.what();
    return lp;
  }
  const AssgFit fit = check_assg(params.source, in.h_star, in.H, in.U, params.alpha, params.beta);
  if (!fit.holds) {
    lp.h_star = in.h_star;
    lp.U = in.U;
    lp.reason = "asymptotic theory not applicable: structural assumption on g fails (" + fit.detail + ")";
    return lp;
  }
  in.C_H = fit.C_H;
  in.C_U = fit.C_U;
  return make_lyapunov_params(in);
}

double lyapunov(const State& state, const LyapunovParams& lp, double beta, const Grid1D& grid, long* floored) {
  double sum = 0.0;
  for (size_t i = 0; i < state.u.size(); ++i) {
    double u = state.u[i];
    if (u < kUFloor) {
      u = kUFloor;
      if (floored) ++*floored;
    }
    const double dh = state.h[i] - lp.h_star;
    sum += a_of_s(std::pow(u, beta), beta) + 0.5 * lp.C_eqh * dh * dh;
  }
  return sum * grid.dx();
}

ConvergenceMetrics convergence_metrics(const State& state, double c, double h_star) {
  ConvergenceMetrics m;
  for (double u : state.u) m.sup_u = std::max(m.sup_u, std::abs(u - c));
  for (double h : state.h) m.sup_h = std::max(m.sup_h, std::abs(h - h_star));
  return m;
}

PatternReport pattern_metrics(const Field& u, const Grid1D& grid) {
  PatternReport rep;
  const int n = static_cast<int>(u.size());
  if (n == 0) return rep;
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= n;
  std::vector<double> dev(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    dev[i] = u[i] - mean;
    rep.spatial_variance += dev[i] * dev[i];
  }
  rep.spatial_variance /= n;

  for (int i = n - 1; i >= 0; --i) {
    if (u[static_cast<size_t>(i)] > 0.5) {
      rep.front_position = grid.node(i);
      break;
    }
  }

  // Round-off in the mean leaves a residue of order eps^2 * mean^2 on flat fields.
  if (rep.spatial_variance <= 1e-24 * std::max(1.0, mean * mean) || n < 2) return rep;

  // DCT-II on cell centers: mode m is cos(pi m (x + a) / (2a)).
  std::vector<double> coeffs(u.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_r2r_1d(n, dev.data(), coeffs.data(), FFTW_REDFT10, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  int best = 1;
  for (int m = 2; m < n; ++m) {
    if (std::abs(coeffs[static_cast<size_t>(m)]) > std::abs(coeffs[static_cast<size_t>(best)])) best = m;
  }
  rep.dominant_mode = 0.5 * best;
  rep.dominant_wavenumber = std::numbers::pi * best / (2.0 * grid.half_length());
  return rep;
}

std::optional<double> detect_blowup(const Trajectory& traj, double threshold) {
  std::optional<double> t;
  for (const State& s : traj.snapshots) {
    if (!s.u.empty() && *std::max_element(s.u.begin(), s.u.end()) > threshold) {
      t = s.t;
      break;
    }
  }
  for (const Event& e : traj.events) {
    if (e.kind == EventKind::blow_up) {
      if (!t || e.t < *t) t = e.t;
      break;
    }
  }
  return t;
}

}  // namespace invasion
