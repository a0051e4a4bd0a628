#include "invasion/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace invasion {

namespace {

constexpr double kMarginalBand = 1e-10;
constexpr double kCriticalTol = 1e-10;
constexpr int kSamplesPerMode = 8;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

RootResult find_h_star(const SourceSpec& g, double h_hi) {
  auto f = [&](double h) { return eval_g(g, 1.0, h); };
  const double f0 = f(0.0);
  if (f0 == 0.0) throw NoEquilibrium("g(1, 0) = 0: no positive equilibrium acidity");
  h_hi = std::max(h_hi, 1e-6);
  while (sign(f(h_hi)) == sign(f0)) {
    h_hi *= 2.0;
    if (h_hi > 1e6) throw NoEquilibrium("g(1, h) keeps one sign on [0, 1e6]: no equilibrium");
  }
  double lo = 0.0, hi = h_hi;
  double root = hi;
  if (f(hi) != 0.0) {
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      root = mid;
      if (std::abs(fm) <= 1e-12 && hi - lo < 1e-12 * std::max(1.0, mid)) break;
      if (fm == 0.0) break;
      if (sign(fm) == sign(f0)) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
        root = std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
        break;
      }
    }
  }
  RootResult r;
  r.h_star = root;
  // Uniqueness probe: sign changes of g(1, .) over the bracket.
  int changes = 0;
  int prev = sign(f0);
  constexpr int kScan = 1000;
  for (int i = 1; i <= kScan; ++i) {
    const int s = sign(f(h_hi * i / kScan));
    if (s != 0 && s != prev) {
      if (prev != 0) ++changes;
      prev = s;
    }
  }
  r.extra_roots = std::max(0, changes - 1);
  return r;
}

Equilibrium make_equilibrium(const ModelParams& params) {
  const RootResult root = find_h_star(params.source);
  Equilibrium eq;
  eq.u_star = 1.0;
  eq.h_star = root.h_star;
  eq.extra_roots = root.extra_roots;
  eq.dg_du = eval_g_du(params.source, 1.0, eq.h_star);
  eq.dg_dh = eval_g_dh(params.source, 1.0, eq.h_star);
  eq.mu = eval_mu(params.growth, eq.h_star);
  eq.dmu = eval_mu_derivative(params.growth, eq.h_star);
  return eq;
}

std::pair<double, double> local_eigenvalues(const Equilibrium& eq, const ModelParams& params) {
  return {-params.beta * eq.mu, eq.dg_dh};
}

std::string to_string(ModeClass c) {
  switch (c) {
    case ModeClass::stable: return "stable";
    case ModeClass::turing: return "turing";
    case ModeClass::hopf: return "hopf";
    case ModeClass::wave: return "wave";
  }
  return "?";
}

double constant_diffusion(const ModelParams& params) {
  if (params.diffusion.form != DiffusionForm::constant) {
    throw ConfigError("dispersion analysis requires a spatially constant diffusion coefficient");
  }
  return params.diffusion.value;
}

DispersionPoint dispersion_point(const Equilibrium& eq, const ModelParams& params, double k, double F) {
  const double d = constant_diffusion(params);
  const double DH = params.D_H;
  const double k2 = k * k;
  const double bmF = params.beta * eq.mu * F;

  DispersionPoint p;
  p.k = k;
  p.trace = -(d + DH) * k2 - bmF + eq.dg_dh;
  p.det = d * DH * k2 * k2 + (d * (eq.dg_du - eq.dg_dh) + bmF * DH) * k2 - bmF * eq.dg_dh;

  const double disc = p.trace * p.trace - 4.0 * p.det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    // Larger-magnitude root first, the other from the product.
    const double big = 0.5 * (p.trace + (p.trace >= 0.0 ? root : -root));
    const double small = big != 0.0 ? p.det / big : 0.0;
    p.lambda1 = std::max(big, small);
    p.lambda2 = std::min(big, small);
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    p.lambda1 = {0.5 * p.trace, im};
    p.lambda2 = {0.5 * p.trace, -im};
  }

  if (p.det < 0.0) {
    p.classification = ModeClass::turing;
  } else if (p.trace >= -kMarginalBand) {
    p.classification = k == 0.0 ? ModeClass::hopf : ModeClass::wave;
    p.marginal = std::abs(p.trace) <= kMarginalBand;
  }
  return p;
}

DispersionPoint dispersion_local(const Equilibrium& eq, const ModelParams& params, double k) {
  return dispersion_point(eq, params, k, 1.0);
}

DispersionPoint dispersion_nonlocal(const Equilibrium& eq, const ModelParams& params, double k) {
  return dispersion_point(eq, params, k, fourier_factor(params.kernel, k));
}

double turing_threshold(const Equilibrium& eq, const ModelParams& params, double k) {
  const double d = constant_diffusion(params);
  const double k2 = k * k;
  return -d * k2 / (params.beta * eq.mu) * (1.0 + eq.dg_du / (params.D_H * k2 - eq.dg_dh));
}

double trace_threshold(const Equilibrium& eq, const ModelParams& params, double k) {
  const double d = constant_diffusion(params);
  return (eq.dg_dh - (d + params.D_H) * k * k) / (params.beta * eq.mu);
}

InstabilityReport classify(const ModelParams& params, const Equilibrium& eq, double half_length, int z_max,
                           bool local) {
  if (z_max < 1) throw ConfigError("z_max must be at least 1");
  auto F = [&](double k) { return local ? 1.0 : fourier_factor(params.kernel, k); };
  auto at = [&](double k) { return dispersion_point(eq, params, k, F(k)); };

  InstabilityReport rep;
  const double dk = std::numbers::pi / half_length;
  rep.modes.reserve(static_cast<size_t>(z_max + 1));
  for (int z = 0; z <= z_max; ++z) {
    rep.modes.push_back(at(dk * z));
    if (rep.modes.back().classification != ModeClass::stable) rep.stable = false;
  }

  // Continuous-k zero crossings of det and trace, refined by bisection.
  const int samples = kSamplesPerMode * z_max;
  const double k_max = dk * z_max;
  DispersionPoint prev = at(0.0);
  for (int s = 1; s <= samples; ++s) {
    const double k = k_max * s / samples;
    const DispersionPoint cur = at(k);
    for (const char* which : {"det", "trace"}) {
      const bool is_det = std::string(which) == "det";
      const double a = is_det ? prev.det : prev.trace;
      const double b = is_det ? cur.det : cur.trace;
      if (sign(a) == sign(b) || sign(a) == 0) continue;
      double lo = prev.k, hi = cur.k;
      double f_lo = a;
      while (hi - lo > kCriticalTol) {
        const double mid = 0.5 * (lo + hi);
        const DispersionPoint pm = at(mid);
        const double fm = is_det ? pm.det : pm.trace;
        if (sign(fm) == sign(f_lo)) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
        }
      }
      rep.critical.push_back({0.5 * (lo + hi), which});
    }
    prev = cur;
  }
  std::sort(rep.critical.begin(), rep.critical.end(),
            [](const CriticalPoint& x, const CriticalPoint& y) { return x.k < y.k; });

  const double F0 = F(0.0);
  rep.hopf_condition_unsatisfiable = !(eq.dg_dh > 0.0 && F0 > 0.0);
  if (rep.hopf_condition_unsatisfiable) {
    rep.notes.push_back("hopf condition unsatisfiable under current assumptions (d_h g(1,h*) <= 0 or F(0) <= 0)");
  }
  if (eq.extra_roots > 0) {
    std::ostringstream msg;
    msg << "g(1, h) has " << eq.extra_roots << " additional sign change(s): equilibrium acidity not unique";
    rep.notes.push_back(msg.str());
  }
  return rep;
}

bool trivial_branch_stable(const SourceSpec& g, double h_double_star) {
  return eval_g_dh(g, 0.0, h_double_star) <= 0.0;
}

}  // namespace invasion
