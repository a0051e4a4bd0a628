#include "invasion/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace invasion {

namespace {

constexpr double kUndershoot = 1e-12;
constexpr double kDriftFloor = 1e-12;

size_t sz(int i) { return static_cast<size_t>(i); }

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Field& f) {
  return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
}

// Elementwise max(u, 0)^p.
Field positive_power(const Field& u, double p) {
  Field out(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    const double v = std::max(u[i], 0.0);
    out[i] = p == 1.0 ? v : std::pow(v, p);
  }
  return out;
}

// Implicit Neumann diffusion (I - dt D Lap) x = rhs, Thomas algorithm.
Field solve_implicit_diffusion(double D, double dt, const Field& rhs, double dx) {
  const size_t n = rhs.size();
  const double r = D * dt / (dx * dx);
  Field c(n), dprime(n), x(n);
  auto diag = [&](size_t i) { return (i == 0 || i == n - 1) ? 1.0 + r : 1.0 + 2.0 * r; };
  c[0] = -r / diag(0);
  dprime[0] = rhs[0] / diag(0);
  for (size_t i = 1; i < n; ++i) {
    const double denom = diag(i) + r * c[i - 1];
    c[i] = (i + 1 < n) ? -r / denom : 0.0;
    dprime[i] = (rhs[i] + r * dprime[i - 1]) / denom;
  }
  x[n - 1] = dprime[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = dprime[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::explicit_euler: return "explicit-euler";
    case Scheme::rk2_heun: return "rk2-heun";
    case Scheme::imex: return "imex";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  for (auto s : {Scheme::explicit_euler, Scheme::rk2_heun, Scheme::imex}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown integrator scheme '" + name + "'");
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::blow_up: return "blow-up";
    case EventKind::dt_rejected: return "dt-rejected";
    case EventKind::steady_state: return "steady-state";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("cfl_safety must lie in (0, 1]");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
  if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
  if (!(snapshot_every > 0.0)) throw ConfigError("snapshot_every must be positive");
  if (!(blowup_threshold > 0.0)) throw ConfigError("blowup_threshold must be positive");
  if (max_rejections < 1) throw ConfigError("max_rejections must be at least 1");
  if (steady_tol < 0.0) throw ConfigError("steady_tol must be nonnegative");
}

std::optional<double> Trajectory::blow_up_time() const {
  for (const Event& e : events) {
    if (e.kind == EventKind::blow_up) return e.t;
  }
  return std::nullopt;
}

bool Trajectory::reached_steady_state() const {
  return std::any_of(events.begin(), events.end(),
                     [](const Event& e) { return e.kind == EventKind::steady_state; });
}

// ---------------------------------------------------------------------------

GhostValues boundary_fluxes(const State& state, const Field& d) {
  const size_t n = state.u.size();
  GhostValues g;
  g.du_left = d[0] * state.u[0];
  g.du_right = d[n - 1] * state.u[n - 1];
  g.h_left = state.h[0];
  g.h_right = state.h[n - 1];
  return g;
}

Field myopic_diffusion_op(const Field& d, const Field& u, const Grid1D& grid) {
  const int n = grid.n_cells();
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  Field out(sz(n));
  auto du = [&](int i) { return d[sz(i)] * u[sz(i)]; };
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? du(i - 1) : du(0);
    const double right = i + 1 < n ? du(i + 1) : du(n - 1);
    out[sz(i)] = (right - 2.0 * du(i) + left) * inv_dx2;
  }
  return out;
}

namespace {

// Upwind tactic flux on interior interface i+1/2 (between cells i and i+1).
double taxis_flux(const Field& d, const Field& u, const Field& h, int i, double dx) {
  const double d_face = 0.5 * (d[sz(i)] + d[sz(i + 1)]);
  const double v = -d_face * (h[sz(i + 1)] - h[sz(i)]) / dx;
  return v * (v >= 0.0 ? u[sz(i)] : u[sz(i + 1)]);
}

}  // namespace

Field taxis_op(const Field& d, const Field& u, const Field& h, const Grid1D& grid) {
  const int n = grid.n_cells();
  const double dx = grid.dx();
  Field out(sz(n));
  double left = 0.0;  // wall flux
  for (int i = 0; i < n; ++i) {
    const double right = i + 1 < n ? taxis_flux(d, u, h, i, dx) : 0.0;
    out[sz(i)] = -(right - left) / dx;
    left = right;
  }
  return out;
}

Field interface_fluxes(const Field& d, const Field& u, const Field& h, const Grid1D& grid) {
  const int n = grid.n_cells();
  const double dx = grid.dx();
  Field flux(sz(n + 1), 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double diffusive = -(d[sz(i + 1)] * u[sz(i + 1)] - d[sz(i)] * u[sz(i)]) / dx;
    flux[sz(i + 1)] = diffusive + taxis_flux(d, u, h, i, dx);
  }
  return flux;
}

Field reaction_u(const ModelParams& params, const Field& u, const Field& h, const Field& conv) {
  Field out(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    const double v = std::max(u[i], 0.0);
    const double ua = params.alpha == 1.0 ? v : std::pow(v, params.alpha);
    out[i] = eval_mu(params.growth, std::max(h[i], 0.0)) * ua * (1.0 - conv[i]);
  }
  return out;
}

Field reaction_h(const ModelParams& params, const Field& u, const Field& h) {
  Field out(u.size());
  for (size_t i = 0; i < u.size(); ++i) out[i] = eval_g(params.source, std::max(u[i], 0.0), std::max(h[i], 0.0));
  return out;
}

Field acid_diffusion_op(double D_H, const Field& h, const Grid1D& grid) {
  const int n = grid.n_cells();
  const double c = D_H / (grid.dx() * grid.dx());
  Field out(sz(n));
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? h[sz(i - 1)] : h[0];
    const double right = i + 1 < n ? h[sz(i + 1)] : h[sz(n - 1)];
    out[sz(i)] = c * (right - 2.0 * h[sz(i)] + left);
  }
  return out;
}

double stable_dt(const ModelParams& params, const Field& d, const Grid1D& grid, const State& state,
                 const Field& conv, const KernelStencil& stencil, const IntegratorConfig& integrator) {
  if (!all_finite(state.u) || !all_finite(state.h) || !all_finite(conv)) {
    throw std::range_error("non-finite state");
  }
  const double dx = grid.dx();
  const int n = grid.n_cells();
  const double d_max = *std::max_element(d.begin(), d.end());

  double bound = dx * dx / (2.0 * d_max);
  if (integrator.scheme != Scheme::imex) bound = std::min(bound, dx * dx / (2.0 * params.D_H));

  double drift = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double d_face = 0.5 * (d[sz(i)] + d[sz(i + 1)]);
    drift = std::max(drift, std::abs(d_face * (state.h[sz(i + 1)] - state.h[sz(i)]) / dx));
  }
  bound = std::min(bound, dx / (drift + kDriftFloor));

  // Gershgorin bound on the reaction Jacobian: the local alpha-term plus the
  // beta-term summed over the stencil row.
  const double u_max = *std::max_element(state.u.begin(), state.u.end());
  if (u_max > 0.0) {
    double mu_max = 0.0;
    for (double hv : state.h) mu_max = std::max(mu_max, eval_mu(params.growth, std::max(hv, 0.0)));
    double row_mass = 0.0;
    for (double w : stencil.weights) row_mass += std::abs(w);
    row_mass *= stencil.dx;
    const double rate =
        mu_max * (params.alpha * std::pow(u_max, params.alpha - 1.0) * (1.0 + max_abs(conv)) +
                  params.beta * std::pow(u_max, params.alpha + params.beta - 1.0) * row_mass);
    if (rate > 0.0) bound = std::min(bound, 1.0 / rate);
  }
  return integrator.cfl_safety * bound;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(ModelParams params, Grid1D grid, IntegratorConfig integrator)
    : params_(std::move(params)),
      grid_(std::move(grid)),
      integrator_(integrator),
      d_(diffusion_field(params_.diffusion, grid_)),
      convolver_(discretize(params_.kernel, grid_, params_.renormalize_kernel), grid_, params_.kernel_boundary,
                 params_.engine),
      scratch_(sz(grid_.n_cells())) {
  integrator_.validate();
}

Field Simulation::convolution(const Field& u) {
  const Field ub = positive_power(u, params_.beta);
  Field out(u.size());
  convolver_.apply(ub, out);
  return out;
}

std::pair<Field, Field> Simulation::rhs(const State& s) {
  const Field conv = convolution(s.u);
  Field du = myopic_diffusion_op(d_, s.u, grid_);
  const Field tx = taxis_op(d_, s.u, s.h, grid_);
  const Field ru = reaction_u(params_, s.u, s.h, conv);
  for (size_t i = 0; i < du.size(); ++i) du[i] += tx[i] + ru[i];

  Field dh = reaction_h(params_, s.u, s.h);
  if (integrator_.scheme != Scheme::imex) {
    const Field lap = acid_diffusion_op(params_.D_H, s.h, grid_);
    for (size_t i = 0; i < dh.size(); ++i) dh[i] += lap[i];
  }
  return {std::move(du), std::move(dh)};
}

double Simulation::stable_dt(const State& state) {
  return invasion::stable_dt(params_, d_, grid_, state, convolution(state.u), stencil(), integrator_);
}

State Simulation::advance(const State& s, double dt) {
  State next;
  next.t = s.t + dt;
  auto [ku, kh] = rhs(s);
  next.u.resize(s.u.size());
  next.h.resize(s.h.size());
  for (size_t i = 0; i < s.u.size(); ++i) {
    next.u[i] = s.u[i] + dt * ku[i];
    next.h[i] = s.h[i] + dt * kh[i];
  }
  switch (integrator_.scheme) {
    case Scheme::explicit_euler:
      break;
    case Scheme::imex:
      next.h = solve_implicit_diffusion(params_.D_H, dt, next.h, grid_.dx());
      break;
    case Scheme::rk2_heun: {
      auto [ku2, kh2] = rhs(next);
      for (size_t i = 0; i < s.u.size(); ++i) {
        next.u[i] = s.u[i] + 0.5 * dt * (ku[i] + ku2[i]);
        next.h[i] = s.h[i] + 0.5 * dt * (kh[i] + kh2[i]);
      }
      break;
    }
  }
  return next;
}

bool Simulation::clip_acid() const { return ceiling_compliant(params_.source); }

Simulation::StepOutcome Simulation::step(const State& state, double dt_limit, RunStats* stats) {
  StepOutcome out;
  double dt = dt_limit;
  try {
    dt = std::min(dt, stable_dt(state));
  } catch (const std::range_error&) {
    out.blow_up = true;
    out.state = state;
    return out;
  }
  while (true) {
    State next = advance(state, dt);
    if (!all_finite(next.u) || !all_finite(next.h)) {
      out.blow_up = true;
      out.state = state;
      return out;
    }
    const double u_min = *std::min_element(next.u.begin(), next.u.end());
    if (u_min < -kUndershoot) {
      ++out.rejections;
      if (stats) ++stats->rejected_steps;
      if (out.rejections >= integrator_.max_rejections) {
        out.blow_up = true;
        out.state = state;
        return out;
      }
      dt *= 0.5;
      continue;
    }
    if (stats) stats->min_u_before_clip = std::min(stats->min_u_before_clip, u_min);
    for (double& v : next.u) {
      if (v < 0.0) {
        v = 0.0;
        if (stats) ++stats->clipped_values;
      }
    }
    if (clip_acid()) {
      const double H = params_.source.H;
      for (double& v : next.h) {
        if (v < 0.0 || v > H) {
          v = std::clamp(v, 0.0, H);
          if (stats) ++stats->h_clipped_values;
        }
      }
    }
    if (stats) ++stats->accepted_steps;
    out.state = std::move(next);
    out.dt = dt;
    return out;
  }
}

Trajectory Simulation::run(State initial) {
  Trajectory traj;
  const IntegratorConfig& cfg = integrator_;
  State s = std::move(initial);
  traj.snapshots.push_back(s);
  const double t0 = s.t;
  long next_index = 1;
  auto next_snapshot = [&] { return std::min(t0 + next_index * cfg.snapshot_every, cfg.t_end); };

  while (s.t < cfg.t_end) {
    const double target = next_snapshot();
    const double dt_limit = std::min(cfg.dt_max, target - s.t);
    StepOutcome o = step(s, dt_limit, &traj.stats);
    if (o.rejections > 0) {
      std::ostringstream msg;
      msg << o.rejections << " undershoot rejection(s)";
      traj.events.push_back({EventKind::dt_rejected, s.t, msg.str()});
    }
    if (o.blow_up) {
      traj.events.push_back({EventKind::blow_up, s.t, "non-finite state or step-size underflow"});
      if (s.t > traj.snapshots.back().t) traj.snapshots.push_back(s);
      break;
    }
    const double rate = [&] {
      double r = 0.0;
      for (size_t i = 0; i < s.u.size(); ++i) {
        r = std::max(r, std::abs(o.state.u[i] - s.u[i]));
        r = std::max(r, std::abs(o.state.h[i] - s.h[i]));
      }
      return r / o.dt;
    }();
    // Land exactly on the snapshot time to avoid round-off drift.
    if (target - o.state.t < 1e-12 * std::max(1.0, target)) o.state.t = target;
    s = std::move(o.state);

    const double u_max = *std::max_element(s.u.begin(), s.u.end());
    traj.max_norm_history.emplace_back(s.t, u_max);
    if (u_max > cfg.blowup_threshold) {
      std::ostringstream msg;
      msg << "max u = " << u_max << " exceeds threshold " << cfg.blowup_threshold;
      traj.events.push_back({EventKind::blow_up, s.t, msg.str()});
      traj.snapshots.push_back(s);
      break;
    }
    const bool steady = cfg.steady_tol > 0.0 && rate < cfg.steady_tol;
    if (s.t >= target || steady) {
      traj.snapshots.push_back(s);
      if (s.t >= target) ++next_index;
    }
    if (steady) {
      traj.events.push_back({EventKind::steady_state, s.t, "max rate below steady_tol"});
      break;
    }
  }
  return traj;
}

State step(const State& state, const ModelParams& params, const Grid1D& grid, const IntegratorConfig& integrator) {
  Simulation sim(params, grid, integrator);
  auto out = sim.step(state, integrator.dt_max);
  if (out.blow_up) throw std::range_error("blow-up during step");
  return out.state;
}

Trajectory run(const ModelParams& params, const Grid1D& grid, const IntegratorConfig& integrator, State initial) {
  Simulation sim(params, grid, integrator);
  return sim.run(std::move(initial));
}

}  // namespace invasion
