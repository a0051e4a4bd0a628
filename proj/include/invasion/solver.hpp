#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invasion/convolution.hpp"
#include "invasion/core.hpp"
#include "invasion/kernels.hpp"
#include "invasion/model.hpp"

namespace invasion {

enum class Scheme { explicit_euler, rk2_heun, imex };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::rk2_heun;
  double cfl_safety = 0.9;
  double dt_max = 0.05;
  double t_end = 50.0;
  double snapshot_every = 1.0;
  /// max(u) above this declares blow-up.
  double blowup_threshold = 1e3;
  /// Consecutive undershoot rejections before declaring blow-up.
  int max_rejections = 40;
  /// Stop once max |du/dt|, |dh/dt| fall below this; zero disables.
  double steady_tol = 1e-9;

  void validate() const;
};

enum class EventKind { blow_up, dt_rejected, steady_state };

std::string to_string(EventKind kind);

struct Event {
  EventKind kind;
  double t;
  std::string detail;
};

struct RunStats {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long clipped_values = 0;
  /// Most negative u produced by an accepted step before clipping.
  double min_u_before_clip = 0.0;
  long h_clipped_values = 0;
};

struct Trajectory {
  std::vector<State> snapshots;
  std::vector<Event> events;
  /// (t, max u) after every accepted step.
  std::vector<std::pair<double, double>> max_norm_history;
  RunStats stats;

  std::optional<double> blow_up_time() const;
  bool reached_steady_state() const;
};

// ---------------------------------------------------------------------------
// Spatial operators. All take cell-centered fields of length n_cells.

/// Centered second difference of the product d*u, walls closed by mirror
/// ghosts so that no diffusive flux leaves the domain.
Field myopic_diffusion_op(const Field& d, const Field& u, const Grid1D& grid);

/// Conservative first-order upwind discretization of (d u h_x)_x: drift
/// velocity -d h_x on each interface, zero flux through the walls.
Field taxis_op(const Field& d, const Field& u, const Field& h, const Grid1D& grid);

/// Total cell flux -(d u)_x + v u on the n+1 interfaces (walls included).
Field interface_fluxes(const Field& d, const Field& u, const Field& h, const Grid1D& grid);

/// mu(h_i) u_i^alpha (1 - conv_i), conv = J * u^beta precomputed.
Field reaction_u(const ModelParams& params, const Field& u, const Field& h, const Field& conv);

/// g(u_i, h_i).
Field reaction_h(const ModelParams& params, const Field& u, const Field& h);

/// Proton diffusion D_H h_xx with mirrored walls.
Field acid_diffusion_op(double D_H, const Field& h, const Grid1D& grid);

/// Ghost values implementing the no-flux walls: the ghost of d*u and of h
/// mirror the first interior value on each side.
struct GhostValues {
  double du_left = 0.0;
  double du_right = 0.0;
  double h_left = 0.0;
  double h_right = 0.0;
};

GhostValues boundary_fluxes(const State& state, const Field& d);

/// Explicit-scheme stability limit. `conv` is J * u^beta at the current state.
double stable_dt(const ModelParams& params, const Field& d, const Grid1D& grid, const State& state,
                 const Field& conv, const KernelStencil& stencil, const IntegratorConfig& integrator);

// ---------------------------------------------------------------------------

/// Owns the buffers and convolution engine of one simulation loop.
class Simulation {
 public:
  Simulation(ModelParams params, Grid1D grid, IntegratorConfig integrator);

  const ModelParams& params() const { return params_; }
  const Grid1D& grid() const { return grid_; }
  const IntegratorConfig& integrator() const { return integrator_; }
  const Field& diffusion() const { return d_; }
  const KernelStencil& stencil() const { return convolver_.stencil(); }

  /// J * u^beta.
  Field convolution(const Field& u);

  /// Right-hand sides (du/dt, dh/dt).
  std::pair<Field, Field> rhs(const State& state);

  double stable_dt(const State& state);

  /// Advance by exactly `dt` with the configured scheme, no acceptance logic.
  State advance(const State& state, double dt);

  struct StepOutcome {
    State state;
    double dt = 0.0;
    int rejections = 0;
    bool blow_up = false;
  };

  /// One accepted step of at most `dt_limit`, halving on undershoot.
  StepOutcome step(const State& state, double dt_limit, RunStats* stats = nullptr);

  Trajectory run(State initial);

 private:
  bool clip_acid() const;

  ModelParams params_;
  Grid1D grid_;
  IntegratorConfig integrator_;
  Field d_;
  Convolver convolver_;
  Field scratch_;
};

/// One step of the chosen scheme from `state` (stable dt, undershoot control).
State step(const State& state, const ModelParams& params, const Grid1D& grid, const IntegratorConfig& integrator);

Trajectory run(const ModelParams& params, const Grid1D& grid, const IntegratorConfig& integrator, State initial);

}  // namespace invasion
