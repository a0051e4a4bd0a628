#pragma once

#include <optional>
#include <string>

#include "invasion/core.hpp"
#include "invasion/model.hpp"
#include "invasion/solver.hpp"

namespace invasion {

/// a(s) = (s - ln s - 1) / beta. Throws DomainError for s <= 0.
double a_of_s(double s, double beta);

/// Result of fitting g(u,h)(h-h*) <= -C_H (h-h*)^2 + C_U u^(alpha-1) (u^beta-1)^2.
struct AssgFit {
  bool holds = false;
  double C_H = 0.0;
  double C_U = 0.0;
  std::string detail;
};

/// Dense-grid fit over (0, U] x [0, H]. Candidates C_H = 2^k are tried from
/// large to small; the first whose minimal C_U stays bounded under grid
/// refinement is kept.
AssgFit check_assg(const SourceSpec& g, double h_star, double H, double U, double alpha, double beta,
                   int sample_density = 200);

struct LyapunovParams {
  double h_star = 0.0;
  double C_H = 0.0;
  double C_U = 0.0;
  double U = 1.0;
  double C_B = 0.0;
  double C_A = 0.0;
  double epsilon = 0.0;
  double C_eqh = 0.0;
  bool valid = false;
  /// Empty when valid; otherwise which inequality failed.
  std::string reason;
};

/// Inputs to the constants, read off a configured run.
struct LyapunovInputs {
  double h_star = 0.0;
  double C_H = 0.0;
  double C_U = 0.0;
  double U = 1.0;         // a-priori bound on u
  double beta = 1.0;
  double H = 1.0;
  double lipschitz_mu = 0.0;
  double mu_at_zero = 1.0;
  double delta = 1.0;     // lower bound on mu
  double eta = 0.0;       // min of J over [-diam, diam]
  double D1 = 1.0;        // min d
  double C_bd = 1.0;      // max d
  double D_H = 1.0;
  double volume = 40.0;   // |Omega|
  double diameter = 40.0;
};

LyapunovParams make_lyapunov_params(const LyapunovInputs& in);

/// Gathers the inputs from a model/grid, fits the structural assumption, and
/// builds the constants. U defaults to the larger of 1 and the supplied bound.
LyapunovParams lyapunov_params_for(const ModelParams& params, const Grid1D& grid, double U);

/// Sum over cells of a(u^beta) + (C_eqh/2)(h - h*)^2, times dx. u is floored
/// at 1e-30; each floored value increments *floored when given.
double lyapunov(const State& state, const LyapunovParams& lp, double beta, const Grid1D& grid,
                long* floored = nullptr);

struct ConvergenceMetrics {
  double sup_u = 0.0;  // sup |u - c|
  double sup_h = 0.0;  // sup |h - h*|
};

ConvergenceMetrics convergence_metrics(const State& state, double c, double h_star);

struct PatternReport {
  double spatial_variance = 0.0;
  /// Cosine-mode index z (wavenumber pi z / a) with the most energy, if any.
  std::optional<double> dominant_mode;
  std::optional<double> dominant_wavenumber;
  /// Rightmost node with u > 0.5.
  std::optional<double> front_position;
};

PatternReport pattern_metrics(const Field& u, const Grid1D& grid);

/// Earliest snapshot time with max u above threshold, or the solver's
/// blow-up event time, whichever comes first.
std::optional<double> detect_blowup(const Trajectory& traj, double threshold);

}  // namespace invasion
