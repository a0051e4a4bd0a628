#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "invasion/core.hpp"

namespace invasion {

/// Speeds [s1, s2] in both directions.
struct VelocitySpace1D {
  double s1 = 0.0;
  double s2 = 1.0;

  double measure() const { return 2.0 * (s2 - s1); }
  void validate() const;
};

/// Equilibrium velocity density. The tabulated form is piecewise constant
/// in the speed |v| and symmetric in direction, so the zero-mean condition
/// holds by construction; only the unit mass is checked.
struct EquilibriumDist {
  enum class Form { uniform, tabulated };
  Form form = Form::uniform;
  /// Speed bin edges (tabulated), spanning [s1, s2].
  std::vector<double> edges;
  /// Density value on each speed bin, the same for v and -v.
  std::vector<double> values;

  void validate(const VelocitySpace1D& V) const;
  double density(const VelocitySpace1D& V, double v) const;
  /// Integral of v^2 M over V.
  double second_moment(const VelocitySpace1D& V) const;
};

struct TurningParams {
  double lambda0 = 1.0;
  double a_coef = 0.0;  // tilt of the post-turn density, -a v dh
  double b_coef = 0.0;  // modulation of the outgoing rate, b v' dh
  double epsilon = 0.1;

  void validate() const;
};

struct MacroCoefficients {
  double D = 0.0;
  double chi = 0.0;
};

MacroCoefficients macroscopic_coefficients(const EquilibriumDist& M, const VelocitySpace1D& V,
                                           const TurningParams& tp);

/// Gradient of h entering the post-turn density, scaled by epsilon / lambda0.
struct VelocityBias {
  double a_coef = 0.0;
  double dh = 0.0;
  double epsilon = 0.0;
  double lambda0 = 1.0;
};

/// Draw from M(v) - epsilon a dh v / lambda0 by inverse transform, one
/// linear piece per speed bin and direction. Throws ConfigError if the
/// tilted density goes negative.
double sample_velocity(const EquilibriumDist& M, const VelocitySpace1D& V, const VelocityBias* bias,
                       std::mt19937_64& rng);

/// Frozen acidity profile; its gradient is piecewise constant between
/// adjacent cell centers and zero beyond the outermost centers.
class FrozenAcid {
 public:
  FrozenAcid() = default;
  FrozenAcid(Field h, const Grid1D& grid);

  double gradient(double x) const;
  double max_abs_gradient() const { return max_gradient_; }

 private:
  Field slopes_;
  double x0_ = 0.0;
  double dx_ = 1.0;
  double max_gradient_ = 0.0;
};

struct ParticleEnsemble {
  std::vector<double> positions;
  std::vector<double> velocities;
  double t = 0.0;
  std::uint64_t seed = 0;
  double half_length = 20.0;
};

/// Particles per random stream. Streams are keyed on (seed, chunk index), so
/// results do not depend on the number of worker threads.
inline constexpr size_t kKineticChunk = 4096;

/// N particles at x0 with velocities drawn from M.
ParticleEnsemble point_cloud(size_t n, double x0, double half_length, const EquilibriumDist& M,
                             const VelocitySpace1D& V, std::uint64_t seed);

/// N particles with positions drawn from a cell density on the grid
/// (uniform inside each cell) and velocities from M.
ParticleEnsemble sample_ensemble(const Field& density, const Grid1D& grid, size_t n, const EquilibriumDist& M,
                                 const VelocitySpace1D& V, std::uint64_t seed);

/// Advance every particle by macro time `t_macro`: flights at speed v/eps,
/// turns at rate lambda(v')/eps^2 with lambda(v') = lambda0 + eps (b/|V|) v' dh,
/// realized by thinning; reflective walls.
ParticleEnsemble simulate(ParticleEnsemble ensemble, const EquilibriumDist& M, const VelocitySpace1D& V,
                          const TurningParams& tp, const FrozenAcid& h, double t_macro, int threads = 1);

/// Position histogram on the grid cells, normalized to unit mass (sum * dx = 1).
Field histogram(const ParticleEnsemble& ensemble, const Grid1D& grid);

/// L1 distance between the unit-mass histogram and the unit-mass PDE profile.
double compare_to_pde(const ParticleEnsemble& ensemble, const Field& pde_solution, const Grid1D& grid);

}  // namespace invasion
