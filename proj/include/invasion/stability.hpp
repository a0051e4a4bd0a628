#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "invasion/core.hpp"
#include "invasion/kernels.hpp"
#include "invasion/model.hpp"

namespace invasion {

class NoEquilibrium : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Homogeneous steady state (1, h*) and the derivatives the linearization needs.
struct Equilibrium {
  double u_star = 1.0;
  double h_star = 0.0;
  double dg_du = 0.0;  // d_u g(1, h*)
  double dg_dh = 0.0;  // d_h g(1, h*)
  double mu = 0.0;     // mu(h*)
  double dmu = 0.0;    // mu'(h*)
  /// Extra sign changes of g(1, .) found during the uniqueness scan.
  int extra_roots = 0;
};

struct RootResult {
  double h_star = 0.0;
  int extra_roots = 0;
};

/// Bisection for g(1, h) = 0 on [0, h_hi]; h_hi doubles up to 1e6 until the
/// signs at the ends differ. Throws NoEquilibrium when no bracket exists.
RootResult find_h_star(const SourceSpec& g, double h_hi = 1.0);

Equilibrium make_equilibrium(const ModelParams& params);

/// Eigenvalues of the non-spatial linearization at (1, h*):
/// (-beta mu(h*), d_h g(1, h*)).
std::pair<double, double> local_eigenvalues(const Equilibrium& eq, const ModelParams& params);

enum class ModeClass { stable, turing, hopf, wave };

std::string to_string(ModeClass c);

struct DispersionPoint {
  double k = 0.0;
  double trace = 0.0;
  double det = 0.0;
  std::complex<double> lambda1;
  std::complex<double> lambda2;
  ModeClass classification = ModeClass::stable;
  /// |trace| inside the 1e-10 band around the Hopf/wave boundary.
  bool marginal = false;
};

/// Constant-coefficient setting of the linearization. The diffusion must be
/// spatially constant.
double constant_diffusion(const ModelParams& params);

/// Dispersion point from a given Fourier factor F(k); dispersion_local and
/// dispersion_nonlocal both reduce to this.
DispersionPoint dispersion_point(const Equilibrium& eq, const ModelParams& params, double k, double F);

DispersionPoint dispersion_local(const Equilibrium& eq, const ModelParams& params, double k);
DispersionPoint dispersion_nonlocal(const Equilibrium& eq, const ModelParams& params, double k);

/// Right-hand side of the Turing boundary: det(k) = 0 exactly when F(k)
/// equals this value.
double turing_threshold(const Equilibrium& eq, const ModelParams& params, double k);

/// Hopf/wave boundary: trace(k) = 0 exactly when F(k) equals this value.
double trace_threshold(const Equilibrium& eq, const ModelParams& params, double k);

struct CriticalPoint {
  double k = 0.0;
  std::string quantity;  // "det" or "trace"
};

struct InstabilityReport {
  std::vector<DispersionPoint> modes;  // lattice k_z = pi z / a, increasing
  bool stable = true;
  std::vector<CriticalPoint> critical;
  /// The Hopf condition needs d_h g(1,h*) > 0 for a unit-mass kernel, which
  /// contradicts the standing assumption d_h g(1,h*) < 0.
  bool hopf_condition_unsatisfiable = false;
  std::vector<std::string> notes;
};

/// Lattice sweep with classification. `local` uses F = 1 at every k.
InstabilityReport classify(const ModelParams& params, const Equilibrium& eq, double half_length, int z_max,
                           bool local = false);

/// The (0, h**) branch is stable iff d_h g(0, h**) <= 0.
bool trivial_branch_stable(const SourceSpec& g, double h_double_star);

}  // namespace invasion
