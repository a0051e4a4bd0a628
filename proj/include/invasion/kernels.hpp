#pragma once

#include <string>
#include <vector>

#include "invasion/core.hpp"

namespace invasion {

enum class KernelFamily { uniform, logistic, gaussian, mexican_hat, cosine, epanechnikov, dirac };

/// How the density is continued outside [-a, a] inside the convolution.
/// `zero` integrates over the domain only; `reflect` mirrors the field
/// across each wall (the even continuation matching no-flux walls).
enum class KernelBoundary { zero, reflect };

struct KernelSpec {
  KernelFamily family = KernelFamily::logistic;
  double rho = 1.0;    // support half-width: uniform, cosine, epanechnikov
  double sigma = 1.0;  // scale: gaussian, mexican_hat

  void validate() const;
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Pointwise kernel value. The dirac family has no pointwise value.
double kernel_eval(const KernelSpec& spec, double x);

/// Radius beyond which the kernel carries less than 1e-10 of its mass
/// (exact support for the compact families).
double truncation_radius(const KernelSpec& spec);

/// Integral of J over the real line.
double kernel_mass(const KernelSpec& spec);

/// F(k) = integral of J(x) cos(kx) dx, i.e. sqrt(2 pi) times the unitary
/// Fourier transform of J. This is the factor the dispersion relation uses.
double fourier_factor(const KernelSpec& spec, double k);

/// Whether the kernel is nonnegative everywhere (the hat may go negative).
bool kernel_nonnegative(const KernelSpec& spec);

/// Quadrature weights of a kernel on the grid offsets j*dx, |j*dx| <= R.
struct KernelStencil {
  /// weights[radius + j] is w_j for j in [-radius, radius].
  std::vector<double> weights;
  int radius = 0;
  double dx = 0.0;
  bool renormalized = false;

  double weight(int offset) const { return weights[static_cast<size_t>(offset + radius)]; }
  /// Sum of w_j * dx.
  double discrete_mass() const;
};

KernelStencil discretize(const KernelSpec& spec, const Grid1D& grid, bool renormalize);

}  // namespace invasion
