#include "invasion/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace invasion {

namespace {

constexpr double kSupportSlack = 1e-12;

bool within_support(double x, double rho) { return std::abs(x) <= rho * (1.0 + kSupportSlack); }

// Adaptive Gauss-Kronrod over [lo, hi], split into panels no wider than
// `panel` so that oscillatory integrands stay resolved.
template <class F>
double integrate_panels(F f, double lo, double hi, double panel) {
  using boost::math::quadrature::gauss_kronrod;
  const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
  const double width = (hi - lo) / count;
  double total = 0.0;
  for (int p = 0; p < count; ++p) {
    const double a = lo + p * width;
    // One GK31 pass is enough on these narrow panels; refine adaptively only
    // when its error estimate is not already negligible in absolute terms.
    double err = 0.0;
    double piece = gauss_kronrod<double, 31>::integrate(f, a, a + width, 0, 0.0, &err);
    if (err > 1e-15) piece = gauss_kronrod<double, 31>::integrate(f, a, a + width, 12, 1e-12);
    total += piece;
  }
  return total;
}

}  // namespace

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::uniform:
    case KernelFamily::cosine:
    case KernelFamily::epanechnikov:
      if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("kernel rho must be positive");
      break;
    case KernelFamily::gaussian:
    case KernelFamily::mexican_hat:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("kernel sigma must be positive");
      break;
    case KernelFamily::logistic:
    case KernelFamily::dirac:
      break;
  }
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::logistic: return "logistic";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::mexican_hat: return "mexican_hat";
    case KernelFamily::cosine: return "cosine";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::dirac: return "dirac";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  for (auto f : {KernelFamily::uniform, KernelFamily::logistic, KernelFamily::gaussian,
                 KernelFamily::mexican_hat, KernelFamily::cosine, KernelFamily::epanechnikov,
                 KernelFamily::dirac}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown kernel family '" + name + "'");
}

double kernel_eval(const KernelSpec& spec, double x) {
  using std::numbers::pi;
  switch (spec.family) {
    case KernelFamily::uniform:
      return within_support(x, spec.rho) ? 0.5 / spec.rho : 0.0;
    case KernelFamily::logistic: {
      // 1 / (2 + e^x + e^-x), written in the overflow-safe sech^2 form.
      const double c = std::cosh(0.5 * x);
      return 0.25 / (c * c);
    }
    case KernelFamily::gaussian: {
      const double s = x / spec.sigma;
      return std::exp(-0.5 * s * s) / (spec.sigma * std::sqrt(2.0 * pi));
    }
    case KernelFamily::mexican_hat: {
      // Ricker profile shifted to unit mass; negative for |x| > sqrt(3) sigma.
      const double s = x / spec.sigma;
      return 1.5 / (spec.sigma * std::sqrt(2.0 * pi)) * (1.0 - s * s / 3.0) * std::exp(-0.5 * s * s);
    }
    case KernelFamily::cosine:
      return within_support(x, spec.rho) ? pi / (4.0 * spec.rho) * std::cos(pi * x / (2.0 * spec.rho)) : 0.0;
    case KernelFamily::epanechnikov: {
      if (!within_support(x, spec.rho)) return 0.0;
      const double s = x / spec.rho;
      return std::max(0.0, 0.75 / spec.rho * (1.0 - s * s));
    }
    case KernelFamily::dirac:
      throw UnsupportedOperation("the dirac kernel has no pointwise value");
  }
  return 0.0;
}

double truncation_radius(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::uniform:
    case KernelFamily::cosine:
    case KernelFamily::epanechnikov:
      return spec.rho;
    case KernelFamily::gaussian:
    case KernelFamily::mexican_hat:
      return 8.0 * spec.sigma;
    case KernelFamily::logistic:
      return 40.0;
    case KernelFamily::dirac:
      return 0.0;
  }
  return 0.0;
}

double kernel_mass(const KernelSpec& spec) {
  if (spec.family == KernelFamily::dirac) return 1.0;
  const double R = truncation_radius(spec);
  auto J = [&](double x) { return kernel_eval(spec, x); };
  // Even integrand: integrate the half line and double.
  return 2.0 * integrate_panels(J, 0.0, R, std::max(R / 64.0, 0.25));
}

double fourier_factor(const KernelSpec& spec, double k) {
  using std::numbers::pi;
  k = std::abs(k);
  switch (spec.family) {
    case KernelFamily::dirac:
      return 1.0;
    case KernelFamily::uniform: {
      const double z = k * spec.rho;
      return z == 0.0 ? 1.0 : std::sin(z) / z;
    }
    case KernelFamily::logistic: {
      const double z = pi * k;
      return z == 0.0 ? 1.0 : z / std::sinh(z);
    }
    case KernelFamily::gaussian: {
      const double s = spec.sigma * k;
      return std::exp(-0.5 * s * s);
    }
    case KernelFamily::mexican_hat: {
      const double s2 = spec.sigma * spec.sigma * k * k;
      return (1.0 + 0.5 * s2) * std::exp(-0.5 * s2);
    }
    case KernelFamily::cosine: {
      // a^2 cos(k rho) / (a^2 - k^2) with a = pi / (2 rho), rewritten in
      // e = k - a so the removable singularity at k = a stays finite.
      const double a = pi / (2.0 * spec.rho);
      const double e = k - a;
      const double t = e * spec.rho;
      const double sinc = std::abs(t) < 1e-8 ? 1.0 : std::sin(t) / t;
      return a * a * spec.rho * sinc / (a + k);
    }
    case KernelFamily::epanechnikov: {
      const double z = k * spec.rho;
      if (z < 1e-3) return 1.0 - z * z / 10.0;
      return 3.0 * (std::sin(z) - z * std::cos(z)) / (z * z * z);
    }
  }
  return 1.0;
}

bool kernel_nonnegative(const KernelSpec& spec) { return spec.family != KernelFamily::mexican_hat; }

double KernelStencil::discrete_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s * dx;
}

KernelStencil discretize(const KernelSpec& spec, const Grid1D& grid, bool renormalize) {
  spec.validate();
  KernelStencil st;
  st.dx = grid.dx();
  st.renormalized = renormalize;
  if (spec.family == KernelFamily::dirac) {
    st.radius = 0;
    st.weights = {1.0 / grid.dx()};
    return st;
  }
  const double R = std::min(grid.domain().length(), truncation_radius(spec));
  if (R < grid.dx() * (1.0 - kSupportSlack)) {
    throw ConfigError("kernel truncation radius " + std::to_string(R) + " is below the grid spacing " +
                      std::to_string(grid.dx()));
  }
  st.radius = static_cast<int>(std::floor(R / grid.dx() * (1.0 + kSupportSlack)));
  st.radius = std::min(st.radius, grid.n_cells());
  st.weights.resize(static_cast<size_t>(2 * st.radius + 1));
  for (int j = 0; j <= st.radius; ++j) {
    const double w = kernel_eval(spec, j * grid.dx());
    st.weights[static_cast<size_t>(st.radius + j)] = w;
    st.weights[static_cast<size_t>(st.radius - j)] = w;
  }
  if (renormalize) {
    const double mass = st.discrete_mass();
    if (!(mass != 0.0)) throw ConfigError("kernel stencil has zero discrete mass");
    for (double& w : st.weights) w /= mass;
  }
  return st;
}

}  // namespace invasion
