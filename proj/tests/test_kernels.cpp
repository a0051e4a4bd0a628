#include <doctest.h>

#include <cmath>
#include <numbers>

#include "invasion/kernels.hpp"

using namespace invasion;
using std::numbers::pi;

namespace {

// Composite midpoint rule over [-R, R]; independent of the library's quadrature.
template <class F>
double midpoint(F f, double R, int n = 400000) {
  const double h = 2.0 * R / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(-R + (i + 0.5) * h);
  return s * h;
}

std::vector<KernelSpec> continuous_kernels() {
  return {{KernelFamily::uniform, 1.0, 1.0},     {KernelFamily::logistic, 1.0, 1.0},
          {KernelFamily::gaussian, 1.0, 0.7},    {KernelFamily::mexican_hat, 1.0, 1.3},
          {KernelFamily::cosine, 2.0, 1.0},      {KernelFamily::epanechnikov, 0.8, 1.0}};
}

}  // namespace

TEST_CASE("continuous kernels carry unit mass") {
  for (const KernelSpec& k : continuous_kernels()) {
    CAPTURE(to_string(k.family));
    const double R = truncation_radius(k);
    const double oracle = midpoint([&](double x) { return kernel_eval(k, x); }, R);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(kernel_mass(k) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("kernels are even") {
  for (const KernelSpec& k : continuous_kernels()) {
    for (double x : {0.1, 0.37, 0.99, 2.5, 7.0}) CHECK(kernel_eval(k, x) == kernel_eval(k, -x));
  }
}

TEST_CASE("logistic kernel matches its defining formula") {
  const KernelSpec k{KernelFamily::logistic, 1.0, 1.0};
  for (double x : {-3.0, -0.5, 0.0, 1.0, 10.0}) {
    CHECK(kernel_eval(k, x) == doctest::Approx(1.0 / (2.0 + std::exp(x) + std::exp(-x))).epsilon(1e-14));
  }
  CHECK(std::isfinite(kernel_eval(k, 2000.0)));
}

TEST_CASE("fourier factor against closed forms") {
  const KernelSpec logistic{KernelFamily::logistic, 1.0, 1.0};
  const KernelSpec gauss{KernelFamily::gaussian, 1.0, 0.7};
  const KernelSpec hat{KernelFamily::mexican_hat, 1.0, 1.3};
  const KernelSpec uni{KernelFamily::uniform, 0.6, 1.0};
  const KernelSpec epa{KernelFamily::epanechnikov, 0.8, 1.0};
  for (double k : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    CAPTURE(k);
    const double pk = pi * k;
    const double logistic_exact = k == 0.0 ? 1.0 : pk / std::sinh(pk);
    CHECK(fourier_factor(logistic, k) == doctest::Approx(logistic_exact).epsilon(1e-10));
    const double s2k2 = gauss.sigma * gauss.sigma * k * k;
    CHECK(fourier_factor(gauss, k) == doctest::Approx(std::exp(-0.5 * s2k2)).epsilon(1e-10));
    const double h2k2 = hat.sigma * hat.sigma * k * k;
    CHECK(fourier_factor(hat, k) == doctest::Approx((1.0 + 0.5 * h2k2) * std::exp(-0.5 * h2k2)).epsilon(1e-10));
    const double z = k * uni.rho;
    CHECK(fourier_factor(uni, k) == doctest::Approx(z == 0.0 ? 1.0 : std::sin(z) / z).epsilon(1e-14));
    const double w = k * epa.rho;
    const double epa_exact = w == 0.0 ? 1.0 : 3.0 * (std::sin(w) - w * std::cos(w)) / (w * w * w);
    CHECK(fourier_factor(epa, k) == doctest::Approx(epa_exact).epsilon(1e-9));
  }
}

TEST_CASE("fourier factor agrees with direct quadrature of the kernel") {
  for (const KernelSpec& spec : continuous_kernels()) {
    CAPTURE(to_string(spec.family));
    const double R = truncation_radius(spec);
    for (double k : {0.0, 0.3, 1.7, 4.4934, 9.0}) {
      CAPTURE(k);
      const double oracle = midpoint([&](double x) { return kernel_eval(spec, x) * std::cos(k * x); }, R);
      CHECK(fourier_factor(spec, k) == doctest::Approx(oracle).epsilon(1e-8).scale(1.0));
    }
  }
  // Removable singularity of the cosine kernel at k = pi / (2 rho).
  const KernelSpec cosk{KernelFamily::cosine, 2.0, 1.0};
  const double a = pi / 4.0;
  CHECK(fourier_factor(cosk, a) == doctest::Approx(pi / 4.0).epsilon(1e-12));
  CHECK(fourier_factor(cosk, a * (1.0 + 1e-9)) == doctest::Approx(pi / 4.0).epsilon(1e-8));
}

TEST_CASE("stencil sizes follow the truncation radius") {
  const Grid1D g(Domain1D{20.0}, 400);
  const KernelStencil s = discretize({KernelFamily::uniform, 1.0, 1.0}, g, true);
  CHECK(s.weights.size() == 21);
  CHECK(s.radius == 10);
  CHECK(s.discrete_mass() == doctest::Approx(1.0).epsilon(1e-14));
  for (double w : s.weights) CHECK(w == doctest::Approx(1.0 / 2.1));

  const KernelStencil l = discretize({KernelFamily::logistic, 1.0, 1.0}, g, false);
  CHECK(l.radius == 400);  // truncation 40 = full domain length
  CHECK(l.discrete_mass() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("narrow kernels and the dirac family") {
  const Grid1D g(Domain1D{20.0}, 400);
  CHECK_THROWS_AS(discretize({KernelFamily::uniform, 0.05, 1.0}, g, true), ConfigError);
  const Grid1D fine(Domain1D{20.0}, 800);
  CHECK(discretize({KernelFamily::uniform, 0.05, 1.0}, fine, true).weights.size() == 3);

  const KernelSpec dirac{KernelFamily::dirac, 1.0, 1.0};
  const KernelStencil d = discretize(dirac, g, true);
  REQUIRE(d.weights.size() == 1);
  CHECK(d.weights[0] == doctest::Approx(10.0));
  CHECK_THROWS_AS(kernel_eval(dirac, 0.0), UnsupportedOperation);
  CHECK(fourier_factor(dirac, 3.0) == 1.0);
  CHECK(kernel_mass(dirac) == 1.0);
}

TEST_CASE("kernel validation and names") {
  CHECK_THROWS_AS(KernelSpec({KernelFamily::uniform, 0.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(KernelSpec({KernelFamily::gaussian, 1.0, -1.0}).validate(), ConfigError);
  CHECK_FALSE(kernel_nonnegative({KernelFamily::mexican_hat, 1.0, 1.0}));
  CHECK(kernel_eval({KernelFamily::mexican_hat, 1.0, 1.0}, 2.0) < 0.0);
  for (const KernelSpec& k : continuous_kernels()) {
    CHECK(kernel_family_from_string(to_string(k.family)) == k.family);
  }
  CHECK_THROWS_AS(kernel_family_from_string("triangle"), ConfigError);
}
