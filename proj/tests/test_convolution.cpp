#include <doctest.h>

#include <cmath>
#include <random>

#include "invasion/convolution.hpp"

using namespace invasion;

namespace {

// Plain double loop with zero continuation outside the domain.
Field naive_zero(const KernelStencil& s, const Field& f) {
  const int n = static_cast<int>(f.size());
  Field out(f.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -s.radius; j <= s.radius; ++j) {
      const int src = i - j;
      if (src >= 0 && src < n) acc += s.weight(j) * f[static_cast<size_t>(src)];
    }
    out[static_cast<size_t>(i)] = acc * s.dx;
  }
  return out;
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Field random_field(std::mt19937_64& rng, size_t n) {
  std::uniform_real_distribution<double> d(0.0, 2.0);
  Field f(n);
  for (double& v : f) v = d(rng);
  return f;
}

}  // namespace

TEST_CASE("direct convolution matches a naive sum") {
  std::mt19937_64 rng(7);
  const Grid1D g(Domain1D{5.0}, 120);
  for (KernelFamily fam : {KernelFamily::uniform, KernelFamily::gaussian, KernelFamily::logistic}) {
    const KernelStencil s = discretize({fam, 1.0, 0.5}, g, true);
    const Field f = random_field(rng, 120);
    CHECK(max_diff(convolve_direct(s, f, g), naive_zero(s, f)) < 1e-13);
  }
}

TEST_CASE("direct and spectral engines agree") {
  std::mt19937_64 rng(11);
  for (int n : {64, 250, 401}) {
    const Grid1D g(Domain1D{10.0}, n);
    for (KernelFamily fam : {KernelFamily::uniform, KernelFamily::logistic, KernelFamily::gaussian,
                             KernelFamily::epanechnikov, KernelFamily::mexican_hat}) {
      const KernelStencil s = discretize({fam, 1.5, 0.8}, g, true);
      for (KernelBoundary b : {KernelBoundary::zero, KernelBoundary::reflect}) {
        for (int rep = 0; rep < 5; ++rep) {
          const Field f = random_field(rng, static_cast<size_t>(n));
          CHECK(max_diff(convolve_direct(s, f, g, b), convolve_spectral(s, f, g, b)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("reusable convolver matches the one-shot helpers") {
  std::mt19937_64 rng(3);
  const Grid1D g(Domain1D{20.0}, 400);
  const KernelStencil s = discretize({KernelFamily::logistic, 1.0, 1.0}, g, true);
  for (ConvolutionEngine e : {ConvolutionEngine::direct, ConvolutionEngine::spectral, ConvolutionEngine::automatic}) {
    Convolver c(s, g, KernelBoundary::zero, e);
    for (int rep = 0; rep < 3; ++rep) {
      const Field f = random_field(rng, 400);
      CHECK(max_diff(c.apply(f), convolve_direct(s, f, g)) < 1e-10);
    }
  }
  Convolver automatic(s, g, KernelBoundary::zero);
  CHECK(automatic.engine() == ConvolutionEngine::spectral);
  const KernelStencil narrow = discretize({KernelFamily::uniform, 1.0, 1.0}, g, true);
  CHECK(Convolver(narrow, g, KernelBoundary::zero).engine() == ConvolutionEngine::direct);
}

TEST_CASE("zero continuation sees half the kernel at the wall") {
  const Grid1D g(Domain1D{20.0}, 4000);  // dx = 0.01
  const KernelStencil s = discretize({KernelFamily::uniform, 1.0, 1.0}, g, true);
  const Field ones(4000, 1.0);
  const Field z = convolve_direct(s, ones, g, KernelBoundary::zero);
  CHECK(z[0] == doctest::Approx(101.0 / 201.0).epsilon(1e-12));
  CHECK(z[2000] == doctest::Approx(1.0).epsilon(1e-12));
  const Field r = convolve_direct(s, ones, g, KernelBoundary::reflect);
  for (double v : r) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convolution preserves evenness and dirac is the identity") {
  const Grid1D g(Domain1D{8.0}, 160);
  Field f(160);
  for (int i = 0; i < 160; ++i) f[static_cast<size_t>(i)] = std::exp(-g.node(i) * g.node(i));
  const KernelStencil s = discretize({KernelFamily::gaussian, 1.0, 0.6}, g, true);
  const Field c = convolve_direct(s, f, g);
  for (int i = 0; i < 80; ++i) CHECK(c[static_cast<size_t>(i)] == doctest::Approx(c[static_cast<size_t>(159 - i)]));

  const KernelStencil d = discretize({KernelFamily::dirac, 1.0, 1.0}, g, true);
  CHECK(max_diff(convolve_direct(d, f, g), f) < 1e-15);
}

TEST_CASE("discrete convolution of gaussians") {
  // Gaussian of width s convolved with a Gaussian of width 1 is a Gaussian
  // of width sqrt(1 + s^2); the trapezoid sum is spectrally accurate here.
  const double sig = 0.5;
  for (int n : {100, 200, 400}) {
    const Grid1D g(Domain1D{10.0}, n);
    Field f(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = std::exp(-0.5 * g.node(i) * g.node(i));
    const Field c = convolve_direct(discretize({KernelFamily::gaussian, 1.0, sig}, g, false), f, g);
    const double w2 = 1.0 + sig * sig;
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double exact = std::exp(-0.5 * g.node(i) * g.node(i) / w2) / std::sqrt(w2);
      err = std::max(err, std::abs(c[static_cast<size_t>(i)] - exact));
    }
    CHECK(err < 1e-10);
  }
}
