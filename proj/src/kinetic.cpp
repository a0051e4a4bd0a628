#include "invasion/kinetic.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

namespace invasion {

namespace {

struct SpeedBins {
  std::vector<double> edges;
  std::vector<double> values;
};

SpeedBins bins_of(const EquilibriumDist& M, const VelocitySpace1D& V) {
  if (M.form == EquilibriumDist::Form::uniform) return {{V.s1, V.s2}, {1.0 / V.measure()}};
  return {M.edges, M.values};
}

// Stream for one chunk of particles. `tag` separates initial sampling from
// transport, `salt` separates successive transport calls.
std::mt19937_64 chunk_rng(std::uint64_t seed, size_t chunk, std::uint32_t tag, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), tag, static_cast<std::uint32_t>(salt),
                    static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

template <class Body>
void for_each_chunk(size_t n, int threads, Body body) {
  const size_t chunks = (n + kKineticChunk - 1) / kKineticChunk;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t c = next++; c < chunks; c = next++) {
      body(c, c * kKineticChunk, std::min(n, (c + 1) * kKineticChunk));
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

double reflect(double x, double a, double& v) {
  while (x > a || x < -a) {
    x = x > a ? 2.0 * a - x : -2.0 * a - x;
    v = -v;
  }
  return x;
}

}  // namespace

void VelocitySpace1D::validate() const {
  if (!(s1 >= 0.0 && s2 > s1)) throw ConfigError("velocity space requires 0 <= s1 < s2");
}

void EquilibriumDist::validate(const VelocitySpace1D& V) const {
  if (form == Form::uniform) return;
  if (edges.size() < 2 || values.size() + 1 != edges.size()) {
    throw ConfigError("tabulated M needs n+1 speed edges and n values");
  }
  if (std::abs(edges.front() - V.s1) > 1e-12 || std::abs(edges.back() - V.s2) > 1e-12) {
    throw ConfigError("tabulated M edges must span [s1, s2]");
  }
  double mass = 0.0;
  for (size_t j = 0; j < values.size(); ++j) {
    if (!(edges[j + 1] > edges[j])) throw ConfigError("tabulated M edges must increase");
    if (values[j] < 0.0) throw ConfigError("tabulated M must be nonnegative");
    mass += 2.0 * values[j] * (edges[j + 1] - edges[j]);
  }
  if (std::abs(mass - 1.0) > 1e-10) throw ConfigError("tabulated M must integrate to 1 over V");
}

double EquilibriumDist::density(const VelocitySpace1D& V, double v) const {
  const double s = std::abs(v);
  if (s < V.s1 || s > V.s2) return 0.0;
  if (form == Form::uniform) return 1.0 / V.measure();
  const auto it = std::upper_bound(edges.begin(), edges.end(), s);
  const size_t j = std::min(values.size() - 1, static_cast<size_t>(std::max<long>(0, it - edges.begin() - 1)));
  return values[j];
}

double EquilibriumDist::second_moment(const VelocitySpace1D& V) const {
  const SpeedBins b = bins_of(*this, V);
  double m2 = 0.0;
  for (size_t j = 0; j < b.values.size(); ++j) {
    m2 += 2.0 * b.values[j] * (std::pow(b.edges[j + 1], 3) - std::pow(b.edges[j], 3)) / 3.0;
  }
  return m2;
}

void TurningParams::validate() const {
  if (!(lambda0 > 0.0)) throw ConfigError("lambda0 must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
}

MacroCoefficients macroscopic_coefficients(const EquilibriumDist& M, const VelocitySpace1D& V,
                                           const TurningParams& tp) {
  const double m2 = M.second_moment(V);
  MacroCoefficients c;
  c.D = m2 / tp.lambda0;
  c.chi = (tp.a_coef * 2.0 * (std::pow(V.s2, 3) - std::pow(V.s1, 3)) / 3.0 + tp.b_coef / V.measure() * m2) /
          tp.lambda0;
  return c;
}

double sample_velocity(const EquilibriumDist& M, const VelocitySpace1D& V, const VelocityBias* bias,
                       std::mt19937_64& rng) {
  // Uniform M is a single bin; avoid building vectors on this hot path.
  const double uniform_edges[2] = {V.s1, V.s2};
  const double uniform_value = 1.0 / V.measure();
  const bool uniform = M.form == EquilibriumDist::Form::uniform;
  const struct {
    const double* edges;
    const double* values;
  } b{uniform ? uniform_edges : M.edges.data(), uniform ? &uniform_value : M.values.data()};
  const size_t nb = uniform ? 1 : M.values.size();
  const double kappa = bias ? bias->epsilon * bias->a_coef * bias->dh / bias->lambda0 : 0.0;

  // Piece (direction, bin) masses of the density m_j - kappa * sign * s.
  double weights[2 * 64];
  std::vector<double> heap;
  double* w = weights;
  if (2 * nb > 2 * 64) {
    heap.resize(2 * nb);
    w = heap.data();
  }
  for (size_t j = 0; j < nb; ++j) {
    const double e0 = b.edges[j], e1 = b.edges[j + 1];
    if (b.values[j] - std::abs(kappa) * e1 < -1e-15) {
      throw ConfigError("taxis bias too strong: post-turn velocity density is negative");
    }
    for (int d = 0; d < 2; ++d) {
      const double sgn = d == 0 ? -1.0 : 1.0;
      w[2 * j + d] = std::max(0.0, b.values[j] * (e1 - e0) - kappa * sgn * (e1 * e1 - e0 * e0) / 2.0);
    }
  }
  double total = 0.0;
  for (size_t i = 0; i < 2 * nb; ++i) total += w[i];

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double target = unif(rng) * total;
  size_t piece = 2 * nb - 1;
  for (size_t i = 0; i < 2 * nb; ++i) {
    if (target < w[i]) {
      piece = i;
      break;
    }
    target -= w[i];
  }
  const size_t j = piece / 2;
  const double sgn = piece % 2 == 0 ? -1.0 : 1.0;
  const double e0 = b.edges[j];
  const double c0 = b.values[j];
  const double c1 = -kappa * sgn;
  // Solve c0 (s - e0) + c1 (s^2 - e0^2) / 2 = target for s in the bin.
  const double q = target + c0 * e0 + 0.5 * c1 * e0 * e0;
  const double root = std::sqrt(std::max(0.0, c0 * c0 + 2.0 * c1 * q));
  double s = (c0 + root) > 0.0 ? 2.0 * q / (c0 + root) : e0;
  s = std::clamp(s, e0, b.edges[j + 1]);
  return sgn * s;
}

FrozenAcid::FrozenAcid(Field h, const Grid1D& grid) : x0_(grid.node(0)), dx_(grid.dx()) {
  if (h.size() != static_cast<size_t>(grid.n_cells())) throw ConfigError("acidity profile size mismatch");
  slopes_.resize(h.size() - 1);
  for (size_t i = 0; i + 1 < h.size(); ++i) {
    slopes_[i] = (h[i + 1] - h[i]) / dx_;
    max_gradient_ = std::max(max_gradient_, std::abs(slopes_[i]));
  }
}

double FrozenAcid::gradient(double x) const {
  if (slopes_.empty()) return 0.0;
  const double r = std::floor((x - x0_) / dx_);
  if (r < 0.0 || r >= static_cast<double>(slopes_.size())) return 0.0;
  return slopes_[static_cast<size_t>(r)];
}

ParticleEnsemble point_cloud(size_t n, double x0, double half_length, const EquilibriumDist& M,
                             const VelocitySpace1D& V, std::uint64_t seed) {
  ParticleEnsemble e;
  e.positions.assign(n, x0);
  e.velocities.resize(n);
  e.seed = seed;
  e.half_length = half_length;
  for_each_chunk(n, 1, [&](size_t chunk, size_t lo, size_t hi) {
    auto rng = chunk_rng(seed, chunk, 1, 0);
    for (size_t p = lo; p < hi; ++p) e.velocities[p] = sample_velocity(M, V, nullptr, rng);
  });
  return e;
}

ParticleEnsemble sample_ensemble(const Field& density, const Grid1D& grid, size_t n, const EquilibriumDist& M,
                                 const VelocitySpace1D& V, std::uint64_t seed) {
  for (double v : density) {
    if (v < 0.0) throw ConfigError("sampling density must be nonnegative");
  }
  ParticleEnsemble e;
  e.positions.resize(n);
  e.velocities.resize(n);
  e.seed = seed;
  e.half_length = grid.half_length();
  for_each_chunk(n, 1, [&](size_t chunk, size_t lo, size_t hi) {
    auto rng = chunk_rng(seed, chunk, 3, 0);
    std::discrete_distribution<size_t> cell(density.begin(), density.end());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (size_t p = lo; p < hi; ++p) {
      const size_t i = cell(rng);
      e.positions[p] = grid.node(static_cast<int>(i)) + (unif(rng) - 0.5) * grid.dx();
      e.velocities[p] = sample_velocity(M, V, nullptr, rng);
    }
  });
  return e;
}

ParticleEnsemble simulate(ParticleEnsemble ensemble, const EquilibriumDist& M, const VelocitySpace1D& V,
                          const TurningParams& tp, const FrozenAcid& h, double t_macro, int threads) {
  V.validate();
  M.validate(V);
  tp.validate();
  if (t_macro < 0.0) throw ConfigError("simulation time must be nonnegative");

  const double eps = tp.epsilon;
  const double c = tp.b_coef / V.measure();
  const double G = h.max_abs_gradient();
  const double lambda_max = tp.lambda0 + eps * std::abs(c) * V.s2 * G;
  if (tp.lambda0 - eps * std::abs(c) * V.s2 * G <= 0.0) {
    throw ConfigError("taxis bias too strong: turning rate would become nonpositive");
  }
  const double big_rate = lambda_max / (eps * eps);
  const double a = ensemble.half_length;
  const std::uint64_t salt = std::bit_cast<std::uint64_t>(ensemble.t);

  for_each_chunk(ensemble.positions.size(), threads, [&](size_t chunk, size_t lo, size_t hi) {
    auto rng = chunk_rng(ensemble.seed, chunk, 2, salt);
    std::exponential_distribution<double> flight(big_rate);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (size_t p = lo; p < hi; ++p) {
      double x = ensemble.positions[p];
      double v = ensemble.velocities[p];
      double remaining = t_macro;
      while (remaining > 0.0) {
        const double tau = flight(rng);
        if (tau >= remaining) {
          x = reflect(x + v / eps * remaining, a, v);
          break;
        }
        x = reflect(x + v / eps * tau, a, v);
        remaining -= tau;
        const double dh = h.gradient(x);
        if (unif(rng) * lambda_max < tp.lambda0 + eps * c * v * dh) {
          const VelocityBias bias{tp.a_coef, dh, eps, tp.lambda0};
          v = sample_velocity(M, V, tp.a_coef != 0.0 ? &bias : nullptr, rng);
        }
      }
      ensemble.positions[p] = x;
      ensemble.velocities[p] = v;
    }
  });
  ensemble.t += t_macro;
  return ensemble;
}

Field histogram(const ParticleEnsemble& ensemble, const Grid1D& grid) {
  const int n = grid.n_cells();
  Field hist(static_cast<size_t>(n), 0.0);
  if (ensemble.positions.empty()) return hist;
  const double a = grid.half_length();
  for (double x : ensemble.positions) {
    const int i = std::clamp(static_cast<int>(std::floor((x + a) / grid.dx())), 0, n - 1);
    hist[static_cast<size_t>(i)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(ensemble.positions.size()) * grid.dx());
  for (double& v : hist) v *= norm;
  return hist;
}

double compare_to_pde(const ParticleEnsemble& ensemble, const Field& pde_solution, const Grid1D& grid) {
  if (pde_solution.size() != static_cast<size_t>(grid.n_cells())) {
    throw ConfigError("PDE profile does not match the grid");
  }
  const Field hist = histogram(ensemble, grid);
  double mass = 0.0;
  for (double v : pde_solution) mass += v * grid.dx();
  if (!(mass > 0.0)) throw ConfigError("PDE profile has no mass");
  double err = 0.0;
  for (size_t i = 0; i < hist.size(); ++i) err += std::abs(hist[i] - pde_solution[i] / mass) * grid.dx();
  return err;
}

}  // namespace invasion
