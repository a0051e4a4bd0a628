#include <doctest.h>

#include <cmath>
#include <random>

#include "invasion/solver.hpp"
#include "manufactured.hpp"

using namespace invasion;

namespace {

double total(const Field& f, double dx) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * dx;
}

ModelParams dirac_params() {
  ModelParams p;
  p.kernel.family = KernelFamily::dirac;
  return p;
}

}  // namespace

TEST_CASE("myopic diffusion is exact on quadratics and annihilates constants") {
  const Grid1D g(Domain1D{5.0}, 50);
  Field x2, ones(50, 1.0), two(50, 2.0);
  for (double x : g.nodes()) x2.push_back(x * x);
  const Field out = myopic_diffusion_op(ones, x2, g);
  for (int i = 1; i < 49; ++i) CHECK(out[static_cast<size_t>(i)] == doctest::Approx(2.0).epsilon(1e-12));
  for (double v : myopic_diffusion_op(two, ones, g)) CHECK(v == 0.0);
}

TEST_CASE("taxis vanishes without gradient or mass and conserves mass") {
  const Grid1D g(Domain1D{5.0}, 100);
  Field d(100, 1.0), hconst(100, 0.3), zero(100, 0.0), bump, lin;
  for (double x : g.nodes()) {
    bump.push_back(std::exp(-x * x));
    lin.push_back(x);
  }
  for (double v : taxis_op(d, bump, hconst, g)) CHECK(v == 0.0);
  for (double v : taxis_op(d, zero, lin, g)) CHECK(v == 0.0);
  CHECK(std::abs(total(taxis_op(d, bump, lin, g), g.dx())) < 1e-12);
}

TEST_CASE("diffusion plus taxis telescopes to zero total rate") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  const Grid1D g(Domain1D{3.0}, 64);
  for (int rep = 0; rep < 20; ++rep) {
    Field d(64), u(64), h(64);
    for (size_t i = 0; i < 64; ++i) {
      d[i] = U(rng);
      u[i] = U(rng);
      h[i] = U(rng);
    }
    const Field a = myopic_diffusion_op(d, u, g);
    const Field b = taxis_op(d, u, h, g);
    double s = 0.0;
    for (size_t i = 0; i < 64; ++i) s += (a[i] + b[i]) * g.dx();
    CHECK(std::abs(s) < 1e-10);
    const Field flux = interface_fluxes(d, u, h, g);
    CHECK(flux.front() == 0.0);
    CHECK(flux.back() == 0.0);
  }
}

TEST_CASE("ghost values mirror the first interior cell") {
  State s;
  s.u = {1.0, 2.0, 3.0};
  s.h = {0.5, 0.6, 0.9};
  const GhostValues gv = boundary_fluxes(s, Field{2.0, 2.0, 3.0});
  CHECK(gv.du_left == 2.0);
  CHECK(gv.du_right == 9.0);
  CHECK(gv.h_left == 0.5);
  CHECK(gv.h_right == 0.9);
  const Grid1D g(Domain1D{1.0}, 8);
  Field h;
  for (double x : g.nodes()) h.push_back(x);
  const Field lap = acid_diffusion_op(1.0, h, g);
  // Mirrored walls: one-sided gradient (h_ghost - h_first)/dx is zero, so the
  // wall cell sees only its inner neighbour.
  CHECK(lap[0] == doctest::Approx((h[1] - h[0]) / (g.dx() * g.dx())));
}

TEST_CASE("operators converge at their design orders") {
  const auto o = manufactured::observed_orders(5.0, 50);
  CHECK(o.diffusion_coarse == doctest::Approx(2.0).epsilon(0.1));
  CHECK(o.diffusion_fine == doctest::Approx(2.0).epsilon(0.1));
  CHECK(o.taxis_coarse >= 0.9);
  CHECK(o.taxis_fine >= 0.9);
}

TEST_CASE("reaction terms") {
  ModelParams p = dirac_params();
  p.alpha = 1.0;
  p.growth.form = GrowthForm::constant;
  p.growth.mu0 = 1.0;
  const Field two(4, 2.0), half(4, 0.5), zero(4, 0.0), one(4, 1.0);
  for (double v : reaction_u(p, two, half, two)) CHECK(v == -2.0);
  for (double v : reaction_u(p, zero, half, zero)) CHECK(v == 0.0);
  for (double v : reaction_h(p, one, one)) CHECK(v == 0.0);
  for (double v : reaction_h(p, one, zero)) CHECK(v == 1.0);
  for (double v : reaction_h(p, two, half)) CHECK(v == 1.0);
}

TEST_CASE("stable dt follows the explicit limits") {
  ModelParams p;
  p.kernel = {KernelFamily::uniform, 1.0, 1.0};
  const Grid1D g(Domain1D{20.0}, 400);
  IntegratorConfig cfg;
  const KernelStencil st = discretize(p.kernel, g, true);
  const Field d(400, 1.0), zero(400, 0.0);
  State s{zero, Field(400, 0.2), 0.0};
  CHECK(stable_dt(p, d, g, s, zero, st, cfg) == doctest::Approx(0.0045).epsilon(1e-12));
  for (int i = 0; i < 400; ++i) s.h[static_cast<size_t>(i)] = 10.0 * g.node(i);
  CHECK(stable_dt(p, d, g, s, zero, st, cfg) <= 0.005 * 0.9 + 1e-15);
  s.u[3] = std::nan("");
  CHECK_THROWS_AS(stable_dt(p, d, g, s, zero, st, cfg), std::range_error);
}

TEST_CASE("equilibria are fixed points") {
  const Grid1D g(Domain1D{10.0}, 100);
  IntegratorConfig cfg;
  Simulation sim(dirac_params(), g, cfg);
  State eq{Field(100, 1.0), Field(100, 1.0), 0.0};
  const auto [du, dh] = sim.rhs(eq);
  for (size_t i = 0; i < 100; ++i) {
    CHECK(std::abs(du[i]) <= 1e-10);
    CHECK(std::abs(dh[i]) <= 1e-10);
  }
  State s = eq;
  while (s.t < 1.0) s = sim.step(s, 1.0 - s.t).state;
  for (size_t i = 0; i < 100; ++i) CHECK(std::abs(s.u[i] - 1.0) < 1e-12);

  State z{Field(100, 0.0), Field(100, 0.0), 0.0};
  for (int k = 0; k < 50; ++k) z = sim.step(z, 0.05).state;
  for (size_t i = 0; i < 100; ++i) {
    CHECK(z.u[i] == 0.0);
    CHECK(z.h[i] == 0.0);
  }
}

TEST_CASE("explicit euler step matches a hand-rolled dense evaluation") {
  const Grid1D g(Domain1D{4.0}, 8);  // dx = 1
  ModelParams p;
  p.alpha = 1.5;
  p.beta = 1.0;
  p.kernel = {KernelFamily::uniform, 2.0, 1.0};
  p.renormalize_kernel = false;
  p.D_H = 0.7;
  p.diffusion.value = 0.3;
  IntegratorConfig cfg;
  cfg.scheme = Scheme::explicit_euler;
  Simulation sim(p, g, cfg);

  const Field u = {0.1, 0.4, 0.9, 1.2, 1.0, 0.7, 0.3, 0.2};
  const Field h = {0.0, 0.1, 0.3, 0.5, 0.6, 0.4, 0.2, 0.1};
  const double dt = 0.01, dx = 1.0, d = 0.3;
  const int n = 8;
  auto at = [&](const Field& f, int i) { return f[static_cast<size_t>(std::clamp(i, 0, n - 1))]; };
  const State next = sim.advance(State{u, h, 0.0}, dt);
  for (int i = 0; i < n; ++i) {
    double conv = 0.0;
    for (int j = 0; j < n; ++j) conv += (std::abs(i - j) <= 2 ? 0.25 : 0.0) * at(u, j) * dx;
    const double diff = d * (at(u, i + 1) - 2.0 * at(u, i) + at(u, i - 1)) / (dx * dx);
    auto flux = [&](int left) {  // interface between left and left+1
      if (left < 0 || left >= n - 1) return 0.0;
      const double v = -d * (at(h, left + 1) - at(h, left)) / dx;
      return v * (v >= 0.0 ? at(u, left) : at(u, left + 1));
    };
    const double tax = -(flux(i) - flux(i - 1)) / dx;
    const double mu = 1.0 / (1.0 + at(h, i));
    const double ru = mu * std::pow(at(u, i), 1.5) * (1.0 - conv);
    const double rh = at(u, i) * (1.0 - at(h, i)) + 0.7 * (at(h, i + 1) - 2.0 * at(h, i) + at(h, i - 1));
    CHECK(next.u[static_cast<size_t>(i)] == doctest::Approx(at(u, i) + dt * (diff + tax + ru)).epsilon(1e-14));
    CHECK(next.h[static_cast<size_t>(i)] == doctest::Approx(at(h, i) + dt * rh).epsilon(1e-14));
  }
}

TEST_CASE("transport-only runs conserve both masses") {
  const Grid1D g(Domain1D{5.0}, 100);
  ModelParams p;
  p.growth.form = GrowthForm::constant;
  p.growth.mu0 = 0.0;
  p.source.form = SourceForm::none;
  p.kernel = {KernelFamily::uniform, 1.0, 1.0};
  IntegratorConfig cfg;
  Simulation sim(p, g, cfg);
  State s;
  for (double x : g.nodes()) {
    s.u.push_back(std::exp(-x * x));
    s.h.push_back(0.5 + 0.3 * std::cos(x));
  }
  const double mu0 = total(s.u, g.dx()), mh0 = total(s.h, g.dx());
  for (int k = 0; k < 10000; ++k) s = sim.step(s, 1.0).state;
  CHECK(std::abs(total(s.u, g.dx()) - mu0) / mu0 < 1e-8);
  CHECK(std::abs(total(s.h, g.dx()) - mh0) / mh0 < 1e-8);
}

TEST_CASE("default run stays nonnegative and below the acid ceiling") {
  const Grid1D g(Domain1D{20.0}, 200);
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  ModelParams p;
  const InitialCondition ic;
  const Trajectory tr = run(p, g, cfg, State{eval_initial_u(ic, g), eval_initial_h(ic, g, 1.0), 0.0});
  CHECK_FALSE(tr.blow_up_time());
  CHECK(tr.stats.min_u_before_clip >= -1e-12);
  for (const State& s : tr.snapshots) {
    for (double v : s.h) CHECK((v >= 0.0 && v <= 1.0));
  }
  for (size_t i = 1; i < tr.snapshots.size(); ++i) CHECK(tr.snapshots[i].t > tr.snapshots[i - 1].t);
  CHECK(tr.snapshots.back().t == 2.0);

  const Trajectory again = run(p, g, cfg, State{eval_initial_u(ic, g), eval_initial_h(ic, g, 1.0), 0.0});
  REQUIRE(again.snapshots.size() == tr.snapshots.size());
  for (size_t k = 0; k < tr.snapshots.size(); ++k) CHECK(again.snapshots[k].u == tr.snapshots[k].u);
}

TEST_CASE("blow-up threshold and scheme agreement") {
  const Grid1D g(Domain1D{20.0}, 200);
  const InitialCondition ic;
  const State init{eval_initial_u(ic, g), eval_initial_h(ic, g, 1.0), 0.0};
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  cfg.blowup_threshold = 0.5;
  const Trajectory b = run(ModelParams{}, g, cfg, init);
  REQUIRE(b.blow_up_time());
  CHECK(*b.blow_up_time() > 0.0);

  cfg.blowup_threshold = 1e3;
  const Trajectory heun = run(ModelParams{}, g, cfg, init);
  cfg.scheme = Scheme::imex;
  const Trajectory imex = run(ModelParams{}, g, cfg, init);
  CHECK(manufactured::max_error(heun.snapshots.back().u, imex.snapshots.back().u) < 1e-2);
  CHECK(manufactured::max_error(heun.snapshots.back().h, imex.snapshots.back().h) < 1e-2);
}

TEST_CASE("integrator validation") {
  IntegratorConfig c;
  c.cfl_safety = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.max_rejections = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(scheme_from_string("imex") == Scheme::imex);
  CHECK_THROWS_AS(scheme_from_string("rk4"), ConfigError);
}
