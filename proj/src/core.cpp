#include "invasion/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace invasion {

Grid1D::Grid1D(Domain1D domain, int n_cells) : domain_(domain), n_cells_(n_cells) {
  if (!(domain.half_length > 0.0) || !std::isfinite(domain.half_length)) {
    throw ConfigError("domain half_length must be positive and finite");
  }
  if (n_cells < kMinCells) {
    std::ostringstream msg;
    msg << "n_cells must be at least " << kMinCells << " (got " << n_cells << ")";
    throw ConfigError(msg.str());
  }
  dx_ = domain.length() / n_cells;
  nodes_.resize(static_cast<size_t>(n_cells));
  for (int i = 0; i < n_cells; ++i) {
    nodes_[static_cast<size_t>(i)] = -domain.half_length + (i + 0.5) * dx_;
  }
}

Grid1D build_grid(Domain1D domain, int n_cells) { return Grid1D(domain, n_cells); }

// ---------------------------------------------------------------------------

double Table1D::operator()(double at) const {
  if (x.size() == 1 || at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), at);
  const size_t hi = static_cast<size_t>(it - x.begin());
  const size_t lo = hi - 1;
  const double w = (at - x[lo]) / (x[hi] - x[lo]);
  return (1.0 - w) * y[lo] + w * y[hi];
}

void Table1D::validate(const std::string& what) const {
  if (x.empty() || x.size() != y.size()) {
    throw ConfigError(what + ": table abscissae and values must be non-empty and of equal length");
  }
  for (size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ConfigError(what + ": table abscissae must be strictly increasing");
  }
}

namespace {

// Index of the lower bracket and interpolation weight, clamped at the ends.
std::pair<size_t, double> bracket(const std::vector<double>& axis, double at) {
  if (axis.size() == 1 || at <= axis.front()) return {0, 0.0};
  if (at >= axis.back()) return {axis.size() - 2, 1.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), at);
  const size_t lo = static_cast<size_t>(it - axis.begin()) - 1;
  return {lo, (at - axis[lo]) / (axis[lo + 1] - axis[lo])};
}

}  // namespace

double Table2D::operator()(double at_u, double at_h) const {
  const size_t nh = h.size();
  auto value = [&](size_t iu, size_t ih) { return values[iu * nh + ih]; };
  if (u.size() == 1 && nh == 1) return values.front();
  if (u.size() == 1) {
    auto [jh, wh] = bracket(h, at_h);
    return (1 - wh) * value(0, jh) + wh * value(0, jh + 1);
  }
  if (nh == 1) {
    auto [ju, wu] = bracket(u, at_u);
    return (1 - wu) * value(ju, 0) + wu * value(ju + 1, 0);
  }
  auto [ju, wu] = bracket(u, at_u);
  auto [jh, wh] = bracket(h, at_h);
  return (1 - wu) * ((1 - wh) * value(ju, jh) + wh * value(ju, jh + 1)) +
         wu * ((1 - wh) * value(ju + 1, jh) + wh * value(ju + 1, jh + 1));
}

void Table2D::validate(const std::string& what) const {
  if (u.empty() || h.empty() || values.size() != u.size() * h.size()) {
    throw ConfigError(what + ": table needs u and h axes and |u|*|h| values");
  }
  for (size_t i = 1; i < u.size(); ++i) {
    if (!(u[i] > u[i - 1])) throw ConfigError(what + ": u axis must be strictly increasing");
  }
  for (size_t i = 1; i < h.size(); ++i) {
    if (!(h[i] > h[i - 1])) throw ConfigError(what + ": h axis must be strictly increasing");
  }
}

// ---------------------------------------------------------------------------

double eval_mu(const GrowthSpec& spec, double h) {
  if (h < 0.0) throw DomainError("mu(h) requires h >= 0");
  switch (spec.form) {
    case GrowthForm::constant:
      return spec.mu0;
    case GrowthForm::rational:
      return spec.mu0 / (1.0 + h);
    case GrowthForm::tabulated:
      return spec.table(h);
  }
  return 0.0;
}

double eval_mu_derivative(const GrowthSpec& spec, double h) {
  if (h < 0.0) throw DomainError("mu'(h) requires h >= 0");
  switch (spec.form) {
    case GrowthForm::constant:
      return 0.0;
    case GrowthForm::rational:
      return -spec.mu0 / ((1.0 + h) * (1.0 + h));
    case GrowthForm::tabulated: {
      const double step = 1e-6 * std::max(1.0, h);
      const double lo = std::max(0.0, h - step);
      return (spec.table(h + step) - spec.table(lo)) / (h + step - lo);
    }
  }
  return 0.0;
}

GrowthBounds sample_growth(const GrowthSpec& spec, double H, int samples) {
  GrowthBounds b;
  b.at_zero = eval_mu(spec, 0.0);
  b.min_value = b.at_zero;
  b.max_value = b.at_zero;
  double prev = b.at_zero;
  const double step = H / samples;
  for (int i = 1; i <= samples; ++i) {
    const double v = eval_mu(spec, i * step);
    b.min_value = std::min(b.min_value, v);
    b.max_value = std::max(b.max_value, v);
    b.lipschitz = std::max(b.lipschitz, std::abs(v - prev) / step);
    prev = v;
  }
  return b;
}

void validate_growth(const GrowthSpec& spec, double H) {
  if (spec.form == GrowthForm::tabulated) spec.table.validate("growth");
  if (spec.form != GrowthForm::tabulated && (spec.mu0 < 0.0 || !std::isfinite(spec.mu0))) {
    throw ConfigError("growth mu0 must be finite and nonnegative");
  }
  const GrowthBounds b = sample_growth(spec, H);
  if (b.min_value < 0.0) throw ConfigError("growth rate mu must be nonnegative on [0, H]");
  if (spec.delta > 0.0 && b.min_value < spec.delta) {
    std::ostringstream msg;
    msg << "growth rate falls below declared delta=" << spec.delta << " on [0, H] (sampled min "
        << b.min_value << ")";
    throw ConfigError(msg.str());
  }
}

bool transport_only(const GrowthSpec& spec, double H) {
  return sample_growth(spec, H).max_value == 0.0;
}

// ---------------------------------------------------------------------------

double eval_g(const SourceSpec& spec, double u, double h) {
  if (u < 0.0 || h < 0.0) throw DomainError("g(u, h) requires u >= 0 and h >= 0");
  switch (spec.form) {
    case SourceForm::logistic_acid:
      return u * (1.0 - h);
    case SourceForm::destabilizing:
      return u + u * h - spec.gamma * h * h;
    case SourceForm::none:
      return 0.0;
    case SourceForm::tabulated:
      return spec.table(u, h);
  }
  return 0.0;
}

double eval_g_du(const SourceSpec& spec, double u, double h) {
  switch (spec.form) {
    case SourceForm::logistic_acid:
      return 1.0 - h;
    case SourceForm::destabilizing:
      return 1.0 + h;
    case SourceForm::none:
      return 0.0;
    case SourceForm::tabulated: {
      const double step = 1e-6 * std::max(1.0, u);
      const double lo = std::max(0.0, u - step);
      return (eval_g(spec, u + step, h) - eval_g(spec, lo, h)) / (u + step - lo);
    }
  }
  return 0.0;
}

double eval_g_dh(const SourceSpec& spec, double u, double h) {
  switch (spec.form) {
    case SourceForm::logistic_acid:
      return -u;
    case SourceForm::destabilizing:
      return u - 2.0 * spec.gamma * h;
    case SourceForm::none:
      return 0.0;
    case SourceForm::tabulated: {
      const double step = 1e-6 * std::max(1.0, h);
      const double lo = std::max(0.0, h - step);
      return (eval_g(spec, u, h + step) - eval_g(spec, u, lo)) / (h + step - lo);
    }
  }
  return 0.0;
}

bool ceiling_compliant(const SourceSpec& spec) { return spec.form != SourceForm::destabilizing; }

SourceCheck check_source(const SourceSpec& spec, double u_max, int samples) {
  SourceCheck c;
  for (int i = 0; i <= samples; ++i) {
    const double u = u_max * i / samples;
    const double g0 = eval_g(spec, u, 0.0);
    const double gH = eval_g(spec, u, spec.H);
    if (g0 < 0.0) c.g0_nonnegative = false;
    if (gH > 0.0) c.ceiling_nonpositive = false;
    c.sampled_G = std::max(c.sampled_G, g0);
  }
  if (spec.G > 0.0 && c.sampled_G > spec.G) c.g0_bounded = false;
  return c;
}

void validate_source(const SourceSpec& spec, double u_max) {
  if (spec.form == SourceForm::tabulated) spec.table.validate("source");
  if (!(spec.H > 0.0)) throw ConfigError("source ceiling H must be positive");
  if (spec.form == SourceForm::destabilizing && !(spec.gamma > 0.0)) {
    throw ConfigError("destabilizing source needs gamma > 0");
  }
  if (!ceiling_compliant(spec)) return;
  const SourceCheck c = check_source(spec, u_max);
  if (!c.g0_nonnegative) throw ConfigError("source violates g(u, 0) >= 0");
  if (!c.g0_bounded) throw ConfigError("source violates g(u, 0) <= G");
  if (!c.ceiling_nonpositive) throw ConfigError("source violates g(u, H) <= 0");
}

// ---------------------------------------------------------------------------

Field diffusion_field(const DiffusionSpec& spec, const Grid1D& grid) {
  Field d(static_cast<size_t>(grid.n_cells()));
  switch (spec.form) {
    case DiffusionForm::constant:
      std::fill(d.begin(), d.end(), spec.value);
      break;
    case DiffusionForm::linear:
      for (int i = 0; i < grid.n_cells(); ++i) {
        d[static_cast<size_t>(i)] = spec.value + spec.slope * grid.node(i);
      }
      break;
    case DiffusionForm::tabulated:
      if (spec.nodes.size() != d.size()) {
        throw ConfigError("tabulated diffusion needs exactly n_cells values");
      }
      d = spec.nodes;
      break;
  }
  for (double v : d) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("diffusion d(x) must be positive and finite at every node");
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

double paper_profile_left(double x, double x_l) { return std::exp(-(x - x_l) * (x - x_l)); }

double paper_profile_right(double x, double x_l, double x_r) {
  return std::exp(-x_l * x_l) * (1.0 - x / x_r);
}

double paper_profile(double x, double x_l, double x_r) {
  if (x > x_l && x <= 0.0) return paper_profile_left(x, x_l);
  if (x > 0.0 && x <= x_r) return paper_profile_right(x, x_l, x_r);
  return 0.0;
}

Field eval_initial_u(const InitialCondition& ic, const Grid1D& grid) {
  const size_t n = static_cast<size_t>(grid.n_cells());
  Field u(n, 0.0);
  switch (ic.form) {
    case InitialForm::paper: {
      if (!(ic.x_l < 0.0) || !(ic.x_r > 0.0)) {
        throw ConfigError("paper initial profile needs x_l < 0 < x_r");
      }
      const double a = grid.half_length();
      if (ic.x_l < -a || ic.x_r > a) throw ConfigError("paper initial profile needs -a <= x_l and x_r <= a");
      for (size_t i = 0; i < n; ++i) u[i] = ic.amplitude * paper_profile(grid.nodes()[i], ic.x_l, ic.x_r);
      break;
    }
    case InitialForm::constant:
      std::fill(u.begin(), u.end(), ic.u_value);
      break;
    case InitialForm::perturbed:
      for (size_t i = 0; i < n; ++i) {
        const double s = (grid.nodes()[i] - ic.bump_center) / ic.bump_width;
        u[i] = ic.u_value + ic.bump_amplitude * std::exp(-s * s);
      }
      break;
    case InitialForm::tabulated:
      if (ic.u_table.size() != n) throw ConfigError("tabulated u0 needs exactly n_cells values");
      u = ic.u_table;
      break;
  }
  bool any_positive = false;
  for (double v : u) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("initial density must be finite and nonnegative");
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw ConfigError("initial density must not vanish identically");
  return u;
}

Field eval_initial_h(const InitialCondition& ic, const Grid1D& grid, double H) {
  const size_t n = static_cast<size_t>(grid.n_cells());
  Field h;
  if (ic.h_form == AcidInitialForm::constant) {
    h.assign(n, ic.h_value);
  } else {
    if (ic.h_table.size() != n) throw ConfigError("tabulated h0 needs exactly n_cells values");
    h = ic.h_table;
  }
  bool all_at_ceiling = true;
  for (double v : h) {
    if (!(v >= 0.0) || !(v <= H)) throw ConfigError("initial acidity must lie in [0, H]");
    all_at_ceiling = all_at_ceiling && v == H;
  }
  if (all_at_ceiling) throw ConfigError("initial acidity must not equal H identically");
  return h;
}

}  // namespace invasion
