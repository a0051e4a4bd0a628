#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace invasion {

using Field = std::vector<double>;

// Error taxonomy. ConfigError maps to exit code 2 in the CLI, IoError to 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric interval [-a, a] with no-flux walls.
struct Domain1D {
  double half_length = 20.0;

  double length() const { return 2.0 * half_length; }
};

/// Uniform cell-centered grid over a Domain1D.
class Grid1D {
 public:
  static constexpr int kMinCells = 8;

  Grid1D(Domain1D domain, int n_cells);

  const Domain1D& domain() const { return domain_; }
  double half_length() const { return domain_.half_length; }
  int n_cells() const { return n_cells_; }
  double dx() const { return dx_; }
  double node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  const Field& nodes() const { return nodes_; }

 private:
  Domain1D domain_;
  int n_cells_;
  double dx_;
  Field nodes_;
};

Grid1D build_grid(Domain1D domain, int n_cells);

/// Paired density / acidity fields at one time.
struct State {
  Field u;
  Field h;
  double t = 0.0;
};

// ---------------------------------------------------------------------------
// Piecewise-linear lookup tables for user-supplied coefficient functions.

struct Table1D {
  std::vector<double> x;
  std::vector<double> y;

  bool empty() const { return x.empty(); }
  /// Linear interpolation, constant extrapolation outside the abscissae.
  double operator()(double at) const;
  void validate(const std::string& what) const;
};

/// Bilinear table over a rectangular (u, h) lattice; values row-major in u.
struct Table2D {
  std::vector<double> u;
  std::vector<double> h;
  std::vector<double> values;

  double operator()(double at_u, double at_h) const;
  void validate(const std::string& what) const;
};

// ---------------------------------------------------------------------------
// Growth rate mu(h).

enum class GrowthForm { constant, rational, tabulated };

struct GrowthSpec {
  GrowthForm form = GrowthForm::rational;
  double mu0 = 1.0;
  /// Declared lower bound on mu over [0, H]; zero means "derive by sampling".
  double delta = 0.0;
  Table1D table;
};

double eval_mu(const GrowthSpec& spec, double h);
double eval_mu_derivative(const GrowthSpec& spec, double h);

struct GrowthBounds {
  double min_value = 0.0;   // sampled infimum over [0, H]
  double max_value = 0.0;
  double lipschitz = 0.0;   // finite-difference estimate
  double at_zero = 0.0;
};

GrowthBounds sample_growth(const GrowthSpec& spec, double H, int samples = 1000);

/// Throws ConfigError when the sampled minimum falls below the declared
/// delta, or when mu is negative. A vanishing mu is permitted (transport-only
/// runs) and reported by `transport_only`.
void validate_growth(const GrowthSpec& spec, double H);
bool transport_only(const GrowthSpec& spec, double H);

// ---------------------------------------------------------------------------
// Proton source g(u, h).

enum class SourceForm { logistic_acid, destabilizing, none, tabulated };

struct SourceSpec {
  SourceForm form = SourceForm::logistic_acid;
  double gamma = 0.8;
  /// Ceiling concentration H.
  double H = 1.0;
  /// Bound on g(u, 0); zero means "derive by sampling".
  double G = 0.0;
  Table2D table;
};

double eval_g(const SourceSpec& spec, double u, double h);
double eval_g_du(const SourceSpec& spec, double u, double h);
double eval_g_dh(const SourceSpec& spec, double u, double h);

/// The destabilizing form deliberately violates g(u, H) <= 0; it runs as
/// "instability-permitted" and is exempt from the ceiling checks.
bool ceiling_compliant(const SourceSpec& spec);

struct SourceCheck {
  bool g0_nonnegative = true;
  bool g0_bounded = true;
  bool ceiling_nonpositive = true;
  double sampled_G = 0.0;

  bool ok() const { return g0_nonnegative && g0_bounded && ceiling_nonpositive; }
};

SourceCheck check_source(const SourceSpec& spec, double u_max, int samples = 1000);
/// Throws ConfigError for a ceiling-compliant form that fails check_source.
void validate_source(const SourceSpec& spec, double u_max);

// ---------------------------------------------------------------------------
// Diffusion coefficient d(x), the 1D reduction of the diffusion tensor.

enum class DiffusionForm { constant, linear, tabulated };

struct DiffusionSpec {
  DiffusionForm form = DiffusionForm::constant;
  double value = 1.0;
  double slope = 0.0;        // linear form: d(x) = value + slope * x
  std::vector<double> nodes; // tabulated form: one value per cell
};

Field diffusion_field(const DiffusionSpec& spec, const Grid1D& grid);

// ---------------------------------------------------------------------------
// Initial data.

enum class InitialForm { paper, constant, tabulated, perturbed };
enum class AcidInitialForm { constant, tabulated };

struct InitialCondition {
  InitialForm form = InitialForm::paper;
  double x_l = -5.0;
  double x_r = 5.0;
  double amplitude = 1.0;     // scales the paper profile
  double u_value = 1.0;       // constant / perturbed base level
  double bump_amplitude = 0.01;
  double bump_center = 0.0;
  double bump_width = 1.0;
  std::vector<double> u_table;

  AcidInitialForm h_form = AcidInitialForm::constant;
  double h_value = 0.0;
  std::vector<double> h_table;
};

/// Left and right branches of the piecewise initial profile, exposed so the
/// continuity at x = 0 can be checked branch by branch.
double paper_profile_left(double x, double x_l);
double paper_profile_right(double x, double x_l, double x_r);
double paper_profile(double x, double x_l, double x_r);

Field eval_initial_u(const InitialCondition& ic, const Grid1D& grid);
Field eval_initial_h(const InitialCondition& ic, const Grid1D& grid, double H);

}  // namespace invasion
