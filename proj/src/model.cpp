#include "invasion/model.hpp"

#include <cmath>
#include <sstream>

namespace invasion {

bool exponents_admissible(double alpha, double beta) { return alpha <= 1.0 + beta; }

std::vector<std::string> validate_model(const ModelParams& params, const Grid1D& grid, double u_max) {
  std::vector<std::string> warnings;
  if (!(params.alpha >= 1.0) || !std::isfinite(params.alpha)) throw ConfigError("alpha must be >= 1");
  if (!(params.beta >= 1.0) || !std::isfinite(params.beta)) throw ConfigError("beta must be >= 1");
  if (!exponents_admissible(params.alpha, params.beta)) {
    if (!params.blow_up_study) {
      std::ostringstream msg;
      msg << "alpha <= 1 + beta required for global existence unless blow_up_study = true (alpha="
          << params.alpha << ", beta=" << params.beta << ")";
      throw ConfigError(msg.str());
    }
    warnings.push_back("alpha exceeds 1 + beta: blow-up study, global existence not expected");
  }
  if (!(params.D_H > 0.0) || !std::isfinite(params.D_H)) throw ConfigError("D_H must be positive");
  diffusion_field(params.diffusion, grid);
  validate_growth(params.growth, params.source.H);
  validate_source(params.source, u_max);
  params.kernel.validate();
  if (!kernel_nonnegative(params.kernel)) {
    warnings.push_back("sign-changing kernel: theory-not-applicable");
  }
  if (!ceiling_compliant(params.source)) {
    warnings.push_back("destabilizing source: instability-permitted, acidity left unclipped");
  }
  return warnings;
}

TheoryFlags theory_flags(const ModelParams& params) {
  TheoryFlags f;
  f.instability_permitted = !ceiling_compliant(params.source);
  f.theory_not_applicable = !kernel_nonnegative(params.kernel);
  f.transport_only = transport_only(params.growth, params.source.H);
  f.beyond_existence_range = !exponents_admissible(params.alpha, params.beta);
  return f;
}

}  // namespace invasion
