#pragma once

#include <string>
#include <vector>

#include "invasion/convolution.hpp"
#include "invasion/core.hpp"
#include "invasion/kernels.hpp"

namespace invasion {

/// Coefficients of the coupled density / acidity system.
struct ModelParams {
  double alpha = 2.0;
  double beta = 1.0;
  /// Permits exponents beyond the global-existence range.
  bool blow_up_study = false;
  DiffusionSpec diffusion;
  double D_H = 1.0;
  GrowthSpec growth;
  SourceSpec source;
  KernelSpec kernel;
  bool renormalize_kernel = true;
  KernelBoundary kernel_boundary = KernelBoundary::zero;
  ConvolutionEngine engine = ConvolutionEngine::automatic;
};

/// True when alpha <= 1 + beta. The strict inequality of the existence theory
/// is relaxed to admit its limit value alpha = 1 + beta.
bool exponents_admissible(double alpha, double beta);

/// Validates every sub-specification; throws ConfigError naming the violated
/// condition. Returns human-readable warnings (e.g. blow-up study enabled).
std::vector<std::string> validate_model(const ModelParams& params, const Grid1D& grid, double u_max = 10.0);

/// Flags that make the existence / long-time theory silent for a run.
struct TheoryFlags {
  bool instability_permitted = false;  // destabilizing source
  bool theory_not_applicable = false;  // sign-changing kernel
  bool transport_only = false;         // mu identically zero
  bool beyond_existence_range = false; // alpha > 1 + beta
};

TheoryFlags theory_flags(const ModelParams& params);

}  // namespace invasion
