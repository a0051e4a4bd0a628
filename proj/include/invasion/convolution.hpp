#pragma once

#include <memory>
#include <span>

#include "invasion/core.hpp"
#include "invasion/kernels.hpp"

namespace invasion {

enum class ConvolutionEngine { direct, spectral, automatic };

/// (J * f)_i = sum_j w_j f_{i-j} dx, with f continued outside the domain
/// according to `boundary`.
Field convolve_direct(const KernelStencil& stencil, std::span<const double> f, const Grid1D& grid,
                      KernelBoundary boundary = KernelBoundary::zero);

/// Same result via zero-padded FFT cyclic convolution. One-shot helper; the
/// Convolver below caches the transforms for repeated use.
Field convolve_spectral(const KernelStencil& stencil, std::span<const double> f, const Grid1D& grid,
                        KernelBoundary boundary = KernelBoundary::zero);

/// Reusable convolution operator bound to one stencil and grid. Not
/// thread-safe: each simulation loop owns its own instance.
class Convolver {
 public:
  Convolver(KernelStencil stencil, const Grid1D& grid, KernelBoundary boundary,
            ConvolutionEngine engine = ConvolutionEngine::automatic);
  ~Convolver();
  Convolver(Convolver&&) noexcept;
  Convolver& operator=(Convolver&&) noexcept;
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  void apply(std::span<const double> f, std::span<double> out);
  Field apply(std::span<const double> f);

  const KernelStencil& stencil() const { return stencil_; }
  ConvolutionEngine engine() const { return engine_; }

  /// Stencils wider than this use the spectral engine under `automatic`.
  static constexpr int kSpectralThreshold = 64;

 private:
  struct Spectral;

  KernelStencil stencil_;
  int n_cells_;
  KernelBoundary boundary_;
  ConvolutionEngine engine_;
  std::unique_ptr<Spectral> spectral_;
};

}  // namespace invasion
