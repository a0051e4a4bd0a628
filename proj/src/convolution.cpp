#include "invasion/convolution.hpp"

#include <complex>
#include <mutex>

#include <fftw3.h>

#include "fftw_lock.hpp"

namespace invasion {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

int mirror_index(int idx, int n) {
  if (idx < 0) return -1 - idx;
  if (idx >= n) return 2 * n - 1 - idx;
  return idx;
}

// Smallest 2^a 3^b 5^c not below n.
int fast_length(int n) {
  for (int len = std::max(n, 1);; ++len) {
    int r = len;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return len;
  }
}

void direct_into(const KernelStencil& st, std::span<const double> f, int n, KernelBoundary boundary,
                 std::span<double> out) {
  const int m = st.radius;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -m; j <= m; ++j) {
      int idx = i - j;
      if (idx < 0 || idx >= n) {
        if (boundary == KernelBoundary::zero) continue;
        idx = mirror_index(idx, n);
      }
      acc += st.weight(j) * f[static_cast<size_t>(idx)];
    }
    out[static_cast<size_t>(i)] = acc * st.dx;
  }
}

void check_length(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != static_cast<size_t>(grid.n_cells())) {
    throw std::invalid_argument("field length does not match the grid");
  }
}

}  // namespace

Field convolve_direct(const KernelStencil& stencil, std::span<const double> f, const Grid1D& grid,
                      KernelBoundary boundary) {
  check_length(f, grid);
  Field out(f.size());
  direct_into(stencil, f, grid.n_cells(), boundary, out);
  return out;
}

Field convolve_spectral(const KernelStencil& stencil, std::span<const double> f, const Grid1D& grid,
                        KernelBoundary boundary) {
  check_length(f, grid);
  Convolver conv(stencil, grid, boundary, ConvolutionEngine::spectral);
  return conv.apply(f);
}

// ---------------------------------------------------------------------------

struct Convolver::Spectral {
  int length = 0;   // cyclic length L
  int offset = 0;   // index of field node 0 inside the padded input
  double* input = nullptr;
  fftw_complex* spectrum = nullptr;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(input);
    fftw_free(spectrum);
  }
};

Convolver::Convolver(KernelStencil stencil, const Grid1D& grid, KernelBoundary boundary,
                     ConvolutionEngine engine)
    : stencil_(std::move(stencil)), n_cells_(grid.n_cells()), boundary_(boundary), engine_(engine) {
  if (engine_ == ConvolutionEngine::automatic) {
    engine_ = static_cast<int>(stencil_.weights.size()) > kSpectralThreshold ? ConvolutionEngine::spectral
                                                                              : ConvolutionEngine::direct;
  }
  if (engine_ != ConvolutionEngine::spectral) return;

  const int m = stencil_.radius;
  auto sp = std::make_unique<Spectral>();
  // Reflected fields are padded explicitly with their mirror images, so the
  // cyclic product only needs to avoid wrap-around of the padded signal.
  const int signal = boundary_ == KernelBoundary::reflect ? n_cells_ + 2 * m : n_cells_;
  sp->offset = boundary_ == KernelBoundary::reflect ? m : 0;
  sp->length = fast_length(signal + 2 * m + 1);
  const int L = sp->length;
  const int bins = L / 2 + 1;
  sp->input = fftw_alloc_real(static_cast<size_t>(L));
  sp->spectrum = fftw_alloc_complex(static_cast<size_t>(bins));
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    sp->forward = fftw_plan_dft_r2c_1d(L, sp->input, sp->spectrum, FFTW_ESTIMATE);
    sp->backward = fftw_plan_dft_c2r_1d(L, sp->spectrum, sp->input, FFTW_ESTIMATE);
  }
  // Kernel spectrum, scaled by dx and the inverse-transform normalization.
  std::fill(sp->input, sp->input + L, 0.0);
  for (int j = -m; j <= m; ++j) sp->input[(j + L) % L] = stencil_.weight(j);
  fftw_execute(sp->forward);
  sp->kernel_hat.resize(static_cast<size_t>(bins));
  const double scale = stencil_.dx / L;
  for (int b = 0; b < bins; ++b) {
    sp->kernel_hat[static_cast<size_t>(b)] = std::complex<double>(sp->spectrum[b][0], sp->spectrum[b][1]) * scale;
  }
  spectral_ = std::move(sp);
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

void Convolver::apply(std::span<const double> f, std::span<double> out) {
  const int n = n_cells_;
  if (engine_ != ConvolutionEngine::spectral) {
    direct_into(stencil_, f, n, boundary_, out);
    return;
  }
  Spectral& sp = *spectral_;
  const int L = sp.length;
  std::fill(sp.input, sp.input + L, 0.0);
  if (boundary_ == KernelBoundary::reflect) {
    const int m = stencil_.radius;
    for (int k = -m; k < n + m; ++k) sp.input[k + m] = f[static_cast<size_t>(mirror_index(k, n))];
  } else {
    for (int k = 0; k < n; ++k) sp.input[k] = f[static_cast<size_t>(k)];
  }
  fftw_execute(sp.forward);
  const int bins = L / 2 + 1;
  for (int b = 0; b < bins; ++b) {
    const std::complex<double> v =
        std::complex<double>(sp.spectrum[b][0], sp.spectrum[b][1]) * sp.kernel_hat[static_cast<size_t>(b)];
    sp.spectrum[b][0] = v.real();
    sp.spectrum[b][1] = v.imag();
  }
  fftw_execute(sp.backward);
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = sp.input[i + sp.offset];
}

Field Convolver::apply(std::span<const double> f) {
  Field out(static_cast<size_t>(n_cells_));
  apply(f, out);
  return out;
}

}  // namespace invasion
