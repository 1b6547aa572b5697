#include "pgas/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>

namespace pgas {

namespace {

// One cached plan pair per transform size. Buffers are fftw-allocated for
// alignment; input is copied in so caller arrays are never destroyed.
struct PlanPair {
  int n{0};
  double* real{nullptr};
  fftw_complex* cplx{nullptr};
  fftw_plan fwd{}, inv{};

  explicit PlanPair(int n_) : n(n_) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    PGAS_CHECK_INTERNAL(real && cplx, "fft: allocation failed");
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
    PGAS_CHECK_INTERNAL(fwd && inv, "fft: planning failed");
  }
  ~PlanPair() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(cplx);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.try_emplace(n, n).first;
  return it->second;
}

}  // namespace

ArrayXcd fft_forward(const ArrayXd& f) {
  const int n = static_cast<int>(f.size());
  PGAS_CHECK_ARG(n >= 2 && n % 2 == 0, "fft: length must be even and >= 2");
  PlanPair& pp = plans_for(n);
  std::copy(f.data(), f.data() + n, pp.real);
  fftw_execute(pp.fwd);
  ArrayXcd out(n / 2 + 1);
  for (int m = 0; m <= n / 2; ++m)
    out[m] = std::complex<double>(pp.cplx[m][0], pp.cplx[m][1]);
  return out;
}

ArrayXd fft_inverse(const ArrayXcd& fhat, int n) {
  PGAS_CHECK_ARG(n >= 2 && n % 2 == 0, "fft: length must be even and >= 2");
  PGAS_CHECK_ARG(fhat.size() == n / 2 + 1, "fft: mode count mismatch");
  PlanPair& pp = plans_for(n);
  for (int m = 0; m <= n / 2; ++m) {
    pp.cplx[m][0] = fhat[m].real();
    pp.cplx[m][1] = fhat[m].imag();
  }
  fftw_execute(pp.inv);
  ArrayXd out(n);
  const double scale = 1.0 / n;
  for (int j = 0; j < n; ++j) out[j] = pp.real[j] * scale;
  return out;
}

ArrayXd fourier_diff(const ArrayXd& f, double L_half, int order) {
  PGAS_CHECK_ARG(L_half > 0, "fourier_diff: domain half-length must be > 0");
  PGAS_CHECK_ARG(order >= 1 && order <= 4, "fourier_diff: order in 1..4");
  const int n = static_cast<int>(f.size());
  ArrayXcd fhat = fft_forward(f);
  const double k0 = M_PI / L_half;
  for (int m = 0; m <= n / 2; ++m) {
    const double k = k0 * m;
    std::complex<double> factor;
    switch (order) {
      case 1: factor = {0.0, k}; break;
      case 2: factor = {-k * k, 0.0}; break;
      case 3: factor = {0.0, -k * k * k}; break;
      default: factor = {k * k * k * k, 0.0}; break;
    }
    fhat[m] *= factor;
  }
  if (order % 2 == 1) fhat[n / 2] = 0.0;
  return fft_inverse(fhat, n);
}

int dealias_cutoff(int n) { return n / 3; }

void dealias_23(ArrayXcd& fhat, int n) {
  PGAS_CHECK_ARG(fhat.size() == n / 2 + 1, "dealias: mode count mismatch");
  const int cut = dealias_cutoff(n);
  for (int m = cut + 1; m <= n / 2; ++m) fhat[m] = 0.0;
}

}  // namespace pgas
