#pragma once
// Real-to-halfcomplex spectral transforms on periodic cell-centered grids,
// plus spectral differentiation and the 2/3-rule dealiasing filter. Plans are
// created in deterministic (estimate) mode and cached per size; the library
// is single-threaded by design.

#include <complex>

#include "pgas/grid.hpp"
#include "pgas/util.hpp"

namespace pgas {

using ArrayXcd = Eigen::ArrayXcd;

// Unnormalized forward transform; output has n/2 + 1 modes.
ArrayXcd fft_forward(const ArrayXd& f);

// Inverse transform including the 1/n normalization; n is the real length.
ArrayXd fft_inverse(const ArrayXcd& fhat, int n);

// Spectral derivative of given order on [-L_half, L_half]; wavenumbers are
// k_m = pi m / L_half. Odd orders zero the Nyquist mode (its sign is
// ambiguous); even orders keep it.
ArrayXd fourier_diff(const ArrayXd& f, double L_half, int order);

// Zero all modes with index above n/3 (classic 2/3 rule), in place.
void dealias_23(ArrayXcd& fhat, int n);

// Largest retained mode index under the 2/3 rule.
int dealias_cutoff(int n);

}  // namespace pgas
