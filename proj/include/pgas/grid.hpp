#pragma once
// Uniform 1D grids. All grids are cell-centered: node j sits at
// lo + (j + 1/2) dx. The half-cell offset keeps sample points away from
// isolated zeros of backgrounds like 1 + cos(2 pi chi) for every even cell
// count, which matters because several scenarios use exactly that profile.

#include <vector>

#include "pgas/util.hpp"

namespace pgas {

enum class CoordKind { eulerian_chi, lagrangian_x };

struct Grid1D {
  double lo{0}, hi{1};
  int n{0};
  CoordKind kind{CoordKind::eulerian_chi};

  double dx() const { return (hi - lo) / n; }
  double center(int j) const { return lo + (j + 0.5) * dx(); }
  double length() const { return hi - lo; }

  ArrayXd centers() const {
    ArrayXd x(n);
    const double h = dx();
    for (int j = 0; j < n; ++j) x[j] = lo + (j + 0.5) * h;
    return x;
  }

  void validate(int min_cells = 2) const {
    PGAS_CHECK_ARG(hi > lo, "grid: hi must exceed lo");
    PGAS_CHECK_ARG(n >= min_cells, "grid: too few cells");
  }
};

// Periodic grid for Fourier transforms over [-L, L]. Cell count must be even
// and factor into small primes so the transforms stay fast; powers of two are
// typical but not required (paper-style grids such as 1/100 spacing produce
// counts like 2^9 * 100).
struct SpectralGrid {
  double L_half{1};
  int n{0};

  double length() const { return 2 * L_half; }
  double dx() const { return length() / n; }

  ArrayXd nodes() const {
    ArrayXd x(n);
    const double h = dx();
    for (int j = 0; j < n; ++j) x[j] = -L_half + (j + 0.5) * h;
    return x;
  }

  // Real-to-complex layout: k_m = m * pi / L_half for m = 0 .. n/2.
  ArrayXd wavenumbers() const {
    ArrayXd k(n / 2 + 1);
    const double k1 = M_PI / L_half;
    for (int m = 0; m <= n / 2; ++m) k[m] = m * k1;
    return k;
  }

  void validate() const {
    PGAS_CHECK_ARG(L_half > 0, "spectral grid: L_half must be positive");
    PGAS_CHECK_ARG(n >= 8 && n % 2 == 0,
                   "spectral grid: n must be even and at least 8");
    int m = n;
    for (int p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    PGAS_CHECK_ARG(m == 1,
                   "spectral grid: n must factor into primes <= 7 for fast "
                   "transforms");
  }

  Grid1D as_grid(CoordKind kind = CoordKind::eulerian_chi) const {
    return Grid1D{-L_half, L_half, n, kind};
  }
};

}  // namespace pgas
