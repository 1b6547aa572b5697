#pragma once
// Period-cell averaging operators. Inputs are uniform midpoint samples of a
// field over exactly one period (unit cell unless a period length is given):
//   mean(f)            -> <f>, the cell average
//   fluct(f)           -> {f} = f - <f>
//   fluct_antideriv(f) -> [[f]], the mean-free antiderivative of {f}
//
// The quadrature is the periodic midpoint rule (equivalent to the periodic
// trapezoid rule on these samples): spectrally accurate for smooth periodic
// fields and exact for piecewise-constant fields whose breakpoints sit on
// cell edges. The antiderivative integrates the cellwise-constant
// reconstruction, so a two-level input yields an exact triangle wave at the
// sample points. Sums are compensated (Kahan) so the <{f}> = 0 and
// <[[f]]> = 0 identities hold to round-off.

#include "pgas/util.hpp"

namespace pgas {

inline double mean_periodic(const ArrayXd& f) {
  PGAS_CHECK_ARG(f.size() >= 2, "mean_periodic: need at least 2 samples");
  KahanSum<double> acc;
  for (Eigen::Index i = 0; i < f.size(); ++i) acc.add(f[i]);
  return acc.value() / static_cast<double>(f.size());
}

inline ArrayXd fluct(const ArrayXd& f) {
  PGAS_CHECK_ARG(f.size() >= 2, "fluct: need at least 2 samples");
  return f - mean_periodic(f);
}

inline ArrayXd fluct_antideriv(const ArrayXd& f, double period = 1.0) {
  PGAS_CHECK_ARG(f.size() >= 2, "fluct_antideriv: need at least 2 samples");
  PGAS_CHECK_ARG(period > 0, "fluct_antideriv: period must be positive");
  const Eigen::Index n = f.size();
  const double h = period / static_cast<double>(n);
  const ArrayXd g = fluct(f);
  ArrayXd F(n);
  // F(y_i) with y_i = (i + 1/2) h: integral of the cellwise-constant
  // reconstruction of {f} from the left cell edge of the period.
  KahanSum<double> run;  // integral up to the left edge of cell i
  for (Eigen::Index i = 0; i < n; ++i) {
    F[i] = run.value() + 0.5 * h * g[i];
    run.add(h * g[i]);
  }
  return F - mean_periodic(F);
}

// <f g> over the cell, compensated.
inline double mean_product(const ArrayXd& f, const ArrayXd& g) {
  PGAS_CHECK_ARG(f.size() == g.size() && f.size() >= 2,
                 "mean_product: size mismatch");
  KahanSum<double> acc;
  for (Eigen::Index i = 0; i < f.size(); ++i) acc.add(f[i] * g[i]);
  return acc.value() / static_cast<double>(f.size());
}

}  // namespace pgas
