#include "pgas/medium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "pgas/averaging.hpp"
#include "pgas/rng.hpp"

namespace pgas {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Wrap chi into [0, period) and report the whole-period count, robustly for
// negative arguments.
inline void split_period(double chi, double period, double& k, double& y) {
  k = std::floor(chi / period);
  y = chi - k * period;
  if (y >= period) {  // guard against floor rounding at the seam
    y -= period;
    k += 1;
  }
  if (y < 0) {
    y += period;
    k -= 1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MediumProfile

double MediumProfile::shape_period() const {
  switch (kind) {
    case MediumKind::piecewise_constant:
      return delta;
    case MediumKind::sinusoidal:
      return delta / sin_wavenumber;
    case MediumKind::random_modulated:
    case MediumKind::tabulated:
      return tab_hi - tab_lo;
  }
  PGAS_CHECK_INTERNAL(false, "unreachable medium kind");
  return 0;
}

double MediumProfile::rho0(double chi) const {
  switch (kind) {
    case MediumKind::piecewise_constant: {
      double k, y;
      split_period(chi, delta, k, y);
      return (y < pwc_duty * delta) ? pwc_rho_low : pwc_rho_high;
    }
    case MediumKind::sinusoidal:
      return sin_mean + sin_amplitude * std::cos(kTwoPi * sin_wavenumber * chi / delta);
    case MediumKind::random_modulated:
    case MediumKind::tabulated: {
      const double period = tab_hi - tab_lo;
      const auto m = tab_samples.size();
      double k, y;
      split_period(chi - tab_lo, period, k, y);
      const double t = y / period * static_cast<double>(m);
      auto i0 = static_cast<Eigen::Index>(std::floor(t));
      if (i0 >= m) i0 = m - 1;
      const double frac = t - static_cast<double>(i0);
      const Eigen::Index i1 = (i0 + 1) % m;
      return tab_samples[i0] + frac * (tab_samples[i1] - tab_samples[i0]);
    }
  }
  PGAS_CHECK_INTERNAL(false, "unreachable medium kind");
  return 0;
}

ArrayXd MediumProfile::rho0(const ArrayXd& chi) const {
  ArrayXd out(chi.size());
  for (Eigen::Index i = 0; i < chi.size(); ++i) out[i] = rho0(chi[i]);
  return out;
}

double MediumProfile::mass_per_period() const {
  switch (kind) {
    case MediumKind::piecewise_constant:
      return delta * (pwc_duty * pwc_rho_low + (1 - pwc_duty) * pwc_rho_high);
    case MediumKind::sinusoidal:
      return shape_period() * sin_mean;
    case MediumKind::random_modulated:
    case MediumKind::tabulated: {
      // Trapezoid of the periodic linear interpolant == node mean * period.
      return mean_periodic(tab_samples) * (tab_hi - tab_lo);
    }
  }
  PGAS_CHECK_INTERNAL(false, "unreachable medium kind");
  return 0;
}

double MediumProfile::mass_antideriv(double chi) const {
  switch (kind) {
    case MediumKind::piecewise_constant: {
      double k, y;
      split_period(chi, delta, k, y);
      const double split = pwc_duty * delta;
      const double within = (y < split)
                                ? pwc_rho_low * y
                                : pwc_rho_low * split + pwc_rho_high * (y - split);
      return k * mass_per_period() + within;
    }
    case MediumKind::sinusoidal: {
      const double w = kTwoPi * sin_wavenumber / delta;
      return sin_mean * chi + sin_amplitude / w * std::sin(w * chi);
    }
    case MediumKind::random_modulated:
    case MediumKind::tabulated: {
      const double period = tab_hi - tab_lo;
      const auto m = tab_samples.size();
      const double h = period / static_cast<double>(m);
      if (tab_cum_cache.size() != m + 1) {
        tab_cum_cache.resize(m + 1);
        KahanSum<double> acc;
        tab_cum_cache[0] = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
          acc.add(0.5 * h * (tab_samples[i] + tab_samples[(i + 1) % m]));
          tab_cum_cache[i + 1] = acc.value();
        }
      }
      // Cumulative integral from tab_lo, evaluated at chi and at 0, so the
      // anchor integral_0^chi is exact regardless of tab_lo.
      auto cum_from_lo = [&](double pos) {
        double k, y;
        split_period(pos - tab_lo, period, k, y);
        const double t = y / h;
        auto i0 = static_cast<Eigen::Index>(std::floor(t));
        if (i0 >= m) i0 = m - 1;
        const double frac = t - static_cast<double>(i0);
        const Eigen::Index i1 = (i0 + 1) % m;
        const double rho_here =
            tab_samples[i0] + frac * (tab_samples[i1] - tab_samples[i0]);
        const double partial = 0.5 * frac * h * (tab_samples[i0] + rho_here);
        return k * tab_cum_cache[m] + tab_cum_cache[i0] + partial;
      };
      return cum_from_lo(chi) - cum_from_lo(0.0);
    }
  }
  PGAS_CHECK_INTERNAL(false, "unreachable medium kind");
  return 0;
}

void MediumProfile::validate() const {
  PGAS_CHECK_ARG(delta > 0, "medium: delta must be positive");
  switch (kind) {
    case MediumKind::piecewise_constant:
      PGAS_CHECK_ARG(pwc_rho_low > 0 && pwc_rho_high > 0,
                     "medium: densities must be positive");
      PGAS_CHECK_ARG(pwc_duty > 0 && pwc_duty < 1,
                     "medium: duty fraction must lie in (0,1)");
      break;
    case MediumKind::sinusoidal:
      PGAS_CHECK_ARG(sin_mean > 0, "medium: mean density must be positive");
      PGAS_CHECK_ARG(std::abs(sin_amplitude) <= sin_mean,
                     "medium: |amplitude| must not exceed the mean");
      PGAS_CHECK_ARG(sin_wavenumber > 0, "medium: wavenumber must be positive");
      break;
    case MediumKind::random_modulated:
    case MediumKind::tabulated:
      PGAS_CHECK_ARG(tab_hi > tab_lo, "medium: table range must be nonempty");
      PGAS_CHECK_ARG(tab_samples.size() >= 4, "medium: too few table samples");
      PGAS_CHECK_ARG((tab_samples > 0).all(),
                     "medium: table densities must be positive");
      break;
  }
}

std::string MediumProfile::to_json() const {
  std::ostringstream os;
  os << "{";
  switch (kind) {
    case MediumKind::piecewise_constant:
      os << "\"kind\":\"piecewise_constant\",\"rho_low\":"
         << fmt_g17(pwc_rho_low) << ",\"rho_high\":" << fmt_g17(pwc_rho_high)
         << ",\"duty\":" << fmt_g17(pwc_duty);
      break;
    case MediumKind::sinusoidal:
      os << "\"kind\":\"sinusoidal\",\"mean\":" << fmt_g17(sin_mean)
         << ",\"amplitude\":" << fmt_g17(sin_amplitude)
         << ",\"wavenumber\":" << fmt_g17(sin_wavenumber);
      break;
    case MediumKind::random_modulated:
      os << "\"kind\":\"random_modulated\",\"seed\":" << random_params.seed
         << ",\"n_smooth\":" << random_params.n_smooth
         << ",\"grid_n\":" << random_params.grid_n
         << ",\"L\":" << fmt_g17(random_params.L)
         << ",\"sigma_A\":" << fmt_g17(random_params.sigma_A)
         << ",\"sigma_B\":" << fmt_g17(random_params.sigma_B)
         << ",\"samples_hash\":\"" << hash_hex(fnv1a64_array(tab_samples))
         << "\"";
      break;
    case MediumKind::tabulated:
      os << "\"kind\":\"tabulated\",\"lo\":" << fmt_g17(tab_lo)
         << ",\"hi\":" << fmt_g17(tab_hi) << ",\"n\":" << tab_samples.size()
         << ",\"samples_hash\":\"" << hash_hex(fnv1a64_array(tab_samples))
         << "\"";
      break;
  }
  os << ",\"delta\":" << fmt_g17(delta) << "}";
  return os.str();
}

MediumProfile MediumProfile::piecewise(double rho_low, double rho_high,
                                       double duty, double delta) {
  MediumProfile m;
  m.kind = MediumKind::piecewise_constant;
  m.pwc_rho_low = rho_low;
  m.pwc_rho_high = rho_high;
  m.pwc_duty = duty;
  m.delta = delta;
  m.description = "piecewise-constant two-level background";
  m.validate();
  return m;
}

MediumProfile MediumProfile::sinusoid(double mean, double amplitude,
                                      double wavenumber, double delta) {
  MediumProfile m;
  m.kind = MediumKind::sinusoidal;
  m.sin_mean = mean;
  m.sin_amplitude = amplitude;
  m.sin_wavenumber = wavenumber;
  m.delta = delta;
  m.description = "sinusoidal background";
  m.validate();
  return m;
}

MediumProfile MediumProfile::constant(double rho) {
  MediumProfile m;
  m.kind = MediumKind::sinusoidal;
  m.sin_mean = rho;
  m.sin_amplitude = 0;
  m.sin_wavenumber = 1;
  m.delta = 1;
  m.description = "constant background";
  m.validate();
  return m;
}

MediumProfile MediumProfile::tabulated_nodes(double lo, double hi,
                                             ArrayXd samples, double delta) {
  MediumProfile m;
  m.kind = MediumKind::tabulated;
  m.tab_lo = lo;
  m.tab_hi = hi;
  m.tab_samples = std::move(samples);
  m.delta = delta;
  m.description = "tabulated background";
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Homogenized coefficients
//
// With K^-1 sampled on the unit cell y in [0,1) and [[f]] the mean-free
// antiderivative of the fluctuation of f:
//   mu   = <[[K^-1]]^2> / <K^-1>^2
//   zeta = <K^-1 [[K^-1]]^2>
//   nu   = zeta / <K^-1>^3 - mu^2
// Second moments of the midpoint rule converge at O(h^2) for the
// discontinuous profiles of interest, so each moment is Richardson-
// extrapolated from cell counts n/2 and n; that brings the two-level golden
// values to full double precision at modest n.

namespace {

struct CellMoments {
  double mean_Kinv;
  double m2;    // <[[K^-1]]^2>
  double m3;    // <K^-1 [[K^-1]]^2>
};

CellMoments unit_cell_moments(const ArrayXd& Kinv) {
  CellMoments cm;
  cm.mean_Kinv = mean_periodic(Kinv);
  const ArrayXd F = fluct_antideriv(Kinv, 1.0);
  cm.m2 = mean_product(F, F);
  ArrayXd KF2 = Kinv * F * F;
  cm.m3 = mean_periodic(KF2);
  return cm;
}

double richardson(double fine, double coarse) {
  return (4.0 * fine - coarse) / 3.0;
}

HomogCoeffs coeffs_from_sampler(const MediumProfile& profile,
                                const GasEOS& eos, int n_quad,
                                const std::function<ArrayXd(int)>& sample_Kinv) {
  PGAS_CHECK_ARG(n_quad >= 16, "coeffs: n_quad must be at least 16");
  int n = n_quad;
  if (n % 2 != 0) ++n;
  const ArrayXd fine = sample_Kinv(n);
  const ArrayXd coarse = sample_Kinv(n / 2);
  PGAS_CHECK_DOMAIN((fine > 0).all() && (coarse > 0).all(),
                    "coeffs: K^-1 samples must be positive");
  const CellMoments mf = unit_cell_moments(fine);
  const CellMoments mc = unit_cell_moments(coarse);

  HomogCoeffs c;
  c.delta = profile.delta;
  c.mean_Kinv = richardson(mf.mean_Kinv, mc.mean_Kinv);
  const double m2 = richardson(mf.m2, mc.m2);
  const double m3 = richardson(mf.m3, mc.m3);
  c.mu = m2 / (c.mean_Kinv * c.mean_Kinv);
  c.zeta = m3;
  c.nu = m3 / (c.mean_Kinv * c.mean_Kinv * c.mean_Kinv) - c.mu * c.mu;
  c.nu_positive = c.nu > 0;
  c.validate();
  (void)eos;
  return c;
}

}  // namespace

HomogCoeffs homog_coeffs(const MediumProfile& profile, const GasEOS& eos,
                         int n_quad) {
  profile.validate();
  eos.validate();
  const double period = profile.shape_period();
  auto sampler = [&](int n) {
    ArrayXd Kinv(n);
    const double h = 1.0 / n;
    for (int j = 0; j < n; ++j) {
      const double y = (j + 0.5) * h;
      const double rho = profile.rho0(y * period);
      PGAS_CHECK_DOMAIN(rho > 0, "coeffs: density must stay positive");
      Kinv[j] = 1.0 / (eos.v_star * rho);  // v0/v* with v0 = 1/rho
    }
    return Kinv;
  };
  return coeffs_from_sampler(profile, eos, n_quad, sampler);
}

HomogCoeffs homog_coeffs_lagrangian(const MediumProfile& profile,
                                    const GasEOS& eos, int n_quad) {
  profile.validate();
  eos.validate();
  Grid1D dummy{0, 1, 2, CoordKind::eulerian_chi};
  const CoordinateMap map = mass_coordinate_map(profile, dummy);
  const double mass_period = profile.mass_per_period();
  auto sampler = [&](int n) {
    ArrayXd Kinv(n);
    const double h = mass_period / n;
    for (int j = 0; j < n; ++j) {
      const double x = (j + 0.5) * h;
      const double chi = map.x_to_chi(x);
      const double rho = profile.rho0(chi);
      PGAS_CHECK_DOMAIN(rho > 0, "coeffs: density must stay positive");
      Kinv[j] = 1.0 / (eos.v_star * rho);
    }
    return Kinv;
  };
  return coeffs_from_sampler(profile, eos, n_quad, sampler);
}

// ---------------------------------------------------------------------------
// Mass-coordinate map

double CoordinateMap::chi_to_x(double chi) const {
  return profile.mass_antideriv(chi);
}

double CoordinateMap::x_to_chi(double x) const {
  // m(chi) = x with m strictly increasing. Bracket using the per-period mass,
  // then refine with safeguarded Newton. rho is floored during the Newton
  // slope evaluation only (backgrounds such as 1 + cos touch zero, where the
  // map has an isolated flat point; bisection carries those cases).
  const double period = profile.shape_period();
  const double mass_period = profile.mass_per_period();
  double k = std::floor(x / mass_period);
  // Anchors are exact: m(k * period) = k * mass_period. Nudge k if floor
  // rounding at a period seam put the bracket off by one.
  if (k * mass_period > x) k -= 1;
  if ((k + 1) * mass_period < x) k += 1;
  double lo = k * period, hi = (k + 1) * period;
  double chi = lo + (x - k * mass_period) / mass_period * period;
  constexpr double rho_floor = 1e-8;
  for (int it = 0; it < 200; ++it) {
    const double f = profile.mass_antideriv(chi) - x;
    if (f > 0)
      hi = chi;
    else
      lo = chi;
    const double slope = std::max(profile.rho0(chi), rho_floor);
    double next = chi - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = std::max(1.0, std::abs(chi));
    if (std::abs(next - chi) <= 1e-15 * scale) {
      chi = next;
      break;
    }
    chi = next;
  }
  return chi;
}

ArrayXd CoordinateMap::chi_to_x(const ArrayXd& chi) const {
  ArrayXd out(chi.size());
  for (Eigen::Index i = 0; i < chi.size(); ++i) out[i] = chi_to_x(chi[i]);
  return out;
}

ArrayXd CoordinateMap::x_to_chi(const ArrayXd& x) const {
  ArrayXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = x_to_chi(x[i]);
  return out;
}

CoordinateMap mass_coordinate_map(const MediumProfile& profile,
                                  const Grid1D& grid) {
  profile.validate();
  grid.validate();
  CoordinateMap map;
  map.profile = profile;
  if (grid.kind == CoordKind::eulerian_chi) {
    map.chi_samples = grid.centers();
    map.x_samples = map.chi_to_x(map.chi_samples);
  } else {
    map.x_samples = grid.centers();
    map.chi_samples = map.x_to_chi(map.x_samples);
  }
  map.rho_samples = profile.rho0(map.chi_samples);
  return map;
}

ArrayXd sample_K(const MediumProfile& profile, const GasEOS& eos,
                 const Grid1D& lagrangian_grid) {
  PGAS_CHECK_ARG(lagrangian_grid.kind == CoordKind::lagrangian_x,
                 "sample_K expects a Lagrangian grid");
  const CoordinateMap map = mass_coordinate_map(profile, lagrangian_grid);
  // K = v*/v0 = v* rho; with v* = 1 this is the density at the pulled-back
  // Eulerian position.
  return eos.v_star * map.rho_samples;
}

// ---------------------------------------------------------------------------
// Random modulated profiles

namespace {

// Mean-reverting random walk on the nodes, then low-pass filtered with
// repeated second-difference relaxation sweeps, then shifted up to mean one.
ArrayXd smoothed_modulation(double decay, double sigma, std::int64_t n_smooth,
                            std::uint64_t seed, std::uint64_t stream_offset,
                            int n, double L) {
  const double dx = 2.0 * L / n;
  const double sq = std::sqrt(dx);
  ArrayXd a(n);
  double val = 0.0;
  for (int i = 0; i < n; ++i) {
    a[i] = val;
    const double xi = uniform01(seed, stream_offset + i);
    val += -decay * val * dx + sigma * (xi - 0.5) * sq;
  }
  ArrayXd b(n);
  ArrayXd* cur = &a;
  ArrayXd* nxt = &b;
  for (std::int64_t sweep = 0; sweep < n_smooth; ++sweep) {
    const ArrayXd& u = *cur;
    ArrayXd& w = *nxt;
    w.segment(1, n - 2) =
        0.5 * u.segment(1, n - 2) +
        0.25 * (u.segment(0, n - 2) + u.segment(2, n - 2));
    w[0] = 0.5 * u[0] + 0.25 * (u[n - 1] + u[1]);
    w[n - 1] = 0.5 * u[n - 1] + 0.25 * (u[n - 2] + u[0]);
    std::swap(cur, nxt);
  }
  return *cur + 1.0;
}

}  // namespace

MediumProfile random_profile(const RandomProfileParams& params) {
  params.validate();
  const int n = params.grid_n;
  const ArrayXd A =
      smoothed_modulation(params.K_A, params.sigma_A, params.n_smooth,
                          params.seed, 0, n, params.L);
  const ArrayXd B =
      smoothed_modulation(params.K_B, params.sigma_B, params.n_smooth,
                          params.seed, std::uint64_t{1} << 32, n, params.L);
  const double dx = 2.0 * params.L / n;
  ArrayXd rho(n);
  for (int i = 0; i < n; ++i) {
    const double x = -params.L + i * dx;
    rho[i] = 1.0 + 0.8 * A[i] * std::sin(kTwoPi * B[i] * x);
  }
  rho = rho.max(0.05);
  const double mean = mean_periodic(rho);
  PGAS_CHECK_INTERNAL(mean > 0, "random profile: mean must be positive");
  rho /= mean;

  MediumProfile m;
  m.kind = MediumKind::random_modulated;
  m.tab_lo = -params.L;
  m.tab_hi = params.L;
  m.tab_samples = std::move(rho);
  m.delta = 1.0;
  m.random_params = params;
  m.description = "randomly modulated quasi-periodic background";
  m.validate();
  return m;
}

}  // namespace pgas
