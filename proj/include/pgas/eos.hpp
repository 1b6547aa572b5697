#pragma once
// Polytropic-gas equation of state. Everything here is a pure function of the
// EOS constants (gamma, p_star, v_star); scalar type is a template parameter
// so the traveling-wave solver can evaluate in extended precision.

#include <cmath>

#include "pgas/util.hpp"

namespace pgas {

template <class S>
struct BasicGasEOS {
  S gamma{S(1.4)};
  S p_star{S(1)};
  S v_star{S(1)};

  S c_star_sq() const { return gamma * p_star / v_star; }

  void validate() const {
    PGAS_CHECK_ARG(gamma > S(1), "eos: gamma must exceed 1");
    PGAS_CHECK_ARG(p_star > S(0), "eos: p_star must be positive");
    PGAS_CHECK_ARG(v_star > S(0), "eos: v_star must be positive");
  }

  template <class T>
  BasicGasEOS<T> cast() const {
    return BasicGasEOS<T>{static_cast<T>(gamma), static_cast<T>(p_star),
                          static_cast<T>(v_star)};
  }
};

using GasEOS = BasicGasEOS<double>;

// Nonlinear stiffness G(p) = c*^2 (p/p*)^(1+1/gamma).
template <class S>
S eos_G(const BasicGasEOS<S>& eos, S p) {
  PGAS_CHECK_DOMAIN(p > S(0), "eos_G: pressure must be positive");
  const S e = S(1) + S(1) / eos.gamma;
  return eos.c_star_sq() * std::pow(p / eos.p_star, e);
}

// k-th derivative of G, analytic, 0 <= k <= 4. k = 0 reduces to G itself.
template <class S>
S eos_G_deriv(const BasicGasEOS<S>& eos, S p, int k) {
  PGAS_CHECK_DOMAIN(p > S(0), "eos_G_deriv: pressure must be positive");
  PGAS_CHECK_ARG(k >= 0 && k <= 4, "eos_G_deriv: order must be in [0, 4]");
  const S e = S(1) + S(1) / eos.gamma;
  S coeff = eos.c_star_sq() / std::pow(eos.p_star, e);
  S fall = S(1);
  for (int j = 0; j < k; ++j) fall *= (e - S(j));
  return coeff * fall * std::pow(p, e - S(k));
}

// Primitive of G with G_primitive'(p) = G(p):
//   c*^2 p*^{-(1+1/gamma)} p^{2+1/gamma} / (2+1/gamma).
template <class S>
S eos_G_primitive(const BasicGasEOS<S>& eos, S p) {
  PGAS_CHECK_DOMAIN(p >= S(0), "eos_G_primitive: pressure must be nonnegative");
  const S e = S(1) + S(1) / eos.gamma;
  return eos.c_star_sq() / std::pow(eos.p_star, e) * std::pow(p, e + S(1)) /
         (e + S(1));
}

// Specific entropy with the convention s(p*, v*) = 0:
//   s = log( (p/p*) (v/v*)^gamma ).
template <class S>
S eos_entropy(const BasicGasEOS<S>& eos, S p, S v) {
  PGAS_CHECK_DOMAIN(p > S(0) && v > S(0),
                    "eos_entropy: p and v must be positive");
  return std::log(p / eos.p_star) + eos.gamma * std::log(v / eos.v_star);
}

// Inverse of eos_entropy in p at fixed v.
template <class S>
S eos_pressure_from(const BasicGasEOS<S>& eos, S v, S s) {
  PGAS_CHECK_DOMAIN(v > S(0), "eos_pressure_from: v must be positive");
  return eos.p_star * std::exp(s) * std::pow(v / eos.v_star, -eos.gamma);
}

struct SoundSpeeds {
  double lagrangian;  // c   = sqrt(gamma p / v), mass-coordinate frame
  double eulerian;    // c_E = v c = sqrt(gamma p v), laboratory frame
};

inline SoundSpeeds eos_sound_speeds(const GasEOS& eos, double p, double v) {
  PGAS_CHECK_DOMAIN(p > 0 && v > 0, "eos_sound_speeds: p, v must be positive");
  const double c = std::sqrt(eos.gamma * p / v);
  return SoundSpeeds{c, v * c};
}

// Entropy-equivalent stiffness ratio K = e^{-s/gamma} = v*/v0.
inline double eos_K_of_v0(const GasEOS& eos, double v0) {
  PGAS_CHECK_DOMAIN(v0 > 0, "eos_K_of_v0: v0 must be positive");
  return eos.v_star / v0;
}

}  // namespace pgas
