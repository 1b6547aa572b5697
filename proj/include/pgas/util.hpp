#pragma once
// Small shared utilities: error checks, compensated summation, formatting,
// and a 64-bit config hash.

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>

namespace pgas {

using Eigen::ArrayXd;

#define PGAS_CHECK_ARG(cond, msg)                                              \
  do {                                                                         \
    if (!(cond)) throw std::invalid_argument(msg);                             \
  } while (0)

#define PGAS_CHECK_DOMAIN(cond, msg)                                           \
  do {                                                                         \
    if (!(cond)) throw std::domain_error(msg);                                 \
  } while (0)

#define PGAS_CHECK_INTERNAL(cond, msg)                                         \
  do {                                                                         \
    if (!(cond)) throw std::runtime_error(msg);                                \
  } while (0)

// Kahan–Neumaier compensated accumulator. Summation order is fixed by the
// caller's loop, so results are bitwise reproducible run to run.
template <class S = double>
struct KahanSum {
  S sum{0}, comp{0};
  void add(S x) {
    S t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  S value() const { return sum + comp; }
};

template <class S = double, class Seq>
S kahan_total(const Seq& v) {
  KahanSum<S> acc;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i)
    acc.add(static_cast<S>(v[i]));
  return acc.value();
}

// Shortest round-trip decimal form (17 significant digits).
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// FNV-1a 64-bit hash, used to stamp configs into output headers.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_array(const ArrayXd& a) {
  std::uint64_t h = 1469598103934665603ull;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof(double));
    std::memcpy(&bits, &a[i], sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pgas
