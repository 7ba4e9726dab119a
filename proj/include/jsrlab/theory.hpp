#ifndef JSRLAB_THEORY_HPP
#define JSRLAB_THEORY_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "jsrlab/error.hpp"

// Closed-form accuracy and size guarantees for quadratic, SOS and polytopic (CPWL)
// JSR approximations. All counts are exact big integers.

namespace jsrlab::theory {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

/// Exact binomial coefficient C(n, k); zero when k > n.
inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// Exact binomial for a big-integer top argument and small bottom argument.
inline BigInt binomial(const BigInt& n, std::uint64_t k) {
  if (n < k) return 0;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline long double log10_of(const BigInt& v) {
  if (v <= 0) throw DomainError("log10 of a non-positive integer");
  return static_cast<long double>(boost::multiprecision::log10(BigFloat(v)));
}

inline std::uint64_t to_u64(const BigInt& v) {
  if (v > std::numeric_limits<std::uint64_t>::max()) throw OverflowError("value does not fit in 64 bits");
  return v.convert_to<std::uint64_t>();
}

/// Quadratic-norm accuracy factor sqrt(n).
inline double tau_quad(std::uint64_t n) {
  if (n < 1) throw DomainError("n must be >= 1");
  return std::sqrt(static_cast<double>(n));
}

/// SOS accuracy constant C(n+d-1, d).
inline BigInt tau_sos(std::uint64_t n, std::uint64_t d) {
  if (n < 1 || d < 1) throw DomainError("tau_sos needs n >= 1 and d >= 1");
  return binomial(n + d - 1, d);
}

/// D(n,k) = sum_{m=0}^{floor(k/2)} C(n+k-1-2m, k-2m).
inline BigInt barvinok_D(std::uint64_t n, std::uint64_t k) {
  if (n < 1 || k < 1) throw DomainError("barvinok_D needs n >= 1 and k >= 1");
  BigInt sum = 0;
  for (std::uint64_t m = 0; 2 * m <= k; ++m) sum += binomial(n + k - 1 - 2 * m, k - 2 * m);
  return sum;
}

namespace detail {

// log of (tau - s)^k + (tau + s)^k with s = sqrt(tau^2 - 1); stable for large k.
inline long double barvinok_lhs_log(long double tau, std::uint64_t k) {
  const long double s = std::sqrt(tau * tau - 1.0L);
  const long double hi = tau + s;
  const long double lo = 1.0L / hi;  // tau - s, computed without cancellation
  const long double kk = static_cast<long double>(k);
  return kk * std::log(hi) + std::log1p(std::pow(lo / hi, kk));
}

// Incremental D(n, k): D(n,k) = D(n,k-2) + C(n-1+k, n-1).
class BarvinokSequence {
 public:
  explicit BarvinokSequence(std::uint64_t n) : n_(n) {}

  // Returns D(n, k) for k = 1, 2, 3, ... on successive calls.
  const BigInt& next() {
    ++k_;
    // C(n-1+k, n-1) from C(n-2+k, n-1) * (n-1+k) / k
    term_ = term_ * (n_ - 1 + k_) / k_;
    BigInt d = prev2_ + term_;
    prev2_ = prev1_;
    prev1_ = d;
    return prev1_;
  }

 private:
  std::uint64_t n_;
  std::uint64_t k_ = 0;
  BigInt term_ = 1;   // C(n-1+k, n-1), starts at k = 0
  BigInt prev1_ = 1;  // D(n, k-1); D(n, 0) = 1
  BigInt prev2_ = 0;  // D(n, k-2)
};

}  // namespace detail

/// Whether (tau - s)^k + (tau + s)^k >= 6 D(n,k)^{1/2}, evaluated in log space.
inline bool barvinok_condition(long double tau, std::uint64_t k, const BigInt& d_nk) {
  const long double rhs = std::log(6.0L) + 0.5L * std::log(static_cast<long double>(BigFloat(d_nk)));
  return detail::barvinok_lhs_log(tau, k) >= rhs;
}

inline bool barvinok_condition(std::uint64_t n, long double tau, std::uint64_t k) {
  return barvinok_condition(tau, k, barvinok_D(n, k));
}

/// Smallest k >= 1 satisfying the Barvinok vertex condition, or nullopt below the ceiling.
inline std::optional<std::uint64_t> barvinok_min_k(std::uint64_t n, double tau, std::uint64_t ceiling = 10000) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(tau > 1.0)) throw DomainError("tau must be > 1");
  detail::BarvinokSequence seq(n);
  for (std::uint64_t k = 1; k <= ceiling; ++k) {
    const BigInt& d = seq.next();
    if (barvinok_condition(static_cast<long double>(tau), k, d)) return k;
  }
  return std::nullopt;
}

/// Upper bound on the number of faces of an n-polytope with k vertices.
inline BigInt mcmullen_faces(std::uint64_t n, const BigInt& k) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (k <= n) throw DomainError("a full-dimensional polytope needs k >= n+1 vertices");
  // C(a, k-n) = C(a, a-(k-n)); the lower argument a-(k-n) is small.
  const BigInt a1 = k - (n + 1) / 2;
  const BigInt a2 = k - (n + 2) / 2;
  const auto low1 = (a1 - (k - n)).convert_to<std::uint64_t>();
  const auto low2 = (a2 - (k - n)).convert_to<std::uint64_t>();
  return binomial(a1, low1) + binomial(a2, low2);
}

inline BigInt mcmullen_faces(std::uint64_t n, std::uint64_t k) { return mcmullen_faces(n, BigInt(k)); }

struct NetworkStructureBound {
  std::uint64_t depth = 0;
  std::uint64_t k_tau = 0;
  BigInt vertices;        // 8 D(n, k_tau)
  BigInt faces;           // McMullen bound at that vertex count; base of the width bound
  std::uint64_t width_exponent = 0;  // 2n^2 + 3n + 1
  long double log10_width = 0.0L;    // width_exponent * log10(faces)
};

inline std::uint64_t network_depth(std::uint64_t n) {
  if (n < 1) throw DomainError("n must be >= 1");
  return static_cast<std::uint64_t>(std::bit_width(n)) + 1;  // ceil(log2(n+1)) + 1
}

/// Depth and width bounds for a ReLU network reaching precision tau in dimension n.
/// Returns nullopt when no k_tau is found below the ceiling.
inline std::optional<NetworkStructureBound> network_structure_bound(std::uint64_t n, double tau,
                                                                    std::uint64_t ceiling = 10000) {
  const auto k = barvinok_min_k(n, tau, ceiling);
  if (!k) return std::nullopt;
  NetworkStructureBound b;
  b.depth = network_depth(n);
  b.k_tau = *k;
  b.vertices = 8 * barvinok_D(n, *k);
  b.faces = mcmullen_faces(n, b.vertices);
  b.width_exponent = 2 * n * n + 3 * n + 1;
  b.log10_width = static_cast<long double>(b.width_exponent) * log10_of(b.faces);
  return b;
}

struct VariableCountRow {
  std::uint64_t n = 0;
  BigInt tau;        // tau_SOS(n, d), the precision target
  std::uint64_t k_tau = 0;
  BigInt cpwl_vars;  // 8 D(n, k_tau) * n
  BigInt sos_vars;   // t (t + 1) / 2 with t = C(n+d-1, d): Gram matrix parameter count
};

/// Variables needed by a polytopic norm vs. a degree-2d SOS certificate at matching precision.
inline std::vector<VariableCountRow> variables_comparison(const std::vector<std::uint64_t>& dims, std::uint64_t d) {
  std::vector<VariableCountRow> rows;
  rows.reserve(dims.size());
  for (std::uint64_t n : dims) {
    VariableCountRow row;
    row.n = n;
    row.tau = tau_sos(n, d);
    const auto k = barvinok_min_k(n, row.tau.convert_to<double>());
    if (!k) throw NumericError("no Barvinok k found for n=" + std::to_string(n));
    row.k_tau = *k;
    row.cpwl_vars = 8 * barvinok_D(n, *k) * n;
    row.sos_vars = row.tau * (row.tau + 1) / 2;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace jsrlab::theory

#endif  // JSRLAB_THEORY_HPP
