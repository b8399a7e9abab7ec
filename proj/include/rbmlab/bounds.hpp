#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rbmlab {

/// floor(log2(x)) for integer x >= 1.
inline int floor_log2(std::int64_t x) {
  if (x < 1) throw std::invalid_argument("floor_log2 needs x >= 1");
  return std::bit_width(static_cast<std::uint64_t>(x)) - 1;
}

/// Smallest hidden-unit count that makes the RBM a universal approximator,
/// and the parameter-counting lower bound ceil(2^n/(n+1)) - 1.
struct ReferenceConstants {
  std::int64_t universal_m = 0;
  std::int64_t parameter_lower_bound = 0;
};

inline ReferenceConstants reference_constants(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const std::int64_t states = std::int64_t{1} << n;
  ReferenceConstants rc;
  rc.universal_m = (std::int64_t{1} << (n - 1)) - 1;
  rc.parameter_lower_bound = (states + n) / (n + 1) - 1;  // ceil(2^n/(n+1)) - 1
  return rc;
}

/// Upper bound on the maximal KL divergence to an RBM with n visible and m
/// hidden units: n - floor(log2(m+1)) - (m+1)/2^floor(log2(m+1)) below the
/// universal regime, 0 once m >= 2^(n-1) - 1. Exact dyadic arithmetic.
inline double theorem2_bound(int n, int m) {
  if (n < 1 || m < 0) throw std::invalid_argument("need n >= 1 and m >= 0");
  if (m >= reference_constants(n).universal_m) return 0.0;
  const int e = floor_log2(m + 1);
  return double(n - e) - std::ldexp(double(m + 1), -e);
}

/// Block-cardinality bound: sum over blocks with n_i > 1 of
/// (n_i - 1)/2^(n - n_i), for block cardinalities 2^(n_1), ..., 2^(n_m)
/// summing to 2^n.
inline double maxerrormix_bound(int n, const std::vector<int>& block_exponents) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::int64_t total = 0;
  for (int e : block_exponents) {
    if (e < 0 || e > n) throw std::invalid_argument("block exponent out of range");
    total += std::int64_t{1} << e;
  }
  if (total != (std::int64_t{1} << n))
    throw std::invalid_argument("block cardinalities must sum to 2^n");
  double bound = 0.0;
  for (int e : block_exponents)
    if (e > 1) bound += std::ldexp(double(e - 1), -(n - e));
  return bound;
}

/// f(x) = log2(x) + 1 - floor(log2(x)) - x/2^floor(log2(x)); non-negative,
/// zero exactly at powers of two.
inline double appendix_f(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("f needs x > 0");
  const int e = std::ilogb(x);
  return std::log2(x) + 1.0 - double(e) - std::ldexp(x, -e);
}

/// c = -log2(ln 2) - (1/ln 2 - 1), the maximum of f.
inline double appendix_c() {
  const double ln2 = std::numbers::ln2;
  return -std::log2(ln2) - (1.0 / ln2 - 1.0);
}

/// Smallest integer m with m >= 2^((n-1)(1-eps)+0.1) - 1; guarantees
/// theorem2_bound(n, m) <= eps * (n - 1).
inline int hidden_units_for_tolerance(int n, double epsilon) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in [0, 1]");
  const double value = std::exp2(double(n - 1) * (1.0 - epsilon) + 0.1) - 1.0;
  return static_cast<int>(std::ceil(value));
}

/// Dimension comparison for the equal-size mixture class (m+1 = 2^k blocks)
/// against the RBM parameter count.
struct DimensionReport {
  std::int64_t dim_mixture_class = 0;
  std::int64_t dim_rbm_param_upper = 0;
  std::int64_t gap = 0;
};

inline DimensionReport dimension_report(int n, int m) {
  if (n < 1 || m < 0) throw std::invalid_argument("need n >= 1 and m >= 0");
  if (!std::has_single_bit(static_cast<unsigned>(m + 1)))
    throw std::invalid_argument("m + 1 must be a power of two");
  const std::int64_t k = floor_log2(m + 1);
  DimensionReport r;
  r.dim_mixture_class = std::int64_t(m + 1) * n + (m + 1) + n - (m + 1) * k;
  r.dim_rbm_param_upper = std::int64_t(m) * n + m + n;
  r.gap = n + 1 - (m + 1) * k;
  return r;
}

/// Row of the bound table: the divergence bound with its sandwich envelopes.
struct BoundReport {
  int n = 0;
  int m = 0;
  double theorem2 = 0.0;
  double lower_envelope = 0.0;
  double upper_envelope = 0.0;
  bool universal = false;
};

inline BoundReport bound_report(int n, int m) {
  BoundReport r;
  r.n = n;
  r.m = m;
  r.theorem2 = theorem2_bound(n, m);
  r.lower_envelope = double(n - 1) - std::log2(double(m + 1));
  r.upper_envelope = r.lower_envelope + appendix_c();
  r.universal = m >= reference_constants(n).universal_m;
  return r;
}

}  // namespace rbmlab
