#include "dflow/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace dflow::reference {

namespace {

const double kLn2 = std::numbers::ln2;

// k with n = 2^k, or -1.
int log2_exact(std::size_t n) { return std::has_single_bit(n) ? std::countr_zero(n) : -1; }

// Largest K with 2^K <= N.
int floor_log2(std::size_t n) { return static_cast<int>(std::bit_width(n)) - 1; }

cplx pow2_neg(cplx s) { return std::exp(-s * kLn2); }

// Tail of sum_{k > K} |y|^k / (k ln 2) for |y| < 1.
double log_series_tail(double y, int k_max) {
  if (y >= 1.0) return INFINITY;
  return std::pow(y, k_max + 1) / ((k_max + 1) * kLn2 * (1.0 - y));
}

}  // namespace

Series example_generator(std::size_t truncation) {
  Series h = Series::unit(truncation);
  if (truncation >= 2) h[2] = 1.0;
  return h;
}

cplx example_flow(cplx s, double t) {
  return s + t + std::log(1.0 + pow2_neg(s) * (1.0 - std::exp2(-t))) / kLn2;
}

double example_flow_coeff(std::size_t n, double t) {
  if (n == 1) return t;
  const int k = log2_exact(n);
  if (k <= 0) return 0.0;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * std::pow(1.0 - std::exp2(-t), k) / (k * kLn2);
}

cplx example_flow_prefix(cplx s, double t, std::size_t truncation) {
  cplx sum = s;
  for (std::size_t n = 1; n <= truncation; n *= 2) sum += example_flow_coeff(n, t) * std::exp(-s * std::log(double(n)));
  return sum;
}

double example_flow_tail_bound(cplx s, double t, std::size_t truncation) {
  const double y = std::abs(pow2_neg(s)) * (1.0 - std::exp2(-t));
  return log_series_tail(y, floor_log2(truncation));
}

cplx example_koenigs(cplx s) { return s + std::log(1.0 + pow2_neg(s)) / kLn2; }

double example_koenigs_derivative_coeff(std::size_t n) {
  const int k = log2_exact(n);
  if (k < 0) return 0.0;
  return (k % 2 == 0) ? 1.0 : -1.0;
}

cplx example_koenigs_prefix(cplx s, std::size_t truncation) {
  cplx sum = s;
  for (std::size_t n = 2; n <= truncation; n *= 2) {
    const double ln = std::log(double(n));
    sum -= example_koenigs_derivative_coeff(n) / ln * std::exp(-s * ln);
  }
  return sum;
}

double example_koenigs_tail_bound(cplx s, std::size_t truncation) {
  return log_series_tail(std::abs(pow2_neg(s)), floor_log2(truncation));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

cplx in_disk(std::mt19937_64& rng, double radius) {
  const double r = radius * std::sqrt(uniform(rng));
  return std::polar(r, uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

Series random_series(std::mt19937_64& rng, std::size_t truncation, double radius) {
  Series f(truncation);
  for (std::size_t n = 1; n <= truncation; ++n) f[n] = in_disk(rng, radius);
  return f;
}

Series random_admissible_generator(std::mt19937_64& rng, std::size_t truncation, double re_lo, double re_hi,
                                   double tail_l1) {
  Series h(truncation);
  h[1] = cplx{uniform(rng, re_lo, re_hi), uniform(rng, -1.0, 1.0)};
  double l1 = 0.0;
  for (std::size_t n = 2; n <= truncation; ++n) {
    h[n] = in_disk(rng, 1.0);
    l1 += std::abs(h[n]);
  }
  if (l1 > 0.0) {
    const double target = std::min(tail_l1, re_lo) * uniform(rng, 0.2, 1.0);
    for (std::size_t n = 2; n <= truncation; ++n) h[n] *= target / l1;
  }
  return h;
}

}  // namespace dflow::reference
