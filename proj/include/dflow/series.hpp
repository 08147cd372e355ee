#pragma once

// Truncated Dirichlet series  f(s) = sum_{n=1}^{N} a_n n^{-s}.
//
// Every operation is exact on the indices n <= N: Dirichlet convolution only
// moves mass to larger frequencies, so a truncated result is always a prefix
// of the corresponding untruncated series.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dflow {

using cplx = std::complex<double>;

class Series {
 public:
  /// Zero series with `truncation` coefficients. Throws if truncation == 0.
  explicit Series(std::size_t truncation);
  /// coeffs[0] is a_1. Throws on an empty vector or a non-finite entry.
  explicit Series(std::vector<cplx> coeffs);

  static Series unit(std::size_t truncation);
  /// c * n^{-s}; zero when n > truncation.
  static Series monomial(std::size_t truncation, std::size_t n, cplx c = 1.0);
  static Series constant(std::size_t truncation, cplx c) { return monomial(truncation, 1, c); }

  std::size_t truncation() const noexcept { return coeffs_.size(); }

  // 1-based access; n must lie in [1, truncation()].
  cplx operator[](std::size_t n) const { return coeffs_[n - 1]; }
  cplx& operator[](std::size_t n) { return coeffs_[n - 1]; }

  /// Coefficient a_n, or zero for n outside [1, truncation()].
  cplx coeff_or_zero(std::size_t n) const noexcept {
    return (n >= 1 && n <= coeffs_.size()) ? coeffs_[n - 1] : cplx{};
  }

  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }

  /// Drops indices above `truncation` or pads with zeros.
  Series resized(std::size_t truncation) const;

  bool is_zero() const noexcept;
  bool all_finite() const noexcept;
  /// Largest index with a nonzero coefficient, 0 for the zero series.
  std::size_t support_bound() const noexcept;
  /// Nonzero indices in increasing order.
  std::vector<std::size_t> support() const;

  Series& operator+=(const Series& rhs);
  Series& operator-=(const Series& rhs);
  Series& operator*=(cplx scale);

  friend Series operator+(Series lhs, const Series& rhs) { return lhs += rhs; }
  friend Series operator-(Series lhs, const Series& rhs) { return lhs -= rhs; }
  friend Series operator*(Series lhs, cplx scale) { return lhs *= scale; }
  friend Series operator*(cplx scale, Series rhs) { return rhs *= scale; }
  friend Series operator-(Series f) { return f *= -1.0; }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  std::vector<cplx> coeffs_;
};

/// Largest |a_n - b_n| over the common index range, counting the excess of the
/// longer series against zero.
double max_abs_diff(const Series& a, const Series& b);

/// Finite multi-index of prime exponents: n = prod_j p_j^{exponents[j]}.
struct MultiIndex {
  std::vector<unsigned> exponents;  // trailing zeros trimmed

  /// Reassembles the integer. Throws std::overflow_error past 64 bits.
  std::uint64_t value() const;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Multiplicative set of positive integers containing 1, closed under
/// products that stay within `bound`.
class LambdaSet {
 public:
  /// Throws if 1 is missing or the members are not closed under products <= bound.
  LambdaSet(std::vector<std::uint64_t> members, std::uint64_t bound);

  static LambdaSet all(std::uint64_t bound);
  static LambdaSet generated_by(std::span<const std::uint64_t> generators, std::uint64_t bound);
  static LambdaSet powers_of(std::uint64_t q, std::uint64_t bound);

  bool contains(std::uint64_t n) const;
  std::uint64_t bound() const noexcept { return bound_; }
  const std::vector<std::uint64_t>& members() const noexcept { return members_; }

 private:
  LambdaSet() = default;
  std::vector<std::uint64_t> members_;  // sorted
  std::uint64_t bound_ = 1;
};

/// Vertical sampling line Re s = const, Im s uniformly spaced over [t_min, t_max].
struct LineGrid {
  double t_min = -50.0;
  double t_max = 50.0;
  std::size_t count = 4001;

  /// Throws std::invalid_argument when count == 0 or the range is reversed.
  std::vector<double> points() const;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// ---------------------------------------------------------------------------
// Operations

/// sum a_n exp(-s ln n).
cplx evaluate(const Series& f, cplx s);

/// Dirichlet product d_n = sum_{kl=n} f_k g_l. Result truncation is min(N_f, N_g).
Series convolve(const Series& f, const Series& g);

/// Coefficientwise (-ln n)^k a_n, i.e. the k-th derivative in s.
Series differentiate(const Series& f, unsigned k);

/// exp(f) in the truncated Dirichlet algebra.
///
/// With f = a_1 + tail, exp(f) = e^{a_1} sum_k tail^{*k}/k!; the sum terminates at
/// k = floor(log2 N) because tail^{*k} is supported on n >= 2^k. The coefficients
/// are generated by the log-derivative recurrence
///   (ln n) E_n = sum_{d | n, d > 1} (ln d) a_d E_{n/d},
/// which yields the same prefix in O(N log N).
Series exp_series(const Series& f);

/// Prime-exponent multi-index of n (n >= 1).
MultiIndex bohr_lift_index(std::uint64_t n);

double h2_norm(const Series& f);

/// Monte Carlo estimate of the H^p norm: the L^p norm of the Bohr lift over the
/// polytorus T^d, d = pi(N). Deterministic for a fixed seed.
McEstimate hp_norm_mc(const Series& f, double p, std::size_t samples, std::uint64_t seed);

/// (sum |a_n|^2 / d(n))^{1/2}, the left side of Helson's inequality.
double helson_lhs(const Series& f);

/// max |f(epsilon + i t)| over the grid. A lower bound for the half-plane sup.
double hinf_norm_estimate(const Series& f, double epsilon, const LineGrid& grid = {});

/// True iff every nonzero coefficient index lies in `lambda`.
bool lambda_closure_check(const Series& f, const LambdaSet& lambda);

}  // namespace dflow
