#include "dflow/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "dflow/number_theory.hpp"

namespace dflow {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Smallest prime factor table for [0, limit].
std::vector<std::uint32_t> smallest_prime_factors(std::size_t limit) {
  std::vector<std::uint32_t> spf(limit + 1, 0);
  for (std::size_t i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Series

Series::Series(std::size_t truncation) : coeffs_(truncation) {
  if (truncation == 0) throw std::invalid_argument("Series: truncation must be at least 1");
}

Series::Series(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("Series: truncation must be at least 1");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!finite(coeffs_[i])) {
      throw std::invalid_argument("Series: non-finite coefficient at n=" + std::to_string(i + 1));
    }
  }
}

Series Series::unit(std::size_t truncation) { return monomial(truncation, 1, 1.0); }

Series Series::monomial(std::size_t truncation, std::size_t n, cplx c) {
  Series f(truncation);
  if (n >= 1 && n <= truncation) f[n] = c;
  return f;
}

Series Series::resized(std::size_t truncation) const {
  Series out(truncation);
  std::copy_n(coeffs_.begin(), std::min(truncation, coeffs_.size()), out.coeffs_.begin());
  return out;
}

bool Series::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx z) { return z == cplx{}; });
}

bool Series::all_finite() const noexcept { return std::all_of(coeffs_.begin(), coeffs_.end(), finite); }

std::size_t Series::support_bound() const noexcept {
  for (std::size_t n = coeffs_.size(); n >= 1; --n) {
    if (coeffs_[n - 1] != cplx{}) return n;
  }
  return 0;
}

std::vector<std::size_t> Series::support() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= coeffs_.size(); ++n) {
    if (coeffs_[n - 1] != cplx{}) out.push_back(n);
  }
  return out;
}

Series& Series::operator+=(const Series& rhs) {
  const std::size_t n = std::min(coeffs_.size(), rhs.coeffs_.size());
  coeffs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Series& Series::operator-=(const Series& rhs) {
  const std::size_t n = std::min(coeffs_.size(), rhs.coeffs_.size());
  coeffs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Series& Series::operator*=(cplx scale) {
  for (auto& z : coeffs_) z *= scale;
  return *this;
}

double max_abs_diff(const Series& a, const Series& b) {
  const std::size_t n = std::max(a.truncation(), b.truncation());
  double worst = 0.0;
  for (std::size_t i = 1; i <= n; ++i) worst = std::max(worst, std::abs(a.coeff_or_zero(i) - b.coeff_or_zero(i)));
  return worst;
}

// ---------------------------------------------------------------------------
// MultiIndex / LambdaSet / LineGrid

std::uint64_t MultiIndex::value() const {
  std::uint64_t n = 1;
  if (exponents.empty()) return n;
  const auto primes = [&] {
    // Enough primes for the multi-index length; grow the sieve until it suffices.
    std::uint64_t limit = 16;
    for (;;) {
      auto p = nt::primes_up_to(limit);
      if (p.size() >= exponents.size()) return p;
      limit *= 2;
    }
  }();
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    const auto pk = nt::checked_pow(primes[j], exponents[j]);
    if (!pk || (*pk != 0 && n > UINT64_MAX / *pk)) throw std::overflow_error("MultiIndex::value overflow");
    n *= *pk;
  }
  return n;
}

LambdaSet::LambdaSet(std::vector<std::uint64_t> members, std::uint64_t bound) : members_(std::move(members)), bound_(bound) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.front() == 0) throw std::invalid_argument("LambdaSet: members must be positive");
  if (members_.empty() || members_.front() != 1) throw std::invalid_argument("LambdaSet: 1 must be a member");
  for (auto a : members_) {
    for (auto b : members_) {
      if (a > bound_ / b) break;
      if (!contains(a * b)) {
        throw std::invalid_argument("LambdaSet: not closed, " + std::to_string(a) + "*" + std::to_string(b) + " missing");
      }
    }
  }
}

LambdaSet LambdaSet::all(std::uint64_t bound) {
  LambdaSet s;
  s.bound_ = bound;
  for (std::uint64_t n = 1; n <= std::max<std::uint64_t>(bound, 1); ++n) s.members_.push_back(n);
  return s;
}

LambdaSet LambdaSet::generated_by(std::span<const std::uint64_t> generators, std::uint64_t bound) {
  std::vector<bool> in(bound + 1, false);
  std::vector<std::uint64_t> frontier{1};
  if (bound >= 1) in[1] = true;
  while (!frontier.empty()) {
    const auto m = frontier.back();
    frontier.pop_back();
    for (auto g : generators) {
      if (g < 2 || m > bound / g) continue;
      if (!in[m * g]) {
        in[m * g] = true;
        frontier.push_back(m * g);
      }
    }
  }
  LambdaSet s;
  s.bound_ = bound;
  s.members_.push_back(1);
  for (std::uint64_t n = 2; n <= bound; ++n) {
    if (in[n]) s.members_.push_back(n);
  }
  return s;
}

LambdaSet LambdaSet::powers_of(std::uint64_t q, std::uint64_t bound) {
  const std::uint64_t g[] = {q};
  return generated_by(g, bound);
}

bool LambdaSet::contains(std::uint64_t n) const { return std::binary_search(members_.begin(), members_.end(), n); }

std::vector<double> LineGrid::points() const {
  if (count == 0) throw std::invalid_argument("LineGrid: empty grid");
  if (!(t_max >= t_min)) throw std::invalid_argument("LineGrid: t_max < t_min");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = t_min;
    return out;
  }
  const double step = (t_max - t_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = t_min + step * static_cast<double>(i);
  return out;
}

// ---------------------------------------------------------------------------
// Operations

cplx evaluate(const Series& f, cplx s) {
  cplx sum = f[1];
  for (std::size_t n = 2; n <= f.truncation(); ++n) {
    const cplx a = f[n];
    if (a == cplx{}) continue;
    sum += a * std::exp(-s * std::log(static_cast<double>(n)));
  }
  return sum;
}

Series convolve(const Series& f, const Series& g) {
  const std::size_t n = std::min(f.truncation(), g.truncation());
  Series out(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const cplx fk = f[k];
    if (fk == cplx{}) continue;
    for (std::size_t l = 1; l <= n / k; ++l) out[k * l] += fk * g[l];
  }
  return out;
}

Series differentiate(const Series& f, unsigned k) {
  Series out = f;
  if (k == 0) return out;
  for (std::size_t n = 1; n <= f.truncation(); ++n) {
    out[n] *= std::pow(-std::log(static_cast<double>(n)), static_cast<int>(k));
  }
  return out;
}

Series exp_series(const Series& f) {
  const std::size_t n_max = f.truncation();
  std::vector<std::size_t> tail;
  std::vector<cplx> weighted;  // (ln d) a_d for nonzero tail entries
  for (std::size_t d = 2; d <= n_max; ++d) {
    if (f[d] != cplx{}) {
      tail.push_back(d);
      weighted.push_back(std::log(static_cast<double>(d)) * f[d]);
    }
  }
  Series e(n_max);
  e[1] = 1.0;
  // Push form: once E_n is final, every pair (d, n) feeds index d*n > n.
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n >= 2) e[n] /= std::log(static_cast<double>(n));
    const cplx en = e[n];
    if (en == cplx{}) continue;
    for (std::size_t i = 0; i < tail.size() && tail[i] <= n_max / n; ++i) e[tail[i] * n] += weighted[i] * en;
  }
  return e * std::exp(f[1]);
}

MultiIndex bohr_lift_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bohr_lift_index: n must be positive");
  MultiIndex k;
  const auto factors = nt::factorize(n);
  if (factors.empty()) return k;
  const auto primes = nt::primes_up_to(factors.back().first);
  k.exponents.assign(primes.size(), 0);
  for (auto [p, e] : factors) {
    const auto it = std::lower_bound(primes.begin(), primes.end(), p);
    k.exponents[static_cast<std::size_t>(it - primes.begin())] = e;
  }
  return k;
}

double h2_norm(const Series& f) {
  double s = 0.0;
  for (cplx a : f.coeffs()) s += std::norm(a);
  return std::sqrt(s);
}

McEstimate hp_norm_mc(const Series& f, double p, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("hp_norm_mc: samples must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("hp_norm_mc: p must be >= 1");
  McEstimate est;
  est.samples = samples;
  if (f.is_zero()) return est;

  const std::size_t n_max = f.truncation();
  const auto spf = smallest_prime_factors(n_max);
  const auto primes = nt::primes_up_to(n_max);
  std::vector<std::size_t> prime_slot(n_max + 1, 0);
  for (std::size_t j = 0; j < primes.size(); ++j) prime_slot[primes[j]] = j;

  std::mt19937_64 rng(seed);
  std::vector<cplx> z(primes.size());
  std::vector<cplx> mono(n_max + 1);
  // Welford accumulation of |Bf(z)|^p.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (auto& zj : z) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      zj = std::polar(1.0, 2.0 * std::numbers::pi * u);
    }
    mono[1] = 1.0;
    cplx value = f[1];
    for (std::size_t n = 2; n <= n_max; ++n) {
      mono[n] = mono[n / spf[n]] * z[prime_slot[spf[n]]];
      value += f[n] * mono[n];
    }
    const double x = std::pow(std::abs(value), p);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  const double se_mean = std::sqrt(var / static_cast<double>(samples));
  est.value = std::pow(mean, 1.0 / p);
  // Delta method for the p-th root.
  est.std_error = mean > 0.0 ? se_mean * std::pow(mean, 1.0 / p - 1.0) / p : 0.0;
  return est;
}

double helson_lhs(const Series& f) {
  double s = 0.0;
  for (std::size_t n = 1; n <= f.truncation(); ++n) {
    if (f[n] == cplx{}) continue;
    s += std::norm(f[n]) / static_cast<double>(nt::divisor_count(n));
  }
  return std::sqrt(s);
}

double hinf_norm_estimate(const Series& f, double epsilon, const LineGrid& grid) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("hinf_norm_estimate: epsilon must be positive");
  double best = 0.0;
  for (double t : grid.points()) best = std::max(best, std::abs(evaluate(f, cplx{epsilon, t})));
  return best;
}

bool lambda_closure_check(const Series& f, const LambdaSet& lambda) {
  for (std::size_t n = 1; n <= f.truncation(); ++n) {
    if (f[n] != cplx{} && !lambda.contains(n)) return false;
  }
  return true;
}

}  // namespace dflow
