#include "dflow/number_theory.hpp"

#include <stdexcept>

namespace dflow::nt {

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    if (i <= limit / i) {
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
  }
  return primes;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1u);
  return out;
}

std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t d = 1;
  for (auto [p, e] : factorize(n)) d *= (e + 1);
  return d;
}

std::vector<std::uint32_t> divisor_counts(std::uint64_t limit) {
  std::vector<std::uint32_t> d(limit + 1, 0);
  for (std::uint64_t k = 1; k <= limit; ++k) {
    for (std::uint64_t m = k; m <= limit; m += k) ++d[m];
  }
  return d;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return std::nullopt;
    r *= base;
  }
  return r;
}

}  // namespace dflow::nt
