#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace dflow::nt {

/// Primes p <= limit, increasing (sieve of Eratosthenes).
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// Number of divisors of n (n >= 1).
std::uint64_t divisor_count(std::uint64_t n);

/// d(n) for every n in [0, limit]; entry 0 is unused.
std::vector<std::uint32_t> divisor_counts(std::uint64_t limit);

/// (prime, exponent) pairs by trial division, primes increasing.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// base^exp, or nullopt on 64-bit overflow.
std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exp);

}  // namespace dflow::nt
