#pragma once

// Closed forms for the semigroup generated by H(s) = 1 + 2^{-s}:
//
//   Phi_t(s) = s + t + Log(1 + 2^{-s}(1 - 2^{-t})) / ln 2
//   h(s)     = s + Log(1 + 2^{-s}) / ln 2
//
// evaluated directly with the principal logarithm, together with their Dirichlet
// coefficients and bounds on what a truncation at N discards. Used as oracles.

#include <cstddef>
#include <random>

#include "dflow/series.hpp"

namespace dflow::reference {

/// H(s) = 1 + 2^{-s} truncated at N.
Series example_generator(std::size_t truncation);

cplx example_flow(cplx s, double t);
/// n-th coefficient of phi_t: t at n = 1, (-1)^{k+1} (1 - 2^{-t})^k / (k ln 2) at n = 2^k.
double example_flow_coeff(std::size_t n, double t);
/// s + sum_{n <= N} example_flow_coeff(n, t) n^{-s}.
cplx example_flow_prefix(cplx s, double t, std::size_t truncation);
/// Bound on |example_flow - example_flow_prefix| (geometric bound on the log series).
double example_flow_tail_bound(cplx s, double t, std::size_t truncation);

cplx example_koenigs(cplx s);
/// Dirichlet coefficients of h' = 1/H: (-1)^k at n = 2^k, zero elsewhere.
double example_koenigs_derivative_coeff(std::size_t n);
cplx example_koenigs_prefix(cplx s, std::size_t truncation);
double example_koenigs_tail_bound(cplx s, std::size_t truncation);

// ---------------------------------------------------------------------------
// Seeded random inputs

double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0);
/// Uniform point in the disk of the given radius.
cplx in_disk(std::mt19937_64& rng, double radius);

/// Series with a_n uniform in the disk of radius `radius`.
Series random_series(std::mt19937_64& rng, std::size_t truncation, double radius = 1.0);

/// Generator with Re b_1 in [re_lo, re_hi], Im b_1 in [-1, 1], and a tail whose
/// total magnitude sum |b_n| is at most min(tail_l1, re_lo); admissible because
/// Re H >= Re b_1 - sum |b_n| >= 0 on the right half-plane.
Series random_admissible_generator(std::mt19937_64& rng, std::size_t truncation, double re_lo = 0.5, double re_hi = 2.0,
                                   double tail_l1 = 0.5);

}  // namespace dflow::reference
