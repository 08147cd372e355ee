#pragma once

// Koenigs functions h(s) = d_1 s - sum_{n>=2} (d_n / ln n) n^{-s} solving the Abel
// equation h o Phi_t = h + t, built from h' = 1/H.

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dflow/flow.hpp"
#include "dflow/series.hpp"

namespace dflow {

class InversionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dirichlet inverse: c_1 = 1/b_1, c_n = -(1/b_1) sum_{d|n, d>1} b_d c_{n/d}.
/// Throws InversionError when b_1 == 0.
Series invert_series(const Series& h);

struct KoenigsFunction {
  cplx d1{1.0, 0.0};
  std::vector<cplx> tail;  // d_2 .. d_N

  std::size_t truncation() const noexcept { return tail.size() + 1; }
  bool tail_nonzero() const noexcept;
  /// h'(s) = d_1 + sum d_n n^{-s}.
  Series derivative() const;
  /// The non-linear part g(s) = h(s) - d_1 s = -sum (d_n / ln n) n^{-s}.
  Series nonlinear_part() const;
};

/// h with h' = 1/H coefficientwise and additive constant 0.
KoenigsFunction koenigs_from_generator(const Series& h);

cplx eval_koenigs(const KoenigsFunction& h, cplx s);

struct AbelReport {
  /// max |h(Phi_t(s)) - h(s) - t| with both truncated functions evaluated pointwise.
  double max_residual = 0.0;
  /// Same identity carried out in the truncated Dirichlet algebra:
  /// d_1 phi_t + g o Phi_t - g - t, evaluated at the samples. Free of truncation tails.
  double max_algebraic_residual = 0.0;
  double worst_t = 0.0;
  cplx worst_s{};
};

/// Abel-equation residuals over every state and sample point (Re s >= 1 recommended).
AbelReport verify_abel(const KoenigsFunction& h, std::span<const FlowState> states, std::span<const cplx> samples);

enum class Dynamics { automorphic_group, zero_hyperbolic_step };

std::string_view to_string(Dynamics d);

/// Automorphism group when Re d_1 == 0, zero hyperbolic step otherwise.
/// Throws std::invalid_argument for d_1 == 0, or Re d_1 == 0 together with a
/// nonzero tail (a generator with Re b_1 == 0 must be constant).
Dynamics classify_dynamics(const KoenigsFunction& h, bool tail_nonzero);
Dynamics classify_dynamics(const KoenigsFunction& h);

}  // namespace dflow
