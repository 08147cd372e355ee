#include "dflow/koenigs.hpp"

#include <algorithm>
#include <cmath>

namespace dflow {

namespace {

// Relative size below which Re d_1 counts as zero.
constexpr double kRealPartTolerance = 1e-12;

}  // namespace

Series invert_series(const Series& h) {
  const cplx b1 = h[1];
  if (b1 == cplx{}) throw InversionError("invert_series: leading coefficient b_1 is zero, H has no Dirichlet inverse");
  const std::size_t n_max = h.truncation();
  const cplx inv_b1 = 1.0 / b1;
  std::vector<std::size_t> tail;
  for (std::size_t d = 2; d <= n_max; ++d) {
    if (h[d] != cplx{}) tail.push_back(d);
  }
  // acc[n] collects sum_{d|n, d>1} b_d c_{n/d}; c_n is final before any d*n is touched.
  Series c(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    c[n] = n == 1 ? inv_b1 : -inv_b1 * c[n];
    const cplx cn = c[n];
    if (cn == cplx{}) continue;
    for (std::size_t i = 0; i < tail.size() && tail[i] <= n_max / n; ++i) c[tail[i] * n] += h[tail[i]] * cn;
  }
  return c;
}

bool KoenigsFunction::tail_nonzero() const noexcept {
  return std::any_of(tail.begin(), tail.end(), [](cplx z) { return z != cplx{}; });
}

Series KoenigsFunction::derivative() const {
  Series d(truncation());
  d[1] = d1;
  for (std::size_t n = 2; n <= truncation(); ++n) d[n] = tail[n - 2];
  return d;
}

Series KoenigsFunction::nonlinear_part() const {
  Series g(truncation());
  for (std::size_t n = 2; n <= truncation(); ++n) g[n] = -tail[n - 2] / std::log(static_cast<double>(n));
  return g;
}

KoenigsFunction koenigs_from_generator(const Series& h) {
  const Series c = invert_series(h);
  KoenigsFunction k;
  k.d1 = c[1];
  k.tail.assign(c.coeffs().begin() + 1, c.coeffs().end());
  return k;
}

cplx eval_koenigs(const KoenigsFunction& h, cplx s) {
  cplx sum = h.d1 * s;
  for (std::size_t n = 2; n <= h.truncation(); ++n) {
    const cplx dn = h.tail[n - 2];
    if (dn == cplx{}) continue;
    const double ln = std::log(static_cast<double>(n));
    sum -= dn / ln * std::exp(-s * ln);
  }
  return sum;
}

AbelReport verify_abel(const KoenigsFunction& h, std::span<const FlowState> states, std::span<const cplx> samples) {
  AbelReport report;
  const Series g = h.nonlinear_part();
  for (const auto& state : states) {
    const std::size_t n = std::min(g.truncation(), state.a.truncation());
    const Series phi = state.a.resized(n);
    const Series gn = g.resized(n);
    Series algebraic = pullback(gn, Symbol{1, phi}) - gn + phi * h.d1;
    algebraic[1] -= state.t;

    for (cplx s : samples) {
      const cplx lhs = eval_koenigs(h, state.eval(s));
      const double pointwise = std::abs(lhs - eval_koenigs(h, s) - state.t);
      if (pointwise > report.max_residual) {
        report.max_residual = pointwise;
        report.worst_t = state.t;
        report.worst_s = s;
      }
      report.max_algebraic_residual = std::max(report.max_algebraic_residual, std::abs(evaluate(algebraic, s)));
    }
  }
  return report;
}

std::string_view to_string(Dynamics d) {
  switch (d) {
    case Dynamics::automorphic_group:
      return "AUTOMORPHIC_GROUP";
    case Dynamics::zero_hyperbolic_step:
      return "ZERO_HYPERBOLIC_STEP";
  }
  return "UNKNOWN";
}

Dynamics classify_dynamics(const KoenigsFunction& h, bool tail_nonzero) {
  if (h.d1 == cplx{}) throw std::invalid_argument("classify_dynamics: d_1 = 0, h' has no invertible leading term");
  if (std::abs(h.d1.real()) <= kRealPartTolerance * std::abs(h.d1)) {
    if (tail_nonzero || h.tail_nonzero()) {
      throw std::invalid_argument(
          "classify_dynamics: Re d_1 = 0 with a nonzero tail; a generator with Re b_1 = 0 must be constant");
    }
    return Dynamics::automorphic_group;
  }
  return Dynamics::zero_hyperbolic_step;
}

Dynamics classify_dynamics(const KoenigsFunction& h) { return classify_dynamics(h, h.tail_nonzero()); }

}  // namespace dflow
