#include "dflow/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace dflow {

std::vector<cplx> OperatorMatrix::apply(std::span<const cplx> x) const {
  std::vector<cplx> y(dim_);
  for (std::size_t m = 0; m < dim_; ++m) {
    const cplx xm = x[m];
    if (xm == cplx{}) continue;
    const cplx* col = &entries_[m * dim_];
    for (std::size_t n = 0; n < dim_; ++n) y[n] += col[n] * xm;
  }
  return y;
}

std::vector<cplx> OperatorMatrix::apply_adjoint(std::span<const cplx> y) const {
  std::vector<cplx> x(dim_);
  for (std::size_t m = 0; m < dim_; ++m) {
    const cplx* col = &entries_[m * dim_];
    cplx acc{};
    for (std::size_t n = 0; n < dim_; ++n) acc += std::conj(col[n]) * y[n];
    x[m] = acc;
  }
  return x;
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  if (lhs.dimension() != rhs.dimension()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  const std::size_t d = lhs.dimension();
  OperatorMatrix out(d);
  for (std::size_t m = 1; m <= d; ++m) {
    for (std::size_t k = 1; k <= d; ++k) {
      const cplx r = rhs(k, m);
      if (r == cplx{}) continue;
      for (std::size_t n = 1; n <= d; ++n) out(n, m) += lhs(n, k) * r;
    }
  }
  return out;
}

OperatorMatrix assemble_matrix(const Symbol& sym, std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("assemble_matrix: dimension must be positive");
  const Symbol sized{sym.characteristic, sym.phi.resized(dimension)};
  OperatorMatrix mat(dimension);
  for (std::size_t m = 1; m <= dimension; ++m) {
    const Series col = power_pullback(m, sized, dimension);
    for (std::size_t n = 1; n <= dimension; ++n) mat(n, m) = col[n];
  }
  return mat;
}

namespace {

double l2(std::span<const cplx> v) {
  double s = 0.0;
  for (cplx z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

double compression_norm(const OperatorMatrix& m, double tolerance, unsigned max_iterations) {
  const std::size_t d = m.dimension();
  std::vector<cplx> v(d, cplx{1.0 / std::sqrt(static_cast<double>(d))});
  double estimate = 0.0;
  for (unsigned it = 0; it < max_iterations; ++it) {
    const auto mv = m.apply(v);
    const double next = l2(mv);  // ||M v|| <= ||M|| for unit v
    if (next == 0.0) return estimate;
    auto w = m.apply_adjoint(mv);
    const double wn = l2(w);
    if (wn == 0.0) return next;
    for (auto& z : w) z /= wn;
    v = std::move(w);
    const bool converged = it > 0 && std::abs(next - estimate) <= tolerance * next;
    estimate = std::max(estimate, next);
    if (converged) break;
  }
  return estimate;
}

NormBracket eval_functional_norm(double sigma, double p, std::size_t truncation) {
  if (!(sigma > 0.5)) throw std::invalid_argument("eval_functional_norm: sigma must exceed 1/2 (zeta(2 sigma) diverges)");
  if (!(p >= 1.0)) throw std::invalid_argument("eval_functional_norm: p must be >= 1");
  if (truncation == 0) throw std::invalid_argument("eval_functional_norm: truncation must be positive");
  // Smallest terms first.
  double sum = 0.0;
  for (std::size_t n = truncation; n >= 1; --n) sum += std::pow(static_cast<double>(n), -2.0 * sigma);
  NormBracket b;
  b.tail_bound = std::pow(static_cast<double>(truncation), 1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
  b.estimate = std::pow(sum, 1.0 / p);
  b.lower = b.estimate;
  b.upper = std::pow(sum + b.tail_bound, 1.0 / p);
  return b;
}

std::vector<double> strong_continuity_probe(const Generator& gen, const Series& f, std::span<const double> t_list,
                                            std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("strong_continuity_probe: steps must be positive");
  const std::size_t n = std::min(f.truncation(), gen.truncation());
  const Series fn = f.resized(n);
  std::vector<double> out;
  out.reserve(t_list.size());
  for (double t : t_list) {
    if (!(t > 0.0)) throw std::invalid_argument("strong_continuity_probe: times must be positive");
    const auto flow = integrate_flow(gen, t, t / static_cast<double>(steps));
    const Symbol sym{1, flow.states.back().a.resized(n)};
    out.push_back(h2_norm(pullback(fn, sym) - fn));
  }
  return out;
}

std::vector<UnboundednessRow> generator_unboundedness_check(const Series& h, std::span<const std::uint64_t> n_list) {
  const double h_norm = h2_norm(h);
  const std::size_t support = std::max<std::size_t>(h.support_bound(), 1);
  std::vector<UnboundednessRow> rows;
  for (auto n : n_list) {
    if (n < 2) throw std::invalid_argument("generator_unboundedness_check: n must be >= 2");
    const std::size_t k = std::max<std::size_t>(h.truncation(), n * support);
    const Series derivative = differentiate(Series::monomial(k, n), 1);
    const double norm = h2_norm(convolve(h.resized(k), derivative));
    const double ln = std::log(static_cast<double>(n));
    rows.push_back({n, norm, norm / ln, h_norm > 0.0 ? norm / (ln * h_norm) : 0.0});
  }
  return rows;
}

int winding_number(const Series& f, cplx target, double x0, double x1, double y0, double y1, std::size_t samples) {
  const std::size_t per_edge = std::max<std::size_t>(samples / 4, 1);
  const cplx corners[] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  double total = 0.0;
  double prev = std::arg(evaluate(f, corners[0]) - target);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 4];
    for (std::size_t i = 1; i <= per_edge; ++i) {
      const cplx s = a + (b - a) * (static_cast<double>(i) / static_cast<double>(per_edge));
      const double ang = std::arg(evaluate(f, s) - target);
      double delta = ang - prev;
      while (delta > std::numbers::pi) delta -= 2.0 * std::numbers::pi;
      while (delta < -std::numbers::pi) delta += 2.0 * std::numbers::pi;
      total += delta;
      prev = ang;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace {

struct Rect {
  double x0, x1, y0, y1;
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx s) const { return s.real() > x0 && s.real() < x1 && s.imag() > y0 && s.imag() < y1; }
};

constexpr double kNewtonTolerance = 1e-12;
constexpr int kNewtonIterations = 100;

// Newton on f(s) = target; nullopt unless it converges inside `box`.
std::optional<cplx> newton(const Series& f, const Series& df, cplx target, cplx start, const Rect& box) {
  cplx s = start;
  const double tol = kNewtonTolerance * std::max(std::abs(target), 1e-300);
  for (int it = 0; it < kNewtonIterations; ++it) {
    const cplx r = evaluate(f, s) - target;
    if (std::abs(r) <= tol) return box.contains(s) ? std::optional<cplx>(s) : std::nullopt;
    const cplx d = evaluate(df, s);
    if (d == cplx{}) return std::nullopt;
    s -= r / d;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return std::nullopt;
  }
  return std::nullopt;
}

std::optional<cplx> bisect(const Series& f, const Series& df, cplx target, Rect box) {
  if (winding_number(f, target, box.x0, box.x1, box.y0, box.y1) == 0) return std::nullopt;
  while (std::max(box.x1 - box.x0, box.y1 - box.y0) > 1e-3) {
    Rect lo = box;
    Rect hi = box;
    if (box.x1 - box.x0 >= box.y1 - box.y0) {
      lo.x1 = hi.x0 = 0.5 * (box.x0 + box.x1);
    } else {
      lo.y1 = hi.y0 = 0.5 * (box.y0 + box.y1);
    }
    if (winding_number(f, target, lo.x0, lo.x1, lo.y0, lo.y1) != 0) {
      box = lo;
    } else if (winding_number(f, target, hi.x0, hi.x1, hi.y0, hi.y1) != 0) {
      box = hi;
    } else {
      return std::nullopt;
    }
  }
  return newton(f, df, target, box.center(), box);
}

}  // namespace

NonunivalenceWitness nonunivalence_witness(const Series& phi, double x) {
  NonunivalenceWitness w;
  for (std::size_t n = 2; n <= phi.truncation(); ++n) {
    if (phi[n] != cplx{}) {
      w.leading_index = n;
      break;
    }
  }
  if (w.leading_index == 0) throw WitnessError("nonunivalence_witness: phi is constant, no leading tail term");

  const std::size_t n0 = w.leading_index;
  const double ln = std::log(static_cast<double>(n0));
  const double half = std::numbers::pi / ln;

  // psi = (phi - a_1) / a_{N0} = N0^{-s} + rest
  Series psi = phi;
  psi[1] = 0.0;
  psi *= 1.0 / phi[n0];
  Series rest = psi;
  rest[n0] = 0.0;
  const Series dpsi = differentiate(psi, 1);
  const cplx target = std::exp(-x * ln);

  const Rect boxes[2] = {{x - 1.0, x + 1.0, -half, half}, {x - 1.0, x + 1.0, half, 3.0 * half}};

  w.epsilon_limit = static_cast<double>(n0 - 1) / static_cast<double>(n0 * n0);
  for (const auto& box : boxes) {
    const cplx corners[] = {{box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}, {box.x0, box.y1}};
    for (int e = 0; e < 4; ++e) {
      for (int i = 0; i < 1024; ++i) {
        const cplx s = corners[e] + (corners[(e + 1) % 4] - corners[e]) * (i / 1024.0);
        w.epsilon_measured = std::max(w.epsilon_measured, std::abs(evaluate(rest, s)) * std::exp(s.real() * ln));
      }
    }
  }

  cplx roots[2];
  for (int m = 0; m < 2; ++m) {
    auto root = newton(psi, dpsi, target, boxes[m].center(), boxes[m]);
    if (!root) {
      w.used_fallback = true;
      root = bisect(psi, dpsi, target, boxes[m]);
    }
    if (!root) {
      std::ostringstream msg;
      msg << "nonunivalence_witness: no root of phi(s) = N0^{-x} found in rectangle " << m << " (x = " << x
          << ", measured epsilon " << w.epsilon_measured << " vs limit " << w.epsilon_limit << ")";
      throw WitnessError(msg.str());
    }
    roots[m] = *root;
  }

  w.s0 = roots[0];
  w.s1 = roots[1];
  w.value_gap = std::abs(evaluate(phi, w.s0) - evaluate(phi, w.s1));
  w.separation = std::abs(w.s0 - w.s1);
  if (w.value_gap > 1e-8 || w.separation < half) {
    std::ostringstream msg;
    msg << "nonunivalence_witness: witness rejected (gap " << w.value_gap << ", separation " << w.separation
        << ", measured epsilon " << w.epsilon_measured << " vs limit " << w.epsilon_limit << ")";
    throw WitnessError(msg.str());
  }
  return w;
}

}  // namespace dflow
