#include "dflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace dflow {

// ---------------------------------------------------------------------------
// Generator

Generator::Generator(Series h, const DiagnosticGrid& grid) : h_(std::move(h)) {
  if (!h_.all_finite()) throw std::invalid_argument("Generator: non-finite coefficient");
  if (h_[1].real() < -kPositivityTolerance) {
    std::ostringstream msg;
    msg << "Generator: Re b_1 = " << h_[1].real() << " is negative";
    throw std::invalid_argument(msg.str());
  }
  if (h_.support_bound() <= 1) return;  // constant generator
  for (double x : grid.real_parts) {
    for (double y : grid.line.points()) {
      const cplx s{x, y};
      const double re = evaluate(h_, s).real();
      if (re < -kPositivityTolerance) {
        std::ostringstream msg;
        msg << "Generator: Re H(" << s << ") = " << re << " < 0, H does not map the right half-plane into its closure";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Flow

const FlowState& FlowTrajectory::at(double t) const {
  if (states.empty()) throw std::out_of_range("FlowTrajectory: no states");
  const double half_step = states.size() > 1 ? 0.5 * (states[1].t - states[0].t) : 0.0;
  const auto it = std::lower_bound(states.begin(), states.end(), t - half_step,
                                   [](const FlowState& s, double v) { return s.t < v; });
  if (it != states.end() && std::abs(it->t - t) <= half_step + 1e-15) return *it;
  throw std::out_of_range("FlowTrajectory: no state at t=" + std::to_string(t));
}

Series ode_rhs(const Series& a, const Generator& gen) {
  const std::size_t n_max = a.truncation();
  const Series& h = gen.series();
  Series out(n_max);
  out[1] = h[1];
  const std::size_t m_max = std::min(n_max, h.truncation());
  for (std::size_t m = 2; m <= m_max; ++m) {
    const cplx bm = h[m];
    if (bm == cplx{}) continue;
    const std::size_t inner = n_max / m;
    const Series e = exp_series(a.resized(inner) * cplx{-std::log(static_cast<double>(m))});
    for (std::size_t j = 1; j <= inner; ++j) out[m * j] += bm * e[j];
  }
  return out;
}

namespace {

void check_finite(const Series& a, double t) {
  for (std::size_t n = 1; n <= a.truncation(); ++n) {
    if (!std::isfinite(a[n].real()) || !std::isfinite(a[n].imag())) {
      std::ostringstream msg;
      msg << "integrate_flow: non-finite coefficient a_" << n << " at t=" << t;
      throw IntegrationError(msg.str());
    }
  }
}

}  // namespace

FlowTrajectory integrate_flow(const Generator& gen, double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_flow: dt must be positive");
  if (!(t_end >= dt)) throw std::invalid_argument("integrate_flow: t_end must be >= dt");

  const std::size_t n_max = gen.truncation();
  const cplx b1 = gen.b1();
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  FlowTrajectory flow;
  flow.states.reserve(steps + 1);
  flow.states.push_back({0.0, Series(n_max)});

  const bool trivial = gen.series().is_zero();
  Series a(n_max);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t0 = static_cast<double>(k - 1) * dt;
    const double t1 = k == steps ? t_end : static_cast<double>(k) * dt;
    const double h = t1 - t0;
    if (!trivial) {
      const Series k1 = ode_rhs(a, gen);
      const Series k2 = ode_rhs(a + k1 * cplx{0.5 * h}, gen);
      const Series k3 = ode_rhs(a + k2 * cplx{0.5 * h}, gen);
      const Series k4 = ode_rhs(a + k3 * cplx{h}, gen);
      a += (k1 + k2 * cplx{2.0} + k3 * cplx{2.0} + k4) * cplx{h / 6.0};
      check_finite(a, t1);
      const cplx exact = b1 * t1;
      flow.pinning_residual = std::max(flow.pinning_residual, std::abs(a[1] - exact));
      a[1] = exact;
    }
    flow.states.push_back({t1, a});
  }

  if (!trivial) {
    const Series velocity = ode_rhs(a.resized(2 * n_max), gen);
    double tail = 0.0;
    for (std::size_t n = n_max + 1; n <= 2 * n_max; ++n) tail += std::norm(velocity[n]);
    flow.dropped_tail = std::sqrt(tail);
  }
  return flow;
}

// ---------------------------------------------------------------------------
// Picard iteration

double line_lipschitz_bound(const Series& h, double x, const LineGrid& grid) {
  const Series dh = differentiate(h, 1);
  double sup_h = 0.0;
  double sup_dh = 0.0;
  for (double y : grid.points()) {
    const cplx s{x, y};
    sup_h = std::max(sup_h, std::abs(evaluate(h, s)));
    sup_dh = std::max(sup_dh, std::abs(evaluate(dh, s)));
  }
  return std::max(sup_h, sup_dh);
}

PicardResult picard_construct(const Generator& gen, double sigma, double t_max, unsigned iterations, double dt,
                              const LineGrid& grid) {
  if (!(sigma > 0.0)) throw std::invalid_argument("picard_construct: sigma must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("picard_construct: t_max must be positive");
  if (!(dt > 0.0) || dt > t_max) throw std::invalid_argument("picard_construct: need 0 < dt <= t_max");
  if (iterations == 0) throw std::invalid_argument("picard_construct: iterations must be positive");

  PicardResult result;
  result.lipschitz_bound = line_lipschitz_bound(gen.series(), 1.0 + sigma, grid);
  result.contraction_factor = t_max * result.lipschitz_bound;
  if (result.contraction_factor >= 1.0) {
    std::ostringstream msg;
    msg << "picard_construct: t_max * M = " << result.contraction_factor << " >= 1 (M = " << result.lipschitz_bound
        << "), the Picard operator is not a contraction";
    throw std::invalid_argument(msg.str());
  }

  const std::size_t n_max = gen.truncation();
  const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_max / dt)));
  const double h = t_max / static_cast<double>(cells);

  std::vector<Series> iterate(cells + 1, Series(n_max));  // f^0(s,t) = s
  for (unsigned k = 0; k < iterations; ++k) {
    std::vector<Series> velocity;
    velocity.reserve(cells + 1);
    for (const auto& a : iterate) velocity.push_back(ode_rhs(a, gen));

    std::vector<Series> next(cells + 1, Series(n_max));
    double distance = 0.0;
    for (std::size_t j = 1; j <= cells; ++j) {
      next[j] = next[j - 1] + (velocity[j - 1] + velocity[j]) * cplx{0.5 * h};
      distance = std::max(distance, max_abs_diff(next[j], iterate[j]));
    }
    result.iterate_distances.push_back(distance);
    iterate = std::move(next);
  }

  result.states.reserve(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) result.states.push_back({static_cast<double>(j) * h, std::move(iterate[j])});
  return result;
}

// ---------------------------------------------------------------------------
// Generator recovery and semigroup law

Series estimate_generator(std::span<const FlowState> states) {
  if (states.size() < 3) throw std::invalid_argument("estimate_generator: need at least 3 states");
  std::vector<const FlowState*> sorted;
  for (const auto& s : states) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](const FlowState* x, const FlowState* y) { return x->t < y->t; });
  const double t0 = sorted[0]->t;
  const double t1 = sorted[1]->t;
  const double t2 = sorted[2]->t;
  if (!(t0 >= 0.0 && t1 > t0 && t2 > t1)) throw std::invalid_argument("estimate_generator: need three distinct times >= 0");

  // Derivative at t = 0 of the quadratic interpolant through the three smallest times.
  const double w0 = -(t1 + t2) / ((t0 - t1) * (t0 - t2));
  const double w1 = -(t0 + t2) / ((t1 - t0) * (t1 - t2));
  const double w2 = -(t0 + t1) / ((t2 - t0) * (t2 - t1));
  const std::size_t n_max = std::min({sorted[0]->a.truncation(), sorted[1]->a.truncation(), sorted[2]->a.truncation()});
  Series b(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) b[n] = w0 * sorted[0]->a[n] + w1 * sorted[1]->a[n] + w2 * sorted[2]->a[n];
  return b;
}

SemigroupReport verify_semigroup(const FlowTrajectory& flow, const Generator& gen,
                                 std::span<const std::pair<double, double>> pairs, double epsilon,
                                 std::size_t continuity_states, const LineGrid& grid) {
  SemigroupReport report;
  if (flow.states.empty()) throw std::out_of_range("verify_semigroup: empty trajectory");
  const std::size_t n_max = flow.states.front().a.truncation();
  report.row_residuals.assign(n_max, 0.0);

  for (const auto& [t, u] : pairs) {
    const FlowState& st = flow.at(t);
    const FlowState& su = flow.at(u);
    const FlowState& stu = flow.at(t + u);
    const Series composed = pullback(st.a, su.symbol());
    double worst = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double r = std::abs(stu.a[n] - su.a[n] - composed[n]);
      report.row_residuals[n - 1] = std::max(report.row_residuals[n - 1], r);
      worst = std::max(worst, r);
    }
    report.pair_residuals.push_back({{t, u}, worst});
    report.max_residual = std::max(report.max_residual, worst);
  }

  for (const auto& s : flow.states) {
    report.a1_linearity_residual = std::max(report.a1_linearity_residual, std::abs(s.a[1] - gen.b1() * s.t));
  }

  std::size_t taken = 0;
  for (const auto& s : flow.states) {
    if (s.t <= 0.0) continue;
    if (taken++ == continuity_states) break;
    report.continuity.emplace_back(s.t, hinf_norm_estimate(s.a, epsilon, grid));
  }
  return report;
}

}  // namespace dflow
