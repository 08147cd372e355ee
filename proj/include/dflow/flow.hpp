#pragma once

// Continuous semigroups Phi_t(s) = s + phi_t(s) generated by a Dirichlet
// series H with Re H >= 0, integrated at the level of the coefficients
// a_n(t) of phi_t.

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dflow/series.hpp"
#include "dflow/symbol.hpp"

namespace dflow {

/// Admissible infinitesimal generator: Re b_1 >= 0 and sampled Re H >= -1e-9 on
/// the diagnostic grid.
class Generator {
 public:
  static constexpr double kPositivityTolerance = 1e-9;

  /// Throws std::invalid_argument when H is not admissible.
  explicit Generator(Series h, const DiagnosticGrid& grid = {});

  const Series& series() const noexcept { return h_; }
  std::size_t truncation() const noexcept { return h_.truncation(); }
  cplx b1() const { return h_[1]; }

 private:
  Series h_;
};

struct FlowState {
  double t = 0.0;
  Series a{1};  // coefficients of phi_t

  /// Phi_t as a symbol; the characteristic is always 1.
  Symbol symbol() const { return {1, a}; }
  cplx eval(cplx s) const { return s + evaluate(a, s); }
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowTrajectory {
  std::vector<FlowState> states;  // t = 0, dt, 2 dt, ...
  /// max_t |a_1^{RK}(t) - b_1 t| before the exact value is pinned.
  double pinning_residual = 0.0;
  /// H^2 norm of the first band (N, 2N] of the velocity at the final state,
  /// the mass the truncation discards per unit time.
  double dropped_tail = 0.0;

  /// State whose time is within half a step of t. Throws std::out_of_range.
  const FlowState& at(double t) const;
};

/// Coefficients of H(s + phi(s)) = sum_m b_m m^{-s} exp(-ln m phi(s)), truncated at
/// length(a). Output index n depends only on a_k with k <= n/2.
Series ode_rhs(const Series& a, const Generator& gen);

/// Classical RK4 from a(0) = 0 with a_1(t) pinned to b_1 t after every step.
/// Throws IntegrationError on a non-finite state.
FlowTrajectory integrate_flow(const Generator& gen, double t_end, double dt);

struct PicardResult {
  std::vector<FlowState> states;        // final iterate on the time grid
  std::vector<double> iterate_distances;  // sup distance between consecutive iterates
  double lipschitz_bound = 0.0;          // M = max(sup|H|, sup|H'|) on Re s = 1 + sigma
  double contraction_factor = 0.0;       // t_max * M
};

/// Picard iteration of T f(s,t) = s + int_0^t H(f(s,tau)) dtau at coefficient level,
/// trapezoidal in time on a grid of spacing dt. Throws std::invalid_argument when
/// t_max * M >= 1.
PicardResult picard_construct(const Generator& gen, double sigma, double t_max, unsigned iterations,
                              double dt = 1e-3, const LineGrid& grid = {});

/// Estimates b_n = a_n'(0) with the second-order one-sided stencil through
/// (0, 0) and the two smallest positive times.
Series estimate_generator(std::span<const FlowState> states);

struct SemigroupReport {
  double max_residual = 0.0;
  std::vector<std::pair<std::pair<double, double>, double>> pair_residuals;  // ((t, u), residual)
  std::vector<double> row_residuals;     // max over pairs, per index n
  double a1_linearity_residual = 0.0;    // max_t |a_1(t) - b_1 t|
  std::vector<std::pair<double, double>> continuity;  // (t, sup |Phi_t(s) - s| on Re s = epsilon)
};

/// Residual of a_n(t+u) = a_n(u) + sum_k a_k(t) [k^{-Phi_u}]_n for each requested
/// pair, plus sampled sup |Phi_t - id| for the smallest positive times.
/// Throws std::out_of_range when a needed state is missing.
SemigroupReport verify_semigroup(const FlowTrajectory& flow, const Generator& gen,
                                 std::span<const std::pair<double, double>> pairs, double epsilon = 1.0,
                                 std::size_t continuity_states = 5, const LineGrid& grid = {});

/// max sup |H| and sup |H'| over the line Re s = x.
double line_lipschitz_bound(const Series& h, double x, const LineGrid& grid = {});

}  // namespace dflow
