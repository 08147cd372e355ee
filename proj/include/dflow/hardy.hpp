#pragma once

// Composition operators C_Phi f = f o Phi on the H^2 space of Dirichlet series,
// in the basis n^{-s}, plus norm and continuity diagnostics.

#include <span>
#include <vector>

#include "dflow/flow.hpp"
#include "dflow/series.hpp"
#include "dflow/symbol.hpp"

namespace dflow {

/// N x N compression of C_Phi: entry (n, m) is the n-th coefficient of m^{-Phi}.
class OperatorMatrix {
 public:
  explicit OperatorMatrix(std::size_t dimension) : dim_(dimension), entries_(dimension * dimension) {}

  std::size_t dimension() const noexcept { return dim_; }
  // 1-based (row, column).
  cplx operator()(std::size_t n, std::size_t m) const { return entries_[(m - 1) * dim_ + (n - 1)]; }
  cplx& operator()(std::size_t n, std::size_t m) { return entries_[(m - 1) * dim_ + (n - 1)]; }

  std::vector<cplx> apply(std::span<const cplx> x) const;
  std::vector<cplx> apply_adjoint(std::span<const cplx> y) const;

 private:
  std::size_t dim_;
  std::vector<cplx> entries_;  // column-major
};

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

/// Column m = power_pullback(m, sym, N).
OperatorMatrix assemble_matrix(const Symbol& sym, std::size_t dimension);

/// Spectral norm by power iteration on M^* M. Converges from below.
double compression_norm(const OperatorMatrix& m, double tolerance = 1e-10, unsigned max_iterations = 10000);

struct NormBracket {
  double estimate = 0.0;  // (sum_{n<=N} n^{-2 sigma})^{1/p}
  double lower = 0.0;     // same as estimate, the partial sum is a lower bound
  double upper = 0.0;     // partial sum plus the integral-test tail bound
  double tail_bound = 0.0;
};

/// Bracket for ||delta_s||_{(H^p)^*} = zeta(2 sigma)^{1/p}. Throws for sigma <= 1/2.
NormBracket eval_functional_norm(double sigma, double p, std::size_t truncation);

/// ||f o Phi_t - f||_{H^2} for each t, each flow integrated with `steps` RK4 steps.
std::vector<double> strong_continuity_probe(const Generator& gen, const Series& f, std::span<const double> t_list,
                                            std::size_t steps = 64);

struct UnboundednessRow {
  std::uint64_t n = 0;
  double norm = 0.0;          // ||H (n^{-s})'||_{H^2}
  double ratio_to_log = 0.0;  // norm / ln n
  double ratio = 0.0;         // norm / (ln n ||H||_{H^2})
};

/// Norms of the generator applied to n^{-s}. The product is formed at truncation
/// n * support_bound(H), where the shift by n loses nothing.
std::vector<UnboundednessRow> generator_unboundedness_check(const Series& h, std::span<const std::uint64_t> n_list);

struct NonunivalenceWitness {
  cplx s0{};
  cplx s1{};
  std::uint64_t leading_index = 0;  // N_0, first nonzero tail index
  double value_gap = 0.0;           // |phi(s0) - phi(s1)|
  double separation = 0.0;          // |s0 - s1|
  double epsilon_measured = 0.0;    // max |rest(s)| N_0^{Re s} on the rectangles
  double epsilon_limit = 0.0;       // (N_0 - 1) / N_0^2
  bool used_fallback = false;
};

class WitnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two distinct solutions of phi(s) = a_1 + a_{N0} N0^{-x}, one in each of the
/// rectangles centred at x and x + 2 pi i / ln N0. Newton from the centre with a
/// winding-number bisection fallback. Throws WitnessError when no witness is
/// certified.
NonunivalenceWitness nonunivalence_witness(const Series& phi, double x);

/// Winding number of f around the rectangle [x0, x1] x [y0, y1], sampled with
/// `samples` boundary points.
int winding_number(const Series& f, cplx target, double x0, double x1, double y0, double y1,
                   std::size_t samples = 4096);

}  // namespace dflow
