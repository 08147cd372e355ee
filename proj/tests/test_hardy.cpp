#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "dflow/hardy.hpp"
#include "dflow/reference.hpp"

using namespace dflow;

namespace {

Symbol example_flow_symbol(double t, std::size_t n) {
  Series phi(n);
  for (std::size_t k = 1; k <= n; ++k) phi[k] = reference::example_flow_coeff(k, t);
  return {1, phi};
}

double svd_norm(const OperatorMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dimension());
  Eigen::MatrixXcd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = m(i + 1, j + 1);
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(e).singularValues()(0);
}

double max_entry_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  double d = 0.0;
  for (std::size_t n = 1; n <= a.dimension(); ++n) {
    for (std::size_t m = 1; m <= a.dimension(); ++m) d = std::max(d, std::abs(a(n, m) - b(n, m)));
  }
  return d;
}

}  // namespace

TEST(Matrix, IdentityAndTranslation) {
  const OperatorMatrix id = assemble_matrix(Symbol::identity(12), 12);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t m = 1; m <= 12; ++m) EXPECT_EQ(id(n, m), cplx(n == m ? 1.0 : 0.0));
  }
  const cplx alpha{0.7, 0.3};
  const OperatorMatrix tr = assemble_matrix(Symbol::translation(12, alpha), 12);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t m = 1; m <= 12; ++m) {
      const cplx expected = n == m ? std::exp(-alpha * std::log(double(m))) : 0.0;
      EXPECT_NEAR(std::abs(tr(n, m) - expected), 0.0, 1e-15);
    }
  }
}

TEST(Matrix, ExampleFlowColumnTwo) {
  // 2^{-Phi_t} = 2^{-t} sum_j (-(1 - 2^{-t}))^j 2^{-(j+1)s}
  const double t = 0.5, q = 1.0 - std::exp2(-t);
  const OperatorMatrix m = assemble_matrix(example_flow_symbol(t, 64), 64);
  for (std::size_t n = 1; n <= 64; ++n) {
    double expected = 0.0;
    if (n >= 2 && std::has_single_bit(n)) expected = std::exp2(-t) * std::pow(-q, std::countr_zero(n) - 1);
    EXPECT_NEAR(std::abs(m(n, 2) - expected), 0.0, 1e-14) << n;
    EXPECT_EQ(m(n, 1), cplx(n == 1 ? 1.0 : 0.0));
  }
}

TEST(MatrixProperty, Sparsity) {
  std::mt19937_64 rng(1);
  Series phi = reference::random_series(rng, 40, 0.3);
  phi[1] = {0.5, 0.2};
  const OperatorMatrix m = assemble_matrix({1, phi}, 40);
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::size_t k = 2; k <= 40; ++k) {
      if (n % k != 0) EXPECT_EQ(m(n, k), cplx(0.0));
    }
  }
  const OperatorMatrix m2 = assemble_matrix({2, phi}, 40);
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::size_t k = 2; k <= 6; ++k) {
      if (n % (k * k) != 0) EXPECT_EQ(m2(n, k), cplx(0.0));
    }
  }
}

TEST(MatrixProperty, Functoriality) {
  // f o (P o Q) = (f o P) o Q, so the matrix of P o Q is M_Q M_P
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 6; ++trial) {
    Series a = reference::random_series(rng, 32, 0.3), b = reference::random_series(rng, 32, 0.3);
    a[1] = {1.0, 0.5};
    b[1] = {0.2, -0.4};
    const Symbol p{unsigned(trial % 3), a}, q{1u + trial % 2, b};
    const OperatorMatrix lhs = assemble_matrix(compose(p, q), 32);
    const OperatorMatrix rhs = assemble_matrix(q, 32) * assemble_matrix(p, 32);
    EXPECT_LE(max_entry_diff(lhs, rhs), 1e-12) << trial;
  }
}

TEST(CompressionNorm, Examples) {
  EXPECT_NEAR(compression_norm(assemble_matrix(Symbol::identity(16), 16)), 1.0, 1e-12);
  EXPECT_NEAR(compression_norm(assemble_matrix(Symbol::translation(16, 0.8), 16)), 1.0, 1e-10);
  for (double t : {0.1, 0.5, 1.0}) {
    EXPECT_LE(compression_norm(assemble_matrix(example_flow_symbol(t, 64), 64)), 1.0 + 1e-9) << t;
  }
}

TEST(CompressionNorm, MatchesSvd) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    OperatorMatrix m(20);
    for (std::size_t n = 1; n <= 20; ++n) {
      for (std::size_t k = 1; k <= 20; ++k) m(n, k) = reference::in_disk(rng, 1.0);
    }
    const double ref = svd_norm(m);
    EXPECT_NEAR(compression_norm(m, 1e-13, 100000), ref, 1e-8 * ref);
  }
  const OperatorMatrix flow = assemble_matrix(example_flow_symbol(0.5, 48), 48);
  EXPECT_NEAR(compression_norm(flow), svd_norm(flow), 1e-6);
}

TEST(CompressionNormProperty, FlowsAreContractions) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 4; ++trial) {
    const Generator g(reference::random_admissible_generator(rng, 32));
    const FlowTrajectory f = integrate_flow(g, 1.0, 1e-2);
    for (double t : {0.2, 1.0}) {
      const OperatorMatrix m = assemble_matrix(f.at(t).symbol(), 32);
      EXPECT_LE(compression_norm(m), 1.0 + 1e-9);
      EXPECT_LE(svd_norm(m), 1.0 + 1e-9);
    }
  }
}

TEST(EvalFunctional, ZetaBrackets) {
  const double sqrt_zeta2 = std::sqrt(std::numbers::pi * std::numbers::pi / 6.0);
  const NormBracket b = eval_functional_norm(1.0, 2.0, 1000000);
  EXPECT_LE(b.lower, 1.282549830);
  EXPECT_GE(b.upper, 1.282549830);
  EXPECT_LE(b.lower, sqrt_zeta2);
  EXPECT_GE(b.upper, sqrt_zeta2);
  EXPECT_LT(b.upper - b.lower, 1e-5);

  const NormBracket p1 = eval_functional_norm(1.0, 1.0, 10000);
  EXPECT_LE(p1.lower, 1.64493407);
  EXPECT_GE(p1.upper, 1.64493406);

  EXPECT_NEAR(eval_functional_norm(40.0, 2.0, 1000).estimate, 1.0, 1e-15);
  EXPECT_THROW(eval_functional_norm(0.5, 2.0, 10), std::invalid_argument);
  EXPECT_THROW(eval_functional_norm(0.3, 2.0, 10), std::invalid_argument);
}

TEST(EvalFunctionalProperty, BracketContainsZeta) {
  for (double sigma : {0.6, 0.75, 1.3, 2.0}) {
    const double zeta = std::riemann_zeta(2.0 * sigma);
    for (double p : {1.0, 2.0, 3.0}) {
      for (std::size_t n : {10, 1000, 100000}) {
        const NormBracket b = eval_functional_norm(sigma, p, n);
        const double exact = std::pow(zeta, 1.0 / p);
        EXPECT_LE(b.lower, exact * (1 + 1e-14)) << sigma << " " << p << " " << n;
        EXPECT_GE(b.upper, exact * (1 - 1e-14)) << sigma << " " << p << " " << n;
      }
    }
  }
}

TEST(StrongContinuity, Examples) {
  const std::vector<double> ts = {1e-1, 1e-2, 1e-3};
  const auto zero = strong_continuity_probe(Generator(reference::example_generator(16)), Series::unit(16), ts);
  for (double d : zero) EXPECT_EQ(d, 0.0);

  const double alpha = 0.8;
  const auto tr = strong_continuity_probe(Generator(Series::constant(16, alpha)), Series::monomial(16, 2), ts);
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(tr[i], 1.0 - std::exp2(-alpha * ts[i]), 1e-12);

  const auto ex = strong_continuity_probe(Generator(reference::example_generator(16)), Series::monomial(16, 2), ts);
  EXPECT_GT(ex[0], ex[1]);
  EXPECT_GT(ex[1], ex[2]);
  EXPECT_NEAR(ex[1] / ex[2], 10.0, 0.5);
}

TEST(Unboundedness, Examples) {
  const std::uint64_t two[] = {2};
  EXPECT_NEAR(generator_unboundedness_check(Series::unit(4), two)[0].norm, std::log(2.0), 1e-15);

  const std::uint64_t three[] = {3};
  const auto row = generator_unboundedness_check(reference::example_generator(2), three)[0];
  EXPECT_NEAR(row.norm, std::log(3.0) * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(row.ratio, 1.0, 1e-14);

  std::mt19937_64 rng(5);
  const Series h = reference::random_admissible_generator(rng, 16);
  const std::uint64_t ns[] = {2, 3, 5, 8, 13};
  const auto rows = generator_unboundedness_check(h, ns);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.ratio, 1.0, 1e-12);
    EXPECT_NEAR(r.ratio_to_log, h2_norm(h), 1e-12);
  }
  EXPECT_GT(rows.back().norm, rows.front().norm);
}

TEST(Witness, PeriodicMonomial) {
  for (double x : {3.0, 10.0}) {
    const NonunivalenceWitness w = nonunivalence_witness(Series::monomial(8, 2), x);
    EXPECT_EQ(w.leading_index, 2u);
    EXPECT_NEAR(std::abs(w.s0 - cplx(x, 0.0)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(w.s1 - cplx(x, 2.0 * std::numbers::pi / std::numbers::ln2)), 0.0, 1e-10);
    EXPECT_NEAR(w.separation, 9.0647, 1e-4);
    EXPECT_EQ(w.epsilon_measured, 0.0);
  }
}

TEST(Witness, PerturbedMonomial) {
  Series phi(8);
  phi[2] = 1.0;
  phi[3] = 0.01;
  const NonunivalenceWitness w = nonunivalence_witness(phi, 6.0);
  EXPECT_LE(w.value_gap, 1e-8);
  EXPECT_GE(w.separation, std::numbers::pi / std::numbers::ln2);
  EXPECT_LT(w.epsilon_measured, w.epsilon_limit);
  EXPECT_NEAR(w.epsilon_limit, 0.25, 1e-15);
  // both are genuine solutions of phi(s) = 2^{-6}
  EXPECT_NEAR(std::abs(evaluate(phi, w.s0) - std::exp2(-6.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(evaluate(phi, w.s1) - std::exp2(-6.0)), 0.0, 1e-12);
}

TEST(Witness, ConstantAndScaledInputs) {
  // constant term and leading coefficient are normalized away
  Series phi(9);
  phi[1] = {3.0, -1.0};
  phi[3] = {0.0, 2.0};
  phi[9] = 0.001;
  const NonunivalenceWitness w = nonunivalence_witness(phi, 5.0);
  EXPECT_EQ(w.leading_index, 3u);
  EXPECT_LE(w.value_gap, 1e-8);
  EXPECT_GE(w.separation, std::numbers::pi / std::log(3.0));

  EXPECT_THROW(nonunivalence_witness(Series::constant(4, 1.0), 3.0), WitnessError);
}

TEST(Witness, ReportsFailureWhenBoundFails) {
  // psi = w + 100 w^2 with w = 2^{-s}: both roots of psi = 1/2 have |w| < 1/4, outside the boxes
  Series phi(8);
  phi[2] = 1.0;
  phi[4] = 100.0;
  try {
    nonunivalence_witness(phi, 1.0);
    FAIL() << "expected WitnessError";
  } catch (const WitnessError& e) {
    EXPECT_NE(std::string(e.what()).find("epsilon"), std::string::npos);
  }
}

TEST(Winding, CountsRoots) {
  const Series f = Series::monomial(4, 2);
  const double h = std::numbers::pi / std::numbers::ln2;
  EXPECT_EQ(winding_number(f, std::exp2(-3.0), 2.0, 4.0, -h, h), 1);
  EXPECT_EQ(winding_number(f, std::exp2(-3.0), 2.0, 4.0, -3 * h, 3 * h), 3);
  EXPECT_EQ(winding_number(f, std::exp2(-3.0), 4.0, 6.0, -h, h), 0);
}
