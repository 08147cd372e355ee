#pragma once

// Symbols Phi(s) = c s + phi(s) with integer characteristic c >= 0 and a
// Dirichlet series phi, and the composition/pullback calculus they induce on
// truncated Dirichlet series.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dflow/series.hpp"

namespace dflow {

struct Symbol {
  unsigned characteristic = 1;
  Series phi{1};

  static Symbol identity(std::size_t truncation) { return {1, Series(truncation)}; }
  /// s + shift.
  static Symbol translation(std::size_t truncation, cplx shift) { return {1, Series::constant(truncation, shift)}; }

  std::size_t truncation() const noexcept { return phi.truncation(); }
};

/// Sample points used by the sampled class-membership and positivity checks.
struct DiagnosticGrid {
  std::vector<double> real_parts{1e-3, 0.1, 0.5, 1.0, 2.0, 4.0};
  LineGrid line{-50.0, 50.0, 401};
};

cplx eval_symbol(const Symbol& sym, cplx s);

/// Dirichlet coefficients of m^{-Phi(s)} = m^{-c s} exp(-ln m * phi(s)), truncated at N.
/// Throws std::overflow_error when m^c overflows 64 bits.
Series power_pullback(std::uint64_t m, const Symbol& sym, std::size_t truncation);

/// f o Phi = sum_m f_m m^{-Phi}; truncation is min(N_f, N_phi).
Series pullback(const Series& f, const Symbol& sym);

/// P o Q. The linear term c_P c_Q s is carried symbolically in the characteristic,
/// the series part is c_P psi + phi_P o Q.
Symbol compose(const Symbol& outer, const Symbol& inner);

struct CharacteristicEstimate {
  unsigned characteristic = 0;
  double spread = 0.0;      // max |Re(Phi(s)/s) - c| across samples
  bool consistent = true;   // spread <= 0.1
};

/// Nearest integer to Re(Phi(s)/s) at the sample with largest Re s.
/// Requires at least two samples with Re s >= 20.
CharacteristicEstimate estimate_characteristic(std::span<const std::pair<cplx, cplx>> samples);

/// Sampled class-membership warnings: Re phi > 1/2 when c == 0, Re phi >= 0 when c >= 1.
/// An empty result means no violation was observed on the grid.
std::vector<std::string> membership_warnings(const Symbol& sym, const DiagnosticGrid& grid = {});

}  // namespace dflow
