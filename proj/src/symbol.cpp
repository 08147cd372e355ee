#include "dflow/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dflow/number_theory.hpp"

namespace dflow {

cplx eval_symbol(const Symbol& sym, cplx s) {
  return static_cast<double>(sym.characteristic) * s + evaluate(sym.phi, s);
}

Series power_pullback(std::uint64_t m, const Symbol& sym, std::size_t truncation) {
  if (m == 0) throw std::invalid_argument("power_pullback: m must be positive");
  if (m == 1) return Series::unit(truncation);
  const auto shift = nt::checked_pow(m, sym.characteristic);
  if (!shift) {
    throw std::overflow_error("power_pullback: " + std::to_string(m) + "^" + std::to_string(sym.characteristic) +
                              " exceeds the 64-bit index range");
  }
  Series out(truncation);
  if (*shift > truncation) return out;
  const std::size_t inner = truncation / *shift;
  const Series e = exp_series(sym.phi.resized(inner) * cplx{-std::log(static_cast<double>(m))});
  for (std::size_t j = 1; j <= inner; ++j) out[j * *shift] = e[j];
  return out;
}

Series pullback(const Series& f, const Symbol& sym) {
  const std::size_t n = std::min(f.truncation(), sym.truncation());
  Series out(n);
  for (std::size_t m = 1; m <= n; ++m) {
    if (f[m] == cplx{}) continue;
    out += power_pullback(m, sym, n) * f[m];
  }
  return out;
}

Symbol compose(const Symbol& outer, const Symbol& inner) {
  const std::size_t n = std::min(outer.truncation(), inner.truncation());
  Series series = pullback(outer.phi.resized(n), inner);
  series += inner.phi.resized(n) * cplx{static_cast<double>(outer.characteristic)};
  return {outer.characteristic * inner.characteristic, std::move(series)};
}

CharacteristicEstimate estimate_characteristic(std::span<const std::pair<cplx, cplx>> samples) {
  std::vector<std::pair<cplx, cplx>> usable;
  for (const auto& sample : samples) {
    if (sample.first.real() >= 20.0) usable.push_back(sample);
  }
  if (usable.size() < 2) {
    throw std::invalid_argument("estimate_characteristic: need at least 2 samples with Re s >= 20");
  }
  const auto far = std::max_element(usable.begin(), usable.end(),
                                    [](const auto& a, const auto& b) { return a.first.real() < b.first.real(); });
  const double slope = (far->second / far->first).real();
  CharacteristicEstimate est;
  est.characteristic = static_cast<unsigned>(std::max(0.0, std::round(slope)));
  for (const auto& [s, value] : usable) {
    est.spread = std::max(est.spread, std::abs((value / s).real() - static_cast<double>(est.characteristic)));
  }
  est.consistent = est.spread <= 0.1;
  return est;
}

std::vector<std::string> membership_warnings(const Symbol& sym, const DiagnosticGrid& grid) {
  std::vector<std::string> warnings;
  const double floor = sym.characteristic == 0 ? 0.5 : 0.0;
  double worst = INFINITY;
  cplx worst_at{};
  for (double x : grid.real_parts) {
    for (double y : grid.line.points()) {
      const cplx s{x, y};
      const double re = evaluate(sym.phi, s).real();
      if (re < worst) {
        worst = re;
        worst_at = s;
      }
    }
  }
  const bool violated = sym.characteristic == 0 ? !(worst > floor) : worst < floor - 1e-9;
  if (violated) {
    std::ostringstream msg;
    msg << "Re phi(s) = " << worst << " at s = " << worst_at << (sym.characteristic == 0 ? " is not > 1/2" : " is negative")
        << " (characteristic " << sym.characteristic << ")";
    warnings.push_back(msg.str());
  }
  return warnings;
}

}  // namespace dflow
