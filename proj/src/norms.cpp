#include "vexp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "vexp/simd.hpp"

namespace vexp {
namespace {

std::vector<double> log_abs(const GridFunction& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f[i];
    if (!std::isfinite(v)) throw InputError("norm of a function with non-finite samples");
    out[i] = v == 0.0 ? -HUGE_VAL : std::log(std::fabs(v));
  }
  return out;
}

// modular(f / lambda) from precomputed log|f|.
double scaled_modular(std::span<const double> logs, const Exponent& p, double cell, double log_lambda) {
  return cell * simd::active().exp_sum(logs, p.values().values(), log_lambda);
}

}  // namespace

double modular(const GridFunction& f, const Exponent& p) {
  require_same_grid(f.grid(), p.grid());
  const auto logs = log_abs(f);
  return scaled_modular(logs, p, f.grid().cell_volume(), 0.0);
}

NormResult luxemburg_norm(const GridFunction& f, const Exponent& p, double tol) {
  require_same_grid(f.grid(), p.grid());
  if (!(tol > 0.0)) throw InputError("norm tolerance must be positive");
  const auto logs = log_abs(f);
  const double sup = sup_norm(f);
  if (sup == 0.0) return {};

  const double cell = f.grid().cell_volume();
  int iterations = 0;
  auto m = [&](double lambda) {
    ++iterations;
    return scaled_modular(logs, p, cell, std::log(lambda));
  };

  double hi = sup * std::pow(std::max(1.0, f.grid().measure()), 1.0 / p.p_minus());
  while (m(hi) > 1.0) hi *= 2.0;
  double lo = 0.5 * hi;
  while (m(lo) <= 1.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) throw ConvergenceError("luxemburg norm bracket underflowed");
  }

  double mid = 0.5 * (lo + hi);
  double value = m(mid);
  for (;;) {
    const bool narrow = hi - lo <= tol * mid;
    const bool exhausted = hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid;
    if ((narrow && std::fabs(value - 1.0) <= tol) || exhausted) break;
    if (value > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    value = m(mid);
  }
  return {mid, iterations, std::fabs(value - 1.0)};
}

NormResult quasi_norm(const GridFunction& f, const Exponent& p, double p0, double tol) {
  if (!(p0 > 0.0) || !(p0 < p.p_minus())) {
    throw DomainError(fmt::format("quasi-norm requires 0 < p0 < p_minus (p0 = {}, p_minus = {})", p0, p.p_minus()));
  }
  GridFunction powered = abs_pow(f, p0);
  GridFunction q_values = p.values();
  for (auto& v : q_values.values()) v /= p0;
  const Exponent q(std::move(q_values), p.p_inf() / p0);
  // Raising to 1/p0 multiplies the relative error by 1/p0.
  NormResult inner = luxemburg_norm(powered, q, tol * std::min(1.0, p0));
  inner.value = std::pow(inner.value, 1.0 / p0);
  return inner;
}

double weighted_norm(const GridFunction& f, double p, const Weight& w) {
  require_same_grid(f.grid(), w.grid());
  if (!(p > 0.0)) throw DomainError("weighted norm requires p > 0");
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) terms[i] = std::pow(std::fabs(f[i]), p) * w[i];
  return std::pow(simd::active().sum(terms) * f.grid().cell_volume(), 1.0 / p);
}

double dual_pairing(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid(), g.grid());
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
  return simd::active().sum(prod) * f.grid().cell_volume();
}

}  // namespace vexp
