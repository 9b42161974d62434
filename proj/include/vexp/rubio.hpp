#pragma once

#include <cstdint>
#include <vector>

#include "vexp/exponent.hpp"
#include "vexp/maximal.hpp"
#include "vexp/report.hpp"
#include "vexp/weights.hpp"

namespace vexp {

/// delta (q/q0)': the exponent on which the maximal operator must be bounded
/// for the iteration to converge in Y' = L^{(q/q0)'}. Requires q0 < q_minus,
/// q_plus < q0/(1 - delta) and a result whose minimum exceeds 1.
Exponent yprime_exponent(const Exponent& q, double q0, double delta);

/// (q/q0)', the exponent of Y' itself.
Exponent dual_space_exponent(const Exponent& q, double q0);

struct IterationResult {
  GridFunction rh;
  int terms = 0;
  double B = 0.0;
  /// 2^{-K+1} ||h||_{Y'}.
  double tail_bound = 0.0;
  double h_norm = 0.0;
  double rh_norm = 0.0;
  Exponent yprime;
  Exponent maximal_exponent;
  /// Y' norm of every term, starting with ||h||.
  std::vector<double> term_norms;
};

/// Partial sum of sum_k M_delta^k h / (2B)^k, where M_delta h = (M h^{1/delta})^delta.
/// The overload without a MaximalConfig uses MaximalConfig::family(), so the
/// A_1 constant over the default cube family inherits the pointwise bound.
///
/// Stops at the first K with ||term_K||_{Y'} <= tol ||h||_{Y'} and
/// 2^{-K+1} <= tol. Throws ConvergenceError when Kmax terms are not enough.
/// The upper range endpoint for q is not enforced, so the endpoint case
/// q = q0/(1 - delta) can be iterated.
IterationResult rubio_iterate(const GridFunction& h, const Exponent& q, double q0, double delta, double B,
                              const MaximalConfig& cfg, double tol = 1e-8, int kmax = 60);
IterationResult rubio_iterate(const GridFunction& h, const Exponent& q, double q0, double delta, double B,
                              double tol = 1e-8, int kmax = 60);

/// safety * max(1, lower bound for the norm of M_delta on Y'), estimated on
/// an adversarial family.
double iteration_bound(const Exponent& q, double q0, double delta, const MaximalConfig& cfg,
                       std::size_t family_size = 24, std::uint64_t seed = 0, double safety = 2.0);

/// Checks the A_1 property of the iteration output:
///   rho = max M_delta(Rh) / Rh <= 2B + slack, and
///   [(Rh)^{1/delta}]_{A_1} <= (2B)^{1/delta} + tol over the cube family,
/// with slack = max(tol, 10 tail_bound / min Rh). PASS when both hold.
CheckReport a1_certificate(const IterationResult& result, double delta, const CubeFamily& family,
                           const MaximalConfig& cfg, double tol = 1e-8);

}  // namespace vexp
