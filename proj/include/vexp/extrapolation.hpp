#pragma once

#include <cstdint>
#include <vector>

#include "vexp/exponent.hpp"
#include "vexp/report.hpp"
#include "vexp/weights.hpp"

namespace vexp {

// Hypothesis checkers. Every checker returns VIOLATED when a stated range
// inequality fails (naming it, with both sides as witnesses), UNKNOWN when
// the ranges hold but the sufficient B / P_log test is inconclusive, and
// HYPOTHESES_MET otherwise. Range endpoints are strict unless documented
// otherwise.

/// Diagonal extrapolation from w^delta-weighted L^{p0} bounds over A_1:
/// p0 < p_minus <= p_plus < p0/(1-delta), with delta (p/p0)' in the proxy class.
CheckReport check_diagonal(const Exponent& p, double p0, double delta, const LogHolderThresholds& th = {});

/// Off-diagonal version with 0 < p0 <= q0:
/// p0 < p_minus <= p_plus < p0 q0 / (q0 - delta p0), q from 1/p - 1/q = 1/p0 - 1/q0,
/// derived range q0 < q_minus <= q_plus < q0/(1-delta), and delta (q/q0)' in
/// the proxy class. Identical to check_diagonal when p0 == q0.
CheckReport check_off_diagonal(const Exponent& p, double p0, double q0, double delta,
                               const LogHolderThresholds& th = {});

/// Extrapolation from w^delta-weighted bounds over A_{p0}:
/// p0/(1 + delta(p0-1)) < p* < p_minus <= p_plus < p0/(1-delta), searching
/// p* over `search_grid` (64 evenly spaced interior points when empty) for
/// one with delta* (p/p*)' in the proxy class, delta* = (p0 - p*(1-delta))/p0.
CheckReport check_ap_via_search(const Exponent& p, double p0, double delta, std::vector<double> search_grid = {},
                                const LogHolderThresholds& th = {});

/// Same range with p log-Hoelder continuous (and p_minus > 1) in place of the search.
CheckReport check_ap_log_holder(const Exponent& p, double p0, double delta, const LogHolderThresholds& th = {});

/// Range endpoints: p0/(1-delta), p0 q0/(q0 - delta p0) and p0/(1 + delta(p0-1)).
double diagonal_upper(double p0, double delta);
double off_diagonal_upper(double p0, double q0, double delta);
double ap_lower(double p0, double delta);

enum class ApplicationKind { RoughA, RoughB, RoughC, StronglySingular, Spherical, BochnerRiesz };

std::string_view to_string(ApplicationKind k);
ApplicationKind parse_application(std::string_view text);

struct Application {
  ApplicationKind kind = ApplicationKind::RoughA;
  double r = 2.0;      // rough kernels
  double p0 = 2.0;     // rough_C, strongly singular
  int n = 2;           // dimension for strongly singular, spherical, Bochner-Riesz
  double b = 0.5;      // strongly singular
  double a = 0.25;     // strongly singular
  double alpha = 0.5;  // spherical
  double beta = 0.25;  // Bochner-Riesz
};

/// Range check for one application operator on L^{p(.)}; every derived
/// quantity (r', delta, gamma, q range, ...) is a witness. Throws InputError
/// on parameters outside the operator's own constraints.
CheckReport application_range(const Application& app, const Exponent& p, const LogHolderThresholds& th = {});

/// The exponent q with 1/p - 1/q = alpha/n.
Exponent fractional_target(const Exponent& p, double alpha, int n);

struct Pair {
  GridFunction f;
  GridFunction g;
};
using PairFamily = std::vector<Pair>;

/// Signed test inputs cycling through Gaussian bumps, sums of cube indicators
/// and oscillatory packets, all supported in the central half of the box.
/// Member i depends only on (seed, i), so a longer family extends a shorter one.
std::vector<GridFunction> test_inputs(const Grid& grid, std::size_t count, std::uint64_t seed);

/// Pairs (|op f|, |f|).
template <class Op>
PairFamily make_pairs(const std::vector<GridFunction>& inputs, Op&& op) {
  PairFamily out;
  out.reserve(inputs.size());
  for (const auto& f : inputs) out.push_back({abs(op(f)), abs(f)});
  return out;
}

/// max over pairs and certified weights of
/// (int f^{q0} w^delta)^{1/q0} / (int g^{p0} w^{delta p0/q0})^{1/p0}.
/// A weight is certified when its A_1 constant over `family` is finite and
/// refinement-stable; others are skipped with a note.
CheckReport empirical_weighted_hypothesis(const PairFamily& pairs, double p0, double q0, double delta,
                                          const std::vector<Weight>& weights, const CubeFamily& family);

/// C_hat = max over pairs of ||f||_{q} / ||g||_{p}, and the same over the first
/// half of the family. PASS when C_hat is finite and the two differ by < 10%.
CheckReport empirical_variable_conclusion(const PairFamily& pairs, const Exponent& p, const Exponent& q);

}  // namespace vexp
