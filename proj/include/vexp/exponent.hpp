#pragma once

#include <optional>
#include <string_view>

#include "vexp/grid.hpp"

namespace vexp {

/// A variable exponent p(.) sampled on a grid, with a tail value p_inf
/// standing in for the limit at infinity.
///
/// Invariant: 0 < p_minus <= p(x) <= p_plus < inf at every sample and
/// p_inf in [p_minus, p_plus].
class Exponent {
 public:
  /// When `p_inf` is empty the value at the sample farthest from the origin is used.
  explicit Exponent(GridFunction values, std::optional<double> p_inf = std::nullopt);

  static Exponent constant(const Grid& grid, double p);
  /// a + b exp(-c |x|^2); p_inf defaults to a.
  static Exponent radial_bump(const Grid& grid, double a, double b, double c, std::optional<double> p_inf = std::nullopt);
  /// Transition from `left` to `right` across x_1 = x0 over a band of the
  /// given width (C-infinity step); width 0 gives a jump.
  static Exponent smoothed_step(const Grid& grid, double left, double right, double x0, double width,
                                std::optional<double> p_inf = std::nullopt);

  const Grid& grid() const noexcept { return values_.grid(); }
  const GridFunction& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  double p_inf() const noexcept { return p_inf_; }
  double p_minus() const noexcept { return p_minus_; }
  double p_plus() const noexcept { return p_plus_; }
  bool is_constant() const noexcept { return p_minus_ == p_plus_; }

 private:
  GridFunction values_;
  double p_inf_ = 0.0;
  double p_minus_ = 0.0;
  double p_plus_ = 0.0;
};

/// C-infinity step: 0 for u <= 0, 1 for u >= 1, e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}) between.
double smooth_step(double u) noexcept;

/// p'(x) = p(x) / (p(x) - 1). Requires p_minus > 1.
Exponent conjugate(const Exponent& p);

/// delta * (p(x)/p0)' = delta * p(x) / (p(x) - p0). Requires 0 < p0 < p_minus and 0 < delta <= 1.
Exponent scaled_conjugate(const Exponent& p, double p0, double delta);

/// q(x) with 1/p(x) - 1/q(x) = 1/p0 - 1/q0. Requires 0 < p0 <= q0 and a
/// positive reciprocal everywhere. Returns p unchanged when p0 == q0.
Exponent offdiagonal_exponent(const Exponent& p, double p0, double q0);

struct LogHolderThresholds {
  double c1_max = 10.0;
  double c2_max = 10.0;
  /// Largest accepted ratio of the local constant at full resolution to the
  /// constant measured on the every-other-sample subgrid. A jump makes the
  /// ratio track log(e + 1/h) / log(e + 1/(2h)) > 1.
  double growth_max = 1.05;
};

struct LogHolderReport {
  double c1_hat = 0.0;
  double c1_hat_coarse = 0.0;
  /// Decay constant, certified only over |x| <= decay_radius (the sampled range).
  double c2_hat = 0.0;
  double decay_radius = 0.0;
  bool passes_local = false;
  bool passes_decay = false;
  bool in_plog = false;
};

LogHolderReport check_log_holder(const Exponent& p, const LogHolderThresholds& thresholds = {});

enum class BMembership { Pass, Unknown };

std::string_view to_string(BMembership b);

/// Sufficient test for boundedness of the maximal operator on L^{p(.)}:
/// PASS when p is log-Hoelder (locally and at infinity) with p_minus > 1,
/// UNKNOWN otherwise. Never reports failure.
BMembership in_b_proxy(const Exponent& p, const LogHolderThresholds& thresholds = {});

}  // namespace vexp
