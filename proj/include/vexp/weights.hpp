#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "vexp/grid.hpp"
#include "vexp/report.hpp"

namespace vexp {

/// A strictly positive grid function. Samples below floor_fraction * max are
/// raised to that floor, so averages and minima over any cube stay finite.
class Weight {
 public:
  static constexpr double kDefaultFloorFraction = 1e-12;

  explicit Weight(GridFunction values, double floor_fraction = kDefaultFloorFraction);

  const Grid& grid() const noexcept { return values_.grid(); }
  const GridFunction& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  double floor() const noexcept { return floor_; }

  /// w^e, re-floored.
  Weight power(double e) const;
  Weight scaled(double c) const;

 private:
  GridFunction values_;
  double floor_ = 0.0;
};

/// Axis-aligned cube in cell units: cells lo[a] .. lo[a] + side - 1 on each axis.
struct Cube {
  Index lo{0, 0, 0};
  int side = 1;
  /// 0 for the whole box, increasing by one each time the side halves.
  int level = 0;
};

/// Finite surrogate for "every cube": the dyadic cubes of side N, N/2, ...,
/// N / 2^depth (never smaller than two cells), optionally with every
/// translate by half a side that stays inside the box.
class CubeFamily {
 public:
  static CubeFamily dyadic(const Grid& grid, int depth = -1, bool half_shifted = true);

  const Grid& grid() const noexcept { return grid_; }
  int depth() const noexcept { return depth_; }
  bool half_shifted() const noexcept { return half_shifted_; }
  std::size_t size() const noexcept { return cubes_.size(); }
  const std::vector<Cube>& cubes() const noexcept { return cubes_; }

  Point center(const Cube& c) const noexcept;
  double half_width(const Cube& c) const noexcept { return 0.5 * c.side * grid_.spacing(); }

  /// Sum of v over every cube, in family order. Uses a block pyramid (pairwise
  /// sums), so no cancellation.
  std::vector<double> sums(const GridFunction& v) const;
  std::vector<double> minima(const GridFunction& v) const;

  static int max_depth(const Grid& grid);

 private:
  Grid grid_;
  int depth_ = 0;
  bool half_shifted_ = true;
  std::vector<Cube> cubes_;
};

enum class WeightClass { Ap, A1, RHs };

std::string_view to_string(WeightClass c);

struct WeightClassReport {
  WeightClass weight_class = WeightClass::Ap;
  double parameter = 0.0;  // p for A_p, s for RH_s, 1 for A_1
  double constant = 0.0;
  /// Constant over the family truncated one level coarser.
  double constant_coarser = 0.0;
  std::size_t worst_cube = 0;
  Cube worst;
  /// constant within 25% of constant_coarser.
  bool stable = false;
};

/// sup_Q (avg_Q w)(avg_Q w^{1-p'})^{p-1}; requires p > 1.
WeightClassReport ap_constant(const Weight& w, double p, const CubeFamily& family);
/// sup_Q avg_Q w / min_Q w.
WeightClassReport a1_constant(const Weight& w, const CubeFamily& family);
/// sup_Q (avg_Q w^s)^{1/s} / avg_Q w; requires s > 1.
WeightClassReport rh_constant(const Weight& w, double s, const CubeFamily& family);

/// Compares the three sides of  w in A_p  <=>  w^delta in A_q  and  RH_{1/delta},
/// q = (p - 1 + delta) / delta. CONSISTENT when the finite-and-stable flags agree.
CheckReport ap_rh_equivalence_check(const Weight& w, double p, double delta, const CubeFamily& family);

/// Exponents of the weight condition that carries a w^delta inequality at
/// p0 over to exponent p: power = p0 / (p0 - p(1-delta)) and
/// index = p0 p delta / (p0 - p(1-delta)).
struct TransferredWeight {
  double power = 0.0;
  double index = 0.0;
};

/// Throws RangeError unless p0/(1 + delta(p0-1)) < p < p0/(1-delta).
TransferredWeight transferred_weight(double p, double p0, double delta);

/// A_index constant of w^power for the transferred pair. Verdict
/// HYPOTHESES_MET when the constant is finite and refinement-stable.
CheckReport transferred_weight_check(const Weight& w, double p, double p0, double delta, const CubeFamily& family);

enum class WeightKind { Constant, Power, SmoothedPower, MaximalPower };

struct WeightSpec {
  WeightKind kind = WeightKind::Constant;
  double value = 1.0;   // Constant
  double a = 0.0;       // Power, SmoothedPower
  double eps = 0.1;     // SmoothedPower
  double delta = 0.5;   // MaximalPower, in (0, 1)
  std::uint64_t seed = 0;  // MaximalPower
};

/// constant: w = value; power: |x|^a floored at (h/2)^|a|;
/// smoothed_power: (|x|^2 + eps^2)^{a/2}; maximal_power: (M g)^delta for a
/// random Gaussian bump g drawn from `seed`.
Weight generate_weight(const WeightSpec& spec, const Grid& grid);

}  // namespace vexp
