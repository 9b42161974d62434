#pragma once

#include <functional>
#include <vector>

#include "vexp/exponent.hpp"
#include "vexp/grid.hpp"

namespace vexp {

/// CenteredCube: supremum over centred cubes of the configured radii.
/// CubeFamily: supremum over the cubes of the default dyadic family (with
/// half-shifted translates) that contain the point, the same cubes over which
/// weight constants are measured.
enum class MaximalShape { CenteredCube, CubeFamily };

/// Radii of the centred cubes over which the maximal operator takes its
/// supremum, in cells: radius m means the 2m + 1 cells i - m .. i + m on each
/// axis (half-width (m + 1/2) h), clipped to the box. Radius 0 is always
/// implied, so Mf >= |f| holds exactly; the CubeFamily shape includes it too.
struct MaximalConfig {
  MaximalShape shape = MaximalShape::CenteredCube;
  std::vector<int> radii;

  /// {0, 1, 2, 4, ..., N/2}.
  static MaximalConfig dyadic(const Grid& grid);
  /// Every radius 0 .. N/2.
  static MaximalConfig dense(const Grid& grid);
  static MaximalConfig family();
};

/// Average of f over the clipped centred cube of the given radius, at every sample.
/// Separable: one clipped window mean per axis over prefix sums.
GridFunction cube_average(const GridFunction& f, int radius);

/// Hardy-Littlewood maximal function over the configured cubes.
GridFunction hl_maximal(const GridFunction& f, const MaximalConfig& cfg);

/// (M(h^{1/delta}))^delta for h >= 0 and 0 < delta <= 1. The result is
/// bounded below by h itself, so the majorant property survives the pow
/// round trip.
GridFunction powered_maximal(const GridFunction& h, double delta, const MaximalConfig& cfg);

/// Surface-node count used at radius t: max(64, 8 ceil(t/h)) in 2-D,
/// max(256, 16 ceil(t/h)^2) in 3-D.
int sphere_node_count(const Grid& grid, double t);

/// Unit vectors of the quadrature rule; antipodally symmetric, equal weights.
std::vector<Point> sphere_nodes(int dim, int count);

/// Average of f over the sphere of radius t centred at every sample, with
/// multilinear interpolation (zero outside a Box grid, periodic on a Torus).
/// Requires dim 2 or 3 and 0 < t < L/4.
GridFunction spherical_mean(const GridFunction& f, double t);

/// Spherical mean at a single point.
double spherical_mean_at(const GridFunction& f, const Point& x, double t);

/// Geometric radii with ratio 2^{1/8} spanning [2h, L/4).
std::vector<double> default_t_grid(const Grid& grid);

/// max over t of t^alpha |spherical_mean(f, t)|.
GridFunction frac_spherical_maximal(const GridFunction& f, double alpha, const std::vector<double>& t_grid);

using Operator = std::function<GridFunction(const GridFunction&)>;

struct OperatorNormEstimate {
  /// max over the family of ||op f|| / ||f||: a lower bound for the operator norm.
  double lower_bound = 0.0;
  std::size_t skipped = 0;
  std::vector<double> ratios;
};

OperatorNormEstimate operator_norm_estimate(const Operator& op, const Exponent& p,
                                            const std::vector<GridFunction>& family, double tol = 1e-10);

/// Indicators of small cubes and narrow bumps at spread positions, the kind
/// of input that drives the maximal operator towards its norm.
std::vector<GridFunction> adversarial_family(const Grid& grid, std::size_t count, std::uint64_t seed);

}  // namespace vexp
