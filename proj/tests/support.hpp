#pragma once

#include <cstdint>
#include <random>

#include "vexp/grid.hpp"

namespace vexp::testing {

/// Uniform samples in [lo, hi) at every grid point.
inline GridFunction random_function(const Grid& grid, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  GridFunction f(grid);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

/// Nonnegative random bump sum supported in the central half of the box.
inline GridFunction random_bumps(const Grid& grid, std::uint64_t seed, int count = 3) {
  std::mt19937_64 rng(seed);
  const double quarter = 0.25 * grid.extent();
  std::uniform_real_distribution<double> centre(-0.5 * quarter, 0.5 * quarter);
  std::uniform_real_distribution<double> width(0.02 * grid.extent(), 0.08 * grid.extent());
  std::uniform_real_distribution<double> height(0.5, 2.0);
  GridFunction f(grid, 0.0);
  for (int b = 0; b < count; ++b) {
    Point c{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dim(); ++a) c[a] = centre(rng);
    const double s = width(rng);
    const double amp = height(rng);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Point x = grid.point(i);
      double r2 = 0.0;
      bool inside = true;
      for (int a = 0; a < grid.dim(); ++a) {
        r2 += (x[a] - c[a]) * (x[a] - c[a]);
        inside = inside && std::fabs(x[a]) < quarter;
      }
      if (inside) f[i] += amp * std::exp(-0.5 * r2 / (s * s));
    }
  }
  return f;
}

inline double l2_distance(const GridFunction& a, const GridFunction& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

inline double l2_norm(const GridFunction& a) { return l2_distance(a, GridFunction(a.grid(), 0.0)); }

}  // namespace vexp::testing
