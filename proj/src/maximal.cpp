#include "vexp/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "vexp/norms.hpp"
#include "vexp/parallel.hpp"
#include "vexp/simd.hpp"
#include "vexp/weights.hpp"

namespace vexp {

MaximalConfig MaximalConfig::dyadic(const Grid& grid) {
  MaximalConfig cfg;
  cfg.radii.push_back(0);
  for (int m = 1; m <= grid.points_per_axis() / 2; m *= 2) cfg.radii.push_back(m);
  return cfg;
}

MaximalConfig MaximalConfig::dense(const Grid& grid) {
  MaximalConfig cfg;
  for (int m = 0; m <= grid.points_per_axis() / 2; ++m) cfg.radii.push_back(m);
  return cfg;
}

MaximalConfig MaximalConfig::family() {
  MaximalConfig cfg;
  cfg.shape = MaximalShape::CubeFamily;
  return cfg;
}

GridFunction cube_average(const GridFunction& f, int radius) {
  if (radius < 0) throw InputError("cube radius must be nonnegative");
  GridFunction out = f;
  if (radius == 0) return out;
  const Grid& g = f.grid();
  const int n = g.points_per_axis();
  const auto& k = simd::active();
  std::vector<double> line(n), prefix(n + 1), mean(n);
  for (int axis = g.dim() - 1; axis >= 0; --axis) {
    const std::size_t stride = g.stride(axis);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    auto values = out.values();
    for (std::size_t base_block = 0; base_block < g.size(); base_block += block) {
      for (std::size_t offset = 0; offset < stride; ++offset) {
        const std::size_t base = base_block + offset;
        for (int i = 0; i < n; ++i) line[i] = values[base + i * stride];
        prefix[0] = 0.0;
        for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + line[i];
        k.window_mean(prefix, mean, radius);
        for (int i = 0; i < n; ++i) values[base + i * stride] = mean[i];
      }
    }
  }
  return out;
}

namespace {

GridFunction family_maximal(const GridFunction& a) {
  const Grid& g = a.grid();
  const CubeFamily family = CubeFamily::dyadic(g);
  const std::vector<double> sums = family.sums(a);
  GridFunction result = a;
  const int dim = g.dim();
  for (std::size_t c = 0; c < family.size(); ++c) {
    const Cube& cube = family.cubes()[c];
    const double avg = sums[c] / std::pow(static_cast<double>(cube.side), dim);
    const int s1 = dim > 1 ? cube.side : 1;
    const int s2 = dim > 2 ? cube.side : 1;
    Index idx{0, 0, 0};
    for (int i = 0; i < cube.side; ++i)
      for (int j = 0; j < s1; ++j)
        for (int k = 0; k < s2; ++k) {
          idx[0] = cube.lo[0] + i;
          idx[1] = cube.lo[1] + j;
          idx[2] = cube.lo[2] + k;
          double& v = result[g.flatten(idx)];
          v = std::max(v, avg);
        }
  }
  return result;
}

}  // namespace

GridFunction hl_maximal(const GridFunction& f, const MaximalConfig& cfg) {
  const GridFunction a = abs(f);
  if (cfg.shape == MaximalShape::CubeFamily) return family_maximal(a);
  GridFunction result = a;
  const auto& k = simd::active();
  for (int m : cfg.radii) {
    if (m <= 0) continue;
    const GridFunction avg = cube_average(a, m);
    k.max_inplace(result.values(), avg.values());
  }
  return result;
}

GridFunction powered_maximal(const GridFunction& h, double delta, const MaximalConfig& cfg) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError(fmt::format("delta must lie in (0, 1] (got {})", delta));
  for (double v : h.values()) {
    if (v < 0.0) throw InputError("powered maximal operator needs a nonnegative function");
  }
  if (delta == 1.0) return hl_maximal(h, cfg);
  GridFunction m = hl_maximal(abs_pow(h, 1.0 / delta), cfg);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(std::pow(m[i], delta), h[i]);
  return m;
}

int sphere_node_count(const Grid& grid, double t) {
  const double cells = std::ceil(t / grid.spacing());
  if (grid.dim() == 2) return std::max(64, static_cast<int>(8.0 * cells));
  return std::max(256, static_cast<int>(16.0 * cells * cells));
}

std::vector<Point> sphere_nodes(int dim, int count) {
  std::vector<Point> nodes;
  if (dim == 2) {
    const int k = count + (count % 2);
    nodes.reserve(k);
    for (int i = 0; i < k; ++i) {
      const double th = 2.0 * std::numbers::pi * i / k;
      nodes.push_back({std::cos(th), std::sin(th), 0.0});
    }
    return nodes;
  }
  if (dim != 3) throw DomainError("sphere nodes exist for dimension 2 or 3 only");
  // Fibonacci spiral on the upper half of the node budget plus antipodes, so
  // every odd moment cancels exactly.
  const int half = (count + 1) / 2;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  nodes.reserve(2 * half);
  for (int i = 0; i < half; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / (2.0 * half);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    nodes.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  for (int i = 0; i < half; ++i) {
    const Point& p = nodes[i];
    nodes.push_back({-p[0], -p[1], -p[2]});
  }
  return nodes;
}

namespace {

double interpolate(const GridFunction& f, const Point& x) {
  const Grid& g = f.grid();
  const int n = g.points_per_axis();
  const int dim = g.dim();
  const double h = g.spacing();
  const bool torus = g.mode() == GridMode::Torus;
  Index i0{0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    const double u = (x[a] + 0.5 * g.extent()) / h - 0.5;
    const double fl = std::floor(u);
    i0[a] = static_cast<int>(fl);
    frac[a] = u - fl;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    Index idx{0, 0, 0};
    double wgt = 1.0;
    bool inside = true;
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> a) & 1;
      int j = i0[a] + bit;
      wgt *= bit ? frac[a] : 1.0 - frac[a];
      if (torus) {
        j = ((j % n) + n) % n;
      } else if (j < 0 || j >= n) {
        inside = false;
      }
      idx[a] = j;
    }
    if (inside && wgt != 0.0) acc += wgt * f[g.flatten(idx)];
  }
  return acc;
}

void require_sphere_args(const Grid& g, double t) {
  if (g.dim() != 2 && g.dim() != 3) throw DomainError("spherical means need a 2-D or 3-D grid");
  if (!(t > 0.0 && t < 0.25 * g.extent())) {
    throw DomainError(fmt::format("sphere radius t = {} outside (0, L/4) = (0, {})", t, 0.25 * g.extent()));
  }
}

}  // namespace

double spherical_mean_at(const GridFunction& f, const Point& x, double t) {
  const Grid& g = f.grid();
  require_sphere_args(g, t);
  const auto nodes = sphere_nodes(g.dim(), sphere_node_count(g, t));
  double acc = 0.0;
  for (const Point& nu : nodes) acc += interpolate(f, {x[0] + t * nu[0], x[1] + t * nu[1], x[2] + t * nu[2]});
  return acc / static_cast<double>(nodes.size());
}

GridFunction spherical_mean(const GridFunction& f, double t) {
  const Grid& g = f.grid();
  require_sphere_args(g, t);
  const auto nodes = sphere_nodes(g.dim(), sphere_node_count(g, t));
  GridFunction out(g);
  const double inv = 1.0 / static_cast<double>(nodes.size());
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Point x = g.point(i);
      double acc = 0.0;
      for (const Point& nu : nodes) acc += interpolate(f, {x[0] + t * nu[0], x[1] + t * nu[1], x[2] + t * nu[2]});
      out[i] = acc * inv;
    }
  });
  return out;
}

std::vector<double> default_t_grid(const Grid& grid) {
  std::vector<double> ts;
  const double ratio = std::exp2(1.0 / 8.0);
  for (double t = 2.0 * grid.spacing(); t < 0.25 * grid.extent(); t *= ratio) ts.push_back(t);
  return ts;
}

GridFunction frac_spherical_maximal(const GridFunction& f, double alpha, const std::vector<double>& t_grid) {
  if (!(alpha >= 0.0)) throw DomainError("fractional order alpha must be nonnegative");
  if (t_grid.empty()) throw InputError("t grid is empty");
  GridFunction out(f.grid(), 0.0);
  for (double t : t_grid) {
    GridFunction mean = spherical_mean(f, t);
    const double scale = std::pow(t, alpha);
    for (auto& v : mean.values()) v = scale * std::fabs(v);
    simd::active().max_inplace(out.values(), mean.values());
  }
  return out;
}

OperatorNormEstimate operator_norm_estimate(const Operator& op, const Exponent& p,
                                            const std::vector<GridFunction>& family, double tol) {
  if (family.empty()) throw InputError("operator norm estimate needs a nonempty test family");
  OperatorNormEstimate est;
  for (const auto& f : family) {
    const double denom = luxemburg_norm(f, p, tol).value;
    if (denom == 0.0) {
      ++est.skipped;
      continue;
    }
    const double ratio = luxemburg_norm(op(f), p, tol).value / denom;
    est.ratios.push_back(ratio);
    est.lower_bound = std::max(est.lower_bound, ratio);
  }
  if (est.ratios.empty()) throw InputError("every member of the test family has zero norm");
  return est;
}

std::vector<GridFunction> adversarial_family(const Grid& grid, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double h = grid.spacing();
  const double quarter = 0.25 * grid.extent();
  std::uniform_real_distribution<double> centre(-quarter, quarter);
  std::vector<GridFunction> family;
  family.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Point c{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dim(); ++a) c[a] = centre(rng);
    const int kind = static_cast<int>(i % 3);
    const double scale = h * std::exp2(static_cast<double>(i / 3 % 6));
    family.push_back(GridFunction::sample(grid, [&](const Point& x) {
      double r2 = 0.0;
      double linf = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        r2 += (x[a] - c[a]) * (x[a] - c[a]);
        linf = std::max(linf, std::fabs(x[a] - c[a]));
      }
      switch (kind) {
        case 0:
          return linf <= 0.5 * scale ? 1.0 : 0.0;
        case 1:
          return std::exp(-0.5 * r2 / (scale * scale));
        default:
          return std::pow(1.0 + r2 / (scale * scale), -1.0);
      }
    }));
    // A cube narrower than a cell can miss every sample; fall back to the nearest one.
    if (sup_norm(family.back()) == 0.0) {
      family.back()[0] = 1.0;
    }
  }
  return family;
}

}  // namespace vexp
