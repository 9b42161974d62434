#include "vexp/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

namespace vexp {

double smooth_step(double u) noexcept {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

Exponent::Exponent(GridFunction values, std::optional<double> p_inf) : values_(std::move(values)) {
  if (values_.size() == 0) throw InputError("exponent has no samples");
  const auto [lo, hi] = std::minmax_element(values_.values().begin(), values_.values().end());
  p_minus_ = *lo;
  p_plus_ = *hi;
  if (!(p_minus_ > 0.0)) throw InputError(fmt::format("exponent must be positive (p_minus = {})", p_minus_));
  if (p_inf) {
    p_inf_ = *p_inf;
  } else {
    std::size_t far = 0;
    double r_far = -1.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double r = values_.grid().radius(i);
      if (r > r_far) {
        r_far = r;
        far = i;
      }
    }
    p_inf_ = values_[far];
  }
  if (!(p_inf_ >= p_minus_ && p_inf_ <= p_plus_)) {
    throw InputError(fmt::format("p_inf = {} lies outside [p_minus, p_plus] = [{}, {}]", p_inf_, p_minus_, p_plus_));
  }
}

Exponent Exponent::constant(const Grid& grid, double p) { return Exponent(GridFunction(grid, p), p); }

Exponent Exponent::radial_bump(const Grid& grid, double a, double b, double c, std::optional<double> p_inf) {
  auto values = GridFunction::sample(grid, [&](const Point& x) {
    return a + b * std::exp(-c * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
  if (!p_inf) {
    // Clamp the nominal limit a into the sampled range so the invariant holds on small boxes.
    const auto [lo, hi] = std::minmax_element(values.values().begin(), values.values().end());
    p_inf = std::clamp(a, *lo, *hi);
  }
  return Exponent(std::move(values), p_inf);
}

Exponent Exponent::smoothed_step(const Grid& grid, double left, double right, double x0, double width,
                                 std::optional<double> p_inf) {
  if (width < 0.0) throw InputError("step width must be nonnegative");
  auto values = GridFunction::sample(grid, [&](const Point& x) {
    const double s = width > 0.0 ? smooth_step((x[0] - x0) / width + 0.5) : (x[0] < x0 ? 0.0 : 1.0);
    return left + (right - left) * s;
  });
  return Exponent(std::move(values), p_inf);
}

namespace {

Exponent map_exponent(const Exponent& p, auto&& fn) {
  GridFunction out = p.values();
  for (auto& v : out.values()) v = fn(v);
  return Exponent(std::move(out), fn(p.p_inf()));
}

}  // namespace

Exponent conjugate(const Exponent& p) {
  if (!(p.p_minus() > 1.0)) {
    throw DomainError(fmt::format("conjugate exponent requires p_minus > 1 (p_minus = {})", p.p_minus()));
  }
  return map_exponent(p, [](double v) { return v / (v - 1.0); });
}

Exponent scaled_conjugate(const Exponent& p, double p0, double delta) {
  if (!(p0 > 0.0) || !(p0 < p.p_minus())) {
    throw DomainError(fmt::format("scaled conjugate requires 0 < p0 < p_minus (p0 = {}, p_minus = {})", p0, p.p_minus()));
  }
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError(fmt::format("delta must lie in (0, 1] (got {})", delta));
  return map_exponent(p, [&](double v) { return delta * v / (v - p0); });
}

Exponent offdiagonal_exponent(const Exponent& p, double p0, double q0) {
  if (!(p0 > 0.0) || !(p0 <= q0)) throw DomainError(fmt::format("requires 0 < p0 <= q0 (p0 = {}, q0 = {})", p0, q0));
  if (p0 == q0) return p;
  const double gap = 1.0 / p0 - 1.0 / q0;
  auto reciprocal = [&](double v) {
    const double r = 1.0 / v - gap;
    if (!(r > 0.0)) {
      throw DomainError(fmt::format("1/p - (1/p0 - 1/q0) = {} is not positive at p = {}", r, v));
    }
    return 1.0 / r;
  };
  return map_exponent(p, reciprocal);
}

namespace {

// Offsets (in cells) probed for the local constant. Small grids are searched
// exhaustively within |x - y| <= L/4; larger ones use axis and diagonal
// directions at lengths {1, 2, 3, 4, 6, 8, 12, ...}.
std::vector<Index> local_offsets(const Grid& grid, int step) {
  const int n = grid.points_per_axis();
  const int dim = grid.dim();
  const double reach = 0.25 * n;  // L/4 in cells
  std::vector<Index> out;
  const int span = static_cast<int>(reach);
  const double exhaustive_cost = std::pow(2.0 * span / step + 1.0, dim) * static_cast<double>(grid.size()) /
                                 std::pow(static_cast<double>(step), dim);
  auto within = [&](const Index& o) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += double(o[a]) * o[a];
    return r2 > 0.0 && r2 <= reach * reach;
  };
  // Keep one of each +/- pair: first nonzero component positive.
  auto canonical = [&](const Index& o) {
    for (int a = 0; a < dim; ++a) {
      if (o[a] != 0) return o[a] > 0;
    }
    return false;
  };
  if (exhaustive_cost <= 4e7) {
    Index o{0, 0, 0};
    const int lim0 = (span / step) * step;
    const int lim1 = dim > 1 ? lim0 : 0;
    const int lim2 = dim > 2 ? lim0 : 0;
    for (o[0] = -lim0; o[0] <= lim0; o[0] += step)
      for (o[1] = -lim1; o[1] <= lim1; o[1] += step)
        for (o[2] = -lim2; o[2] <= lim2; o[2] += step)
          if (within(o) && canonical(o)) out.push_back(o);
    return out;
  }
  std::vector<int> lengths;
  for (int m = 1; m <= span; m *= 2) {
    lengths.push_back(m);
    if (m >= 2 && m + m / 2 <= span) lengths.push_back(m + m / 2);
  }
  Index dir{0, 0, 0};
  const int l1 = dim > 1 ? 1 : 0;
  const int l2 = dim > 2 ? 1 : 0;
  for (dir[0] = -1; dir[0] <= 1; ++dir[0])
    for (dir[1] = -l1; dir[1] <= l1; ++dir[1])
      for (dir[2] = -l2; dir[2] <= l2; ++dir[2]) {
        if (!canonical(dir)) continue;
        for (int m : lengths) {
          const Index o{dir[0] * m * step, dir[1] * m * step, dir[2] * m * step};
          if (within(o)) out.push_back(o);
        }
      }
  return out;
}

double local_constant(const Exponent& p, int step) {
  const Grid& grid = p.grid();
  const int n = grid.points_per_axis();
  const int dim = grid.dim();
  const double h = grid.spacing();
  const auto offsets = local_offsets(grid, step);
  double best = 0.0;
  for (const Index& o : offsets) {
    double dist2 = 0.0;
    for (int a = 0; a < dim; ++a) dist2 += double(o[a]) * o[a];
    const double weight = std::log(std::numbers::e + 1.0 / (h * std::sqrt(dist2)));
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
      const Index x = grid.unflatten(flat);
      bool on_subgrid = true;
      for (int a = 0; a < dim; ++a) on_subgrid = on_subgrid && (x[a] % step == 0);
      if (!on_subgrid) continue;
      Index y = x;
      bool inside = true;
      for (int a = 0; a < dim; ++a) {
        y[a] += o[a];
        inside = inside && y[a] >= 0 && y[a] < n;
      }
      if (!inside) continue;
      best = std::max(best, std::fabs(p[flat] - p[grid.flatten(y)]) * weight);
    }
  }
  return best;
}

}  // namespace

LogHolderReport check_log_holder(const Exponent& p, const LogHolderThresholds& thresholds) {
  const Grid& grid = p.grid();
  LogHolderReport r;
  r.c1_hat = local_constant(p, 1);
  r.c1_hat_coarse = local_constant(p, 2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double rad = grid.radius(i);
    r.decay_radius = std::max(r.decay_radius, rad);
    r.c2_hat = std::max(r.c2_hat, std::fabs(p[i] - p.p_inf()) * std::log(std::numbers::e + rad));
  }
  const bool no_growth =
      r.c1_hat_coarse > 0.0 ? r.c1_hat <= thresholds.growth_max * r.c1_hat_coarse : r.c1_hat == 0.0;
  r.passes_local = r.c1_hat <= thresholds.c1_max && no_growth;
  r.passes_decay = r.c2_hat <= thresholds.c2_max;
  r.in_plog = r.passes_local && r.passes_decay && p.p_minus() > 1.0;
  return r;
}

std::string_view to_string(BMembership b) { return b == BMembership::Pass ? "PASS" : "UNKNOWN"; }

BMembership in_b_proxy(const Exponent& p, const LogHolderThresholds& thresholds) {
  return check_log_holder(p, thresholds).in_plog ? BMembership::Pass : BMembership::Unknown;
}

}  // namespace vexp
