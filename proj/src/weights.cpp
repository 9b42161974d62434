#include "vexp/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "vexp/maximal.hpp"

namespace vexp {

Weight::Weight(GridFunction values, double floor_fraction) : values_(std::move(values)) {
  double top = 0.0;
  for (double v : values_.values()) {
    if (v < 0.0) throw InputError("weights must be nonnegative");
    top = std::max(top, v);
  }
  if (!(top > 0.0)) throw InputError("weight vanishes identically");
  floor_ = floor_fraction * top;
  for (auto& v : values_.values()) v = std::max(v, floor_);
}

Weight Weight::power(double e) const {
  GridFunction out = values_;
  for (auto& v : out.values()) v = std::pow(v, e);
  return Weight(std::move(out));
}

Weight Weight::scaled(double c) const {
  if (!(c > 0.0)) throw InputError("weights may only be scaled by positive constants");
  return Weight(vexp::scaled(values_, c));
}

int CubeFamily::max_depth(const Grid& grid) { return std::countr_zero(static_cast<unsigned>(grid.points_per_axis())) - 1; }

CubeFamily CubeFamily::dyadic(const Grid& grid, int depth, bool half_shifted) {
  CubeFamily family;
  family.grid_ = grid;
  family.depth_ = depth < 0 ? max_depth(grid) : std::min(depth, max_depth(grid));
  family.half_shifted_ = half_shifted;
  const int n = grid.points_per_axis();
  const int dim = grid.dim();
  for (int level = 0; level <= family.depth_; ++level) {
    const int side = n >> level;
    const int step = half_shifted ? std::max(side / 2, 1) : side;
    const int positions = (n - side) / step + 1;
    Index k{0, 0, 0};
    const int p1 = dim > 1 ? positions : 1;
    const int p2 = dim > 2 ? positions : 1;
    for (k[0] = 0; k[0] < positions; ++k[0])
      for (k[1] = 0; k[1] < p1; ++k[1])
        for (k[2] = 0; k[2] < p2; ++k[2]) {
          Cube c;
          c.side = side;
          c.level = level;
          for (int a = 0; a < dim; ++a) c.lo[a] = k[a] * step;
          family.cubes_.push_back(c);
        }
  }
  return family;
}

Point CubeFamily::center(const Cube& c) const noexcept {
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < grid_.dim(); ++a) p[a] = -0.5 * grid_.extent() + (c.lo[a] + 0.5 * c.side) * grid_.spacing();
  return p;
}

namespace {

// Block pyramid: level j holds the reduction over aligned blocks of side 2^j.
// A cube of side s = 2^k starting at a multiple of s/2 is the union of 2^dim
// blocks of side s/2, which covers both the aligned and half-shifted cubes.
std::vector<double> reduce_cubes(const CubeFamily& family, const GridFunction& v,
                                 const std::function<double(double, double)>& op) {
  const Grid& g = family.grid();
  require_same_grid(g, v.grid());
  const int n = g.points_per_axis();
  const int dim = g.dim();
  const int levels = std::countr_zero(static_cast<unsigned>(n));

  std::vector<std::vector<double>> pyramid;
  pyramid.emplace_back(v.values().begin(), v.values().end());
  for (int j = 1; j <= levels; ++j) {
    const int m = n >> j;  // blocks per axis at level j
    const int mp = m * 2;  // per axis at level j-1
    std::size_t count = 1;
    for (int a = 0; a < dim; ++a) count *= static_cast<std::size_t>(m);
    std::vector<double> next(count);
    const auto& prev = pyramid.back();
    for (std::size_t flat = 0; flat < count; ++flat) {
      Index b{0, 0, 0};
      std::size_t rest = flat;
      for (int a = dim - 1; a >= 0; --a) {
        b[a] = static_cast<int>(rest % m);
        rest /= m;
      }
      double acc = 0.0;
      bool first = true;
      for (int corner = 0; corner < (1 << dim); ++corner) {
        std::size_t src = 0;
        for (int a = 0; a < dim; ++a) src = src * mp + static_cast<std::size_t>(2 * b[a] + ((corner >> a) & 1));
        acc = first ? prev[src] : op(acc, prev[src]);
        first = false;
      }
      next[flat] = acc;
    }
    pyramid.push_back(std::move(next));
  }

  std::vector<double> out;
  out.reserve(family.size());
  for (const Cube& c : family.cubes()) {
    const int k = std::countr_zero(static_cast<unsigned>(c.side));
    const int j = k - 1;
    const int m = n >> j;
    const int half = c.side / 2;
    double acc = 0.0;
    bool first = true;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      std::size_t src = 0;
      for (int a = 0; a < dim; ++a) src = src * m + static_cast<std::size_t>(c.lo[a] / half + ((corner >> a) & 1));
      acc = first ? pyramid[j][src] : op(acc, pyramid[j][src]);
      first = false;
    }
    out.push_back(acc);
  }
  return out;
}

double cube_cells(const Grid& g, const Cube& c) { return std::pow(static_cast<double>(c.side), g.dim()); }

// Maximum of per-cube ratios over the full family and over the family one level coarser.
WeightClassReport summarize(const CubeFamily& family, const std::vector<double>& ratios, WeightClass cls,
                            double parameter) {
  WeightClassReport r;
  r.weight_class = cls;
  r.parameter = parameter;
  r.constant = -std::numeric_limits<double>::infinity();
  r.constant_coarser = -std::numeric_limits<double>::infinity();
  const int coarse_depth = std::max(0, family.depth() - 1);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const Cube& c = family.cubes()[i];
    if (ratios[i] > r.constant) {
      r.constant = ratios[i];
      r.worst_cube = i;
      r.worst = c;
    }
    if (c.level <= coarse_depth) r.constant_coarser = std::max(r.constant_coarser, ratios[i]);
  }
  r.stable = std::isfinite(r.constant) && r.constant <= 1.25 * r.constant_coarser;
  return r;
}

}  // namespace

std::vector<double> CubeFamily::sums(const GridFunction& v) const {
  return reduce_cubes(*this, v, [](double a, double b) { return a + b; });
}

std::vector<double> CubeFamily::minima(const GridFunction& v) const {
  return reduce_cubes(*this, v, [](double a, double b) { return std::min(a, b); });
}

std::string_view to_string(WeightClass c) {
  switch (c) {
    case WeightClass::Ap:
      return "A_p";
    case WeightClass::A1:
      return "A_1";
    case WeightClass::RHs:
      return "RH_s";
  }
  return "?";
}

WeightClassReport ap_constant(const Weight& w, double p, const CubeFamily& family) {
  if (!(p > 1.0)) throw DomainError(fmt::format("A_p constant requires p > 1 (got {})", p));
  const Grid& g = family.grid();
  const auto s_w = family.sums(w.values());
  const auto s_dual = family.sums(w.power(-1.0 / (p - 1.0)).values());
  std::vector<double> ratios(family.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double cells = cube_cells(g, family.cubes()[i]);
    ratios[i] = (s_w[i] / cells) * std::pow(s_dual[i] / cells, p - 1.0);
  }
  return summarize(family, ratios, WeightClass::Ap, p);
}

WeightClassReport a1_constant(const Weight& w, const CubeFamily& family) {
  const Grid& g = family.grid();
  const auto s_w = family.sums(w.values());
  const auto mins = family.minima(w.values());
  std::vector<double> ratios(family.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) ratios[i] = s_w[i] / cube_cells(g, family.cubes()[i]) / mins[i];
  return summarize(family, ratios, WeightClass::A1, 1.0);
}

WeightClassReport rh_constant(const Weight& w, double s, const CubeFamily& family) {
  if (!(s > 1.0)) throw DomainError(fmt::format("reverse Hoelder constant requires s > 1 (got {})", s));
  const Grid& g = family.grid();
  const auto s_w = family.sums(w.values());
  GridFunction ws = w.values();
  for (auto& v : ws.values()) v = std::pow(v, s);
  const auto s_ws = family.sums(ws);
  std::vector<double> ratios(family.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double cells = cube_cells(g, family.cubes()[i]);
    ratios[i] = std::pow(s_ws[i] / cells, 1.0 / s) / (s_w[i] / cells);
  }
  return summarize(family, ratios, WeightClass::RHs, s);
}

CheckReport ap_rh_equivalence_check(const Weight& w, double p, double delta, const CubeFamily& family) {
  if (!(p > 1.0)) throw DomainError("equivalence check requires p > 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("equivalence check requires 0 < delta < 1");
  const double q = (p - 1.0 + delta) / delta;
  const Weight wd = w.power(delta);
  const auto ap = ap_constant(w, p, family);
  const auto aq = ap_constant(wd, q, family);
  const auto rh = rh_constant(wd, 1.0 / delta, family);
  const bool f_ap = std::isfinite(ap.constant) && ap.stable;
  const bool f_aq = std::isfinite(aq.constant) && aq.stable;
  const bool f_rh = std::isfinite(rh.constant) && rh.stable;

  CheckReport r;
  r.id = "ap_rh_equivalence";
  r.add("p", p).add("delta", delta).add("q", q);
  r.add("A_p", ap.constant).add("A_p_stable", f_ap);
  r.add("A_q_of_w_delta", aq.constant).add("A_q_stable", f_aq);
  r.add("RH_inv_delta_of_w_delta", rh.constant).add("RH_stable", f_rh);
  r.verdict = (f_ap == f_aq && f_aq == f_rh) ? Verdict::Consistent : Verdict::Inconsistent;
  return r;
}

TransferredWeight transferred_weight(double p, double p0, double delta) {
  if (!(p0 > 1.0)) throw DomainError("transferred weight requires p0 > 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("transferred weight requires 0 < delta < 1");
  const double lower = p0 / (1.0 + delta * (p0 - 1.0));
  const double upper = p0 / (1.0 - delta);
  if (!(lower < p && p < upper)) {
    throw RangeError(fmt::format("p = {} outside the open interval ({}, {})", p, lower, upper));
  }
  const double denom = p0 - p * (1.0 - delta);
  return {p0 / denom, p0 * p * delta / denom};
}

CheckReport transferred_weight_check(const Weight& w, double p, double p0, double delta, const CubeFamily& family) {
  const TransferredWeight t = transferred_weight(p, p0, delta);
  const auto report = ap_constant(w.power(t.power), t.index, family);
  CheckReport r;
  r.id = "transferred_weight";
  r.add("p", p).add("p0", p0).add("delta", delta);
  r.add("power", t.power).add("index", t.index);
  r.add("constant", report.constant).add("constant_coarser", report.constant_coarser).add("stable", report.stable);
  r.verdict = (std::isfinite(report.constant) && report.stable) ? Verdict::HypothesesMet : Verdict::Unknown;
  return r;
}

Weight generate_weight(const WeightSpec& spec, const Grid& grid) {
  const double h = grid.spacing();
  switch (spec.kind) {
    case WeightKind::Constant:
      if (!(spec.value > 0.0)) throw InputError("constant weight must be positive");
      return Weight(GridFunction(grid, spec.value));
    case WeightKind::Power: {
      const double floor = std::pow(0.5 * h, std::fabs(spec.a));
      return Weight(GridFunction::sample(grid, [&](const Point& x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return std::max(std::pow(r, spec.a), floor);
      }));
    }
    case WeightKind::SmoothedPower:
      if (!(spec.eps > 0.0)) throw InputError("smoothed power weight requires eps > 0");
      return Weight(GridFunction::sample(grid, [&](const Point& x) {
        return std::pow(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + spec.eps * spec.eps, 0.5 * spec.a);
      }));
    case WeightKind::MaximalPower: {
      if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw InputError("maximal power weight requires 0 < delta < 1");
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> centre(-0.25 * grid.extent(), 0.25 * grid.extent());
      std::uniform_real_distribution<double> log_width(std::log(4.0 * h), std::log(grid.extent() / 8.0));
      Point c{0.0, 0.0, 0.0};
      for (int a = 0; a < grid.dim(); ++a) c[a] = centre(rng);
      const double width = std::exp(log_width(rng));
      const auto seed_fn = GridFunction::sample(grid, [&](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
        return std::exp(-0.5 * r2 / (width * width));
      });
      return Weight(abs_pow(hl_maximal(seed_fn, MaximalConfig::dyadic(grid)), spec.delta));
    }
  }
  throw InputError("unknown weight kind");
}

}  // namespace vexp
