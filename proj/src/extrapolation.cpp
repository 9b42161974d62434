#include "vexp/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "vexp/norms.hpp"

namespace vexp {

namespace {

/// Records `lhs < rhs` (or `<=`) and returns whether it holds; a failure
/// adds a note naming the inequality with both sides.
bool require_order(CheckReport& rep, std::string_view lhs_name, double lhs, std::string_view rhs_name, double rhs,
                   bool strict) {
  if (!rep.find(lhs_name)) rep.add(std::string(lhs_name), lhs);
  if (!rep.find(rhs_name)) rep.add(std::string(rhs_name), rhs);
  const bool ok = strict ? lhs < rhs : lhs <= rhs;
  if (!ok) {
    rep.note(fmt::format("violated: {} {} {} ({} vs {})", lhs_name, strict ? "<" : "<=", rhs_name, lhs, rhs));
  }
  return ok;
}

void require_delta_open(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError(fmt::format("delta must lie in (0, 1) (got {})", delta));
}

double flag(bool b) { return b ? 1.0 : 0.0; }

Verdict combine(bool ranges_ok, bool proxy_ok) {
  if (!ranges_ok) return Verdict::Violated;
  return proxy_ok ? Verdict::HypothesesMet : Verdict::Unknown;
}

}  // namespace

double diagonal_upper(double p0, double delta) { return p0 / (1.0 - delta); }

// Written as p0 / (1 - delta p0/q0) so that p0 == q0 reproduces diagonal_upper bit for bit.
double off_diagonal_upper(double p0, double q0, double delta) { return p0 / (1.0 - delta * (p0 / q0)); }

double ap_lower(double p0, double delta) { return p0 / (1.0 + delta * (p0 - 1.0)); }

namespace {

CheckReport off_diagonal_impl(std::string id, const Exponent& p, double p0, double q0, double delta,
                              const LogHolderThresholds& th) {
  if (!(p0 > 0.0 && p0 <= q0 && std::isfinite(q0))) {
    throw InputError(fmt::format("need 0 < p0 <= q0 < inf (p0 = {}, q0 = {})", p0, q0));
  }
  require_delta_open(delta);
  CheckReport rep{.id = std::move(id), .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  rep.add("p0", p0).add("q0", q0).add("delta", delta);
  const double upper = off_diagonal_upper(p0, q0, delta);
  bool ok = require_order(rep, "p0", p0, "p_minus", p.p_minus(), true);
  ok = require_order(rep, "p_plus", p.p_plus(), "upper", upper, true) && ok;
  if (!ok) {
    rep.verdict = Verdict::Violated;
    return rep;
  }
  const Exponent q = offdiagonal_exponent(p, p0, q0);
  const double q_upper = diagonal_upper(q0, delta);
  bool q_ok = require_order(rep, "q0", q0, "q_minus", q.p_minus(), true);
  q_ok = require_order(rep, "q_plus", q.p_plus(), "q_upper", q_upper, true) && q_ok;
  if (!q_ok) {
    rep.verdict = Verdict::Violated;
    return rep;
  }
  const Exponent scaled = scaled_conjugate(q, q0, delta);
  const bool proxy = in_b_proxy(scaled, th) == BMembership::Pass;
  rep.add("scaled_conjugate_min", scaled.p_minus()).add("scaled_conjugate_max", scaled.p_plus());
  rep.add("b_proxy", flag(proxy));
  if (!proxy) rep.note("delta (q/q0)' is not certified log-Hoelder with minimum > 1; membership unknown");
  rep.verdict = combine(true, proxy);
  return rep;
}

}  // namespace

CheckReport check_diagonal(const Exponent& p, double p0, double delta, const LogHolderThresholds& th) {
  return off_diagonal_impl("diagonal", p, p0, p0, delta, th);
}

CheckReport check_off_diagonal(const Exponent& p, double p0, double q0, double delta, const LogHolderThresholds& th) {
  return off_diagonal_impl("off_diagonal", p, p0, q0, delta, th);
}

CheckReport check_ap_via_search(const Exponent& p, double p0, double delta, std::vector<double> search_grid,
                                const LogHolderThresholds& th) {
  if (!(p0 > 1.0 && std::isfinite(p0))) throw InputError(fmt::format("need 1 < p0 < inf (got {})", p0));
  require_delta_open(delta);
  CheckReport rep{.id = "ap_search", .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  rep.add("p0", p0).add("delta", delta);
  const double lower = ap_lower(p0, delta);
  const double upper = diagonal_upper(p0, delta);
  bool ok = require_order(rep, "lower", lower, "p_minus", p.p_minus(), true);
  ok = require_order(rep, "p_plus", p.p_plus(), "upper", upper, true) && ok;
  if (!ok) {
    rep.verdict = Verdict::Violated;
    return rep;
  }
  if (search_grid.empty()) {
    constexpr int kPoints = 64;
    for (int i = 1; i <= kPoints; ++i) search_grid.push_back(lower + (p.p_minus() - lower) * i / (kPoints + 1));
  }
  std::size_t admissible = 0;
  for (double ps : search_grid) {
    if (!(ps > lower && ps < p.p_minus())) continue;
    ++admissible;
    const double ds = (p0 - ps * (1.0 - delta)) / p0;
    if (in_b_proxy(scaled_conjugate(p, ps, ds), th) == BMembership::Pass) {
      rep.add("p_star", ps).add("delta_star", ds).add("b_proxy", 1.0);
      rep.verdict = Verdict::HypothesesMet;
      return rep;
    }
  }
  rep.add("admissible_points", static_cast<double>(admissible)).add("b_proxy", 0.0);
  rep.note(admissible == 0 ? "no search point lies in (lower, p_minus)"
                           : "no admissible p* gave a certified delta* (p/p*)'");
  return rep;
}

CheckReport check_ap_log_holder(const Exponent& p, double p0, double delta, const LogHolderThresholds& th) {
  if (!(p0 > 1.0 && std::isfinite(p0))) throw InputError(fmt::format("need 1 < p0 < inf (got {})", p0));
  require_delta_open(delta);
  CheckReport rep{.id = "ap_log_holder", .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  rep.add("p0", p0).add("delta", delta);
  bool ok = require_order(rep, "lower", ap_lower(p0, delta), "p_minus", p.p_minus(), true);
  ok = require_order(rep, "p_plus", p.p_plus(), "upper", diagonal_upper(p0, delta), true) && ok;
  const LogHolderReport lh = check_log_holder(p, th);
  rep.add("c1_hat", lh.c1_hat).add("c2_hat", lh.c2_hat).add("log_holder", flag(lh.in_plog));
  if (ok && !lh.in_plog) rep.note("p is not certified log-Hoelder with p_minus > 1");
  rep.verdict = combine(ok, lh.in_plog);
  return rep;
}

std::string_view to_string(ApplicationKind k) {
  switch (k) {
    case ApplicationKind::RoughA: return "rough_A";
    case ApplicationKind::RoughB: return "rough_B";
    case ApplicationKind::RoughC: return "rough_C";
    case ApplicationKind::StronglySingular: return "strongly_singular";
    case ApplicationKind::Spherical: return "spherical";
    case ApplicationKind::BochnerRiesz: return "bochner";
  }
  return "rough_A";
}

ApplicationKind parse_application(std::string_view text) {
  for (auto k : {ApplicationKind::RoughA, ApplicationKind::RoughB, ApplicationKind::RoughC,
                 ApplicationKind::StronglySingular, ApplicationKind::Spherical, ApplicationKind::BochnerRiesz}) {
    if (to_string(k) == text) return k;
  }
  throw InputError(fmt::format("unknown application '{}'", text));
}

Exponent fractional_target(const Exponent& p, double alpha, int n) {
  const double gap = alpha / n;
  GridFunction v = p.values();
  auto map = [&](double x) {
    const double r = 1.0 / x - gap;
    if (!(r > 0.0)) throw DomainError(fmt::format("1/p - alpha/n = {} is not positive at p = {}", r, x));
    return 1.0 / r;
  };
  for (auto& x : v.values()) x = map(x);
  return Exponent(std::move(v), map(p.p_inf()));
}

namespace {

void rough_params(const Application& app) {
  if (!(app.r > 1.0 && std::isfinite(app.r))) throw InputError(fmt::format("need 1 < r < inf (got {})", app.r));
}

}  // namespace

CheckReport application_range(const Application& app, const Exponent& p, const LogHolderThresholds& th) {
  CheckReport rep{.id = std::string(to_string(app.kind)), .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  const double pm = p.p_minus();
  const double pp = p.p_plus();
  bool ok = true;
  switch (app.kind) {
    case ApplicationKind::RoughA: {
      rough_params(app);
      const double rp = app.r / (app.r - 1.0);
      rep.add("r", app.r).add("r_prime", rp);
      ok = require_order(rep, "r_prime", rp, "p_minus", pm, true);
      if (ok) rep.add("p0", 0.5 * (rp + pm));
      break;
    }
    case ApplicationKind::RoughB: {
      rough_params(app);
      rep.add("r", app.r);
      ok = require_order(rep, "one", 1.0, "p_minus", pm, true);
      ok = require_order(rep, "p_plus", pp, "r", app.r, true) && ok;
      if (ok) {
        const double p0 = 0.5 * (1.0 + pm);
        const double delta = (app.r - p0) / app.r;
        const double rp = app.r / (app.r - 1.0);
        rep.add("p0", p0).add("delta", delta).add("upper", p0 / (1.0 - delta));
        rep.add("weight_power", app.r / (app.r - p0));
        // The weight class index has two plausible readings; both are reported.
        rep.add("weight_index_reading_1", p0 * (app.r - 1.0) / rp);
        rep.add("weight_index_reading_2", p0 * app.r - 1.0 / rp);
        const double scaled_min = delta * (pp / p0) / (pp / p0 - 1.0);
        ok = require_order(rep, "one", 1.0, "scaled_conjugate_min", scaled_min, true) && ok;
      }
      break;
    }
    case ApplicationKind::RoughC: {
      rough_params(app);
      if (!(app.p0 > 1.0 && std::isfinite(app.p0))) throw InputError(fmt::format("need 1 < p0 < inf (got {})", app.p0));
      const double r = app.r;
      const double p0 = app.p0;
      rep.add("r", r).add("p0", p0);
      rep.add("delta_range", (r - 1.0) / r).add("delta_proof", 1.0 / (r - 1.0));
      rep.note("range endpoints match delta = 1/r'; the transfer step uses delta = 1/(r-1); both reported");
      ok = require_order(rep, "lower", p0 * r / (r + (r - 1.0) * (p0 - 1.0)), "p_minus", pm, true);
      ok = require_order(rep, "p_plus", pp, "upper", r * p0, true) && ok;
      break;
    }
    case ApplicationKind::StronglySingular: {
      const double n = app.n;
      if (app.n < 1) throw InputError("dimension must be positive");
      if (!(app.b > 0.0 && app.b < 1.0)) throw InputError(fmt::format("need 0 < b < 1 (got {})", app.b));
      if (!(app.a > 0.0 && app.a < n * app.b / 2.0)) {
        throw InputError(fmt::format("need 0 < a < n b / 2 = {} (got {})", n * app.b / 2.0, app.a));
      }
      if (!(app.p0 > 1.0 && std::isfinite(app.p0))) throw InputError(fmt::format("need 1 < p0 < inf (got {})", app.p0));
      const double nb = n * app.b;
      const double alpha = nb * std::fabs(1.0 / app.p0 - 0.5);
      rep.add("n", n).add("b", app.b).add("a", app.a).add("p0", app.p0).add("alpha", alpha);
      rep.add("unweighted_lower", 1.0 / (0.5 + app.a / nb)).add("unweighted_upper", 1.0 / (0.5 - app.a / nb));
      ok = require_order(rep, "alpha", alpha, "a", app.a, false);
      if (ok) {
        const double gamma = (app.a - alpha) / (nb / 2.0 - alpha);
        rep.add("gamma", gamma);
        ok = require_order(rep, "lower", app.p0 / (1.0 + gamma * (app.p0 - 1.0)), "p_minus", pm, true);
        ok = require_order(rep, "p_plus", pp, "upper", app.p0 / (1.0 - gamma), true) && ok;
      }
      break;
    }
    case ApplicationKind::Spherical: {
      const int n = app.n;
      if (n <= 2) throw InputError(fmt::format("spherical range needs n > 2 (got {})", n));
      if (!(app.alpha > 0.0 && app.alpha < n - 2.0)) {
        throw InputError(fmt::format("need 0 < alpha < n - 2 = {} (got {})", n - 2, app.alpha));
      }
      const double lower = n / (n - 1.0);
      const double upper = n / (1.0 + app.alpha);
      rep.add("n", n).add("alpha", app.alpha);
      ok = require_order(rep, "lower", lower, "p_minus", pm, true);
      ok = require_order(rep, "p_plus", pp, "upper", upper, true) && ok;
      if (ok) {
        const Exponent q = fractional_target(p, app.alpha, n);
        rep.add("q_minus", q.p_minus()).add("q_plus", q.p_plus());
        rep.add("reciprocal_gap", 1.0 / pm - 1.0 / q.p_minus());
        const double ps = 0.5 * (lower + pm);
        const double qs = 1.0 / (1.0 / ps - app.alpha / n);
        const double gamma = 1.0 - qs / n;
        rep.add("p_star", ps).add("q_star", qs).add("gamma", gamma);
        rep.add("gamma_closed_form", (n - ps * app.alpha - ps) / (n - ps * app.alpha));
        rep.add("off_diagonal_upper", ps * qs / (qs - gamma * ps));
        const Exponent scaled = scaled_conjugate(q, qs, gamma);
        ok = require_order(rep, "one", 1.0, "scaled_conjugate_min", scaled.p_minus(), true);
      }
      break;
    }
    case ApplicationKind::BochnerRiesz: {
      const double n1 = app.n - 1.0;
      if (app.n < 2) throw InputError(fmt::format("Bochner-Riesz range needs n >= 2 (got {})", app.n));
      if (!(app.beta > 0.0 && app.beta < n1 / 2.0)) {
        throw InputError(fmt::format("need 0 < beta < (n-1)/2 = {} (got {})", n1 / 2.0, app.beta));
      }
      rep.add("n", app.n).add("beta", app.beta).add("p0", 2.0).add("delta", 2.0 * app.beta / n1);
      ok = require_order(rep, "lower", 2.0 * n1 / (n1 + 2.0 * app.beta), "p_minus", pm, true);
      ok = require_order(rep, "p_plus", pp, "upper", 2.0 * n1 / (n1 - 2.0 * app.beta), true) && ok;
      break;
    }
  }
  if (!ok) {
    rep.verdict = Verdict::Violated;
    return rep;
  }
  const LogHolderReport lh = check_log_holder(p, th);
  rep.add("c1_hat", lh.c1_hat).add("c2_hat", lh.c2_hat).add("log_holder", flag(lh.in_plog));
  if (!lh.in_plog) rep.note("p is not certified log-Hoelder with p_minus > 1");
  rep.verdict = combine(true, lh.in_plog);
  return rep;
}

std::vector<GridFunction> test_inputs(const Grid& grid, std::size_t count, std::uint64_t seed) {
  const int dim = grid.dim();
  const double L = grid.extent();
  const double h = grid.spacing();
  const double quarter = 0.25 * L;
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
    auto centre = [&] {
      Point c{0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) c[a] = (unit(rng) - 0.5) * 0.25 * L;
      return c;
    };
    auto inside = [&](const Point& x) {
      for (int a = 0; a < dim; ++a) {
        if (std::fabs(x[a]) >= quarter) return false;
      }
      return true;
    };
    auto dist2 = [&](const Point& x, const Point& c) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
      return s;
    };
    const double smax = std::max(2.0 * h, L / 16.0);
    switch (i % 3) {
      case 0: {
        const Point c = centre();
        const double s = log_uniform(2.0 * h, smax);
        const double amp = 0.5 + 1.5 * unit(rng);
        out.push_back(GridFunction::sample(grid, [&](const Point& x) {
          return inside(x) ? amp * std::exp(-0.5 * dist2(x, c) / (s * s)) : 0.0;
        }));
        break;
      }
      case 1: {
        const int pieces = 1 + static_cast<int>(unit(rng) * 3.0);
        std::vector<std::pair<Point, double>> cubes;
        std::vector<double> amps;
        for (int k = 0; k < pieces; ++k) {
          cubes.push_back({centre(), log_uniform(2.0 * h, smax)});
          amps.push_back(0.5 + 1.5 * unit(rng));
        }
        out.push_back(GridFunction::sample(grid, [&](const Point& x) {
          double v = 0.0;
          for (int k = 0; k < pieces; ++k) {
            bool in = true;
            for (int a = 0; a < dim; ++a) in = in && std::fabs(x[a] - cubes[k].first[a]) <= 0.5 * cubes[k].second;
            if (in) v += amps[k];
          }
          return inside(x) ? v : 0.0;
        }));
        break;
      }
      default: {
        const Point c = centre();
        const double s = log_uniform(4.0 * h, smax);
        const double freq = log_uniform(2.0 / L, 0.125 / h);
        Point dir{0.0, 0.0, 0.0};
        double norm = 0.0;
        std::normal_distribution<double> gauss;
        for (int a = 0; a < dim; ++a) {
          dir[a] = gauss(rng);
          norm += dir[a] * dir[a];
        }
        norm = std::sqrt(norm);
        for (int a = 0; a < dim; ++a) dir[a] = norm > 0.0 ? dir[a] / norm : (a == 0 ? 1.0 : 0.0);
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        out.push_back(GridFunction::sample(grid, [&](const Point& x) {
          if (!inside(x)) return 0.0;
          double proj = 0.0;
          for (int a = 0; a < dim; ++a) proj += dir[a] * x[a];
          return std::exp(-0.5 * dist2(x, c) / (s * s)) * std::cos(2.0 * std::numbers::pi * freq * proj + phase);
        }));
        break;
      }
    }
    if (sup_norm(out.back()) == 0.0) out.back()[grid.size() / 2] = 1.0;
  }
  return out;
}

namespace {

double power_integral(const GridFunction& f, double e, const GridFunction& w, double we) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::fabs(f[i]), e) * std::pow(w[i], we);
  return s * f.grid().cell_volume();
}

void stability_witnesses(CheckReport& rep, double full, double half) {
  const double change = full > 0.0 ? (full - half) / full : 0.0;
  rep.add("C_hat", full).add("C_hat_half", half).add("relative_change", change);
  const bool stable = std::isfinite(full) && full > 0.0 && change < 0.1;
  rep.add("stable", flag(stable));
  rep.verdict = stable ? Verdict::Pass : Verdict::Fail;
  if (!stable) rep.note("C_hat is not finite or moved by 10% or more when the family doubled");
}

}  // namespace

CheckReport empirical_weighted_hypothesis(const PairFamily& pairs, double p0, double q0, double delta,
                                          const std::vector<Weight>& weights, const CubeFamily& family) {
  if (!(p0 > 0.0 && p0 <= q0)) throw InputError(fmt::format("need 0 < p0 <= q0 (p0 = {}, q0 = {})", p0, q0));
  require_delta_open(delta);
  if (pairs.empty()) throw InputError("pair family is empty");
  CheckReport rep{.id = "weighted_hypothesis", .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  const std::size_t half = (pairs.size() + 1) / 2;
  double full = 0.0;
  double first = 0.0;
  std::size_t skipped = 0;
  std::size_t certified = 0;
  for (std::size_t wi = 0; wi < weights.size(); ++wi) {
    const Weight& w = weights[wi];
    const WeightClassReport a1 = a1_constant(w, family);
    rep.add(fmt::format("a1_constant_{}", wi), a1.constant);
    if (!(std::isfinite(a1.constant) && a1.stable)) {
      rep.note(fmt::format("weight {} skipped: A_1 constant {} not refinement-stable", wi, a1.constant));
      continue;
    }
    ++certified;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double rhs = std::pow(power_integral(pairs[k].g, p0, w.values(), delta * p0 / q0), 1.0 / p0);
      if (!(rhs > 0.0)) {
        ++skipped;
        continue;
      }
      const double lhs = std::pow(power_integral(pairs[k].f, q0, w.values(), delta), 1.0 / q0);
      const double ratio = lhs / rhs;
      full = std::max(full, ratio);
      if (k < half) first = std::max(first, ratio);
    }
  }
  rep.add("certified_weights", static_cast<double>(certified)).add("skipped_pairs", static_cast<double>(skipped));
  if (certified == 0) {
    rep.note("no weight passed the A_1 certification");
    return rep;
  }
  stability_witnesses(rep, full, first);
  return rep;
}

CheckReport empirical_variable_conclusion(const PairFamily& pairs, const Exponent& p, const Exponent& q) {
  if (pairs.empty()) throw InputError("pair family is empty");
  CheckReport rep{.id = "variable_conclusion", .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  const std::size_t half = (pairs.size() + 1) / 2;
  double full = 0.0;
  double first = 0.0;
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double den = luxemburg_norm(pairs[k].g, p).value;
    if (!(den > 0.0)) {
      ++skipped;
      continue;
    }
    const double ratio = luxemburg_norm(pairs[k].f, q).value / den;
    full = std::max(full, ratio);
    if (k < half) first = std::max(first, ratio);
  }
  rep.add("pairs", static_cast<double>(pairs.size())).add("skipped_pairs", static_cast<double>(skipped));
  if (skipped) rep.note(fmt::format("{} pairs skipped: zero denominator", skipped));
  stability_witnesses(rep, full, first);
  return rep;
}

}  // namespace vexp
