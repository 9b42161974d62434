#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "vexp/errors.hpp"
#include "vexp/experiment.hpp"
#include "vexp/extrapolation.hpp"
#include "vexp/maximal.hpp"
#include "vexp/norms.hpp"
#include "vexp/operators.hpp"
#include "vexp/parallel.hpp"
#include "vexp/rubio.hpp"

namespace vexp {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string pointer_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

/// Read access to one JSON value that reports errors against its source line.
class Node {
 public:
  Node(const ConfigDocument& doc, const json& value, std::string pointer)
      : doc_(&doc), value_(&value), pointer_(std::move(pointer)) {}

  const json& raw() const { return *value_; }
  int line() const { return doc_->line_of(pointer_); }
  bool has(std::string_view key) const { return value_->is_object() && value_->contains(key); }

  [[noreturn]] void fail(const std::string& message, std::string_view key = {}) const {
    const std::string at = key.empty() || !has(key) ? pointer_ : pointer_ + "/" + pointer_token(key);
    throw ConfigError(message, doc_->line_of(at));
  }

  Node child(std::string_view key) const {
    if (!has(key)) fail(fmt::format("missing required key '{}'", key));
    return Node(*doc_, value_->at(std::string(key)), pointer_ + "/" + pointer_token(key));
  }

  double number(std::string_view key) const {
    const Node c = child(key);
    if (!c.raw().is_number()) fail(fmt::format("'{}' must be a number", key), key);
    return c.raw().get<double>();
  }
  double number(std::string_view key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(std::string_view key) const {
    const Node c = child(key);
    if (!c.raw().is_number_integer()) fail(fmt::format("'{}' must be an integer", key), key);
    return c.raw().get<long long>();
  }
  long long integer(std::string_view key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  std::string text(std::string_view key) const {
    const Node c = child(key);
    if (!c.raw().is_string()) fail(fmt::format("'{}' must be a string", key), key);
    return c.raw().get<std::string>();
  }
  std::string text(std::string_view key, std::string fallback) const { return has(key) ? text(key) : fallback; }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const Node c = child(key);
    if (!c.raw().is_boolean()) fail(fmt::format("'{}' must be true or false", key), key);
    return c.raw().get<bool>();
  }

  std::vector<Node> items(std::string_view key) const {
    const Node c = child(key);
    if (!c.raw().is_array()) fail(fmt::format("'{}' must be an array", key), key);
    std::vector<Node> out;
    for (std::size_t i = 0; i < c.raw().size(); ++i) {
      out.emplace_back(*doc_, c.raw()[i], c.pointer_ + "/" + std::to_string(i));
    }
    return out;
  }

  std::vector<double> numbers(std::string_view key) const {
    std::vector<double> out;
    for (const Node& n : items(key)) {
      if (!n.raw().is_number()) n.fail(fmt::format("'{}' must hold numbers only", key));
      out.push_back(n.raw().get<double>());
    }
    return out;
  }

 private:
  const ConfigDocument* doc_;
  const json* value_;
  std::string pointer_;
};

/// Runs `fn`, turning library validation errors into config errors at `node`.
template <class F>
auto guarded(const Node& node, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    node.fail(e.what());
  }
}

struct Row {
  std::string experiment;
  CheckReport report;
  std::string metric;
  double value = kNaN;
  std::vector<std::pair<std::string, GridFunction>> fields;
  bool failed = false;
};

using Task = std::function<Row()>;

struct Context {
  std::optional<Grid> grid;
  std::optional<Exponent> exponent;
  std::uint64_t seed = 0;
};

Grid parse_grid(const Node& n) {
  const long long dim = n.integer("dim");
  const double L = n.number("L");
  const long long N = n.integer("N");
  const std::string mode = n.text("mode", "box");
  return guarded(n, [&] {
    return Grid(static_cast<int>(dim), L, static_cast<int>(N), parse_grid_mode(mode));
  });
}

Exponent parse_exponent(const Node& n, const Grid& grid) {
  const std::string kind = n.text("kind");
  std::optional<double> p_inf;
  if (n.has("p_inf")) p_inf = n.number("p_inf");
  if (kind == "constant") {
    const double v = n.number("value");
    return guarded(n, [&] { return Exponent::constant(grid, v); });
  }
  if (kind == "radial_bump") {
    const double a = n.number("a"), b = n.number("b"), c = n.number("c");
    return guarded(n, [&] { return Exponent::radial_bump(grid, a, b, c, p_inf); });
  }
  if (kind == "smoothed_step") {
    const double left = n.number("left"), right = n.number("right");
    const double x0 = n.number("x0", 0.0), width = n.number("width", 0.0);
    return guarded(n, [&] { return Exponent::smoothed_step(grid, left, right, x0, width, p_inf); });
  }
  n.fail(fmt::format("unknown exponent kind '{}' (constant, radial_bump, smoothed_step)", kind), "kind");
}

Weight parse_weight(const Node& n, const Grid& grid, std::uint64_t seed) {
  const std::string kind = n.text("kind");
  WeightSpec spec;
  if (kind == "constant") {
    spec.kind = WeightKind::Constant;
    spec.value = n.number("value", 1.0);
  } else if (kind == "power") {
    spec.kind = WeightKind::Power;
    spec.a = n.number("a");
  } else if (kind == "smoothed_power") {
    spec.kind = WeightKind::SmoothedPower;
    spec.a = n.number("a");
    spec.eps = n.number("eps", spec.eps);
  } else if (kind == "maximal_power") {
    spec.kind = WeightKind::MaximalPower;
    spec.delta = n.number("delta", spec.delta);
    spec.seed = static_cast<std::uint64_t>(n.integer("seed", static_cast<long long>(seed)));
  } else {
    n.fail(fmt::format("unknown weight kind '{}' (constant, power, smoothed_power, maximal_power)", kind), "kind");
  }
  return guarded(n, [&] { return generate_weight(spec, grid); });
}

MaximalConfig parse_radii(const Node& n, const Grid& grid, const std::string& fallback = "dyadic") {
  const std::string radii = n.text("radii", fallback);
  if (radii == "dyadic") return MaximalConfig::dyadic(grid);
  if (radii == "dense") return MaximalConfig::dense(grid);
  if (radii == "family") return MaximalConfig::family();
  n.fail(fmt::format("unknown radii '{}' (dyadic, dense, family)", radii), "radii");
}

std::function<double(const Point&)> parse_omega(const Node& n) {
  const std::string name = n.text("omega", "cos");
  if (name == "cos") return [](const Point& u) { return u[0]; };
  if (name == "cos2") return [](const Point& u) { return u[0] * u[0] - u[1] * u[1]; };
  if (name == "sign") return [](const Point& u) { return u[0] > 0.0 ? 1.0 : (u[0] < 0.0 ? -1.0 : 0.0); };
  n.fail(fmt::format("unknown omega '{}' (cos, cos2, sign)", name), "omega");
}

std::function<double(double)> parse_radial(const Node& n) {
  const std::string name = n.text("radial", "one");
  if (name == "one") return [](double) { return 1.0; };
  if (name == "cos_log") return [](double t) { return std::cos(std::log(t)); };
  n.fail(fmt::format("unknown radial factor '{}' (one, cos_log)", name), "radial");
}

RoughKernel parse_kernel(const Node& n, const Grid& grid) {
  auto omega = parse_omega(n);
  auto radial = parse_radial(n);
  const double r = n.number("r", 2.0);
  const double eps = n.number("eps", 0.0);
  const double rmax = n.number("rmax", 0.0);
  return guarded(n, [&] { return make_rough_kernel(grid, omega, radial, r, eps, rmax); });
}

std::vector<double> geometric(double lo, double hi, double ratio) {
  std::vector<double> out;
  for (double t = lo; t < hi; t *= ratio) out.push_back(t);
  return out;
}

Operator parse_operator(const Node& n, const Grid& grid) {
  const std::string kind = n.text("kind");
  auto need = [&](GridMode mode) {
    if (grid.mode() != mode) n.fail(fmt::format("operator '{}' needs a {} grid", kind, to_string(mode)), "kind");
  };
  if (kind == "identity") return [](const GridFunction& f) { return f; };
  if (kind == "maximal") {
    const MaximalConfig cfg = parse_radii(n, grid);
    return [cfg](const GridFunction& f) { return hl_maximal(f, cfg); };
  }
  if (kind == "powered_maximal") {
    const MaximalConfig cfg = parse_radii(n, grid);
    const double delta = n.number("delta");
    if (!(delta > 0.0 && delta <= 1.0)) n.fail("delta must lie in (0, 1]", "delta");
    return [cfg, delta](const GridFunction& f) { return powered_maximal(abs(f), delta, cfg); };
  }
  if (kind == "bochner") {
    need(GridMode::Torus);
    const double beta = n.number("beta"), r = n.number("r");
    if (!(beta > 0.0 && r > 0.0)) n.fail("need beta > 0 and r > 0");
    return [beta, r](const GridFunction& f) { return modulus(bochner_riesz_apply(f, beta, r)); };
  }
  if (kind == "bochner_maximal") {
    need(GridMode::Torus);
    const double beta = n.number("beta");
    if (!(beta > 0.0)) n.fail("need beta > 0", "beta");
    std::vector<double> rs = default_r_grid(grid);
    if (n.has("r_ratio")) {
      const double ratio = n.number("r_ratio");
      if (!(ratio > 1.0)) n.fail("r_ratio must exceed 1", "r_ratio");
      rs = geometric(1.0 / grid.extent(), std::sqrt(double(grid.dim())) / (2.0 * grid.spacing()) * ratio, ratio);
    }
    return [beta, rs](const GridFunction& f) { return bochner_riesz_maximal(f, beta, rs); };
  }
  if (kind == "strongly_singular") {
    need(GridMode::Torus);
    const double b = n.number("b"), a = n.number("a");
    if (!(b > 0.0 && b < 1.0 && a > 0.0 && a < grid.dim() * b / 2.0)) n.fail("need 0 < b < 1 and 0 < a < n b / 2");
    return [b, a](const GridFunction& f) { return modulus(strongly_singular_apply(f, b, a)); };
  }
  if (kind == "rough") {
    need(GridMode::Box);
    const RoughKernel k = parse_kernel(n, grid);
    return [k](const GridFunction& f) { return rough_singular_apply(f, k); };
  }
  if (kind == "spherical_maximal") {
    if (grid.dim() != 2 && grid.dim() != 3) n.fail("spherical maximal operator needs a 2-D or 3-D grid", "kind");
    const double alpha = n.number("alpha", 0.0);
    if (!(alpha >= 0.0)) n.fail("alpha must be nonnegative", "alpha");
    std::vector<double> ts = default_t_grid(grid);
    if (n.has("t_ratio")) {
      const double ratio = n.number("t_ratio");
      if (!(ratio > 1.0)) n.fail("t_ratio must exceed 1", "t_ratio");
      ts = geometric(2.0 * grid.spacing(), 0.25 * grid.extent(), ratio);
    }
    if (ts.empty()) n.fail("grid too coarse for any sphere radius in [2h, L/4)");
    return [alpha, ts](const GridFunction& f) { return frac_spherical_maximal(f, alpha, ts); };
  }
  n.fail(fmt::format("unknown operator kind '{}'", kind), "kind");
}

std::vector<GridFunction> parse_family(const Node& n, const Grid& grid, std::uint64_t seed) {
  const long long count = n.integer("count", 12);
  if (count < 1) n.fail("family count must be positive", "count");
  const auto s = static_cast<std::uint64_t>(n.integer("seed", static_cast<long long>(seed)));
  return test_inputs(grid, static_cast<std::size_t>(count), s);
}

using Checker = std::function<CheckReport()>;

Checker parse_checker(const Node& n, const std::string& type, const Exponent& p) {
  if (type == "diagonal") {
    const double p0 = n.number("p0"), delta = n.number("delta");
    if (!(p0 > 0.0)) n.fail("need p0 > 0", "p0");
    if (!(delta > 0.0 && delta < 1.0)) n.fail("delta must lie in (0, 1)", "delta");
    return [=] { return check_diagonal(p, p0, delta); };
  }
  if (type == "off_diagonal") {
    const double p0 = n.number("p0"), q0 = n.number("q0"), delta = n.number("delta");
    if (!(p0 > 0.0 && p0 <= q0)) n.fail("need 0 < p0 <= q0", "q0");
    if (!(delta > 0.0 && delta < 1.0)) n.fail("delta must lie in (0, 1)", "delta");
    return [=] { return check_off_diagonal(p, p0, q0, delta); };
  }
  if (type == "ap_search" || type == "ap_log_holder") {
    const double p0 = n.number("p0"), delta = n.number("delta");
    if (!(p0 > 1.0)) n.fail("need p0 > 1", "p0");
    if (!(delta > 0.0 && delta < 1.0)) n.fail("delta must lie in (0, 1)", "delta");
    if (type == "ap_log_holder") return [=] { return check_ap_log_holder(p, p0, delta); };
    const std::vector<double> grid = n.has("search_grid") ? n.numbers("search_grid") : std::vector<double>{};
    return [=] { return check_ap_via_search(p, p0, delta, grid); };
  }
  if (type == "application") {
    Application app;
    app.kind = guarded(n.child("app"), [&] { return parse_application(n.text("app")); });
    app.r = n.number("r", app.r);
    app.p0 = n.number("p0", app.p0);
    app.n = static_cast<int>(n.integer("n", p.grid().dim()));
    app.b = n.number("b", app.b);
    app.a = n.number("a", app.a);
    app.alpha = n.number("alpha", app.alpha);
    app.beta = n.number("beta", app.beta);
    // Parameter constraints are validated up front so they surface as config errors.
    guarded(n, [&] {
      application_range(app, Exponent::constant(Grid(1, 1.0, 2), 2.0));
      return 0;
    });
    return [=] { return application_range(app, p); };
  }
  if (type == "log_holder") {
    return [=] {
      const LogHolderReport lh = check_log_holder(p);
      CheckReport rep{.id = "log_holder", .verdict = lh.in_plog ? Verdict::Pass : Verdict::Unknown, .witness = {},
                      .notes = {}};
      rep.add("c1_hat", lh.c1_hat).add("c1_hat_coarse", lh.c1_hat_coarse).add("c2_hat", lh.c2_hat);
      rep.add("decay_radius", lh.decay_radius).add("p_minus", p.p_minus()).add("p_plus", p.p_plus());
      return rep;
    };
  }
  n.fail(fmt::format("unknown check type '{}'", type), "type");
}

bool is_checker(const std::string& type) {
  return type == "diagonal" || type == "off_diagonal" || type == "ap_search" || type == "ap_log_holder" ||
         type == "application" || type == "log_holder";
}

std::pair<std::string, double> primary(const CheckReport& rep, std::initializer_list<std::string_view> names) {
  for (auto name : names) {
    if (auto v = rep.find(name)) return {std::string(name), *v};
  }
  return {"", kNaN};
}

const Grid& grid_for(const Node& e, const Context& ctx, std::optional<Grid>& local) {
  if (e.has("grid")) {
    local = parse_grid(e.child("grid"));
    return *local;
  }
  if (!ctx.grid) e.fail("no grid: give one at the top level or in the experiment");
  return *ctx.grid;
}

Exponent exponent_for(const Node& e, const Context& ctx, const Grid& grid) {
  if (e.has("exponent")) return parse_exponent(e.child("exponent"), grid);
  if (!ctx.exponent || !(ctx.exponent->grid() == grid)) {
    e.fail("no exponent for this grid: give one in the experiment");
  }
  return *ctx.exponent;
}

Task parse_experiment(const Node& e, const Context& ctx, std::size_t index) {
  const std::string type = e.text("type");
  const std::uint64_t seed = ctx.seed + index;
  const bool save = e.boolean("save", false);
  std::optional<Grid> local;

  if (is_checker(type)) {
    const Grid& grid = grid_for(e, ctx, local);
    const Exponent p = exponent_for(e, ctx, grid);
    Checker check = parse_checker(e, type, p);
    return [=] {
      Row row{.experiment = type, .report = check()};
      std::tie(row.metric, row.value) = primary(row.report, {"upper", "p_star", "r_prime", "c1_hat", "p_minus"});
      if (save) row.fields.emplace_back("exponent", p.values());
      return row;
    };
  }

  if (type == "weight_class" || type == "ap_rh_equivalence" || type == "transferred_weight") {
    const Grid& grid = grid_for(e, ctx, local);
    const Weight w = parse_weight(e.child("weight"), grid, seed);
    const long long depth = e.integer("depth", -1);
    const CubeFamily family = guarded(e, [&] { return CubeFamily::dyadic(grid, static_cast<int>(depth)); });
    if (type == "weight_class") {
      const std::string cls = e.text("class", "ap");
      const double param = e.number("parameter", 2.0);
      if (cls != "ap" && cls != "a1" && cls != "rh") e.fail("class must be ap, a1 or rh", "class");
      if (cls != "a1" && !(param > 1.0)) e.fail("parameter must exceed 1", "parameter");
      return [=] {
        const WeightClassReport r = cls == "ap"   ? ap_constant(w, param, family)
                                    : cls == "a1" ? a1_constant(w, family)
                                                  : rh_constant(w, param, family);
        CheckReport rep{.id = fmt::format("{}_constant", cls), .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
        rep.add("parameter", r.parameter).add("constant", r.constant).add("constant_coarser", r.constant_coarser);
        rep.add("stable", r.stable ? 1.0 : 0.0).add("worst_cube_side", r.worst.side);
        rep.verdict = std::isfinite(r.constant) && r.stable ? Verdict::Pass : Verdict::Fail;
        Row row{.experiment = type, .report = rep, .metric = "constant", .value = r.constant};
        if (save) row.fields.emplace_back("weight", w.values());
        return row;
      };
    }
    if (type == "ap_rh_equivalence") {
      const double p = e.number("p"), delta = e.number("delta");
      if (!(p > 1.0)) e.fail("need p > 1", "p");
      if (!(delta > 0.0 && delta < 1.0)) e.fail("delta must lie in (0, 1)", "delta");
      return [=] {
        Row row{.experiment = type, .report = ap_rh_equivalence_check(w, p, delta, family)};
        std::tie(row.metric, row.value) = primary(row.report, {"A_p"});
        return row;
      };
    }
    const double p = e.number("p"), p0 = e.number("p0"), delta = e.number("delta");
    guarded(e, [&] { return transferred_weight(p, p0, delta); });
    return [=] {
      Row row{.experiment = type, .report = transferred_weight_check(w, p, p0, delta, family)};
      std::tie(row.metric, row.value) = primary(row.report, {"constant"});
      return row;
    };
  }

  if (type == "rubio_certificate") {
    const Grid& grid = grid_for(e, ctx, local);
    const Exponent q = exponent_for(e, ctx, grid);
    if (grid.mode() != GridMode::Box) e.fail("the iteration runs on a box grid", "type");
    const double q0 = e.number("q0"), delta = e.number("delta");
    if (!(q0 > 0.0 && q0 < q.p_minus())) e.fail("need 0 < q0 < q_minus", "q0");
    if (!(delta > 0.0 && delta <= 1.0)) e.fail("delta must lie in (0, 1]", "delta");
    const long long count = e.integer("count", 4);
    if (count < 1) e.fail("count must be positive", "count");
    const double tol = e.number("tol", 1e-8);
    const long long kmax = e.integer("kmax", 60);
    const double safety = e.number("safety", 2.0);
    const std::optional<double> fixed_b = e.has("B") ? std::optional<double>(e.number("B")) : std::nullopt;
    const MaximalConfig cfg = parse_radii(e, grid, "family");
    return [=] {
      const double B = fixed_b ? *fixed_b : iteration_bound(q, q0, delta, cfg, 24, seed, safety);
      const CubeFamily family = CubeFamily::dyadic(grid);
      const auto inputs = test_inputs(grid, static_cast<std::size_t>(count), seed);
      CheckReport rep{.id = "rubio_certificate", .verdict = Verdict::Pass, .witness = {}, .notes = {}};
      double worst_norm = 0.0, worst_rho = 0.0, worst_a1 = 0.0;
      int max_terms = 0;
      std::size_t passed = 0;
      Row row{.experiment = type};
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const IterationResult r = rubio_iterate(abs(inputs[i]), q, q0, delta, B, cfg, tol, static_cast<int>(kmax));
        const CheckReport cert = a1_certificate(r, delta, family, cfg, tol);
        worst_norm = std::max(worst_norm, r.rh_norm / r.h_norm);
        worst_rho = std::max(worst_rho, cert.at("rho") / cert.at("rho_bound"));
        worst_a1 = std::max(worst_a1, cert.at("a1_constant") / cert.at("a1_bound"));
        max_terms = std::max(max_terms, r.terms);
        if (cert.verdict == Verdict::Pass) ++passed;
        for (const auto& note : cert.notes) rep.note(fmt::format("input {}: {}", i, note));
        if (save && i == 0) row.fields.emplace_back("Rh", r.rh);
      }
      rep.add("B", B).add("inputs", static_cast<double>(inputs.size())).add("passed", static_cast<double>(passed));
      rep.add("max_norm_ratio", worst_norm).add("max_rho_over_bound", worst_rho);
      rep.add("max_a1_over_bound", worst_a1).add("max_terms", max_terms);
      const bool norm_ok = worst_norm <= 2.0 + tol;
      if (!norm_ok) rep.note(fmt::format("||Rh|| / ||h|| = {} exceeds 2", worst_norm));
      rep.verdict = passed == inputs.size() && norm_ok ? Verdict::Pass : Verdict::Fail;
      row.report = rep;
      row.metric = "max_norm_ratio";
      row.value = worst_norm;
      return row;
    };
  }

  if (type == "variable_conclusion" || type == "weighted_hypothesis" || type == "operator_norm") {
    const Grid& grid = grid_for(e, ctx, local);
    const Operator op = parse_operator(e.child("operator"), grid);
    const std::vector<GridFunction> inputs =
        e.has("family") ? parse_family(e.child("family"), grid, seed) : test_inputs(grid, 12, seed);
    if (type == "weighted_hypothesis") {
      const double p0 = e.number("p0"), q0 = e.number("q0", p0), delta = e.number("delta");
      if (!(p0 > 0.0 && p0 <= q0)) e.fail("need 0 < p0 <= q0", "p0");
      if (!(delta > 0.0 && delta < 1.0)) e.fail("delta must lie in (0, 1)", "delta");
      std::vector<Weight> weights;
      for (const Node& w : e.items("weights")) weights.push_back(parse_weight(w, grid, seed));
      const CubeFamily family = CubeFamily::dyadic(grid);
      return [=] {
        const PairFamily pairs = make_pairs(inputs, op);
        Row row{.experiment = type, .report = empirical_weighted_hypothesis(pairs, p0, q0, delta, weights, family)};
        std::tie(row.metric, row.value) = primary(row.report, {"C_hat"});
        return row;
      };
    }
    const Exponent p = exponent_for(e, ctx, grid);
    if (type == "operator_norm") {
      return [=] {
        const OperatorNormEstimate est = operator_norm_estimate(op, p, inputs);
        CheckReport rep{.id = "operator_norm", .verdict = Verdict::Pass, .witness = {}, .notes = {}};
        rep.add("lower_bound", est.lower_bound).add("skipped", static_cast<double>(est.skipped));
        rep.note("the estimate is a lower bound for the operator norm");
        return Row{.experiment = type, .report = rep, .metric = "lower_bound", .value = est.lower_bound};
      };
    }
    std::optional<Exponent> q;
    if (e.has("target")) {
      const Node t = e.child("target");
      const double alpha = t.number("alpha");
      const long long n = t.integer("n", grid.dim());
      q = guarded(t, [&] { return fractional_target(p, alpha, static_cast<int>(n)); });
    }
    std::optional<Checker> check;
    if (e.has("check")) {
      const Node c = e.child("check");
      const std::string ctype = c.text("type");
      if (!is_checker(ctype)) c.fail(fmt::format("'{}' is not a range check", ctype), "type");
      check = parse_checker(c, ctype, p);
    }
    return [=] {
      const PairFamily pairs = make_pairs(inputs, op);
      CheckReport rep = empirical_variable_conclusion(pairs, p, q ? *q : p);
      Row row{.experiment = type};
      if (check) {
        // The row carries the checker's verdict; the measurement stays in the witnesses.
        const CheckReport c = (*check)();
        rep.id = c.id + "+" + rep.id;
        rep.verdict = c.verdict;
        for (const auto& w : c.witness) rep.add("check." + w.name, w.value);
        for (const auto& note : c.notes) rep.note(note);
        if (c.verdict == Verdict::Violated) rep.note("outside the checked range: measured ratios carry no claim");
      }
      row.report = rep;
      std::tie(row.metric, row.value) = primary(rep, {"C_hat"});
      if (save) {
        row.fields.emplace_back("g0", pairs.front().g);
        row.fields.emplace_back("f0", pairs.front().f);
      }
      return row;
    };
  }

  if (type == "rough_kernel") {
    const Grid& grid = grid_for(e, ctx, local);
    if (grid.mode() != GridMode::Box) e.fail("rough kernels run on a box grid", "type");
    const RoughKernel k = parse_kernel(e, grid);
    const GridFunction f = test_inputs(grid, 1, seed).front();
    return [=] {
      CheckReport rep = rough_kernel_check(grid, k);
      const TruncationReport tr = rough_singular_convergence(f, k);
      rep.add("truncation_relative_change", tr.relative_change);
      Row row{.experiment = type, .report = rep, .metric = "truncation_relative_change", .value = tr.relative_change};
      if (save) row.fields.emplace_back("Tf", tr.at_eps);
      return row;
    };
  }

  e.fail(fmt::format("unknown experiment type '{}'", type), "type");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number_text(double v) { return fmt::format("{:.17g}", v); }

json number_json(double v) { return std::isfinite(v) ? json(v) : json(number_text(v)); }

}  // namespace

RunOutcome run_config(const ConfigDocument& doc, const RunOptions& options) {
  json config = doc.root;
  const Node root(doc, doc.root, "");
  Context ctx;
  ctx.seed = options.seed ? *options.seed : static_cast<std::uint64_t>(root.integer("seed", 0));
  config["seed"] = ctx.seed;
  if (root.has("grid")) ctx.grid = parse_grid(root.child("grid"));
  if (root.has("exponent")) {
    if (!ctx.grid) root.fail("a top-level exponent needs a top-level grid", "exponent");
    ctx.exponent = parse_exponent(root.child("exponent"), *ctx.grid);
  }
  std::vector<Task> tasks;
  std::vector<std::string> types;
  if (root.has("experiments")) {
    const auto items = root.items("experiments");
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!items[i].raw().is_object()) items[i].fail("each experiment must be an object");
      types.push_back(items[i].text("type"));
      tasks.push_back(parse_experiment(items[i], ctx, i));
    }
  }
  if (options.threads > 0) set_thread_count(options.threads);

  RunOutcome outcome;
  const std::uint64_t hash = config_hash(config);
  outcome.config_hash = format_hash(hash);

  std::vector<Row> rows;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (options.verbose) fmt::print(stderr, "[{}/{}] {}\n", i + 1, tasks.size(), types[i]);
    try {
      rows.push_back(tasks[i]());
    } catch (const std::exception& ex) {
      Row row{.experiment = types[i]};
      row.report.id = types[i];
      row.report.note(ex.what());
      row.failed = true;
      rows.push_back(std::move(row));
    }
    if (options.verbose) {
      const Row& r = rows.back();
      fmt::print(stderr, "    {} {} = {}\n", r.failed ? "ERROR" : to_string(r.report.verdict), r.metric,
                 number_text(r.value));
    }
  }

  std::filesystem::create_directories(options.out_dir);
  std::string csv = std::string(kReportHeader) + "\n";
  json summary;
  summary["config_hash"] = outcome.config_hash;
  summary["seed"] = ctx.seed;
  summary["rows"] = json::array();
  summary["fields"] = json::array();
  std::vector<unsigned char> blob(8);
  for (int b = 0; b < 8; ++b) blob[b] = static_cast<unsigned char>(hash >> (8 * b));

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const std::string verdict = r.failed ? "ERROR" : std::string(to_string(r.report.verdict));
    std::string witnesses;
    json wj = json::object();
    for (const auto& w : r.report.witness) {
      if (!witnesses.empty()) witnesses += ';';
      witnesses += w.name + "=" + number_text(w.value);
      wj[w.name] = number_json(w.value);
    }
    std::string notes;
    for (const auto& n : r.report.notes) notes += (notes.empty() ? "" : " | ") + n;
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", outcome.config_hash, i, csv_field(r.experiment),
                       csv_field(r.report.id), verdict, csv_field(r.metric), number_text(r.value),
                       csv_field(witnesses), csv_field(notes));
    json row = {{"index", i},          {"experiment", r.experiment}, {"check", r.report.id},
                {"verdict", verdict},  {"primary_metric", r.metric}, {"primary_value", number_json(r.value)},
                {"witnesses", wj},     {"notes", r.report.notes}};
    if (auto s = r.report.find("stable")) row["stable"] = *s != 0.0;
    summary["rows"].push_back(row);
    for (const auto& [name, field] : r.fields) {
      const Grid& g = field.grid();
      summary["fields"].push_back({{"row", i},
                                   {"name", name},
                                   {"offset_bytes", blob.size()},
                                   {"count", field.size()},
                                   {"dim", g.dim()},
                                   {"N", g.points_per_axis()},
                                   {"L", g.extent()},
                                   {"mode", std::string(to_string(g.mode()))}});
      append_binary(field, blob);
    }
    outcome.failed_rows += r.failed;
  }
  outcome.rows = rows.size();
  outcome.exit_code = outcome.failed_rows > 0 ? 2 : 0;
  summary["failed_rows"] = outcome.failed_rows;
  summary["exit_code"] = outcome.exit_code;

  auto write = [&](const std::string& name, const char* data, std::size_t size, std::ios::openmode mode) {
    std::ofstream os(options.out_dir / name, mode);
    if (!os) throw Error(fmt::format("cannot write '{}'", (options.out_dir / name).string()));
    os.write(data, static_cast<std::streamsize>(size));
  };
  write("report.csv", csv.data(), csv.size(), std::ios::out | std::ios::trunc);
  write("fields.bin", reinterpret_cast<const char*>(blob.data()), blob.size(),
        std::ios::out | std::ios::binary | std::ios::trunc);
  const std::string sj = summary.dump(2) + "\n";
  write("summary.json", sj.data(), sj.size(), std::ios::out | std::ios::trunc);
  return outcome;
}

}  // namespace vexp
