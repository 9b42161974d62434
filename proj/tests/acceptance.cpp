// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "golden_table.hpp"
#include "riesz_oracle.hpp"
#include "support.hpp"
#include "vexp/experiment.hpp"
#include "vexp/extrapolation.hpp"
#include "vexp/maximal.hpp"
#include "vexp/norms.hpp"
#include "vexp/operators.hpp"
#include "vexp/rubio.hpp"
#include "vexp/weights.hpp"

using namespace vexp;

namespace {

/// Collects failed sub-checks of one criterion with a short reason each.
class Criterion {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void info(const std::string& text) { info_.push_back(text); }
  bool passed() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& infos() const { return info_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> info_;
};

struct Outcome {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(Criterion&)> body;
};

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

double closed_form_lp(const GridFunction& f, double p) {
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::fabs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

void norm_machinery(Criterion& c) {
  const Grid g(1, 4.0, 1024);
  double worst_closed = 0.0, worst_unit = 0.0, worst_quasi = 0.0, worst_homog = 0.0;
  for (double p_value : {1.5, 2.0, 4.0}) {
    const auto p = Exponent::constant(g, p_value);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto f = testing::random_function(g, seed);
      const double norm = luxemburg_norm(f, p).value;
      worst_closed = std::max(worst_closed, rel(norm, closed_form_lp(f, p_value)));
      GridFunction unit = f;
      for (auto& v : unit.values()) v /= norm;
      worst_unit = std::max(worst_unit, std::fabs(modular(unit, p) - 1.0));
      for (double p0 : {0.5 * p_value, 0.25 * p_value}) {
        worst_quasi = std::max(worst_quasi, rel(quasi_norm(f, p, p0).value, norm));
      }
      for (double scale : {-3.5, 0.01, 250.0}) {
        GridFunction cf = f;
        for (auto& v : cf.values()) v *= scale;
        worst_homog = std::max(worst_homog, rel(luxemburg_norm(cf, p).value, std::fabs(scale) * norm));
      }
    }
  }
  c.info(fmt::format("closed form {:.2e}, unit ball {:.2e}, quasi-norm {:.2e}, homogeneity {:.2e}", worst_closed,
                     worst_unit, worst_quasi, worst_homog));
  c.require(worst_closed <= 1e-8, "closed-form L^p norm");
  c.require(worst_unit <= 1e-8, "unit-ball identity");
  c.require(worst_quasi <= 3e-8, "quasi-norm independent of p0");
  c.require(worst_homog <= 2e-10, "homogeneity");
}

void weight_constants(Criterion& c) {
  const Grid g(1, 4.0, 4096);
  const auto family = CubeFamily::dyadic(g);
  const Weight one(GridFunction(g, 1.0));
  c.require(ap_constant(one, 2.0, family).constant == 1.0, "[1]_{A_p} = 1");
  const auto power = [&](double a) { return generate_weight({.kind = WeightKind::Power, .a = a}, g); };
  double prev = 0.0;
  std::string sweep;
  for (double a : {0.3, 0.45, 0.6, 0.75, 0.9}) {
    const auto r = ap_constant(power(a), 2.0, family);
    sweep += fmt::format(" a={}:{:.4f}{}", a, r.constant, r.stable ? "" : "(unstable)");
    if (a == 0.3 || a == 0.6) c.require(r.stable, fmt::format("A_2 constant of |x|^{} refinement-stable", a));
    c.require(r.constant > prev, fmt::format("A_2 constant increases at a = {}", a));
    prev = r.constant;
  }
  c.info("A_2 of |x|^a:" + sweep);
  for (double a : {-0.5, -0.25, 0.0, 0.3, 0.6}) {
    const auto r = ap_rh_equivalence_check(power(a), 2.0, 0.5, family);
    c.require(r.verdict == Verdict::Consistent, fmt::format("equivalence check CONSISTENT at a = {}", a));
  }
}

void rubio_case(Criterion& c, const Grid& g, double q0, double delta, std::size_t count, double& worst_norm,
                double& worst_rho, double& worst_a1) {
  const auto q = Exponent::constant(g, 2.0 * q0);
  const auto cfg = MaximalConfig::family();
  const auto family = CubeFamily::dyadic(g);
  const double B = iteration_bound(q, q0, delta, cfg);
  for (std::uint64_t seed = 0; seed < count; ++seed) {
    const auto h = testing::random_bumps(g, 100 + seed);
    const auto r = rubio_iterate(h, q, q0, delta, B, cfg);
    bool majorant = true;
    for (std::size_t i = 0; i < h.size(); ++i) majorant = majorant && r.rh[i] >= h[i];
    c.require(majorant, fmt::format("Rh >= h (dim {}, delta {}, seed {})", g.dim(), delta, seed));
    worst_norm = std::max(worst_norm, r.rh_norm / r.h_norm);
    const auto rh_delta = powered_maximal(r.rh, delta, cfg);
    double rho = 0.0;
    double min_rh = max_value(r.rh);
    for (std::size_t i = 0; i < h.size(); ++i) {
      rho = std::max(rho, rh_delta[i] / r.rh[i]);
      min_rh = std::min(min_rh, r.rh[i]);
    }
    const double rho_bound = 2.0 * B + 10.0 * r.tail_bound / min_rh;
    worst_rho = std::max(worst_rho, rho / rho_bound);
    const Weight w(abs_pow(r.rh, 1.0 / delta));
    const double a1 = a1_constant(w, family).constant;
    worst_a1 = std::max(worst_a1, a1 / (std::pow(2.0 * B, 1.0 / delta) * 1.05));
  }
}

void rubio_iteration(Criterion& c) {
  double worst_norm = 0.0, worst_rho = 0.0, worst_a1 = 0.0;
  for (double delta : {0.5, 0.75, 1.0}) {
    rubio_case(c, Grid(1, 8.0, 512), 1.0, delta, 20, worst_norm, worst_rho, worst_a1);
    rubio_case(c, Grid(2, 8.0, 128), 1.0, delta, 20, worst_norm, worst_rho, worst_a1);
  }
  c.info(fmt::format("max ||Rh||/||h|| {:.4f}, max rho/bound {:.4f}, max a1/bound {:.4f}", worst_norm, worst_rho,
                     worst_a1));
  c.require(worst_norm <= 2.01, "||Rh|| <= 2.01 ||h||");
  c.require(worst_rho <= 1.0, "pointwise ratio bound");
  c.require(worst_a1 <= 1.0, "A_1 constant bound");
}

ComplexGridFunction plane_wave(const Grid& g, int k1, int k2) {
  ComplexGridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = g.point(i);
    f[i] = std::polar(1.0, 2.0 * std::numbers::pi * (k1 * x[0] + k2 * x[1]) / g.extent());
  }
  return f;
}

double deviation(const ComplexGridFunction& out, const ComplexGridFunction& in, std::complex<double> factor) {
  double d = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) d = std::max(d, std::abs(out[i] - factor * in[i]));
  return d;
}

double l2(const ComplexGridFunction& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(s);
}

void fourier_operators(Criterion& c) {
  const Grid g(2, 8.0, 64, GridMode::Torus);
  const double b = 0.5, a = 0.25, beta = 0.25;
  double worst_mode = 0.0;
  for (auto [k1, k2] : {std::pair{1, 0}, {3, 3}, {6, -2}, {8, 0}, {12, -5}, {-20, 17}, {0, 0}}) {
    const auto f = plane_wave(g, k1, k2);
    const double s = std::hypot(k1, k2) / g.extent();
    const std::complex<double> ss =
        s > 0.5 ? frequency_cutoff(s) * std::polar(std::pow(s, -a), std::pow(s, b)) : std::complex<double>(0.0);
    worst_mode = std::max(worst_mode, deviation(strongly_singular_apply(f, b, a), f, ss));
    for (double r : {0.5, 1.0, 2.0}) {
      const double br = s < r ? std::pow(1.0 - s * s / (r * r), beta) : 0.0;
      worst_mode = std::max(worst_mode, deviation(bochner_riesz_apply(f, beta, r), f, br));
    }
  }
  c.info(fmt::format("single-mode deviation {:.2e}", worst_mode));
  c.require(worst_mode <= 1e-10, "single-mode eigenvalues");

  double worst_gain = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto f = to_complex(testing::random_function(g, seed));
    for (double r : {0.3, 1.0, 3.0}) worst_gain = std::max(worst_gain, l2(bochner_riesz_apply(f, beta, r)) / l2(f));
  }
  c.info(fmt::format("max L2 gain {:.17g}", worst_gain));
  c.require(worst_gain <= 1.0 + 1e-12, "L2 contraction");

  const auto riesz = testing::compare_riesz(16.0, 512, 1.0, 1);
  c.info(fmt::format("Riesz lattice sum vs truncated-kernel multiplier {:.4f}, vs principal value {:.4f}",
                     riesz.truncated_error, riesz.principal_error));
  c.require(riesz.truncated_error < 0.05, "Riesz kernel against its multiplier");
}

void range_checkers(Criterion& c) {
  const auto rows = testing::golden_rows();
  double worst = 0.0;
  for (const auto& row : rows) {
    const double err = std::fabs(row.actual() - row.expected);
    worst = std::max(worst, err);
    c.require(err <= 1e-12, row.label);
  }
  c.info(fmt::format("{} golden rows, max error {:.2e}", rows.size(), worst));
  c.require(rows.size() == 20, "twenty golden rows");
}

void extrapolation_evidence(Criterion& c) {
  {
    const Grid g(1, 8.0, 512);
    const auto p = Exponent::radial_bump(g, 1.5, 1.5, 1.0);
    const auto cfg = MaximalConfig::dyadic(g);
    const auto pairs = make_pairs(test_inputs(g, 50, 11), [&](const GridFunction& f) { return hl_maximal(f, cfg); });
    const auto r = empirical_variable_conclusion(pairs, p, p);
    c.info(fmt::format("(Mf, f), p in [{:.2f}, {:.2f}]: C_hat {:.4f}, change {:.4f}", p.p_minus(), p.p_plus(),
                       r.at("C_hat"), r.at("relative_change")));
    c.require(r.verdict == Verdict::Pass, "maximal pairs stable");
  }
  const Grid g(2, 16.0, 256, GridMode::Torus);
  const double beta = 0.25;
  const auto radii = default_r_grid(g);
  const auto pairs = make_pairs(test_inputs(g, 50, 12), [&](const GridFunction& f) {
    return bochner_riesz_maximal(f, beta, radii);
  });
  const Application app{.kind = ApplicationKind::BochnerRiesz, .n = 2, .beta = beta};
  for (double p_value : {1.6, 2.5, 3.5}) {
    const auto p = Exponent::constant(g, p_value);
    const auto r = empirical_variable_conclusion(pairs, p, p);
    const auto check = application_range(app, p);
    c.info(fmt::format("(T*f, f), p = {}: C_hat {:.4f}, change {:.4f}, checker {}", p_value, r.at("C_hat"),
                       r.at("relative_change"), to_string(check.verdict)));
    c.require(r.verdict == Verdict::Pass, fmt::format("Bochner-Riesz pairs stable at p = {}", p_value));
    c.require(check.verdict == Verdict::HypothesesMet, fmt::format("checker accepts p = {}", p_value));
  }
  for (double p_value : {1.2, 5.0}) {
    const auto p = Exponent::constant(g, p_value);
    const auto r = empirical_variable_conclusion(pairs, p, p);
    const auto check = application_range(app, p);
    c.info(fmt::format("outside the range, p = {}: C_hat {:.4f}, checker {}", p_value, r.at("C_hat"),
                       to_string(check.verdict)));
    c.require(check.verdict == Verdict::Violated, fmt::format("checker rejects p = {}", p_value));
    c.require(std::isfinite(r.at("C_hat")), fmt::format("ratios still reported at p = {}", p_value));
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Criterion& c) {
  const auto base = std::filesystem::temp_directory_path() / "vexp_acceptance";
  for (const char* name : {"rubio-certificate", "bochner-riesz"}) {
    const auto doc = parse_config(find_preset(name).config);
    const auto a = base / (std::string(name) + "_a");
    const auto b = base / (std::string(name) + "_b");
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    run_config(doc, {.out_dir = a});
    run_config(doc, {.out_dir = b});
    const std::string ra = slurp(a / "report.csv");
    c.require(!ra.empty() && ra == slurp(b / "report.csv"), fmt::format("{} report.csv identical", name));
  }
}

}  // namespace

int main() {
  const std::vector<Outcome> criteria = {
      {1, "norm machinery", 10.0, norm_machinery},
      {2, "weight constants", 30.0, weight_constants},
      {3, "iteration majorant", 120.0, rubio_iteration},
      {4, "Fourier operators", 0.0, fourier_operators},
      {5, "range checkers", 0.0, range_checkers},
      {6, "extrapolation evidence", 600.0, extrapolation_evidence},
      {7, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.body(c);
    } catch (const std::exception& e) {
      c.require(false, fmt::format("exception: {}", e.what()));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (crit.limit_seconds > 0.0) {
      c.require(seconds < crit.limit_seconds, fmt::format("runtime {:.1f} s over {} s", seconds, crit.limit_seconds));
    }
    for (const auto& line : c.infos()) fmt::print("  {}\n", line);
    for (const auto& line : c.failures()) fmt::print("  failed: {}\n", line);
    fmt::print("criterion {} ({}): {} [{:.1f} s]\n", crit.id, crit.title, c.passed() ? "PASS" : "FAIL", seconds);
    std::fflush(stdout);
    if (!c.passed()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
