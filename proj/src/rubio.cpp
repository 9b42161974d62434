#include "vexp/rubio.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vexp/norms.hpp"
#include "vexp/simd.hpp"

namespace vexp {

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError(fmt::format("delta must lie in (0, 1] (got {})", delta));
}

}  // namespace

Exponent dual_space_exponent(const Exponent& q, double q0) {
  if (!(q0 > 0.0 && q0 < q.p_minus())) {
    throw DomainError(fmt::format("need 0 < q0 < q_minus (q0 = {}, q_minus = {})", q0, q.p_minus()));
  }
  return scaled_conjugate(q, q0, 1.0);
}

Exponent yprime_exponent(const Exponent& q, double q0, double delta) {
  require_delta(delta);
  if (!(q0 > 0.0 && q0 < q.p_minus())) {
    throw DomainError(fmt::format("need 0 < q0 < q_minus (q0 = {}, q_minus = {})", q0, q.p_minus()));
  }
  if (delta < 1.0 && !(q.p_plus() < q0 / (1.0 - delta))) {
    throw DomainError(fmt::format("need q_plus < q0/(1-delta) (q_plus = {}, q0/(1-delta) = {})", q.p_plus(),
                                  q0 / (1.0 - delta)));
  }
  Exponent e = scaled_conjugate(q, q0, delta);
  if (!(e.p_minus() > 1.0)) {
    throw DomainError(fmt::format("delta (q/q0)' has minimum {} <= 1", e.p_minus()));
  }
  return e;
}

IterationResult rubio_iterate(const GridFunction& h, const Exponent& q, double q0, double delta, double B,
                              double tol, int kmax) {
  return rubio_iterate(h, q, q0, delta, B, MaximalConfig::family(), tol, kmax);
}

IterationResult rubio_iterate(const GridFunction& h, const Exponent& q, double q0, double delta, double B,
                              const MaximalConfig& cfg, double tol, int kmax) {
  require_delta(delta);
  require_same_grid(h.grid(), q.grid());
  if (!(B >= 1.0) || !std::isfinite(B)) throw InputError(fmt::format("norm bound B must be finite and >= 1 (got {})", B));
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  if (kmax < 1) throw InputError("Kmax must be at least 1");
  for (double v : h.values()) {
    if (v < 0.0) throw InputError("the iteration needs a nonnegative function");
  }

  IterationResult r{.rh = h,
                    .terms = 1,
                    .B = B,
                    .tail_bound = 0.0,
                    .h_norm = 0.0,
                    .rh_norm = 0.0,
                    .yprime = dual_space_exponent(q, q0),
                    .maximal_exponent = scaled_conjugate(q, q0, delta),
                    .term_norms = {}};
  const double norm_tol = std::min(1e-10, 0.01 * tol);
  r.h_norm = luxemburg_norm(h, r.yprime, norm_tol).value;
  r.term_norms.push_back(r.h_norm);
  if (r.h_norm == 0.0) return r;

  const auto& k = simd::active();
  const double inv = 1.0 / (2.0 * B);
  GridFunction term = h;
  for (int K = 1;; ++K) {
    // K terms summed so far.
    const double tail_factor = std::exp2(1.0 - K);
    if (K >= 2 && r.term_norms.back() <= tol * r.h_norm && tail_factor <= tol) {
      r.terms = K;
      r.tail_bound = tail_factor * r.h_norm;
      break;
    }
    if (K >= kmax) {
      throw ConvergenceError(fmt::format(
          "iteration did not converge in {} terms: last term norm {:.3e} vs tol * ||h|| = {:.3e}; B = {} may "
          "underestimate the operator norm",
          kmax, r.term_norms.back(), tol * r.h_norm, B));
    }
    term = powered_maximal(term, delta, cfg);
    for (auto& v : term.values()) v *= inv;
    k.axpy(1.0, term.values(), r.rh.values());
    r.term_norms.push_back(luxemburg_norm(term, r.yprime, norm_tol).value);
  }
  r.rh_norm = luxemburg_norm(r.rh, r.yprime, norm_tol).value;
  return r;
}

double iteration_bound(const Exponent& q, double q0, double delta, const MaximalConfig& cfg,
                       std::size_t family_size, std::uint64_t seed, double safety) {
  require_delta(delta);
  if (!(safety >= 1.0)) throw InputError("safety factor must be >= 1");
  const Exponent yp = dual_space_exponent(q, q0);
  const auto family = adversarial_family(q.grid(), family_size, seed);
  const Operator op = [&](const GridFunction& f) { return powered_maximal(f, delta, cfg); };
  const auto est = operator_norm_estimate(op, yp, family);
  return safety * std::max(1.0, est.lower_bound);
}

CheckReport a1_certificate(const IterationResult& result, double delta, const CubeFamily& family,
                           const MaximalConfig& cfg, double tol) {
  require_delta(delta);
  CheckReport rep{.id = "a1_certificate", .verdict = Verdict::Unknown, .witness = {}, .notes = {}};
  const GridFunction& rh = result.rh;
  const double min_rh = min_value(rh);
  if (!(min_rh > 0.0)) {
    rep.verdict = Verdict::Fail;
    rep.add("min_Rh", min_rh);
    rep.note("Rh vanishes somewhere; the A_1 ratio is undefined");
    return rep;
  }
  const GridFunction m = powered_maximal(rh, delta, cfg);
  double rho = 0.0;
  for (std::size_t i = 0; i < rh.size(); ++i) rho = std::max(rho, m[i] / rh[i]);
  const double slack = std::max(tol, 10.0 * result.tail_bound / min_rh);
  const double rho_bound = 2.0 * result.B + slack;

  const Weight w(abs_pow(rh, 1.0 / delta), 0.0);
  const WeightClassReport a1 = a1_constant(w, family);
  const double a1_bound = std::pow(2.0 * result.B, 1.0 / delta) + tol;

  rep.add("rho", rho).add("rho_bound", rho_bound).add("a1_constant", a1.constant).add("a1_bound", a1_bound);
  rep.add("B", result.B).add("tail_bound", result.tail_bound).add("min_Rh", min_rh);
  rep.add("terms", result.terms);
  const bool rho_ok = rho <= rho_bound;
  const bool a1_ok = a1.constant <= a1_bound;
  rep.verdict = rho_ok && a1_ok ? Verdict::Pass : Verdict::Fail;
  if (!rho_ok) rep.note(fmt::format("rho = {} exceeds 2B + slack = {}", rho, rho_bound));
  if (!a1_ok) rep.note(fmt::format("A_1 constant {} exceeds (2B)^(1/delta) = {}", a1.constant, a1_bound));
  return rep;
}

}  // namespace vexp
