#include <fmt/format.h>

#include "vexp/errors.hpp"
#include "vexp/experiment.hpp"

namespace vexp {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"rough-a", "rough-kernel singular integral, range r' < p_minus (2-D box)", R"({
  "seed": 1,
  "grid": {"dim": 2, "L": 8, "N": 64, "mode": "box"},
  "exponent": {"kind": "radial_bump", "a": 2.5, "b": 0.5, "c": 1.0},
  "experiments": [
    {"type": "application", "app": "rough_A", "r": 2},
    {"type": "rough_kernel", "omega": "cos", "radial": "one", "r": 2},
    {"type": "variable_conclusion",
     "operator": {"kind": "rough", "omega": "cos", "radial": "one", "r": 2},
     "family": {"count": 12},
     "check": {"type": "application", "app": "rough_A", "r": 2}}
  ]
})"},
      {"rough-b", "rough-kernel singular integral, range p_plus < r (2-D box)", R"({
  "seed": 2,
  "grid": {"dim": 2, "L": 8, "N": 64, "mode": "box"},
  "exponent": {"kind": "radial_bump", "a": 1.6, "b": 0.6, "c": 1.0},
  "experiments": [
    {"type": "application", "app": "rough_B", "r": 4},
    {"type": "variable_conclusion",
     "operator": {"kind": "rough", "omega": "cos2", "radial": "cos_log", "r": 4},
     "family": {"count": 12},
     "check": {"type": "application", "app": "rough_B", "r": 4}}
  ]
})"},
      {"rough-c", "rough-kernel singular integral, two-sided range around p0 (2-D box)", R"({
  "seed": 3,
  "grid": {"dim": 2, "L": 8, "N": 64, "mode": "box"},
  "exponent": {"kind": "radial_bump", "a": 2.0, "b": 0.5, "c": 1.0},
  "experiments": [
    {"type": "application", "app": "rough_C", "r": 2, "p0": 2},
    {"type": "ap_log_holder", "p0": 2, "delta": 0.5},
    {"type": "variable_conclusion",
     "operator": {"kind": "rough", "omega": "sign", "radial": "one", "r": 2},
     "family": {"count": 12},
     "check": {"type": "application", "app": "rough_C", "r": 2, "p0": 2}}
  ]
})"},
      {"strongly-singular", "oscillatory multiplier theta e^{i|xi|^b} |xi|^{-a} (2-D torus)", R"({
  "seed": 4,
  "grid": {"dim": 2, "L": 16, "N": 64, "mode": "torus"},
  "exponent": {"kind": "radial_bump", "a": 2.0, "b": 0.4, "c": 0.5},
  "experiments": [
    {"type": "application", "app": "strongly_singular", "n": 2, "b": 0.5, "a": 0.25, "p0": 2},
    {"type": "variable_conclusion",
     "operator": {"kind": "strongly_singular", "b": 0.5, "a": 0.25},
     "family": {"count": 12},
     "check": {"type": "application", "app": "strongly_singular", "n": 2, "b": 0.5, "a": 0.25, "p0": 2}}
  ]
})"},
      {"spherical", "fractional spherical maximal operator, L^p to L^q (3-D box)", R"({
  "seed": 5,
  "grid": {"dim": 3, "L": 8, "N": 32, "mode": "box"},
  "exponent": {"kind": "radial_bump", "a": 1.6, "b": 0.3, "c": 1.0},
  "experiments": [
    {"type": "application", "app": "spherical", "n": 3, "alpha": 0.5},
    {"type": "variable_conclusion",
     "operator": {"kind": "spherical_maximal", "alpha": 0.5, "t_ratio": 1.5},
     "target": {"alpha": 0.5, "n": 3},
     "family": {"count": 6},
     "check": {"type": "application", "app": "spherical", "n": 3, "alpha": 0.5}}
  ]
})"},
      {"bochner-riesz", "maximal Bochner-Riesz means, beta = 1/4 (2-D torus)", R"({
  "seed": 6,
  "grid": {"dim": 2, "L": 16, "N": 64, "mode": "torus"},
  "exponent": {"kind": "radial_bump", "a": 2.0, "b": 0.5, "c": 0.5},
  "experiments": [
    {"type": "application", "app": "bochner", "n": 2, "beta": 0.25},
    {"type": "ap_log_holder", "p0": 2, "delta": 0.5},
    {"type": "variable_conclusion",
     "operator": {"kind": "bochner_maximal", "beta": 0.25},
     "family": {"count": 12},
     "check": {"type": "application", "app": "bochner", "n": 2, "beta": 0.25}},
    {"type": "variable_conclusion",
     "exponent": {"kind": "constant", "value": 5},
     "operator": {"kind": "bochner_maximal", "beta": 0.25},
     "family": {"count": 12},
     "check": {"type": "application", "app": "bochner", "n": 2, "beta": 0.25}}
  ]
})"},
      {"rubio-certificate", "iteration majorant Rh and its A_1 certificate (1-D box)", R"({
  "seed": 7,
  "grid": {"dim": 1, "L": 4, "N": 256, "mode": "box"},
  "exponent": {"kind": "constant", "value": 2},
  "experiments": [
    {"type": "rubio_certificate", "q0": 1, "delta": 0.5, "count": 4, "save": true},
    {"type": "rubio_certificate", "q0": 1, "delta": 1.0, "count": 4}
  ]
})"},
  };
  return all;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError(fmt::format("unknown preset '{}' (see list-presets)", name));
}

}  // namespace vexp
