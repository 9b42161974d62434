#include "vexp/report.hpp"

#include <stdexcept>

namespace vexp {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::HypothesesMet: return "HYPOTHESES_MET";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::Unknown: return "UNKNOWN";
    case Verdict::Consistent: return "CONSISTENT";
    case Verdict::Inconsistent: return "INCONSISTENT";
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
  }
  return "UNKNOWN";
}

double CheckReport::at(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw std::out_of_range("report " + id + " has no witness named " + std::string(name));
}

}  // namespace vexp
