#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vexp {

enum class Verdict {
  HypothesesMet,
  Violated,
  Unknown,
  Consistent,
  Inconsistent,
  Pass,
  Fail,
};

std::string_view to_string(Verdict v);

struct Witness {
  std::string name;
  double value = 0.0;
};

/// Verdict plus the numbers that justify it. VIOLATED reports name the failed
/// inequality and carry both of its sides as witnesses.
struct CheckReport {
  std::string id;
  Verdict verdict = Verdict::Unknown;
  std::vector<Witness> witness;
  std::vector<std::string> notes;

  CheckReport& add(std::string name, double value) {
    witness.push_back({std::move(name), value});
    return *this;
  }
  CheckReport& note(std::string text) {
    notes.push_back(std::move(text));
    return *this;
  }
  std::optional<double> find(std::string_view name) const {
    for (const auto& w : witness) {
      if (w.name == name) return w.value;
    }
    return std::nullopt;
  }
  /// Like find() but throws std::out_of_range when missing.
  double at(std::string_view name) const;
};

}  // namespace vexp
