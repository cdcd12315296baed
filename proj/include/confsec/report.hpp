#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace confsec {

enum class Relation { LessEqual, Less, GreaterEqual, Greater, Equal };

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::LessEqual;
  bool passed = false;
};

/// Named pass/fail checks plus free-form details. Failures are entries, not exceptions.
struct VerificationReport {
  std::string subject;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();

  /// Records value against threshold and returns the verdict.
  bool add(std::string name, double value, Relation relation, double threshold);
  bool passed() const;
  const Check* find(std::string_view name) const;
  nlohmann::json to_json() const;
};

std::string_view to_string(Relation relation);

}  // namespace confsec
