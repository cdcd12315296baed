#include "confsec/report.hpp"

#include <algorithm>
#include <cmath>

namespace confsec {

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::LessEqual: return "<=";
    case Relation::Less: return "<";
    case Relation::GreaterEqual: return ">=";
    case Relation::Greater: return ">";
    case Relation::Equal: return "==";
  }
  return "?";
}

bool VerificationReport::add(std::string name, double value, Relation relation, double threshold) {
  bool ok = false;
  switch (relation) {
    case Relation::LessEqual: ok = value <= threshold; break;
    case Relation::Less: ok = value < threshold; break;
    case Relation::GreaterEqual: ok = value >= threshold; break;
    case Relation::Greater: ok = value > threshold; break;
    case Relation::Equal: ok = value == threshold; break;
  }
  checks.push_back({std::move(name), value, threshold, relation, ok});
  return ok;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* VerificationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json out;
  out["subject"] = subject;
  out["passed"] = passed();
  out["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j;
    j["name"] = c.name;
    // JSON has no infinity; an unbounded value is written as null.
    j["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    j["threshold"] = c.threshold;
    j["relation"] = std::string(to_string(c.relation));
    j["passed"] = c.passed;
    out["checks"].push_back(std::move(j));
  }
  out["details"] = details;
  return out;
}

}  // namespace confsec
