#pragma once

// Interval propagation over cat / TC / sec / secat / TC(p) with derivation trees.

#include "confsec/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace confsec::bounds {

inline constexpr int kInfinity = std::numeric_limits<int>::max();

struct Interval {
  int lo = 1;
  int hi = kInfinity;

  bool exact() const noexcept { return lo == hi; }
  std::string str() const;
  bool operator==(const Interval&) const = default;
};

enum class QuantityKind { Cat, TC, Sec, Secat, TCMap };

struct Quantity {
  QuantityKind kind = QuantityKind::Cat;
  std::string subject;  // space id, "pi(k,r,X)" or a declared map name

  /// "cat(RP2)", "TC(pi(2,1,S3))", "sec(p)". TC(name) is read as TC of a
  /// space unless the subject is a projection; declared maps are resolved
  /// against the fact set at query time.
  static Quantity parse(std::string_view text);
  std::string str() const;

  auto operator<=>(const Quantity&) const = default;
};

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  std::string rule;       // "R9", "AXIOM", "PRESET", "FN", ...
  std::string statement;  // the derived statement
  std::vector<DerivationPtr> premises;
};

enum class Tri { Unknown, True, False };

std::string_view to_string(Tri value);

struct MapDecl {
  std::string total;
  std::string base;
};

struct AxiomFact {
  Quantity quantity;
  Interval interval;
  std::string source;
};

/// sec(map) >= k + 1 from an accepted cup-length certificate.
struct CupClaim {
  std::string map;
  int k = 1;
  std::string provenance;
};

struct FactSet {
  std::vector<AxiomFact> axioms;
  std::map<std::string, std::map<std::string, bool>> attributes;  // subject -> name -> value
  std::map<std::string, MapDecl> maps;
  std::vector<std::pair<std::string, std::string>> homotopy_equivalent;
  std::vector<std::pair<std::string, std::string>> deformation_retracts;  // (L, X): L retract of X
  std::vector<CupClaim> cup_claims;
  bool presets = true;

  /// {"axioms":[{"q":"cat(RP2)","eq":3}, {"q":..,"lo":..,"hi":..}], "attributes":{"RP2":["ANR","!contractible"]},
  ///  "maps":{"p":{"total":"E","base":"B"}}, "relations":[...], "cup_claims":[...], "presets":true}
  static FactSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void merge(const FactSet& other);
};

/// Public description of one inference rule.
struct Rule {
  std::string id;
  std::string statement;
  std::string guard;
};

/// The 23 numbered rules, in a fixed order.
const std::vector<Rule>& load_rules();
/// Definitional steps used alongside the rules (has_section, Fadell-Neuwirth guard, homotopy invariance).
const std::vector<Rule>& auxiliary_steps();

class ContradictionError : public Error {
 public:
  ContradictionError(std::string subject, DerivationPtr lower, DerivationPtr upper, const std::string& message)
      : Error(ErrorCode::Contradiction, message),
        subject_(std::move(subject)),
        lower_(std::move(lower)),
        upper_(std::move(upper)) {}

  const std::string& subject() const noexcept { return subject_; }
  /// For intervals: why lo holds / why hi holds. For attributes: why true / why false.
  const DerivationPtr& lower() const noexcept { return lower_; }
  const DerivationPtr& upper() const noexcept { return upper_; }

 private:
  std::string subject_;
  DerivationPtr lower_;
  DerivationPtr upper_;
};

struct QueryResult {
  Interval interval;
  DerivationPtr lower;  // null when lo = 1 holds trivially
  DerivationPtr upper;  // null when hi = infinity
};

struct AttributeResult {
  Tri value = Tri::Unknown;
  DerivationPtr why;
};

struct PropagateOptions {
  /// Rules are applied in a seeded random order when set; the fixpoint does not depend on it.
  std::optional<std::uint64_t> rule_order_seed;
  int max_rounds = 10'000;
};

class FactStore {
 public:
  QueryResult query(const Quantity& q) const;
  /// Quantity text or an attribute query such as "FPP(RP2)" is not accepted here; see attribute().
  QueryResult query(std::string_view text) const;
  AttributeResult attribute(const std::string& subject, const std::string& name) const;

  std::vector<Quantity> quantities() const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  int rounds() const noexcept { return rounds_; }

 private:
  friend FactStore propagate(const FactSet&, std::span<const Quantity>, const PropagateOptions&);

  struct Node {
    Interval interval;
    DerivationPtr lower;
    DerivationPtr upper;
  };
  struct Attr {
    bool value = false;
    DerivationPtr why;
  };

  Quantity resolve(Quantity q) const;

  std::map<std::string, Node> values_;
  std::map<std::string, Attr> attributes_;  // "subject|name"
  std::map<std::string, MapDecl> maps_;
  std::vector<std::string> warnings_;
  int rounds_ = 0;
};

/// Least fixpoint of the rules over the fact set and the quantities of interest.
FactStore propagate(const FactSet& facts, std::span<const Quantity> interest = {},
                    const PropagateOptions& options = {});

/// Indented derivation tree of both interval ends.
std::string explain(const Quantity& q, const QueryResult& result);
std::string render(const DerivationPtr& d, int indent = 0);
nlohmann::json to_json(const DerivationPtr& d);
nlohmann::json to_json(const Interval& iv);

/// Well-known values used by the paper (sphere, RP2, torus categories and complexities).
FactSet standard_facts();

/// "F(X,k)" for k >= 2, X for k = 1.
std::string configuration_space_id(const std::string& space, int k);
std::string projection_id(int k, int r, const std::string& space);

}  // namespace confsec::bounds
