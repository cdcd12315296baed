#pragma once

#include "confsec/bounds.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace confsec::bounds::detail {

struct Projection {
  int k = 2;
  int r = 1;
  std::string space;
};

std::optional<Projection> parse_projection(std::string_view id);
/// (X, k) from "F(X,k)"; nullopt for anything else.
std::optional<std::pair<std::string, int>> parse_configuration_space(std::string_view id);

struct MapInfo {
  std::string id;
  std::string total;
  std::string base;
  std::optional<Projection> pi;
};

struct Universe {
  std::set<std::string> spaces;
  std::map<std::string, MapInfo> maps;
  std::set<std::string> primitive_spaces;  // spaces that carry projections pi(k,r,X)
  std::vector<std::pair<std::string, std::string>> homotopy_equivalent;
  std::vector<std::pair<std::string, std::string>> deformation_retracts;
  std::vector<std::pair<CupClaim, DerivationPtr>> cup_claims;
  int max_k = 5;
};

inline std::string cat_of(const std::string& s) { return "cat(" + s + ")"; }
inline std::string tc_of(const std::string& s) { return "TC(" + s + ")"; }
inline std::string sec_of(const std::string& m) { return "sec(" + m + ")"; }
inline std::string secat_of(const std::string& m) { return "secat(" + m + ")"; }

/// Mutable propagation state seen by the rules.
class Engine {
 public:
  explicit Engine(Universe universe) : u_(std::move(universe)) {}

  const Universe& universe() const noexcept { return u_; }

  Interval get(const std::string& q) const;
  int lo(const std::string& q) const { return get(q).lo; }
  int hi(const std::string& q) const { return get(q).hi; }
  DerivationPtr why_lo(const std::string& q) const;
  DerivationPtr why_hi(const std::string& q) const;

  Tri attr(const std::string& subject, const std::string& name) const;
  bool is(const std::string& subject, const std::string& name) const { return attr(subject, name) == Tri::True; }
  bool is_not(const std::string& subject, const std::string& name) const {
    return attr(subject, name) == Tri::False;
  }
  DerivationPtr why_attr(const std::string& subject, const std::string& name) const;

  void raise(const std::string& q, int value, const std::string& rule, std::vector<DerivationPtr> premises);
  void lower(const std::string& q, int value, const std::string& rule, std::vector<DerivationPtr> premises);
  void assert_attr(const std::string& subject, const std::string& name, bool value, const std::string& rule,
                   std::vector<DerivationPtr> premises, const std::string& statement = {});

  /// Makes the intervals of a and b equal (each end copied both ways).
  void equate(const std::string& a, const std::string& b, const std::string& rule,
              std::vector<DerivationPtr> guard);

  bool changed() const noexcept { return changed_; }
  void reset_changed() noexcept { changed_ = false; }
  void warn(const std::string& message);

  std::map<std::string, Interval> intervals() const;

  struct Node {
    Interval interval;
    DerivationPtr lower;
    DerivationPtr upper;
  };
  struct Attr {
    bool value = false;
    DerivationPtr why;
  };
  std::map<std::string, Node>& nodes() noexcept { return nodes_; }
  std::map<std::string, Attr>& attrs() noexcept { return attrs_; }
  std::vector<std::string>& warnings() noexcept { return warnings_; }

 private:
  Universe u_;
  std::map<std::string, Node> nodes_;
  std::map<std::string, Attr> attrs_;
  std::vector<std::string> warnings_;
  bool changed_ = false;
};

struct RuleImpl {
  Rule rule;
  std::function<void(Engine&)> apply;
};

/// Numbered rules followed by the auxiliary steps.
const std::vector<RuleImpl>& rule_impls();

/// Attribute presets and relations for a built-in model space id; false if the id is not a model.
bool apply_presets(Engine& engine, const std::string& space);
/// Adds model-space relations (e.g. F(S^d,2) ~ S^d) to the universe before propagation.
void preset_relations(Universe& u);

int saturating_add(int a, int b);
int saturating_mul(int a, int b);

}  // namespace confsec::bounds::detail
