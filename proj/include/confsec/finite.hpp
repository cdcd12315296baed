#pragma once

// Finite topological spaces as posets with the Alexandrov topology: the open
// sets are the up-sets and continuous maps are exactly the monotone maps.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace confsec::finite {

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;
inline constexpr int kMaxPosetSize = 64;

using Mask = std::uint64_t;

class FinitePoset {
 public:
  /// Builds the reflexive-transitive closure of the given relations; throws
  /// InvalidArgument if the closure is not antisymmetric.
  static FinitePoset from_relations(int n, std::span<const std::pair<int, int>> leq);
  static FinitePoset antichain(int n);
  static FinitePoset chain(int n);
  /// Two minimal points below two maximal points: the four-point circle.
  static FinitePoset circle_model();

  int size() const noexcept { return n_; }
  bool leq(int i, int j) const noexcept { return (up_[i] >> j) & 1u; }
  Mask up_set(int i) const noexcept { return up_[i]; }
  Mask down_set(int i) const noexcept { return down_[i]; }
  Mask all() const noexcept { return n_ == 64 ? ~Mask{0} : ((Mask{1} << n_) - 1); }
  bool is_up_set(Mask m) const noexcept;
  /// All strict relations i < j, for serialization.
  std::vector<std::pair<int, int>> relations() const;

  bool operator==(const FinitePoset&) const = default;

 private:
  int n_ = 0;
  std::vector<Mask> up_;
  std::vector<Mask> down_;
};

/// values[i] is the image of point i.
using MapValues = std::vector<int>;

struct PosetMap {
  FinitePoset domain;
  FinitePoset codomain;
  MapValues values;

  bool is_monotone() const;
};

bool is_monotone(const FinitePoset& domain, const FinitePoset& codomain, const MapValues& values);

struct FppResult {
  bool has_fpp = true;
  std::optional<MapValues> witness;  // lexicographically least fixed-point-free monotone map
  std::uint64_t nodes = 0;
};

FppResult has_fpp(const FinitePoset& p, std::uint64_t budget = kDefaultBudget);

struct Config2 {
  FinitePoset poset;
  std::vector<std::pair<int, int>> pairs;  // element index -> ordered pair (x, y), x != y

  int index_of(int x, int y) const;
};

/// F(P,2) with the order induced from P x P.
Config2 config2(const FinitePoset& p);

enum class SecKind { Finite, ExceedsMax, Infinite };

struct SectionPiece {
  Mask open_set = 0;  // an up-set U
  MapValues g;        // g on U (entries outside U are -1); x -> (x, g(x)) is the local section
};

struct SecResult {
  SecKind kind = SecKind::Infinite;
  int value = 0;                   // meaningful for Finite
  bool theorem_applicable = true;  // false when F(P,2) is empty (n = 1)
  std::vector<SectionPiece> witnesses;
  std::uint64_t nodes = 0;

  std::string str() const;
};

/// Minimal number of open sets covering P, each admitting a continuous local
/// section of pi_{2,1}: F(P,2) -> P.
SecResult sec_pi21(const FinitePoset& p, int max_cover = 4, std::uint64_t budget = kDefaultBudget);

/// The local section x -> (x, g(x)) on U as indices into config2(p); verifies
/// continuity and the section identity. Returns nullopt if either fails.
std::optional<std::vector<int>> section_from_map(const FinitePoset& p, const Config2& f2, Mask open_set,
                                                 const MapValues& g);
/// Second coordinate of a global section given as config2 indices.
MapValues map_from_section(const Config2& f2, const std::vector<int>& section);

/// Stong-style homotopy: f and g lie in the same component of the poset of
/// monotone maps ordered pointwise.
bool homotopic(const FinitePoset& domain, const FinitePoset& codomain, const MapValues& f,
               const MapValues& g, std::uint64_t budget = kDefaultBudget);

/// All monotone maps homotopic to f.
std::vector<MapValues> homotopy_class(const FinitePoset& domain, const FinitePoset& codomain,
                                      const MapValues& f, std::uint64_t budget = kDefaultBudget);

/// MR[f,a]: minimum of |g^{-1}(a)| over g homotopic to f.
int mr_bruteforce(const FinitePoset& domain, const FinitePoset& codomain, const MapValues& f, int a,
                  std::uint64_t budget = kDefaultBudget);

/// All posets with n points, one per isomorphism class.
std::vector<FinitePoset> posets_up_to_isomorphism(int n);

}  // namespace confsec::finite
