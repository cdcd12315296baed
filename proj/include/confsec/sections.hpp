#pragma once

// Explicit local sections of pi_{k,r}: F(X,k) -> F(X,r) and covers made of them.

#include "confsec/bounds.hpp"
#include "confsec/finite.hpp"
#include "confsec/geometry.hpp"
#include "confsec/report.hpp"
#include "confsec/selfmaps.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace confsec {

struct ProjectionId {
  SpaceDescriptor space = SpaceDescriptor::sphere(1);
  int k = 2;
  int r = 1;

  /// Throws InvalidArgument unless k > r >= 1.
  static ProjectionId make(const SpaceDescriptor& space, int k, int r);
  std::string str() const;  // "pi(3,1,S2)"
  bool operator==(const ProjectionId&) const = default;
};

/// A section of pi_{k,r} over the open set of r-tuples whose points all stay
/// more than `separation` away from the excluded points.
class LocalSection {
 public:
  using Map = std::function<Configuration(const Configuration&)>;

  LocalSection(ProjectionId projection, std::vector<SpacePoint> excluded, Map map, std::string name,
               double separation = kDefaultSeparation);

  const ProjectionId& projection() const noexcept { return projection_; }
  const std::vector<SpacePoint>& excluded() const noexcept { return excluded_; }
  const std::string& name() const noexcept { return name_; }
  double separation() const noexcept { return separation_; }
  bool global() const noexcept { return excluded_.empty(); }

  bool contains(const Configuration& x) const;
  /// s(x); throws InvalidArgument outside the region.
  Configuration operator()(const Configuration& x) const;
  /// s(x) without the membership check.
  Configuration apply(const Configuration& x) const { return map_(x); }

 private:
  ProjectionId projection_;
  std::vector<SpacePoint> excluded_;
  Map map_;
  std::string name_;
  double separation_;
};

struct SectionCover {
  ProjectionId projection;
  std::vector<LocalSection> pieces;
  bool claims_cover = true;
};

/// sample(space, seed 0, k), or points 0..k-1 of Discrete(n); throws when the points are not pairwise separated.
std::vector<SpacePoint> default_basepoints(const SpaceDescriptor& space, int k);

/// U_i = X - {p_j : j != i}, s_i(x) = (x, p_1, .., p_{i-1}, p_{i+1}, .., p_k).
SectionCover key_lemma_cover(const SpaceDescriptor& space, int k, std::span<const SpacePoint> basepoints);
/// One piece per r-subset I of {1..k}: r-tuples avoiding the points outside I,
/// s_I(x) = (x_1, .., x_r, p_j for j not in I, in increasing order).
SectionCover binomial_cover(const SpaceDescriptor& space, int k, int r, std::span<const SpacePoint> basepoints);

struct FamilyCheck {
  std::uint64_t seed = 0;
  std::size_t samples = 2000;
};

/// Global section x -> (x, f_2(x), .., f_k(x)) of pi_{k,1}. Throws CoincidenceDetected
/// when two of id, f_2, .., f_k agree (to within the separation) on the sample.
LocalSection from_fpf_family(std::span<const SelfMap> fs, const FamilyCheck& check = {});
/// sigma(x) = (x, -x) on S^d.
LocalSection sphere_sigma(int d);
/// g -> (g, g_1 g, .., g_{k-1} g) with g_j the translation by j/k of a turn
/// (circle, torus), by j e_1 (Euclidean) or by j (cyclic Discrete(n), k <= n).
LocalSection group_section(const SpaceDescriptor& space, int k);
/// x -> first m coordinates of s(x), a section of pi_{m,1}; m = k returns s.
LocalSection drop_points(const LocalSection& s, int m);

SectionCover single_piece_cover(LocalSection s);

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t samples = 10'000;
  int threads = 1;
  double identity_tolerance = 1e-12;
  double separation = kDefaultSeparation;
  double probe_radius = 1e-3;
  double continuity_limit = 100.0;
};

/// Checks "coverage" (when claimed), "identity_error", "min_separation" and
/// "continuity_ratio" on random base configurations plus configurations placed
/// at the excluded points.
VerificationReport verify_cover(const SectionCover& cover, const VerifyOptions& options = {});

/// A named cover: "key-lemma", "binomial", "sigma", "group", "fpf".
SectionCover cover_from_recipe(std::string_view recipe, const SpaceDescriptor& space, int k, int r = 1);

enum class Answer { Yes, No, Unknown };
enum class Sec21 { One, Two, Infinite, Unknown };

std::string_view to_string(Answer a);
std::string_view to_string(Sec21 s);

struct FppVerdict {
  Answer fpp = Answer::Unknown;
  Sec21 sec21 = Sec21::Unknown;
  bool theorem_applicable = true;  // false when F(X,2) is empty
  std::optional<LocalSection> witness;
  std::optional<finite::MapValues> finite_witness;  // Discrete(n): fixed-point-free map from the exhaustive search
  std::string reason;
};

/// FPP and sec(pi_{2,1}) of a model space. A "yes" only comes from exhaustive
/// search on finite models or from an FPP fact in the store.
FppVerdict fpp_verdict(const SpaceDescriptor& space, const bounds::FactStore* store = nullptr);

}  // namespace confsec
