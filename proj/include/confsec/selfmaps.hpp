#pragma once

#include "confsec/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace confsec {

enum class Recipe {
  Identity,
  Antipodal,
  RPOddRotation,
  GroupTranslation,
  WedgeShift,
  VectorFieldFlow,
  Composite,
};

std::string_view to_string(Recipe recipe);

/// A named continuous self-map of a model space.
class SelfMap {
 public:
  static SelfMap identity(const SpaceDescriptor& space);
  /// x -> -x on S^d.
  static SelfMap antipodal(const SpaceDescriptor& space);
  /// [x1:y1:...:xn:yn] -> [-y1:x1:...:-yn:xn] on RP^{2n-1}.
  static SelfMap rp_odd_rotation(const SpaceDescriptor& space);
  /// g -> g1 g on S^1, T^m, R^m or the cyclic group Discrete(n); g1 must not be the identity.
  static SelfMap group_translation(const SpacePoint& g1);
  /// The fixed-point-free map of S^2 v S^1: the sphere branch goes to gamma(a_1)
  /// on the circle, the circle branch is b -> -b.
  static SelfMap wedge_shift();
  /// Time-epsilon flow of the field x -> Jx on an odd sphere, epsilon in (0, pi].
  static SelfMap vector_field_flow(const SpaceDescriptor& space, double epsilon);
  /// parts[0] is applied first.
  static SelfMap composite(std::vector<SelfMap> parts);

  SpacePoint operator()(const SpacePoint& p) const;

  const SpaceDescriptor& space() const noexcept { return space_; }
  Recipe recipe() const noexcept { return recipe_; }
  const std::optional<SpacePoint>& translation() const noexcept { return translation_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::vector<SelfMap>& parts() const noexcept { return parts_; }

  /// Catalog status: true for recipes known to have no fixed point.
  bool fixed_point_free() const;
  std::string name() const;

 private:
  SelfMap(SpaceDescriptor space, Recipe recipe) : space_(space), recipe_(recipe) {}

  SpaceDescriptor space_;
  Recipe recipe_;
  std::optional<SpacePoint> translation_;
  double epsilon_ = 0.0;
  std::vector<SelfMap> parts_;
};

SpacePoint evaluate(const SelfMap& f, const SpacePoint& p);

/// The path gamma: [-1,1] -> S^1 from b0 to -b0 used by the wedge map, as an angle.
double wedge_gamma_angle(double a1);

/// min over n sampled points of distance(p, f(p)).
double fixed_point_gap(const SelfMap& f, std::uint64_t seed, std::size_t n, int threads = 1);

struct CoincidenceWitness {
  SpacePoint x;
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
  std::uint64_t seed = 0;
};

struct NoncoincidenceResult {
  bool noncoincident = true;
  double min_distance = 0.0;
  std::optional<CoincidenceWitness> witness;  // the minimizing (x, i, j)
};

/// Checks f_i(x) != f_j(x) for all i < j on a sample; verified on the sample only.
NoncoincidenceResult are_noncoincident(std::span<const SelfMap> maps, std::uint64_t seed,
                                       std::size_t n, double separation = kDefaultSeparation);

/// Mapping degree of a self-map of S^1 (winding number) or S^2 (signed
/// preimage count of a regular value on a geodesic triangulation).
int degree(const SelfMap& f);

struct CatalogEntry {
  std::string recipe;
  std::string spaces;
  bool fixed_point_free = false;
  bool supported = true;
  std::string note;
};

/// Every recipe, including listed-but-unsupported complex/quaternionic analogues.
std::vector<CatalogEntry> catalog();

/// A catalog fixed-point-free self-map of the space, when one exists.
std::optional<SelfMap> fixed_point_free_map(const SpaceDescriptor& space);

}  // namespace confsec
