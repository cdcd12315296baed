#include "confsec/selfmaps.hpp"

#include "confsec/error.hpp"
#include "confsec/kernels.hpp"
#include "confsec/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace confsec {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_group_space(const SpaceDescriptor& space) {
  switch (space.kind()) {
    case SpaceKind::Torus:
    case SpaceKind::Euclidean:
    case SpaceKind::Discrete: return true;
    case SpaceKind::Sphere: return space.parameter() == 1;
    default: return false;
  }
}

bool is_group_identity(const SpacePoint& g) {
  const auto& c = g.coords();
  switch (g.space().kind()) {
    case SpaceKind::Sphere: return c(0) == 1.0 && c(1) == 0.0;
    case SpaceKind::Torus:
    case SpaceKind::Euclidean: return c.isZero(0.0);
    case SpaceKind::Discrete: return g.index() == 0;
    default: return false;
  }
}

SpacePoint translate(const SpacePoint& g, const SpacePoint& p) {
  const SpaceDescriptor& space = p.space();
  switch (space.kind()) {
    case SpaceKind::Sphere: {
      // Complex multiplication on the unit circle.
      const auto& a = g.coords();
      const auto& b = p.coords();
      Eigen::VectorXd out(2);
      out << a(0) * b(0) - a(1) * b(1), a(0) * b(1) + a(1) * b(0);
      return {space, out};
    }
    case SpaceKind::Torus:
    case SpaceKind::Euclidean: return {space, Eigen::VectorXd(g.coords() + p.coords())};
    case SpaceKind::Discrete:
      return SpacePoint::discrete(space.parameter(), (g.index() + p.index()) % space.parameter());
    default: break;
  }
  throw Error(ErrorCode::MismatchedSpace, "group translation on " + space.id());
}

void require_space(const SelfMap& f, const SpacePoint& p) {
  if (!(p.space() == f.space())) {
    throw Error(ErrorCode::MismatchedSpace,
                f.name() + " applied to a point of " + p.space().id());
  }
}

}  // namespace

std::string_view to_string(Recipe recipe) {
  switch (recipe) {
    case Recipe::Identity: return "identity";
    case Recipe::Antipodal: return "antipodal";
    case Recipe::RPOddRotation: return "rp_odd_rotation";
    case Recipe::GroupTranslation: return "group_translation";
    case Recipe::WedgeShift: return "wedge_shift";
    case Recipe::VectorFieldFlow: return "vector_field_flow";
    case Recipe::Composite: return "composite";
  }
  return "?";
}

SelfMap SelfMap::identity(const SpaceDescriptor& space) { return {space, Recipe::Identity}; }

SelfMap SelfMap::antipodal(const SpaceDescriptor& space) {
  if (space.kind() != SpaceKind::Sphere) {
    throw Error(ErrorCode::MismatchedSpace, "antipodal map needs a sphere, got " + space.id());
  }
  return {space, Recipe::Antipodal};
}

SelfMap SelfMap::rp_odd_rotation(const SpaceDescriptor& space) {
  if (space.kind() != SpaceKind::RealProjective || space.parameter() % 2 == 0) {
    throw Error(ErrorCode::MismatchedSpace,
                "rp_odd_rotation needs an odd-dimensional projective space, got " + space.id());
  }
  return {space, Recipe::RPOddRotation};
}

SelfMap SelfMap::group_translation(const SpacePoint& g1) {
  if (!is_group_space(g1.space())) {
    throw Error(ErrorCode::MismatchedSpace, g1.space().id() + " is not a model group");
  }
  if (is_group_identity(g1)) {
    throw Error(ErrorCode::InvalidArgument, "group translation by the identity element");
  }
  SelfMap f(g1.space(), Recipe::GroupTranslation);
  f.translation_ = g1;
  return f;
}

SelfMap SelfMap::wedge_shift() { return {SpaceDescriptor::wedge(), Recipe::WedgeShift}; }

SelfMap SelfMap::vector_field_flow(const SpaceDescriptor& space, double epsilon) {
  if (space.kind() != SpaceKind::Sphere || space.parameter() % 2 == 0) {
    throw Error(ErrorCode::MismatchedSpace,
                "the rotation field exists on odd spheres only, got " + space.id());
  }
  if (!(epsilon > 0.0 && epsilon <= kPi)) {
    throw Error(ErrorCode::InvalidArgument, "flow time must lie in (0, pi]");
  }
  SelfMap f(space, Recipe::VectorFieldFlow);
  f.epsilon_ = epsilon;
  return f;
}

SelfMap SelfMap::composite(std::vector<SelfMap> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "empty composite");
  for (const auto& p : parts) {
    if (!(p.space() == parts.front().space())) {
      throw Error(ErrorCode::MismatchedSpace, "composite parts live on different spaces");
    }
  }
  SelfMap f(parts.front().space(), Recipe::Composite);
  f.parts_ = std::move(parts);
  return f;
}

SpacePoint SelfMap::operator()(const SpacePoint& p) const {
  require_space(*this, p);
  switch (recipe_) {
    case Recipe::Identity: return p;
    case Recipe::Antipodal: return {space_, Eigen::VectorXd(-p.coords())};
    case Recipe::RPOddRotation: return {space_, kernels::pair_rotation(p.coords())};
    case Recipe::GroupTranslation: return translate(*translation_, p);
    case Recipe::WedgeShift: {
      if (p.branch() == WedgeBranch::Sphere) {
        return SpacePoint::wedge_circle(wedge_gamma_angle(p.coords()(0)));
      }
      return SpacePoint::wedge_circle(p.coords()(0) + kPi);
    }
    case Recipe::VectorFieldFlow: {
      Eigen::VectorXd v = std::cos(epsilon_) * p.coords() + std::sin(epsilon_) * kernels::pair_rotation(p.coords());
      return {space_, v};
    }
    case Recipe::Composite: {
      SpacePoint x = p;
      for (const auto& part : parts_) x = part(x);
      return x;
    }
  }
  return p;
}

bool SelfMap::fixed_point_free() const {
  switch (recipe_) {
    case Recipe::Identity:
    case Recipe::Composite: return false;
    default: return true;
  }
}

std::string SelfMap::name() const {
  std::string out(to_string(recipe_));
  out += "@" + space_.id();
  return out;
}

SpacePoint evaluate(const SelfMap& f, const SpacePoint& p) { return f(p); }

double wedge_gamma_angle(double a1) { return kPi * (a1 + 1.0) / 2.0; }

double fixed_point_gap(const SelfMap& f, std::uint64_t seed, std::size_t n, int threads) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const auto points = sample(f.space(), seed, n);
  const int t = resolve_threads(threads);
  std::vector<double> partial(static_cast<std::size_t>(std::max(1, t)),
                              std::numeric_limits<double>::infinity());
  parallel_chunks(points.size(), t, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = b; i < e; ++i) best = std::min(best, distance(points[i], f(points[i])));
    partial[chunk] = best;
  });
  double best = std::numeric_limits<double>::infinity();
  for (double v : partial) best = std::min(best, v);
  return best;
}

NoncoincidenceResult are_noncoincident(std::span<const SelfMap> maps, std::uint64_t seed,
                                       std::size_t n, double separation) {
  if (maps.empty()) throw Error(ErrorCode::InvalidArgument, "empty map family");
  for (const auto& f : maps) {
    if (!(f.space() == maps.front().space())) {
      throw Error(ErrorCode::MismatchedSpace, "maps live on different spaces");
    }
  }
  NoncoincidenceResult result;
  result.min_distance = std::numeric_limits<double>::infinity();
  const auto points = sample(maps.front().space(), seed, n);
  for (const auto& x : points) {
    std::vector<SpacePoint> images;
    images.reserve(maps.size());
    for (const auto& f : maps) images.push_back(f(x));
    for (std::size_t i = 0; i < images.size(); ++i) {
      for (std::size_t j = i + 1; j < images.size(); ++j) {
        const double d = distance(images[i], images[j]);
        if (d < result.min_distance) {
          result.min_distance = d;
          result.witness = CoincidenceWitness{x, i, j, d, seed};
        }
      }
    }
  }
  result.noncoincident = result.min_distance > separation;
  return result;
}

std::vector<CatalogEntry> catalog() {
  return {
      {"identity", "any", false, true, "has every point fixed"},
      {"antipodal", "S^d", true, true, "x -> -x"},
      {"rp_odd_rotation", "RP^{2n+1}", true, true, "[x:y] -> [-y:x] coordinate pairs"},
      {"group_translation", "S1, T^m, R^m, Discrete(n)", true, true, "g -> g1 g, g1 != e"},
      {"wedge_shift", "S2vS1", true, true, "sphere -> gamma(a1) on the circle, circle -> antipode"},
      {"vector_field_flow", "S^{2n+1}", true, true, "flow of x -> Jx for time epsilon"},
      {"composite", "any", false, true, "composition of recipes; fixed points not certified"},
      {"cp_odd_rotation", "CP^{2n+1}", true, false, "complex analogue, not implemented"},
      {"hp_odd_rotation", "HP^{2n+1}", true, false, "quaternionic analogue, not implemented"},
  };
}

std::optional<SelfMap> fixed_point_free_map(const SpaceDescriptor& space) {
  switch (space.kind()) {
    case SpaceKind::Sphere: return SelfMap::antipodal(space);
    case SpaceKind::RealProjective:
      if (space.parameter() % 2 == 1) return SelfMap::rp_odd_rotation(space);
      return std::nullopt;
    case SpaceKind::Torus: {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(space.parameter());
      g(0) = kPi;
      return SelfMap::group_translation(SpacePoint(space, g));
    }
    case SpaceKind::Euclidean: {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(space.parameter());
      g(0) = 1.0;
      return SelfMap::group_translation(SpacePoint(space, g));
    }
    case SpaceKind::Discrete:
      if (space.parameter() >= 2) return SelfMap::group_translation(SpacePoint::discrete(space.parameter(), 1));
      return std::nullopt;
    case SpaceKind::WedgeS2S1: return SelfMap::wedge_shift();
    case SpaceKind::Disc: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace confsec
