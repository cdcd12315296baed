#pragma once

// Model spaces X, their points and metrics, configurations in F(X,k) and the
// forgetful projections pi_{k,r}: F(X,k) -> F(X,r).

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace confsec {

inline constexpr double kDefaultSeparation = 1e-9;

enum class SpaceKind { Sphere, RealProjective, Torus, Euclidean, Disc, WedgeS2S1, Discrete };
enum class Metric { Geodesic, Euclidean, QuotientGeodesic, BranchMetric, Discrete };

class SpaceDescriptor {
 public:
  static SpaceDescriptor sphere(int d);
  static SpaceDescriptor real_projective(int d);
  static SpaceDescriptor torus(int m);
  static SpaceDescriptor euclidean(int m);
  static SpaceDescriptor disc(int m);
  static SpaceDescriptor wedge();
  static SpaceDescriptor discrete(int n);

  /// Accepts "S2", "RP3", "T2", "R3", "D2", "S2vS1", "Discrete4".
  static SpaceDescriptor parse(std::string_view id);

  SpaceKind kind() const noexcept { return kind_; }
  int parameter() const noexcept { return parameter_; }
  int dim() const noexcept;
  bool hausdorff() const noexcept { return true; }
  bool boundaryless_manifold() const noexcept;
  Metric metric() const noexcept;
  std::string id() const;

  /// Length of the coordinate payload of a point.
  int coordinate_size() const noexcept;

  bool operator==(const SpaceDescriptor&) const = default;
  auto operator<=>(const SpaceDescriptor&) const = default;

 private:
  SpaceDescriptor(SpaceKind kind, int parameter) : kind_(kind), parameter_(parameter) {}

  SpaceKind kind_ = SpaceKind::Sphere;
  int parameter_ = 1;
};

std::string_view to_string(Metric metric);

enum class WedgeBranch { Sphere, Circle };

/// A canonical point of a model space.
///
/// Payloads: unit vector in R^{d+1} (sphere), unit vector with its first
/// nonzero coordinate positive (projective), angles in [0, 2pi) (torus), a real
/// vector (Euclidean, disc with norm <= 1), a unit vector in R^3 or a single
/// angle (wedge, by branch), an index stored as a double (discrete).
class SpacePoint {
 public:
  /// Canonicalizes the payload; throws InvalidArgument when it cannot be.
  SpacePoint(SpaceDescriptor space, Eigen::VectorXd coords,
             WedgeBranch branch = WedgeBranch::Sphere);

  static SpacePoint discrete(int n, int index);
  static SpacePoint wedge_circle(double angle);
  static SpacePoint wedge_sphere(const Eigen::Vector3d& v);
  static SpacePoint circle(double angle);  // on S^1

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  WedgeBranch branch() const noexcept { return branch_; }
  int index() const;  // discrete spaces only

  bool operator==(const SpacePoint& other) const;

 private:
  SpaceDescriptor space_;
  Eigen::VectorXd coords_;
  WedgeBranch branch_ = WedgeBranch::Sphere;
};

/// Idempotent canonical form (already applied by the SpacePoint constructor).
SpacePoint canonicalize(const SpacePoint& p);

double distance(const SpaceDescriptor& space, const SpacePoint& p, const SpacePoint& q);
double distance(const SpacePoint& p, const SpacePoint& q);

/// Deterministic samples for a fixed seed; uniform on spheres and tori.
std::vector<SpacePoint> sample(const SpaceDescriptor& space, std::uint64_t seed, std::size_t n);
SpacePoint sample_point(const SpaceDescriptor& space, std::mt19937_64& rng);

/// Point at parameter t along the unique shortest geodesic from p to q.
/// Throws AmbiguousGeodesic when the shortest geodesic is not unique.
SpacePoint geodesic_point(const SpaceDescriptor& space, const SpacePoint& p, const SpacePoint& q,
                          double t);

/// Random nearby point at distance at most `scale` (discrete points are returned unchanged).
SpacePoint jitter(const SpacePoint& p, double scale, std::mt19937_64& rng);

/// The wedge glue point (a0, b0), a0 = (1,0,0), b0 = (1,0), in its canonical circle form.
SpacePoint wedge_basepoint();

/// A point of F(X,k): k pairwise distinct points.
class Configuration {
 public:
  /// Throws InvalidArgument when the points are not pairwise separated by more than `separation`.
  Configuration(SpaceDescriptor space, std::vector<SpacePoint> points,
                double separation = kDefaultSeparation);

  /// No distinctness check; used to build deliberately faulty data.
  static Configuration unchecked(SpaceDescriptor space, std::vector<SpacePoint> points);

  const SpaceDescriptor& space() const noexcept { return space_; }
  int k() const noexcept { return static_cast<int>(points_.size()); }
  const std::vector<SpacePoint>& points() const noexcept { return points_; }
  const SpacePoint& operator[](std::size_t i) const { return points_[i]; }

  double min_separation() const;
  bool is_valid(double separation = kDefaultSeparation) const;

  bool operator==(const Configuration& other) const;

 private:
  Configuration() = default;

  SpaceDescriptor space_ = SpaceDescriptor::sphere(1);
  std::vector<SpacePoint> points_;
};

/// pi_{k,r}: keeps the first r points.
Configuration project(const Configuration& cfg, int r);

/// Max over coordinates of the point distances (the product sup-metric on X^k).
double configuration_distance(const Configuration& a, const Configuration& b);

/// Random configuration of r distinct points (rejection sampling).
Configuration sample_configuration(const SpaceDescriptor& space, int r, std::mt19937_64& rng,
                                   double separation = kDefaultSeparation);

/// Moves every point by at most `scale`, retrying until the result is a configuration.
Configuration jitter(const Configuration& cfg, double scale, std::mt19937_64& rng,
                     double separation = kDefaultSeparation);

}  // namespace confsec
