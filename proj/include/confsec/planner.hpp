#pragma once

// (k,r) motion planners: every region moves the whole configuration along a
// path of isometries, so pairwise distances never change and robots never collide.

#include "confsec/bounds.hpp"
#include "confsec/geometry.hpp"
#include "confsec/report.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace confsec {

inline constexpr double kDefaultDensity = 256.0;  // samples per unit of path length
inline constexpr double kRegionMargin = 0.3;      // radians kept away from each region's excluded set

struct PlanQuery {
  Configuration start;  // in F(X,k)
  Configuration goal;   // in F(X,r)

  /// Throws InvalidArgument unless both are valid configurations of one space with r <= k.
  static PlanQuery make(Configuration start, Configuration goal);
  const SpaceDescriptor& space() const noexcept { return start.space(); }
  int k() const noexcept { return start.k(); }
  int r() const noexcept { return goal.k(); }
};

/// One isometry segment: a rotation (spheres; angle about axis for S^2, planar for S^1)
/// or a translation of the angle/coordinate vector (tori, Euclidean space).
struct RigidMove {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
  Eigen::VectorXd shift;

  double length() const;
};

struct MotionPlan {
  std::string planner;  // "circle21", "sphere21", "group", or "" for hand-built plans
  int region_id = 0;
  int region_count = 0;
  SpaceDescriptor space = SpaceDescriptor::sphere(1);
  Configuration start = Configuration::unchecked(SpaceDescriptor::sphere(1), {});
  std::vector<RigidMove> moves;
  std::vector<std::pair<double, Configuration>> samples;
  std::uint64_t seed = 0;
  double density = kDefaultDensity;

  /// Position at time t in [0,1], moves traversed at constant speed.
  Configuration at(double t) const;
  double length() const;
};

class Planner {
 public:
  /// S^1, k = 2: region 1 turns by the shorter signed angle, region 2 by the counterclockwise angle.
  static Planner circle21();
  /// S^2, k = 2: three regions built from rotations about a1 x goal, a1 x e and a fixed equatorial axis.
  static Planner sphere21();
  /// S^1, T^m or R^m, any k, r = 1: one region per choice of short/counterclockwise turn in
  /// each angle (2^m regions on T^m, 1 on R^m).
  static Planner group(const SpaceDescriptor& space);
  /// Planner for a (space, k, r) problem; throws Unsupported when none is shipped.
  static Planner for_problem(const SpaceDescriptor& space, int k, int r);
  static Planner by_name(const std::string& name, const SpaceDescriptor& space);

  const std::string& name() const noexcept { return name_; }
  const SpaceDescriptor& space() const noexcept { return space_; }
  int region_count() const noexcept { return regions_; }

  bool in_region(int region, const PlanQuery& q) const;
  /// Lowest-numbered region whose predicate holds; DegenerateQuery if none does.
  int region_of(const PlanQuery& q) const;

  MotionPlan plan(const PlanQuery& q, double density = kDefaultDensity) const;
  /// Plan using a given region; InvalidArgument if the query is outside it.
  MotionPlan plan_in_region(const PlanQuery& q, int region, double density = kDefaultDensity) const;

 private:
  Planner(std::string name, SpaceDescriptor space, int regions)
      : name_(std::move(name)), space_(space), regions_(regions) {}

  void check(const PlanQuery& q) const;
  std::vector<RigidMove> moves(const PlanQuery& q, int region) const;

  std::string name_;
  SpaceDescriptor space_;
  int regions_;
};

MotionPlan plan_circle_21(const PlanQuery& q);
MotionPlan plan_sphere2_21(const PlanQuery& q);
MotionPlan plan_group(const PlanQuery& q);

/// Applies the composite isometry of the moves (fraction `t` of the total) to a configuration.
Configuration apply_moves(const SpaceDescriptor& space, const std::vector<RigidMove>& moves,
                          const Configuration& cfg, double t = 1.0);

struct PlanVerifyOptions {
  std::uint64_t seed = 0;
  double endpoint_tolerance = 1e-9;
  double rigid_tolerance = 1e-9;
  double separation = kDefaultSeparation;
  double perturbation = 1e-3;
  double continuity_limit = 100.0;
  int probes = 4;
  int probe_grid = 129;
  bool rigid = true;
};

/// "endpoint_error", "start_error", "min_separation", "rigid_drift", "max_step"
/// (consecutive samples, against 4 / density) and, for named planners,
/// "continuity_ratio" over perturbed queries in the same region.
VerificationReport verify_plan(const MotionPlan& plan, const PlanQuery& q, const PlanVerifyOptions& options = {});

struct Optimality {
  int regions = 0;
  bounds::Interval tc;
  std::string status;  // "optimal", "not optimal", "unknown"
};

/// Compares the planner's region count with TC(pi(k,r,X)) from the store.
Optimality assess_optimality(const Planner& planner, int k, int r, const bounds::FactStore& store);

struct BatchItem {
  PlanQuery query;
  MotionPlan plan;
  VerificationReport report;
};

/// Plans and verifies every query; results are in input order for any thread count.
std::vector<BatchItem> plan_batch(const std::vector<PlanQuery>& queries, int threads = 1,
                                  const PlanVerifyOptions& options = {}, double density = kDefaultDensity);

/// Random query: start from sample_configuration, goal from sample_configuration(r).
PlanQuery random_query(const SpaceDescriptor& space, int k, int r, std::uint64_t seed);

/// Rows "t,robot,c0,c1,..." for every sample and robot.
std::string trajectory_csv(const MotionPlan& plan);

}  // namespace confsec
