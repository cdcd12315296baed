#include "confsec/planner.hpp"

#include "confsec/error.hpp"
#include "confsec/kernels.hpp"
#include "confsec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace confsec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleNeighborhood = kRegionMargin + 0.1;

const Eigen::Vector3d kPole = Eigen::Vector3d::UnitZ();
const Eigen::Vector3d kTilt = Eigen::Vector3d::UnitX();  // region 3 first turns by pi/2 about this axis

double angle_of(const SpacePoint& p) { return std::atan2(p.coords()(1), p.coords()(0)); }

Eigen::Vector3d vec3(const SpacePoint& p) { return p.coords().head<3>(); }

SpacePoint sphere_point(const Eigen::Vector3d& v) { return {SpaceDescriptor::sphere(2), Eigen::VectorXd(v)}; }

double gap3(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return kernels::great_circle_angle(a, b); }

double pole_distance(const Eigen::Vector3d& a) { return std::min(gap3(a, kPole), gap3(a, -kPole)); }

Eigen::Vector3d tilt(const Eigen::Vector3d& a) { return kernels::axis_rotation<double>(kTilt, kPi / 2) * a; }

/// Minimal rotation taking a to b; empty when a == b.
std::vector<RigidMove> shortest_turn(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d w = a.cross(b);
  const double s = w.norm();
  if (s < 1e-300) return {};
  RigidMove m;
  m.axis = w / s;
  m.angle = gap3(a, b);
  return {m};
}

/// Rotation by pi taking a to -a about an axis orthogonal to a and the pole.
RigidMove flip(const Eigen::Vector3d& a) {
  RigidMove m;
  m.axis = a.cross(kPole).normalized();
  m.angle = kPi;
  return m;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double RigidMove::length() const { return shift.size() ? shift.norm() : std::abs(angle); }

PlanQuery PlanQuery::make(Configuration start, Configuration goal) {
  if (!(start.space() == goal.space())) throw Error(ErrorCode::MismatchedSpace, "start and goal spaces differ");
  if (goal.k() < 1 || goal.k() > start.k()) throw Error(ErrorCode::InvalidArgument, "need 1 <= r <= k");
  if (!start.is_valid()) throw Error(ErrorCode::InvalidArgument, "start is not a configuration (points collide)");
  if (!goal.is_valid()) throw Error(ErrorCode::InvalidArgument, "goal is not a configuration (points collide)");
  return {std::move(start), std::move(goal)};
}

Configuration apply_moves(const SpaceDescriptor& space, const std::vector<RigidMove>& moves, const Configuration& cfg,
                          double t) {
  double total = 0.0;
  for (const auto& m : moves) total += m.length();
  double budget = std::clamp(t, 0.0, 1.0) * total;
  // Fraction of each move that is traversed by time t.
  std::vector<double> frac;
  for (const auto& m : moves) {
    const double len = m.length();
    const double used = len > 0 ? std::min(budget, len) : 0.0;
    frac.push_back(len > 0 ? used / len : (t >= 1.0 ? 1.0 : 0.0));
    budget -= used;
  }
  std::vector<SpacePoint> pts;
  pts.reserve(cfg.points().size());
  switch (space.kind()) {
    case SpaceKind::Sphere: {
      if (space.parameter() == 1) {
        double turn = 0.0;
        for (std::size_t i = 0; i < moves.size(); ++i) turn += frac[i] * moves[i].angle;
        const double c = std::cos(turn), s = std::sin(turn);
        for (const auto& p : cfg.points()) {
          Eigen::VectorXd v(2);
          v << c * p.coords()(0) - s * p.coords()(1), s * p.coords()(0) + c * p.coords()(1);
          pts.emplace_back(space, v);
        }
      } else if (space.parameter() == 2) {
        Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
        for (std::size_t i = 0; i < moves.size(); ++i) {
          rot = kernels::axis_rotation<double>(moves[i].axis, frac[i] * moves[i].angle) * rot;
        }
        for (const auto& p : cfg.points()) pts.push_back(sphere_point(rot * vec3(p)));
      } else {
        throw Error(ErrorCode::Unsupported, "rigid moves on " + space.id());
      }
      break;
    }
    case SpaceKind::Torus:
    case SpaceKind::Euclidean: {
      Eigen::VectorXd shift = Eigen::VectorXd::Zero(space.parameter());
      for (std::size_t i = 0; i < moves.size(); ++i) shift += frac[i] * moves[i].shift;
      for (const auto& p : cfg.points()) pts.emplace_back(space, Eigen::VectorXd(p.coords() + shift));
      break;
    }
    default: throw Error(ErrorCode::Unsupported, "rigid moves on " + space.id());
  }
  return Configuration::unchecked(space, std::move(pts));
}

Configuration MotionPlan::at(double t) const { return apply_moves(space, moves, start, t); }

double MotionPlan::length() const {
  double total = 0.0;
  for (const auto& m : moves) total += m.length();
  return total;
}

// ---------------------------------------------------------------------------
// Planners

Planner Planner::circle21() { return {"circle21", SpaceDescriptor::sphere(1), 2}; }
Planner Planner::sphere21() { return {"sphere21", SpaceDescriptor::sphere(2), 3}; }

Planner Planner::group(const SpaceDescriptor& space) {
  switch (space.kind()) {
    case SpaceKind::Sphere:
      if (space.parameter() == 1) return {"group", space, 2};
      break;
    case SpaceKind::Torus:
      if (space.parameter() > 20) throw Error(ErrorCode::Unsupported, "torus dimension too large");
      return {"group", space, 1 << space.parameter()};
    case SpaceKind::Euclidean: return {"group", space, 1};
    default: break;
  }
  throw Error(ErrorCode::Unsupported, space.id() + " has no group planner");
}

Planner Planner::for_problem(const SpaceDescriptor& space, int k, int r) {
  if (r != 1) throw Error(ErrorCode::Unsupported, "shipped planners solve (k,1) problems");
  if (space == SpaceDescriptor::sphere(1) && k == 2) return circle21();
  if (space == SpaceDescriptor::sphere(2)) {
    if (k == 2) return sphere21();
    throw Error(ErrorCode::Unsupported, "pi(k,1,S2) has no section for k >= 3, so no rigid planner is shipped");
  }
  return group(space);
}

Planner Planner::by_name(const std::string& name, const SpaceDescriptor& space) {
  if (name == "circle21") return circle21();
  if (name == "sphere21") return sphere21();
  if (name == "group") return group(space);
  throw Error(ErrorCode::InvalidArgument, "unknown planner '" + name + "'");
}

void Planner::check(const PlanQuery& q) const {
  if (!(q.space() == space_)) throw Error(ErrorCode::MismatchedSpace, name_ + " plans on " + space_.id());
  if (q.r() != 1) throw Error(ErrorCode::InvalidArgument, name_ + " solves (k,1) problems");
  if ((name_ == "circle21" || name_ == "sphere21") && q.k() != 2) {
    throw Error(ErrorCode::InvalidArgument, name_ + " needs k = 2");
  }
}

bool Planner::in_region(int region, const PlanQuery& q) const {
  check(q);
  if (region < 1 || region > regions_) return false;
  const SpacePoint& a = q.start[0];
  const SpacePoint& g = q.goal[0];
  if (space_.kind() == SpaceKind::Sphere && space_.parameter() == 1) {
    const double alpha = angle_of(a), gamma = angle_of(g);
    return region == 1 ? kernels::circle_gap(gamma, alpha + kPi) > kRegionMargin
                       : kernels::circle_gap(gamma, alpha) > kRegionMargin;
  }
  if (name_ == "sphere21") {
    const Eigen::Vector3d a3 = vec3(a), g3 = vec3(g);
    switch (region) {
      case 1: return gap3(g3, -a3) > kRegionMargin;
      case 2: return pole_distance(a3) > kRegionMargin && gap3(g3, a3) > kRegionMargin;
      case 3: return pole_distance(a3) < kPoleNeighborhood && gap3(g3, tilt(a3)) > kRegionMargin;
    }
    return false;
  }
  if (space_.kind() == SpaceKind::Torus) {
    const int bits = region - 1;
    for (int i = 0; i < space_.parameter(); ++i) {
      const double alpha = a.coords()(i), gamma = g.coords()(i);
      const bool ccw = (bits >> i) & 1;
      const double gap = ccw ? kernels::circle_gap(gamma, alpha) : kernels::circle_gap(gamma, alpha + kPi);
      if (!(gap > kRegionMargin)) return false;
    }
    return true;
  }
  return region == 1;  // Euclidean
}

int Planner::region_of(const PlanQuery& q) const {
  for (int region = 1; region <= regions_; ++region) {
    if (in_region(region, q)) return region;
  }
  throw Error(ErrorCode::DegenerateQuery, "query lies in no region of " + name_);
}

std::vector<RigidMove> Planner::moves(const PlanQuery& q, int region) const {
  const SpacePoint& a = q.start[0];
  const SpacePoint& g = q.goal[0];
  if (space_.kind() == SpaceKind::Sphere && space_.parameter() == 1) {
    const double alpha = angle_of(a), gamma = angle_of(g);
    RigidMove m;
    m.angle = region == 1 ? kernels::signed_angle_difference(alpha, gamma) : kernels::wrap_angle(gamma - alpha);
    if (m.angle == 0.0) return {};
    return {m};
  }
  if (name_ == "sphere21") {
    const Eigen::Vector3d a3 = vec3(a), g3 = vec3(g);
    if (region == 1) return shortest_turn(a3, g3);
    std::vector<RigidMove> out;
    Eigen::Vector3d from = a3;
    if (region == 3) {
      RigidMove t;
      t.axis = kTilt;
      t.angle = kPi / 2;
      out.push_back(t);
      from = tilt(a3);
    }
    out.push_back(flip(from));
    for (auto& m : shortest_turn(-from, g3)) out.push_back(m);
    return out;
  }
  RigidMove m;
  if (space_.kind() == SpaceKind::Torus) {
    m.shift.resize(space_.parameter());
    for (int i = 0; i < space_.parameter(); ++i) {
      const double alpha = a.coords()(i), gamma = g.coords()(i);
      m.shift(i) = ((region - 1) >> i) & 1 ? kernels::wrap_angle(gamma - alpha)
                                           : kernels::signed_angle_difference(alpha, gamma);
    }
  } else {
    m.shift = g.coords() - a.coords();
  }
  if (m.shift.norm() == 0.0) return {};
  return {m};
}

MotionPlan Planner::plan(const PlanQuery& q, double density) const { return plan_in_region(q, region_of(q), density); }

MotionPlan Planner::plan_in_region(const PlanQuery& q, int region, double density) const {
  if (!in_region(region, q)) {
    throw Error(ErrorCode::InvalidArgument, "query outside region " + std::to_string(region) + " of " + name_);
  }
  if (!(density > 0)) throw Error(ErrorCode::InvalidArgument, "sample density must be positive");
  MotionPlan plan;
  plan.planner = name_;
  plan.region_id = region;
  plan.region_count = regions_;
  plan.space = space_;
  plan.start = q.start;
  plan.moves = moves(q, region);
  plan.density = density;
  const int steps = std::max(1, static_cast<int>(std::ceil(density * plan.length())));
  plan.samples.reserve(steps + 1);
  plan.samples.emplace_back(0.0, q.start);
  for (int i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    plan.samples.emplace_back(t, plan.at(t));
  }
  return plan;
}

MotionPlan plan_circle_21(const PlanQuery& q) { return Planner::circle21().plan(q); }
MotionPlan plan_sphere2_21(const PlanQuery& q) { return Planner::sphere21().plan(q); }
MotionPlan plan_group(const PlanQuery& q) { return Planner::group(q.space()).plan(q); }

// ---------------------------------------------------------------------------
// Verification

VerificationReport verify_plan(const MotionPlan& plan, const PlanQuery& q, const PlanVerifyOptions& options) {
  VerificationReport report;
  report.subject = "plan " + (plan.planner.empty() ? std::string("(hand-built)") : plan.planner) + " region " +
                   std::to_string(plan.region_id);
  if (plan.samples.empty()) {
    report.add("samples", 0, Relation::GreaterEqual, 2);
    return report;
  }
  const auto& first = plan.samples.front().second;
  const auto& last = plan.samples.back().second;
  const double start_error = first.k() == q.k() ? configuration_distance(first, q.start)
                                                : std::numeric_limits<double>::infinity();
  const double end_error = last.k() >= q.r() ? configuration_distance(project(last, q.r()), q.goal)
                                             : std::numeric_limits<double>::infinity();
  report.add("start_error", start_error, Relation::LessEqual, options.endpoint_tolerance);
  report.add("endpoint_error", end_error, Relation::LessEqual, options.endpoint_tolerance);

  double min_sep = std::numeric_limits<double>::infinity();
  double drift = 0.0;
  double step = 0.0;
  const int k = q.k();
  std::vector<double> d0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) d0.push_back(distance(q.start[i], q.start[j]));
  }
  for (std::size_t s = 0; s < plan.samples.size(); ++s) {
    const auto& c = plan.samples[s].second;
    min_sep = std::min(min_sep, c.min_separation());
    if (s > 0) step = std::max(step, configuration_distance(plan.samples[s - 1].second, c));
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) drift = std::max(drift, std::abs(distance(c[i], c[j]) - d0[idx++]));
    }
  }
  report.add("min_separation", min_sep, Relation::Greater, options.separation);
  if (options.rigid) report.add("rigid_drift", drift, Relation::LessEqual, options.rigid_tolerance);
  report.add("max_step", step, Relation::LessEqual, 4.0 / plan.density);

  if (!plan.planner.empty()) {
    const Planner planner = Planner::by_name(plan.planner, plan.space);
    double ratio = 0.0;
    int probes = 0;
    for (int p = 0; p < options.probes; ++p) {
      std::mt19937_64 rng(stream_seed(options.seed, static_cast<std::uint64_t>(p)));
      for (int attempt = 0; attempt < 20; ++attempt) {
        const Configuration s2 = jitter(q.start, options.perturbation, rng);
        const Configuration g2 = jitter(q.goal, options.perturbation, rng);
        const double eps = std::max(configuration_distance(s2, q.start), configuration_distance(g2, q.goal));
        if (!(eps > 0) || eps > options.perturbation) continue;
        const PlanQuery q2{s2, g2};
        if (!planner.in_region(plan.region_id, q2)) continue;
        const MotionPlan other = planner.plan_in_region(q2, plan.region_id, plan.density);
        double sup = 0.0;
        for (int i = 0; i < options.probe_grid; ++i) {
          const double t = static_cast<double>(i) / (options.probe_grid - 1);
          sup = std::max(sup, configuration_distance(plan.at(t), other.at(t)));
        }
        ratio = std::max(ratio, sup / eps);
        ++probes;
        break;
      }
    }
    report.add("continuity_ratio", ratio, Relation::LessEqual, options.continuity_limit);
    report.details["continuity_probes"] = probes;
  }
  report.details["samples"] = plan.samples.size();
  report.details["region_id"] = plan.region_id;
  report.details["region_count"] = plan.region_count;
  report.details["length"] = plan.length();
  return report;
}

Optimality assess_optimality(const Planner& planner, int k, int r, const bounds::FactStore& store) {
  Optimality o;
  o.regions = planner.region_count();
  o.tc = store.query(bounds::Quantity::parse("TC(" + bounds::projection_id(k, r, planner.space().id()) + ")")).interval;
  if (o.regions < o.tc.lo) {
    throw Error(ErrorCode::Contradiction, planner.name() + " uses " + std::to_string(o.regions) +
                                              " regions, below the lower bound " + o.tc.str());
  }
  // A planner with tc.lo regions is itself the missing upper bound.
  if (o.regions == o.tc.lo) {
    o.status = "optimal";
  } else if (o.regions > o.tc.hi) {
    o.status = "not optimal";
  } else {
    o.status = "unknown";
  }
  return o;
}

std::vector<BatchItem> plan_batch(const std::vector<PlanQuery>& queries, int threads, const PlanVerifyOptions& options,
                                  double density) {
  std::vector<std::optional<BatchItem>> slots(queries.size());
  parallel_chunks(queries.size(), resolve_threads(threads), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto& q = queries[i];
      const Planner planner = Planner::for_problem(q.space(), q.k(), q.r());
      MotionPlan plan = planner.plan(q, density);
      VerificationReport report = verify_plan(plan, q, options);
      slots[i] = BatchItem{q, std::move(plan), std::move(report)};
    }
  });
  std::vector<BatchItem> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

PlanQuery random_query(const SpaceDescriptor& space, int k, int r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Configuration start = sample_configuration(space, k, rng);
  Configuration goal = sample_configuration(space, r, rng);
  return PlanQuery::make(std::move(start), std::move(goal));
}

std::string trajectory_csv(const MotionPlan& plan) {
  std::ostringstream out;
  out.precision(17);
  const int width = plan.space.coordinate_size();
  out << "t,robot";
  for (int c = 0; c < width; ++c) out << ",c" << c;
  out << "\n";
  for (const auto& [t, cfg] : plan.samples) {
    for (int i = 0; i < cfg.k(); ++i) {
      out << t << "," << i + 1;
      for (Eigen::Index c = 0; c < cfg[i].coords().size(); ++c) out << "," << cfg[i].coords()(c);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace confsec
