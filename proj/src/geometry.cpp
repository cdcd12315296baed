#include "confsec/geometry.hpp"

#include "confsec/error.hpp"
#include "confsec/kernels.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace confsec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTolerance = 1e-9;
constexpr double kGlueTolerance = 1e-12;

const Eigen::Vector3d kWedgeA0(1.0, 0.0, 0.0);

// Dividing an already unit vector by its computed norm can move the last bit,
// so vectors within a few ulps of unit length are left alone.
void normalize_once(Eigen::VectorXd& v, double norm) {
  if (std::abs(norm - 1.0) > 8 * std::numeric_limits<double>::epsilon()) v /= norm;
}

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::Parse, "bad space id '" + std::string(whole) + "'");
  }
  return value;
}

Eigen::VectorXd gaussian_vector(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

Eigen::VectorXd random_unit_vector(int size, std::mt19937_64& rng) {
  for (;;) {
    Eigen::VectorXd v = gaussian_vector(size, rng);
    const double norm = v.norm();
    if (norm > 1e-6) return v / norm;
  }
}

// Exponential map of the unit sphere at p applied to a random tangent vector
// of length at most `scale`.
Eigen::VectorXd sphere_step(const Eigen::VectorXd& p, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd t = gaussian_vector(static_cast<int>(p.size()), rng);
  t -= t.dot(p) * p;
  const double norm = t.norm();
  if (norm < 1e-12) return p;
  const double length = unit(rng) * scale;
  Eigen::VectorXd out = std::cos(length) * p + std::sin(length) * (t / norm);
  return out.normalized();
}

void require_same_space(const SpaceDescriptor& space, const SpacePoint& p) {
  if (!(p.space() == space)) {
    throw Error(ErrorCode::MismatchedSpace,
                "point of " + p.space().id() + " used in " + space.id());
  }
}

double wedge_distance(const SpacePoint& p, const SpacePoint& q) {
  using kernels::circle_gap;
  using kernels::great_circle_angle;
  const bool ps = p.branch() == WedgeBranch::Sphere;
  const bool qs = q.branch() == WedgeBranch::Sphere;
  if (ps && qs) return great_circle_angle(p.coords(), q.coords());
  if (!ps && !qs) return circle_gap(p.coords()(0), q.coords()(0));
  const SpacePoint& s = ps ? p : q;
  const SpacePoint& c = ps ? q : p;
  return great_circle_angle(s.coords(), kWedgeA0) + circle_gap(c.coords()(0), 0.0);
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MismatchedSpace: return "MismatchedSpace";
    case ErrorCode::AmbiguousGeodesic: return "AmbiguousGeodesic";
    case ErrorCode::DegenerateRegularValue: return "DegenerateRegularValue";
    case ErrorCode::CoincidenceDetected: return "CoincidenceDetected";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::Contradiction: return "Contradiction";
    case ErrorCode::DegenerateQuery: return "DegenerateQuery";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// SpaceDescriptor

SpaceDescriptor SpaceDescriptor::sphere(int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "sphere dimension must be >= 0");
  return {SpaceKind::Sphere, d};
}

SpaceDescriptor SpaceDescriptor::real_projective(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "projective dimension must be >= 1");
  return {SpaceKind::RealProjective, d};
}

SpaceDescriptor SpaceDescriptor::torus(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "torus dimension must be >= 1");
  return {SpaceKind::Torus, m};
}

SpaceDescriptor SpaceDescriptor::euclidean(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "Euclidean dimension must be >= 1");
  return {SpaceKind::Euclidean, m};
}

SpaceDescriptor SpaceDescriptor::disc(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "disc dimension must be >= 1");
  return {SpaceKind::Disc, m};
}

SpaceDescriptor SpaceDescriptor::wedge() { return {SpaceKind::WedgeS2S1, 2}; }

SpaceDescriptor SpaceDescriptor::discrete(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "discrete space needs n >= 1");
  return {SpaceKind::Discrete, n};
}

SpaceDescriptor SpaceDescriptor::parse(std::string_view id) {
  auto starts = [&](std::string_view prefix) { return id.substr(0, prefix.size()) == prefix; };
  if (id == "S2vS1") return wedge();
  if (starts("Discrete")) return discrete(parse_int(id.substr(8), id));
  if (starts("RP")) return real_projective(parse_int(id.substr(2), id));
  if (starts("S")) return sphere(parse_int(id.substr(1), id));
  if (starts("T")) return torus(parse_int(id.substr(1), id));
  if (starts("R")) return euclidean(parse_int(id.substr(1), id));
  if (starts("D")) return disc(parse_int(id.substr(1), id));
  throw Error(ErrorCode::Parse, "unknown space id '" + std::string(id) + "'");
}

int SpaceDescriptor::dim() const noexcept {
  switch (kind_) {
    case SpaceKind::WedgeS2S1: return 2;
    case SpaceKind::Discrete: return 0;
    default: return parameter_;
  }
}

bool SpaceDescriptor::boundaryless_manifold() const noexcept {
  switch (kind_) {
    case SpaceKind::Disc:
    case SpaceKind::WedgeS2S1:
    case SpaceKind::Discrete: return false;
    default: return true;
  }
}

Metric SpaceDescriptor::metric() const noexcept {
  switch (kind_) {
    case SpaceKind::Sphere:
    case SpaceKind::Torus: return Metric::Geodesic;
    case SpaceKind::RealProjective: return Metric::QuotientGeodesic;
    case SpaceKind::Euclidean:
    case SpaceKind::Disc: return Metric::Euclidean;
    case SpaceKind::WedgeS2S1: return Metric::BranchMetric;
    case SpaceKind::Discrete: return Metric::Discrete;
  }
  return Metric::Geodesic;
}

std::string SpaceDescriptor::id() const {
  const std::string p = std::to_string(parameter_);
  switch (kind_) {
    case SpaceKind::Sphere: return "S" + p;
    case SpaceKind::RealProjective: return "RP" + p;
    case SpaceKind::Torus: return "T" + p;
    case SpaceKind::Euclidean: return "R" + p;
    case SpaceKind::Disc: return "D" + p;
    case SpaceKind::WedgeS2S1: return "S2vS1";
    case SpaceKind::Discrete: return "Discrete" + p;
  }
  return "?";
}

int SpaceDescriptor::coordinate_size() const noexcept {
  switch (kind_) {
    case SpaceKind::Sphere:
    case SpaceKind::RealProjective: return parameter_ + 1;
    case SpaceKind::Torus:
    case SpaceKind::Euclidean:
    case SpaceKind::Disc: return parameter_;
    case SpaceKind::WedgeS2S1: return 3;  // circle branch uses 1
    case SpaceKind::Discrete: return 1;
  }
  return 0;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Geodesic: return "geodesic";
    case Metric::Euclidean: return "euclidean";
    case Metric::QuotientGeodesic: return "quotient_geodesic";
    case Metric::BranchMetric: return "branch_metric";
    case Metric::Discrete: return "discrete";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SpacePoint

SpacePoint::SpacePoint(SpaceDescriptor space, Eigen::VectorXd coords, WedgeBranch branch)
    : space_(space), coords_(std::move(coords)), branch_(branch) {
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidArgument, "invalid point of " + space_.id() + ": " + why);
  };
  for (Eigen::Index i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_(i))) bad("non-finite coordinate");
  }
  switch (space_.kind()) {
    case SpaceKind::Sphere:
    case SpaceKind::RealProjective: {
      if (coords_.size() != space_.coordinate_size()) bad("wrong coordinate count");
      const double norm = coords_.norm();
      if (norm < 1e-12) bad("zero vector");
      normalize_once(coords_, norm);
      if (space_.kind() == SpaceKind::RealProjective) kernels::canonicalize_projective_sign(coords_);
      branch_ = WedgeBranch::Sphere;
      break;
    }
    case SpaceKind::Torus:
      if (coords_.size() != space_.coordinate_size()) bad("wrong coordinate count");
      for (Eigen::Index i = 0; i < coords_.size(); ++i) coords_(i) = kernels::wrap_angle(coords_(i));
      branch_ = WedgeBranch::Sphere;
      break;
    case SpaceKind::Euclidean:
      if (coords_.size() != space_.coordinate_size()) bad("wrong coordinate count");
      branch_ = WedgeBranch::Sphere;
      break;
    case SpaceKind::Disc:
      if (coords_.size() != space_.coordinate_size()) bad("wrong coordinate count");
      if (coords_.norm() > 1.0 + 1e-12) bad("outside the unit disc");
      if (coords_.norm() > 1.0) normalize_once(coords_, coords_.norm());
      branch_ = WedgeBranch::Sphere;
      break;
    case SpaceKind::WedgeS2S1:
      if (branch_ == WedgeBranch::Sphere) {
        if (coords_.size() != 3) bad("sphere branch needs 3 coordinates");
        const double norm = coords_.norm();
        if (norm < 1e-12) bad("zero vector");
        normalize_once(coords_, norm);
        if (kernels::great_circle_angle(coords_, kWedgeA0) <= kGlueTolerance) {
          coords_ = Eigen::VectorXd::Zero(1);
          branch_ = WedgeBranch::Circle;
        }
      } else {
        if (coords_.size() != 1) bad("circle branch needs 1 angle");
        coords_(0) = kernels::wrap_angle(coords_(0));
      }
      break;
    case SpaceKind::Discrete: {
      if (coords_.size() != 1) bad("discrete point needs 1 index");
      const double idx = coords_(0);
      if (idx != std::floor(idx) || idx < 0 || idx >= space_.parameter()) bad("index out of range");
      branch_ = WedgeBranch::Sphere;
      break;
    }
  }
}

SpacePoint SpacePoint::discrete(int n, int index) {
  Eigen::VectorXd c(1);
  c(0) = index;
  return {SpaceDescriptor::discrete(n), c};
}

SpacePoint SpacePoint::wedge_circle(double angle) {
  Eigen::VectorXd c(1);
  c(0) = angle;
  return {SpaceDescriptor::wedge(), c, WedgeBranch::Circle};
}

SpacePoint SpacePoint::wedge_sphere(const Eigen::Vector3d& v) {
  return {SpaceDescriptor::wedge(), Eigen::VectorXd(v), WedgeBranch::Sphere};
}

SpacePoint SpacePoint::circle(double angle) {
  Eigen::VectorXd c(2);
  c << std::cos(angle), std::sin(angle);
  return {SpaceDescriptor::sphere(1), c};
}

int SpacePoint::index() const {
  if (space_.kind() != SpaceKind::Discrete) {
    throw Error(ErrorCode::InvalidArgument, "index() on a non-discrete point");
  }
  return static_cast<int>(coords_(0));
}

bool SpacePoint::operator==(const SpacePoint& other) const {
  return space_ == other.space_ && branch_ == other.branch_ && coords_.size() == other.coords_.size() &&
         coords_ == other.coords_;
}

SpacePoint canonicalize(const SpacePoint& p) { return SpacePoint(p.space(), p.coords(), p.branch()); }

SpacePoint wedge_basepoint() { return SpacePoint::wedge_circle(0.0); }

// ---------------------------------------------------------------------------
// Metric

double distance(const SpaceDescriptor& space, const SpacePoint& p, const SpacePoint& q) {
  require_same_space(space, p);
  require_same_space(space, q);
  switch (space.kind()) {
    case SpaceKind::Sphere: return kernels::great_circle_angle(p.coords(), q.coords());
    case SpaceKind::RealProjective: return kernels::projective_angle(p.coords(), q.coords());
    case SpaceKind::Torus: {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < p.coords().size(); ++i) {
        worst = std::max(worst, kernels::circle_gap(p.coords()(i), q.coords()(i)));
      }
      return worst;
    }
    case SpaceKind::Euclidean:
    case SpaceKind::Disc: return (p.coords() - q.coords()).norm();
    case SpaceKind::WedgeS2S1: return wedge_distance(p, q);
    case SpaceKind::Discrete: return p.index() == q.index() ? 0.0 : 1.0;
  }
  return 0.0;
}

double distance(const SpacePoint& p, const SpacePoint& q) { return distance(p.space(), p, q); }

// ---------------------------------------------------------------------------
// Sampling

SpacePoint sample_point(const SpaceDescriptor& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (space.kind()) {
    case SpaceKind::Sphere:
    case SpaceKind::RealProjective:
      return {space, random_unit_vector(space.coordinate_size(), rng)};
    case SpaceKind::Torus: {
      Eigen::VectorXd angles(space.parameter());
      for (int i = 0; i < space.parameter(); ++i) angles(i) = unit(rng) * kernels::kTwoPi<double>;
      return {space, angles};
    }
    case SpaceKind::Euclidean: {
      Eigen::VectorXd v(space.parameter());
      for (int i = 0; i < space.parameter(); ++i) v(i) = 2.0 * unit(rng) - 1.0;
      return {space, v};
    }
    case SpaceKind::Disc: {
      for (;;) {
        Eigen::VectorXd v(space.parameter());
        for (int i = 0; i < space.parameter(); ++i) v(i) = 2.0 * unit(rng) - 1.0;
        if (v.norm() <= 1.0) return {space, v};
      }
    }
    case SpaceKind::WedgeS2S1: {
      if (unit(rng) < 0.5) {
        return {space, random_unit_vector(3, rng), WedgeBranch::Sphere};
      }
      return SpacePoint::wedge_circle(unit(rng) * kernels::kTwoPi<double>);
    }
    case SpaceKind::Discrete: {
      std::uniform_int_distribution<int> pick(0, space.parameter() - 1);
      return SpacePoint::discrete(space.parameter(), pick(rng));
    }
  }
  throw Error(ErrorCode::Unsupported, "cannot sample " + space.id());
}

std::vector<SpacePoint> sample(const SpaceDescriptor& space, std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<SpacePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_point(space, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Geodesics

SpacePoint geodesic_point(const SpaceDescriptor& space, const SpacePoint& p, const SpacePoint& q,
                          double t) {
  require_same_space(space, p);
  require_same_space(space, q);
  if (t < 0.0 || t > 1.0) throw Error(ErrorCode::InvalidArgument, "t must lie in [0,1]");
  if (t == 0.0) return p;
  if (t == 1.0) return q;
  auto ambiguous = [&]() -> SpacePoint {
    throw Error(ErrorCode::AmbiguousGeodesic, "no unique shortest geodesic in " + space.id());
  };
  switch (space.kind()) {
    case SpaceKind::Sphere: {
      if ((p.coords() + q.coords()).norm() < 1e-12) return ambiguous();
      return {space, kernels::slerp(p.coords(), q.coords(), t)};
    }
    case SpaceKind::RealProjective: {
      const double dot = p.coords().dot(q.coords());
      if (std::abs(dot) < 1e-12) return ambiguous();
      const Eigen::VectorXd lift = dot > 0 ? q.coords() : Eigen::VectorXd(-q.coords());
      return {space, kernels::slerp(p.coords(), lift, t)};
    }
    case SpaceKind::Torus: {
      Eigen::VectorXd out(p.coords().size());
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double d = kernels::signed_angle_difference(p.coords()(i), q.coords()(i));
        if (std::abs(std::abs(d) - kPi) < 1e-12) return ambiguous();
        out(i) = p.coords()(i) + t * d;
      }
      return {space, out};
    }
    case SpaceKind::Euclidean:
    case SpaceKind::Disc: return {space, Eigen::VectorXd((1.0 - t) * p.coords() + t * q.coords())};
    case SpaceKind::Discrete: {
      if (p.index() == q.index()) return p;
      return ambiguous();
    }
    case SpaceKind::WedgeS2S1: {
      const bool ps = p.branch() == WedgeBranch::Sphere;
      const bool qs = q.branch() == WedgeBranch::Sphere;
      if (ps && qs) {
        if ((p.coords() + q.coords()).norm() < 1e-12) return ambiguous();
        return {space, kernels::slerp(p.coords(), q.coords(), t), WedgeBranch::Sphere};
      }
      if (!ps && !qs) {
        const double d = kernels::signed_angle_difference(p.coords()(0), q.coords()(0));
        if (std::abs(std::abs(d) - kPi) < 1e-12) return ambiguous();
        return SpacePoint::wedge_circle(p.coords()(0) + t * d);
      }
      // Through the glue point: sphere leg then circle leg, in arc length.
      const bool reversed = !ps;
      const SpacePoint& s = ps ? p : q;
      const SpacePoint& c = ps ? q : p;
      if ((s.coords() + kWedgeA0).norm() < 1e-12) return ambiguous();
      const double angle = kernels::signed_angle_difference(0.0, c.coords()(0));
      if (std::abs(std::abs(angle) - kPi) < 1e-12) return ambiguous();
      const double sphere_leg = kernels::great_circle_angle(s.coords(), kWedgeA0);
      const double circle_leg = std::abs(angle);
      const double total = sphere_leg + circle_leg;
      const double along = (reversed ? 1.0 - t : t) * total;
      if (along <= sphere_leg && sphere_leg > 0) {
        const double u = along / sphere_leg;
        return {space, kernels::slerp(s.coords(), Eigen::VectorXd(kWedgeA0), u), WedgeBranch::Sphere};
      }
      const double u = circle_leg > 0 ? (along - sphere_leg) / circle_leg : 0.0;
      return SpacePoint::wedge_circle(u * angle);
    }
  }
  return ambiguous();
}

SpacePoint jitter(const SpacePoint& p, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const SpaceDescriptor& space = p.space();
  switch (space.kind()) {
    case SpaceKind::Sphere:
    case SpaceKind::RealProjective: return {space, sphere_step(p.coords(), scale, rng)};
    case SpaceKind::Torus: {
      Eigen::VectorXd v = p.coords();
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += scale * sym(rng);
      return {space, v};
    }
    case SpaceKind::Euclidean:
    case SpaceKind::Disc: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Eigen::VectorXd v = p.coords() + unit(rng) * scale * random_unit_vector(space.parameter(), rng);
      if (space.kind() == SpaceKind::Disc && v.norm() > 1.0) v.normalize();
      return {space, v};
    }
    case SpaceKind::WedgeS2S1: {
      if (p.branch() == WedgeBranch::Sphere) {
        return {space, sphere_step(p.coords(), scale, rng), WedgeBranch::Sphere};
      }
      return SpacePoint::wedge_circle(p.coords()(0) + scale * sym(rng));
    }
    case SpaceKind::Discrete: return p;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Configurations

Configuration::Configuration(SpaceDescriptor space, std::vector<SpacePoint> points, double separation)
    : space_(space), points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "configuration needs k >= 1 points");
  for (const auto& p : points_) require_same_space(space_, p);
  if (!is_valid(separation)) {
    throw Error(ErrorCode::InvalidArgument, "configuration points are not pairwise distinct");
  }
}

Configuration Configuration::unchecked(SpaceDescriptor space, std::vector<SpacePoint> points) {
  Configuration c;
  c.space_ = space;
  c.points_ = std::move(points);
  return c;
}

double Configuration::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      best = std::min(best, distance(space_, points_[i], points_[j]));
    }
  }
  return best;
}

bool Configuration::is_valid(double separation) const {
  if (space_.kind() == SpaceKind::Discrete) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (std::size_t j = i + 1; j < points_.size(); ++j) {
        if (points_[i].index() == points_[j].index()) return false;
      }
    }
    return true;
  }
  return min_separation() > separation;
}

bool Configuration::operator==(const Configuration& other) const {
  return space_ == other.space_ && points_ == other.points_;
}

Configuration project(const Configuration& cfg, int r) {
  if (r < 1 || r > cfg.k()) {
    throw Error(ErrorCode::InvalidArgument,
                "projection r=" + std::to_string(r) + " outside [1," + std::to_string(cfg.k()) + "]");
  }
  std::vector<SpacePoint> first(cfg.points().begin(), cfg.points().begin() + r);
  return Configuration::unchecked(cfg.space(), std::move(first));
}

double configuration_distance(const Configuration& a, const Configuration& b) {
  if (a.k() != b.k()) throw Error(ErrorCode::InvalidArgument, "configurations of different size");
  double worst = 0.0;
  for (int i = 0; i < a.k(); ++i) worst = std::max(worst, distance(a[i], b[i]));
  return worst;
}

Configuration sample_configuration(const SpaceDescriptor& space, int r, std::mt19937_64& rng,
                                   double separation) {
  if (space.kind() == SpaceKind::Discrete && r > space.parameter()) {
    throw Error(ErrorCode::InvalidArgument, "F(X,r) is empty for r > |X|");
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<SpacePoint> pts;
    pts.reserve(r);
    for (int i = 0; i < r; ++i) pts.push_back(sample_point(space, rng));
    auto cfg = Configuration::unchecked(space, std::move(pts));
    if (cfg.is_valid(separation)) return cfg;
  }
  throw Error(ErrorCode::InvalidArgument, "could not sample a configuration in " + space.id());
}

Configuration jitter(const Configuration& cfg, double scale, std::mt19937_64& rng, double separation) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<SpacePoint> pts;
    pts.reserve(cfg.points().size());
    for (const auto& p : cfg.points()) pts.push_back(jitter(p, scale, rng));
    auto out = Configuration::unchecked(cfg.space(), std::move(pts));
    if (out.is_valid(separation)) return out;
  }
  return cfg;
}

}  // namespace confsec
