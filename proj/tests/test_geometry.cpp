#include "confsec/error.hpp"
#include "confsec/geometry.hpp"
#include "confsec/kernels.hpp"
#include "confsec/parallel.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>

using namespace confsec;

namespace {

constexpr double pi = std::numbers::pi;

// acos of the clamped inner product; fine away from 0 and pi.
double acos_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

}  // namespace

TEST_CASE("space ids round trip") {
  for (const char* id : {"S1", "S2", "S7", "RP2", "RP3", "T1", "T3", "R2", "D2", "S2vS1", "Discrete5"}) {
    CHECK(SpaceDescriptor::parse(id).id() == id);
  }
  for (const char* bad : {"", "S", "X2", "RP", "Discrete0", "T-1", "S2vS2"}) {
    CHECK_THROWS_AS(SpaceDescriptor::parse(bad), Error);
  }
  CHECK(SpaceDescriptor::parse("S3").dim() == 3);
  CHECK(SpaceDescriptor::parse("RP2").coordinate_size() == 3);
  CHECK_FALSE(SpaceDescriptor::parse("D2").boundaryless_manifold());
  CHECK_FALSE(SpaceDescriptor::parse("S2vS1").boundaryless_manifold());
  CHECK(SpaceDescriptor::parse("T2").boundaryless_manifold());
}

TEST_CASE("sphere distance agrees with arccos away from the poles") {
  gen::Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = gen::integer(rng, 1, 5);
    const auto s = SpaceDescriptor::sphere(d);
    const Eigen::VectorXd a = gen::unit_vector(d + 1, rng), b = gen::unit_vector(d + 1, rng);
    const double oracle = acos_angle(a, b);
    if (oracle < 1e-3 || oracle > pi - 1e-3) continue;
    CHECK(distance(SpacePoint(s, a), SpacePoint(s, b)) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("projective distance is the smaller angle to +-q") {
  gen::Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = SpaceDescriptor::real_projective(3);
    const Eigen::VectorXd a = gen::unit_vector(4, rng), b = gen::unit_vector(4, rng);
    const double oracle = std::acos(std::min(1.0, std::abs(a.dot(b))));
    if (oracle < 1e-3) continue;
    const double d = distance(SpacePoint(s, a), SpacePoint(s, b));
    CHECK(d == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(d <= pi / 2 + 1e-12);
    CHECK(SpacePoint(s, a) == SpacePoint(s, Eigen::VectorXd(-a)));
  }
}

TEST_CASE("metric axioms on random triples") {
  gen::Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = gen::space(rng);
    std::mt19937_64 inner(trial);
    const auto p = sample_point(s, inner), q = sample_point(s, inner), r = sample_point(s, inner);
    INFO(s.id());
    CHECK(distance(p, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(distance(p, q) == doctest::Approx(distance(q, p)).epsilon(1e-12));
    CHECK(distance(p, r) <= distance(p, q) + distance(q, r) + 1e-12);
    CHECK(distance(p, q) >= 0.0);
  }
}

TEST_CASE("torus distance is the sup of circle gaps") {
  const auto t = SpaceDescriptor::torus(2);
  Eigen::VectorXd a(2), b(2);
  a << 0.1, 6.2;
  b << 6.2, 0.3;
  const double gap0 = 2 * pi - 6.1, gap1 = 2 * pi - 5.9;
  CHECK(distance(SpacePoint(t, a), SpacePoint(t, b)) == doctest::Approx(std::max(gap0, gap1)));
}

TEST_CASE("wedge distance across the glue point") {
  const auto sphere_pt = SpacePoint::wedge_sphere(Eigen::Vector3d(0, 0, 1));
  const auto circle_pt = SpacePoint::wedge_circle(pi / 2);
  // pi/2 from the north pole to a0 plus pi/2 from b0 along the circle.
  CHECK(distance(sphere_pt, circle_pt) == doctest::Approx(pi));
  CHECK(SpacePoint::wedge_sphere(Eigen::Vector3d::UnitX()) == wedge_basepoint());
}

TEST_CASE("canonicalize is idempotent") {
  gen::Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = gen::space(rng);
    std::mt19937_64 inner(trial + 100);
    const auto p = sample_point(s, inner);
    const auto c = canonicalize(p);
    CHECK(c == p);
    CHECK(canonicalize(c).coords() == c.coords());
  }
  const auto t = SpaceDescriptor::torus(1);
  Eigen::VectorXd big(1);
  big << 7 * pi;
  CHECK(SpacePoint(t, big).coords()(0) == doctest::Approx(pi));
}

TEST_CASE("geodesics have constant speed and correct ends") {
  gen::Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = gen::space(rng);
    if (s.kind() == SpaceKind::Discrete || s.kind() == SpaceKind::WedgeS2S1) s = SpaceDescriptor::sphere(2);
    std::mt19937_64 inner(trial + 200);
    const auto p = sample_point(s, inner), q = sample_point(s, inner);
    const double d = distance(p, q);
    INFO(s.id());
    try {
      CHECK(distance(geodesic_point(s, p, q, 0.0), p) < 1e-9);
      CHECK(distance(geodesic_point(s, p, q, 1.0), q) < 1e-9);
      const double t = gen::uniform(rng, 0, 1);
      CHECK(distance(p, geodesic_point(s, p, q, t)) == doctest::Approx(t * d).epsilon(1e-7));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AmbiguousGeodesic);
    }
  }
  const auto s2 = SpaceDescriptor::sphere(2);
  CHECK_THROWS_AS(geodesic_point(s2, SpacePoint(s2, Eigen::Vector3d(0, 0, 1)), SpacePoint(s2, Eigen::Vector3d(0, 0, -1)), 0.5),
                  Error);
}

TEST_CASE("configurations reject collisions and project to prefixes") {
  const auto s = SpaceDescriptor::sphere(2);
  const SpacePoint n(s, Eigen::Vector3d(0, 0, 1)), e(s, Eigen::Vector3d(1, 0, 0)), w(s, Eigen::Vector3d(-1, 0, 0));
  CHECK_THROWS_AS(Configuration(s, {n, e, n}), Error);
  const Configuration c(s, {n, e, w});
  CHECK(c.k() == 3);
  CHECK(c.min_separation() == doctest::Approx(pi / 2));
  const auto p = project(c, 2);
  CHECK(p.k() == 2);
  CHECK(p[0] == n);
  CHECK(p[1] == e);
  CHECK_THROWS_AS(Configuration(s, {n, SpacePoint(SpaceDescriptor::sphere(3), Eigen::Vector4d(0, 0, 0, 1))}), Error);
  CHECK_FALSE(Configuration::unchecked(s, {n, n}).is_valid());
}

TEST_CASE("sampling is deterministic in the seed") {
  for (const char* id : {"S2", "RP3", "T2", "R3", "D2", "S2vS1", "Discrete4"}) {
    const auto s = SpaceDescriptor::parse(id);
    const auto a = sample(s, 42, 50), b = sample(s, 42, 50), c = sample(s, 43, 50);
    bool same = true, differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      same = same && a[i] == b[i];
      differ = differ || !(a[i] == c[i]);
    }
    CHECK(same);
    CHECK(differ);
  }
}

TEST_CASE("sphere samples are spread evenly") {
  // Mean of uniform points on S^2 tends to 0; each coordinate has variance 1/3.
  const auto pts = sample(SpaceDescriptor::sphere(2), 9, 20000);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  double zz = 0;
  for (const auto& p : pts) {
    mean += p.coords();
    zz += p.coords()(2) * p.coords()(2);
  }
  mean /= double(pts.size());
  CHECK(mean.norm() < 0.03);
  CHECK(zz / double(pts.size()) == doctest::Approx(1.0 / 3).epsilon(0.05));
}

TEST_CASE("jitter stays within the requested radius") {
  gen::Rng rng(6);
  for (const char* id : {"S2", "RP2", "T2", "R2", "D2"}) {
    const auto s = SpaceDescriptor::parse(id);
    for (int i = 0; i < 200; ++i) {
      const auto p = sample_point(s, rng);
      CHECK(distance(p, jitter(p, 0.01, rng)) <= 0.01 + 1e-12);
    }
  }
}

TEST_CASE("kernels in long double") {
  using LD = long double;
  gen::Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const LD a = LD(gen::uniform(rng, -50, 50));
    const LD w = kernels::wrap_angle(a);
    CHECK(w >= 0);
    CHECK(w < kernels::kTwoPi<LD>);
    CHECK(double(std::remainder(w - a, kernels::kTwoPi<LD>)) == doctest::Approx(0.0).epsilon(1e-12));
    const LD b = LD(gen::uniform(rng, -50, 50));
    const LD s = kernels::signed_angle_difference(a, b);
    CHECK(s >= -std::numbers::pi_v<LD>);
    CHECK(s < std::numbers::pi_v<LD>);
    CHECK(double(kernels::circle_gap(a, b)) == doctest::Approx(double(std::abs(s))).epsilon(1e-12));
  }
  Eigen::Matrix<LD, 3, 1> x(1, 0, 0), y(0, 1, 0);
  CHECK(double(kernels::great_circle_angle(x, y)) == doctest::Approx(pi / 2));
  const auto r = kernels::rotation_taking<LD>(x, y);
  CHECK(double((r * x - y).norm()) < 1e-15);
  CHECK(double((r.transpose() * r - Eigen::Matrix<LD, 3, 3>::Identity()).norm()) < 1e-15);
}

TEST_CASE("half-chord angle is accurate near zero") {
  // arccos loses half the digits here; the true angle is 1e-10.
  Eigen::Vector3d a(1, 0, 0), b(std::cos(1e-10), std::sin(1e-10), 0);
  CHECK(kernels::great_circle_angle(a, b) == doctest::Approx(1e-10).epsilon(1e-6));
}

TEST_CASE("rotations carry a to b") {
  gen::Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d a = gen::unit_vector(3, rng), b = gen::unit_vector(3, rng);
    if (a.dot(b) < -0.99) continue;
    CHECK((kernels::rotation_taking<double>(a, b) * a - b).norm() < 1e-12);
    CHECK((kernels::partial_rotation_taking<double>(a, b, 1.0) * a - b).norm() < 1e-12);
    CHECK((kernels::partial_rotation_taking<double>(a, b, 0.0) * a - a).norm() < 1e-15);
  }
}

TEST_CASE("parallel chunks cover the range once for any thread count") {
  for (std::size_t n : {0u, 1u, 7u, 1000u}) {
    for (int threads : {1, 2, 3, 8, 64}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_chunks(n, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      bool once = true;
      for (auto& h : hits) once = once && h == 1;
      CHECK(once);
    }
  }
  CHECK_THROWS(parallel_chunks(10, 4, [](std::size_t c, std::size_t, std::size_t) {
    if (c == 2) throw std::runtime_error("boom");
  }));
  CHECK(resolve_threads(3) == 3);
}
