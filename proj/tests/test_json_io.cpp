#include "confsec/error.hpp"
#include "confsec/json_io.hpp"
#include "generators.hpp"

#include <doctest.h>

using namespace confsec;
using io::json;

namespace {

// Serialize to text and back, as the CLI does.
json through_text(const json& j) { return json::parse(j.dump()); }

double coord_gap(const SpacePoint& a, const SpacePoint& b) {
  if (a.coords().size() != b.coords().size()) return 1e9;
  return (a.coords() - b.coords()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("points survive a text round trip") {
  gen::Rng rng(71);
  for (int i = 0; i < 2000; ++i) {
    const auto space = gen::space(rng);
    const auto p = sample_point(space, rng);
    const auto q = io::point_from_json(through_text(io::to_json(p)));
    INFO(space.id());
    CHECK(q.space() == space);
    CHECK(q.branch() == p.branch());
    CHECK(coord_gap(p, q) <= 1e-15);
    CHECK(distance(p, q) <= 1e-15);
  }
}

TEST_CASE("configurations survive a text round trip") {
  gen::Rng rng(72);
  for (int i = 0; i < 500; ++i) {
    const auto space = gen::space(rng);
    const int k = space.kind() == SpaceKind::Discrete ? 2 : gen::integer(rng, 1, 4);
    std::vector<SpacePoint> pts;
    while (static_cast<int>(pts.size()) < k) {
      auto p = sample_point(space, rng);
      bool clash = false;
      for (const auto& x : pts) clash = clash || distance(x, p) < 1e-6;
      if (!clash) pts.push_back(p);
    }
    const Configuration c(space, pts);
    const auto back = io::configuration_from_json(through_text(io::to_json(c)));
    REQUIRE(back.k() == c.k());
    for (int j = 0; j < k; ++j) CHECK(coord_gap(back[j], c[j]) <= 1e-15);
  }
}

TEST_CASE("self-maps survive a text round trip") {
  gen::Rng rng(73);
  const auto t2 = SpaceDescriptor::torus(2);
  const std::vector<SelfMap> maps{
      SelfMap::identity(SpaceDescriptor::disc(2)),
      SelfMap::antipodal(SpaceDescriptor::sphere(3)),
      SelfMap::rp_odd_rotation(SpaceDescriptor::real_projective(3)),
      SelfMap::wedge_shift(),
      SelfMap::vector_field_flow(SpaceDescriptor::sphere(3), 0.3),
      SelfMap::group_translation(SpacePoint(t2, Eigen::Vector2d(0.5, 1.25))),
      SelfMap::group_translation(SpacePoint::discrete(5, 2)),
      SelfMap::composite({SelfMap::antipodal(SpaceDescriptor::sphere(2)), SelfMap::antipodal(SpaceDescriptor::sphere(2))}),
  };
  for (const auto& f : maps) {
    const auto g = io::selfmap_from_json(through_text(io::to_json(f)));
    INFO(f.name());
    CHECK(g.recipe() == f.recipe());
    CHECK(g.space() == f.space());
    CHECK(io::to_json(g) == io::to_json(f));
    for (const auto& p : sample(f.space(), 9, 50)) CHECK(distance(f(p), g(p)) <= 1e-15);
  }
}

TEST_CASE("posets survive a text round trip") {
  gen::Rng rng(74);
  for (int i = 0; i < 300; ++i) {
    const auto p = gen::poset(rng, gen::integer(rng, 1, 9), gen::uniform(rng, 0, 0.6));
    CHECK(io::poset_from_json(through_text(io::to_json(p))) == p);
  }
}

TEST_CASE("queries and plans survive a text round trip") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto q = random_query(SpaceDescriptor::sphere(2), 2, 1, seed);
    const auto back = io::query_from_json(through_text(io::to_json(q)));
    for (int i = 0; i < 2; ++i) CHECK(coord_gap(back.start[i], q.start[i]) <= 1e-15);
    CHECK(coord_gap(back.goal[0], q.goal[0]) <= 1e-15);
    const auto plan = Planner::sphere21().plan(q);
    const json j = io::to_json(plan);
    CHECK(through_text(j) == j);
    CHECK(j.at("samples").size() == plan.samples.size());
  }
}

TEST_CASE("unsupported and unknown recipes") {
  try {
    io::selfmap_from_json({{"space", "S3"}, {"recipe", "cp_odd_rotation"}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }
  try {
    io::selfmap_from_json({{"space", "S3"}, {"recipe", "spin"}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
  }
  CHECK_THROWS_AS(io::selfmap_from_json({{"space", "T2"}, {"recipe", "group_translation"}}), Error);
}

TEST_CASE("malformed documents") {
  try {
    io::point_from_json(json{{"space", "S2"}, {"coords", {1, 0, 0}}}, SpaceDescriptor::sphere(3));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedSpace);
  }
  CHECK_THROWS_AS(io::point_from_json(json{{"space", "S2"}, {"coords", {"a", 0, 0}}}), Error);
  CHECK_THROWS_AS(io::point_from_json(json::array({1, 2})), Error);
  CHECK_THROWS_AS(io::configuration_from_json(json{{"space", "S2"}}), Error);
  CHECK_THROWS_AS(io::poset_from_json(json{{"n", 3}, {"leq", {{0, 1, 2}}}}), Error);
  CHECK_THROWS_AS(io::poset_from_json(json{{"n", 2}, {"leq", {{0, 1}, {1, 0}}}}), Error);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/confsec.json"), Error);
}
