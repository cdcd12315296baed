#include "confsec/error.hpp"
#include "confsec/json_io.hpp"
#include "confsec/sections.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace confsec;

namespace {

std::size_t choose(int n, int k) {
  std::size_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * std::size_t(n - k + i) / std::size_t(i);
  return c;
}

bounds::FactStore store_with(const char* file) {
  auto f = bounds::standard_facts();
  f.merge(bounds::FactSet::from_json(io::read_json_file(std::string(CONFSEC_SOURCE_DIR "/data/facts/") + file)));
  return bounds::propagate(f);
}

}  // namespace

TEST_CASE("projection ids") {
  CHECK(ProjectionId::make(SpaceDescriptor::sphere(2), 3, 1).str() == "pi(3,1,S2)");
  CHECK_THROWS_AS(ProjectionId::make(SpaceDescriptor::sphere(2), 2, 2), Error);
  CHECK_THROWS_AS(ProjectionId::make(SpaceDescriptor::sphere(2), 3, 0), Error);
}

TEST_CASE("section identity is exact on every piece") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = gen::space(rng);
    if (s.kind() == SpaceKind::Discrete) s = SpaceDescriptor::discrete(6);
    const int k = gen::integer(rng, 2, 4);
    const int r = gen::integer(rng, 1, k - 1);
    INFO(s.id(), " k=", k, " r=", r);
    const auto base = default_basepoints(s, k);
    const auto cover = binomial_cover(s, k, r, base);
    CHECK(cover.pieces.size() == choose(k, r));
    std::mt19937_64 inner(trial);
    for (int i = 0; i < 50; ++i) {
      const auto x = sample_configuration(s, r, inner);
      for (const auto& piece : cover.pieces) {
        if (!piece.contains(x)) continue;
        const auto y = piece(x);
        CHECK(y.k() == k);
        CHECK(y.is_valid());
        CHECK(project(y, r) == x);
      }
    }
  }
}

TEST_CASE("key lemma pieces leave out one basepoint each") {
  const auto s = SpaceDescriptor::sphere(2);
  const auto base = default_basepoints(s, 4);
  const auto cover = key_lemma_cover(s, 4, base);
  REQUIRE(cover.pieces.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(cover.pieces[i].excluded().size() == 3);
    // s_i is defined at p_i itself
    const Configuration at(s, {base[i]});
    CHECK(cover.pieces[i].contains(at));
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != i) CHECK_FALSE(cover.pieces[i].contains(Configuration(s, {base[j]})));
    }
  }
  CHECK_THROWS_AS(cover.pieces[0](Configuration(s, {base[1]})), Error);
}

TEST_CASE("covers verify and a missing piece is caught") {
  const auto s = SpaceDescriptor::sphere(2);
  auto cover = cover_from_recipe("key-lemma", s, 3);
  const auto good = verify_cover(cover, {.seed = 4, .samples = 3000});
  CHECK(good.passed());
  CHECK(good.find("identity_error")->value == 0.0);
  cover.pieces.pop_back();
  const auto bad = verify_cover(cover, {.seed = 4, .samples = 3000});
  CHECK_FALSE(bad.passed());
  CHECK(bad.find("coverage")->value < 1.0);
}

TEST_CASE("verification does not depend on the thread count") {
  const auto cover = cover_from_recipe("binomial", SpaceDescriptor::torus(2), 4, 2);
  const auto one = verify_cover(cover, {.seed = 5, .samples = 2000, .threads = 1}).to_json();
  const auto many = verify_cover(cover, {.seed = 5, .samples = 2000, .threads = 5}).to_json();
  CHECK(one == many);
}

TEST_CASE("global sections from fixed-point-free maps") {
  const auto sigma = sphere_sigma(2);
  CHECK(sigma.global());
  const auto s2 = SpaceDescriptor::sphere(2);
  const Configuration x(s2, {SpacePoint(s2, Eigen::Vector3d(0.6, 0, 0.8))});
  CHECK((sigma(x)[1].coords() + x[0].coords()).norm() == 0.0);

  const auto s3 = SpaceDescriptor::sphere(3);
  const std::vector<SelfMap> fam{SelfMap::antipodal(s3), SelfMap::vector_field_flow(s3, 1.0)};
  const auto sec = from_fpf_family(fam);
  CHECK(verify_cover(single_piece_cover(sec), {.samples = 2000}).passed());
  const std::vector<SelfMap> clash{SelfMap::antipodal(s3), SelfMap::identity(s3)};
  try {
    from_fpf_family(clash);
    FAIL("identity in the family was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoincidenceDetected);
  }
}

TEST_CASE("section points stay apart from the base point") {
  // The gap of the section equals the fixed-point gap of the map behind it.
  gen::Rng rng(32);
  const auto rp3 = SpaceDescriptor::real_projective(3);
  const auto sec = from_fpf_family(std::vector<SelfMap>{SelfMap::rp_odd_rotation(rp3)});
  for (int i = 0; i < 500; ++i) {
    const Configuration x(rp3, {sample_point(rp3, rng)});
    CHECK(distance(sec(x)[0], sec(x)[1]) == doctest::Approx(std::acos(0.0)).epsilon(1e-12));
  }
}

TEST_CASE("group sections and dropping points") {
  for (const char* id : {"S1", "T2", "R3", "Discrete5"}) {
    const auto s = SpaceDescriptor::parse(id);
    const int k = s.kind() == SpaceKind::Discrete ? 5 : 4;
    const auto g = group_section(s, k);
    CHECK(verify_cover(single_piece_cover(g), {.samples = 500}).passed());
    gen::Rng rng(33);
    for (int m = 2; m <= k; ++m) {
      const auto d = drop_points(g, m);
      CHECK(d.projection().k == m);
      for (int i = 0; i < 20; ++i) {
        const Configuration x(s, {sample_point(s, rng)});
        const auto full = g(x), part = d(x);
        REQUIRE(part.k() == m);
        for (int j = 0; j < m; ++j) CHECK(part[j] == full[j]);
      }
    }
    CHECK_THROWS_AS(drop_points(g, 1), Error);
  }
  CHECK_THROWS_AS(group_section(SpaceDescriptor::discrete(3), 4), Error);
}

TEST_CASE("verdicts follow catalog and facts") {
  const auto s2 = fpp_verdict(SpaceDescriptor::sphere(2));
  CHECK(s2.fpp == Answer::No);
  CHECK(s2.sec21 == Sec21::One);
  CHECK(s2.witness);

  const auto rp2 = fpp_verdict(SpaceDescriptor::real_projective(2));
  CHECK(rp2.fpp == Answer::Unknown);
  CHECK(rp2.sec21 == Sec21::Unknown);
  const auto rp2_store = store_with("rp2.json");
  const auto rp2_known = fpp_verdict(SpaceDescriptor::real_projective(2), &rp2_store);
  CHECK(rp2_known.fpp == Answer::Yes);
  CHECK(rp2_known.sec21 == Sec21::Two);

  const auto disc_store = store_with("disc.json");
  CHECK(fpp_verdict(SpaceDescriptor::disc(2), &disc_store).sec21 == Sec21::Two);

  const auto one = fpp_verdict(SpaceDescriptor::discrete(1));
  CHECK(one.sec21 == Sec21::Infinite);
  CHECK_FALSE(one.theorem_applicable);
  const auto four = fpp_verdict(SpaceDescriptor::discrete(4));
  CHECK(four.fpp == Answer::No);
  REQUIRE(four.finite_witness);
  for (int i = 0; i < 4; ++i) CHECK((*four.finite_witness)[i] != i);
}

TEST_CASE("unknown recipes are rejected") {
  CHECK_THROWS_AS(cover_from_recipe("magic", SpaceDescriptor::sphere(2), 3), Error);
  CHECK_THROWS_AS(cover_from_recipe("sigma", SpaceDescriptor::torus(2), 2), Error);
}
