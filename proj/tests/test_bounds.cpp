#include "confsec/bounds.hpp"
#include "confsec/json_io.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <set>

using namespace confsec::bounds;
using nlohmann::json;

namespace {

FactSet file(const char* name) {
  return FactSet::from_json(confsec::io::read_json_file(std::string(CONFSEC_SOURCE_DIR "/data/facts/") + name));
}

FactSet everything() {
  auto f = standard_facts();
  for (const char* name : {"rp2.json", "liegroup.json", "disc.json", "abstract_map.json"}) f.merge(file(name));
  return f;
}

bool contains(const Interval& outer, const Interval& inner) { return outer.lo <= inner.lo && inner.hi <= outer.hi; }

std::vector<Quantity> interest() {
  std::vector<Quantity> qs;
  for (const char* x : {"S1", "S2", "S3", "S4", "RP2", "T2", "D2", "R2"}) {
    for (int k = 2; k <= 4; ++k) {
      for (int r = 1; r < k && r <= 2; ++r) {
        const std::string pi = projection_id(k, r, x);
        for (const char* f : {"sec", "secat", "TC"}) qs.push_back(Quantity::parse(std::string(f) + "(" + pi + ")"));
      }
    }
    qs.push_back(Quantity::parse(std::string("cat(") + x + ")"));
    qs.push_back(Quantity::parse(std::string("TC(") + x + ")"));
  }
  for (const char* q : {"sec(p)", "secat(p)", "TC(p)", "cat(B)", "TC(B)"}) qs.push_back(Quantity::parse(q));
  return qs;
}

}  // namespace

TEST_CASE("quantities parse and print") {
  for (const char* q : {"cat(RP2)", "TC(S3)", "TC(pi(2,1,S3))", "sec(pi(4,2,T2))", "secat(p)", "TC(F(S2,3))"}) {
    CHECK(Quantity::parse(q).str() == q);
  }
  CHECK(Quantity::parse(" TC( pi(2, 1, S3) ) ").str() == "TC(pi(2,1,S3))");
  for (const char* bad : {"", "TC", "foo(S2)", "TC(S2", "sec()", "TC(pi(1,2,S2))"}) {
    CHECK_THROWS_AS(Quantity::parse(bad), confsec::Error);
  }
}

TEST_CASE("rule table") {
  const auto& rules = load_rules();
  REQUIRE(rules.size() == 23);
  std::set<std::string> ids;
  for (const auto& r : rules) ids.insert(r.id);
  for (int i = 1; i <= 23; ++i) CHECK(ids.count("R" + std::to_string(i)));
  for (const auto& r : auxiliary_steps()) CHECK_FALSE(ids.count(r.id));
}

TEST_CASE("fixpoint does not depend on rule order") {
  const auto facts = everything();
  const auto qs = interest();
  const auto base = propagate(facts, qs);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto shuffled = propagate(facts, qs, {.rule_order_seed = seed});
    for (const auto& q : qs) {
      INFO(q.str(), " seed ", seed);
      CHECK(shuffled.query(q).interval == base.query(q).interval);
    }
    CHECK(shuffled.attribute("RP2", "FPP").value == base.attribute("RP2", "FPP").value);
  }
}

TEST_CASE("more facts only narrow intervals") {
  gen::Rng rng(51);
  const auto full = everything();
  const auto qs = interest();
  for (int trial = 0; trial < 20; ++trial) {
    FactSet small;
    small.presets = full.presets;
    for (const auto& a : full.axioms) {
      if (gen::uniform(rng, 0, 1) < 0.5) small.axioms.push_back(a);
    }
    for (const auto& [s, names] : full.attributes) {
      for (const auto& [n, v] : names) {
        if (gen::uniform(rng, 0, 1) < 0.5) small.attributes[s][n] = v;
      }
    }
    small.maps = full.maps;
    const auto lo = propagate(small, qs);
    const auto hi = propagate(full, qs);
    for (const auto& q : qs) {
      INFO(q.str());
      CHECK(contains(lo.query(q).interval, hi.query(q).interval));
      CHECK(hi.query(q).interval.lo >= 1);
      CHECK(hi.query(q).interval.lo <= hi.query(q).interval.hi);
    }
  }
}

TEST_CASE("cat of a CW complex bounds TC between cat and 2 cat - 1") {
  for (int c = 1; c <= 6; ++c) {
    FactSet f;
    f.axioms.push_back({Quantity::parse("cat(Y)"), {c, c}, "test"});
    const std::vector<Quantity> tc{Quantity::parse("TC(Y)")};
    // without the CW guard only cat = 1 (contractible) pins TC
    const auto bare = propagate(f, tc).query("TC(Y)").interval;
    CHECK(bare.hi == (c == 1 ? 1 : kInfinity));
    f.attributes["Y"]["path_connected_CW"] = true;
    const auto iv = propagate(f, tc).query("TC(Y)").interval;
    CHECK(iv.lo == c);
    CHECK(iv.hi == 2 * c - 1);
  }
}

TEST_CASE("nullhomotopic fibration over a base of category 3") {
  FactSet f = file("abstract_map.json");
  const auto store = propagate(f);
  // secat(p) = cat(B) and sec = secat for fibrations
  CHECK(store.query("secat(p)").interval == Interval{3, 3});
  CHECK(store.query("sec(p)").interval == Interval{3, 3});
  CHECK(store.query("TC(p)").interval.lo == 3);
  CHECK(store.query("TC(B)").interval == Interval{3, 5});
}

TEST_CASE("contradictions carry both derivations") {
  try {
    propagate(file("inconsistent.json"));
    FAIL("no contradiction");
  } catch (const ContradictionError& e) {
    CHECK(e.lower());
    CHECK(e.upper());
    CHECK_FALSE(render(e.lower()).empty());
    CHECK(to_json(e.upper()).contains("rule"));
  }
  FactSet twice;
  twice.axioms.push_back({Quantity::parse("cat(Z)"), {2, 2}, "a"});
  twice.axioms.push_back({Quantity::parse("cat(Z)"), {3, 3}, "b"});
  CHECK_THROWS_AS(propagate(twice), ContradictionError);
}

TEST_CASE("sections exist exactly when there is no fixed point property") {
  const auto store = propagate(everything());
  CHECK(store.query("sec(pi(2,1,RP2))").interval == Interval{2, 2});
  CHECK(store.query("sec(pi(2,1,S2))").interval == Interval{1, 1});
  CHECK(store.query("sec(pi(2,1,D2))").interval == Interval{2, 2});
  CHECK(store.attribute("S2", "FPP").value == Tri::False);
  CHECK(store.attribute("RP2", "FPP").value == Tri::True);
  CHECK(store.attribute("RP4", "FPP").value == Tri::Unknown);
}

TEST_CASE("empty configuration spaces give an infinite sec") {
  FactSet f;
  const auto store = propagate(f, std::vector<Quantity>{Quantity::parse("sec(pi(2,1,Discrete1))")});
  CHECK(store.query("sec(pi(2,1,Discrete1))").interval.lo == kInfinity);
}

TEST_CASE("facts round trip through JSON") {
  const auto f = everything();
  const json j = f.to_json();
  CHECK(FactSet::from_json(j).to_json() == j);
  CHECK_THROWS_AS(FactSet::from_json(json{{"axiom", json::array()}}), confsec::Error);
  CHECK_THROWS_AS(FactSet::from_json(json{{"axioms", {{{"q", "cat(X)"}, {"lo", 3}, {"hi", 2}}}}}), confsec::Error);
  CHECK_THROWS_AS(FactSet::from_json(json{{"maps", {{"pi(2,1,S2)", {{"total", "E"}, {"base", "B"}}}}}}), confsec::Error);
}

TEST_CASE("explanations name the rules used") {
  const auto store = propagate(standard_facts());
  const auto q = Quantity::parse("TC(pi(2,1,S2))");
  const auto res = store.query(q);
  const std::string text = explain(q, res);
  CHECK(text.find("[R") != std::string::npos);
  CHECK(to_json(res.interval) == json{{"lo", 3}, {"hi", 3}});
  CHECK(to_json(Interval{2, kInfinity}) == json{{"lo", 2}, {"hi", "inf"}});
}
