#include "confsec/certificates.hpp"
#include "confsec/error.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>

using namespace confsec::cert;
using nlohmann::json;

namespace {

// Exterior algebra on n degree-1 generators: basis = nonempty subsets, named by their letters.
json exterior(int n, const std::string& coefficients = "Z") {
  json basis = json::array(), products = json::array();
  auto name = [](unsigned m) {
    std::string s;
    for (int i = 0; i < 8; ++i) {
      if ((m >> i) & 1u) s += char('a' + i);
    }
    return s;
  };
  for (unsigned m = 1; m < (1u << n); ++m) basis.push_back({{"name", name(m)}, {"degree", std::popcount(m)}});
  for (unsigned a = 1; a < (1u << n); ++a) {
    for (unsigned b = 1; b < (1u << n); ++b) {
      if (a & b) continue;
      // sign of the shuffle: pairs (i in a, j in b) with i > j
      int inv = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) inv += ((a >> i) & 1u) && ((b >> j) & 1u);
      }
      products.push_back({{"a", name(a)}, {"b", name(b)}, {"value", {{name(a | b), inv % 2 ? -1 : 1}}}});
    }
  }
  return {{"coefficients", coefficients}, {"basis", basis}, {"products", products}};
}

using Mat = std::vector<std::vector<std::int64_t>>;

std::int64_t det(const Mat& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  std::int64_t total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    Mat minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<std::int64_t> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    total += (c % 2 ? -1 : 1) * m[0][c] * det(minor);
  }
  return total;
}

// gcd of all k x k minors.
std::int64_t determinantal_divisor(const Mat& m, int k) {
  const int rows = int(m.size()), cols = int(m[0].size());
  std::int64_t g = 0;
  std::vector<int> rs(k), cs(k);
  std::function<void(int, int, std::vector<int>&, int, std::function<void()>)> choose =
      [&](int start, int n, std::vector<int>& out, int depth, std::function<void()> done) {
        if (depth == int(out.size())) return done();
        for (int i = start; i < n; ++i) {
          out[depth] = i;
          choose(i + 1, n, out, depth + 1, done);
        }
      };
  choose(0, rows, rs, 0, [&] {
    choose(0, cols, cs, 0, [&] {
      Mat sub(k, std::vector<std::int64_t>(k));
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) sub[i][j] = m[rs[i]][cs[j]];
      }
      g = std::gcd(g, std::abs(det(sub)));
    });
  });
  return g;
}

IntMatrix matrix(const Mat& m) {
  return {0, int(m.size()), m.empty() ? 0 : int(m[0].size()), m};
}

CupVerdict verify(const json& ring, const json& classes) {
  return verify_cup_certificate(CupLengthCertificate::from_json({{"map", "p"}, {"ring", ring}, {"classes", classes}}));
}

}  // namespace

TEST_CASE("rationals reduce and detect overflow") {
  gen::Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t a = gen::integer(rng, -1000, 1000), b = gen::integer(rng, 1, 1000);
    const std::int64_t c = gen::integer(rng, -1000, 1000), d = gen::integer(rng, 1, 1000);
    const Rational x(a, b), y(c, d);
    const Rational sum = x + y;
    CHECK(std::gcd(sum.num(), sum.den()) == (sum.num() == 0 ? sum.den() : 1));
    CHECK(sum.num() * (b * d) == (a * d + c * b) * sum.den());
    CHECK((x * y).num() * (b * d) == a * c * (x * y).den());
    CHECK(x - x == Rational(0));
    if (c != 0) CHECK((x / y) * y == x);
    CHECK(Rational::parse(x.str()) == x);
  }
  CHECK_THROWS_AS(Rational(1, 0), confsec::Error);
  CHECK_THROWS_AS(Rational(INT64_MAX / 2 + 1) * Rational(4), confsec::Error);
  CHECK_THROWS_AS(Rational::parse("1/x"), confsec::Error);
}

TEST_CASE("coefficient rings") {
  CHECK(Coefficients::parse("Z_3").reduce(Rational(-4)) == Rational(2));
  CHECK(Coefficients::parse("Z_2").reduce(Rational(6)) == Rational(0));
  CHECK(Coefficients::parse("Q").reduce(Rational(1, 3)) == Rational(1, 3));
  CHECK_THROWS_AS(Coefficients::parse("Z").reduce(Rational(1, 3)), confsec::Error);
  CHECK_THROWS_AS(Coefficients::parse("Z_4"), confsec::Error);
  CHECK_THROWS_AS(Coefficients::parse("R"), confsec::Error);
}

TEST_CASE("graded commutativity fills in mirrored products") {
  const auto ring = GradedRing::from_json(exterior(2));
  const auto a = ring.element("a"), b = ring.element("b");
  CHECK(ring.element_json(ring.multiply(a, b)) == json{{"ab", 1}});
  CHECK(ring.element_json(ring.multiply(b, a)) == json{{"ab", -1}});
  CHECK(ring.multiply(a, a).empty());
  CHECK(ring.element_json(ring.multiply(ring.element("1"), a)) == json{{"a", 1}});
}

TEST_CASE("malformed product tables are rejected") {
  // degree mismatch: a*b lands in degree 1
  json bad_degree = {{"basis", {{{"name", "a"}, {"degree", 1}}, {{"name", "b"}, {"degree", 1}}}},
                     {"products", {{{"a", "a"}, {"b", "b"}, {"value", {{"a", 1}}}}}}};
  CHECK_THROWS_AS(GradedRing::from_json(bad_degree), confsec::Error);
  // odd classes must anticommute, so a*b and b*a given equal is inconsistent
  json bad_sign = {{"basis", {{{"name", "a"}, {"degree", 1}}, {{"name", "b"}, {"degree", 1}}, {{"name", "c"}, {"degree", 2}}}},
                   {"products", {{{"a", "a"}, {"b", "b"}, {"value", {{"c", 1}}}}, {{"a", "b"}, {"b", "a"}, {"value", {{"c", 1}}}}}}};
  CHECK_THROWS_AS(GradedRing::from_json(bad_sign), confsec::Error);
  // (u u) v = w v = t but u (u v) = u * 0 = 0: not associative
  json bad_assoc = {{"basis",
                     {{{"name", "u"}, {"degree", 2}}, {{"name", "v"}, {"degree", 2}}, {{"name", "w"}, {"degree", 4}},
                      {{"name", "t"}, {"degree", 6}}}},
                    {"products", {{{"a", "u"}, {"b", "u"}, {"value", {{"w", 1}}}}, {{"a", "w"}, {"b", "v"}, {"value", {{"t", 1}}}}}}};
  CHECK_THROWS_AS(GradedRing::from_json(bad_assoc), confsec::Error);
  CHECK_NOTHROW(GradedRing::from_json(exterior(4)));
}

TEST_CASE("cup certificates: acceptance and rejection reasons") {
  const json ring = exterior(3);
  const auto two = verify(ring, {"a", "b"});
  CHECK(two.accepted);
  REQUIRE(two.claim);
  CHECK(two.claim->k == 2);
  const auto one = verify(ring, {"a"});
  CHECK(one.accepted);
  CHECK(one.claim->k == 1);
  const auto square = verify(ring, {"a", "a"});
  CHECK_FALSE(square.accepted);
  CHECK(square.rejection == Rejection::ProductVanishes);
  CHECK(square.stage == 2);
  const auto zero = verify(ring, {"a", json::object()});
  CHECK(zero.rejection == Rejection::ZeroClass);
  CHECK(zero.stage == 2);
  const auto three = verify(ring, {"a", "b", "c"});
  CHECK(three.accepted);
  CHECK(three.claim->k == 3);
  CHECK(to_facts(three).cup_claims.size() == 1);
  CHECK(to_facts(square).cup_claims.empty());
}

TEST_CASE("cup verdict is invariant under reordering the classes") {
  gen::Rng rng(42);
  const json ring = exterior(4);
  const auto parsed = GradedRing::from_json(ring);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = gen::integer(rng, 1, 5);
    std::vector<std::string> classes;
    for (int i = 0; i < k; ++i) classes.push_back(std::string(1, char('a' + gen::integer(rng, 0, 3))));
    // oracle: a product of generators is nonzero iff they are distinct
    std::vector<std::string> sorted = classes;
    std::sort(sorted.begin(), sorted.end());
    const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    const auto v = verify(ring, classes);
    CHECK(v.accepted == distinct);
    std::shuffle(classes.begin(), classes.end(), rng);
    const auto w = verify(ring, classes);
    CHECK(w.accepted == v.accepted);
    if (v.accepted) {
      // same basis element, coefficient +-1
      REQUIRE(v.product.size() == 1);
      REQUIRE(w.product.size() == 1);
      CHECK(v.product.begin()->first == w.product.begin()->first);
      CHECK(std::abs(v.product.begin()->second.num()) == 1);
      CHECK(std::abs(w.product.begin()->second.num()) == 1);
    }
  }
}

TEST_CASE("coefficients change the verdict") {
  json ring = {{"coefficients", "Z"},
               {"basis", {{{"name", "x"}, {"degree", 2}}, {{"name", "y"}, {"degree", 4}}}},
               {"products", {{{"a", "x"}, {"b", "x"}, {"value", {{"y", 2}}}}}}};
  CHECK(verify(ring, {"x", "x"}).accepted);
  ring["coefficients"] = "Z_2";
  CHECK_FALSE(verify(ring, {"x", "x"}).accepted);
  ring["coefficients"] = "Z_3";
  CHECK(verify(ring, {"x", "x"}).accepted);
}

TEST_CASE("Smith invariants match determinantal divisors") {
  gen::Rng rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = gen::integer(rng, 1, 4), cols = gen::integer(rng, 1, 4);
    Mat m(rows, std::vector<std::int64_t>(cols));
    for (auto& row : m) {
      for (auto& x : row) x = gen::integer(rng, -6, 6);
    }
    const auto inv = smith_invariants(matrix(m));
    std::int64_t prev = 1;
    std::size_t expected_rank = 0;
    for (int k = 1; k <= std::min(rows, cols); ++k) {
      const std::int64_t d = determinantal_divisor(m, k);
      if (d == 0) break;
      expected_rank = std::size_t(k);
      REQUIRE(inv.size() >= std::size_t(k));
      CHECK(inv[k - 1] == d / prev);
      prev = d;
    }
    CHECK(inv.size() == expected_rank);
    CHECK(rank(matrix(m), Coefficients::parse("Q")) == int(expected_rank));
    // rank mod p: largest k with a minor not divisible by p
    for (int p : {2, 3, 5}) {
      int rk = 0;
      for (int k = 1; k <= std::min(rows, cols); ++k) {
        if (determinantal_divisor(m, k) % p != 0) rk = k;
      }
      // d_k not divisible by p iff some k-minor is nonzero mod p
      CHECK(rank(matrix(m), Coefficients::parse("Z_" + std::to_string(p))) == rk);
    }
  }
  CHECK(smith_invariants(matrix({{2, 4}, {6, 8}})) == std::vector<std::int64_t>{2, 4});
}

TEST_CASE("injectivity and surjectivity depend on the coefficients") {
  const auto twice = matrix({{2}});
  CHECK(injective(twice, Coefficients::parse("Z")));
  CHECK_FALSE(surjective(twice, Coefficients::parse("Z")));
  CHECK(surjective(twice, Coefficients::parse("Q")));
  CHECK_FALSE(injective(twice, Coefficients::parse("Z_2")));
  const IntMatrix into_z{2, 1, 0, {{}}};
  CHECK(injective(into_z, Coefficients::parse("Z")));
  CHECK_FALSE(surjective(into_z, Coefficients::parse("Z")));
}

TEST_CASE("induced-map certificates") {
  json rp2 = {{"type", "induced"},
              {"space", "RP2"},
              {"functor", "pi_2"},
              {"direction", "pushforward_nonsurjective"},
              {"coefficients", "Z"},
              {"matrices", {{{"degree", 2}, {"rows", 1}, {"cols", 0}, {"entries", json::array({json::array()})}}}}};
  const auto ok = verify_induced_certificate(InducedMapCertificate::from_json(rp2));
  CHECK(ok.accepted);
  CHECK(ok.degree == 2);
  CHECK(ok.facts.axioms.size() == 1);
  CHECK(ok.facts.attributes.at("RP2").at("FPP"));

  json iso = rp2;
  iso["matrices"] = {{{"degree", 1}, {"rows", 1}, {"cols", 1}, {"entries", {{1}}}}};
  const auto no = verify_induced_certificate(InducedMapCertificate::from_json(iso));
  CHECK_FALSE(no.accepted);
  CHECK(no.rejection == Rejection::AllSurjective);

  json pull = rp2;
  pull["direction"] = "pullback_noninjective";
  pull["matrices"] = {{{"degree", 1}, {"rows", 1}, {"cols", 2}, {"entries", {{1, 1}}}}};
  CHECK(verify_induced_certificate(InducedMapCertificate::from_json(pull)).accepted);
  pull["matrices"] = {{{"degree", 1}, {"rows", 2}, {"cols", 1}, {"entries", {{1}, {0}}}}};
  CHECK(verify_induced_certificate(InducedMapCertificate::from_json(pull)).rejection == Rejection::AllInjective);

  json ragged = rp2;
  ragged["matrices"] = {{{"degree", 1}, {"rows", 2}, {"cols", 2}, {"entries", {{1, 1}}}}};
  CHECK_THROWS_AS(InducedMapCertificate::from_json(ragged), confsec::Error);
  CHECK(verify_certificate_json(rp2).at("accepted") == true);
}
