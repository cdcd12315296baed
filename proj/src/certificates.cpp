#include "confsec/certificates.hpp"

#include "confsec/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>

namespace confsec::cert {

using nlohmann::json;

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw Error(ErrorCode::InvalidArgument, "integer overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw Error(ErrorCode::InvalidArgument, "integer overflow");
  return out;
}

std::int64_t mod(std::int64_t a, std::int64_t p) {
  const std::int64_t r = a % p;
  return r < 0 ? r + p : r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  // Extended Euclid; a is nonzero mod p.
  std::int64_t t = 0, nt = 1, r = p, nr = mod(a, p);
  while (nr != 0) {
    const std::int64_t q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  return mod(t, p);
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

Rational coefficient(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  throw Error(ErrorCode::Parse, "coefficient must be an integer or a \"p/q\" string");
}

}  // namespace

// ---------------------------------------------------------------------------
// Rational

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (den < 0) {
    num = checked_mul(num, -1);
    den = checked_mul(den, -1);
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  auto to_int = [&](std::string_view s) {
    std::size_t used = 0;
    const std::string str(s);
    long long v = 0;
    try {
      v = std::stoll(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != str.size() || str.empty()) throw Error(ErrorCode::Parse, "bad rational '" + std::string(text) + "'");
    return static_cast<std::int64_t>(v);
  };
  if (slash == std::string_view::npos) return Rational(to_int(text));
  return Rational(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator+(const Rational& o) const {
  return {checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)), checked_mul(den_, o.den_)};
}
Rational Rational::operator-(const Rational& o) const { return *this + (-o); }
Rational Rational::operator*(const Rational& o) const {
  return {checked_mul(num_, o.num_), checked_mul(den_, o.den_)};
}
Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero");
  return {checked_mul(num_, o.den_), checked_mul(den_, o.num_)};
}
Rational Rational::operator-() const { return {checked_mul(num_, -1), den_}; }

// ---------------------------------------------------------------------------
// Coefficients

Coefficients Coefficients::parse(std::string_view text) {
  if (text == "Z") return {CoefficientKind::Z, 0};
  if (text == "Q") return {CoefficientKind::Q, 0};
  if (text.rfind("Z_", 0) == 0) {
    const std::int64_t p = Rational::parse(text.substr(2)).num();
    if (!is_prime(p)) throw Error(ErrorCode::Parse, "Z_p needs a prime p, got '" + std::string(text) + "'");
    return {CoefficientKind::Zp, p};
  }
  throw Error(ErrorCode::Parse, "coefficients must be Z, Q or Z_p, got '" + std::string(text) + "'");
}

std::string Coefficients::str() const {
  switch (kind) {
    case CoefficientKind::Z: return "Z";
    case CoefficientKind::Q: return "Q";
    case CoefficientKind::Zp: return "Z_" + std::to_string(p);
  }
  return "?";
}

Rational Coefficients::reduce(const Rational& x) const {
  switch (kind) {
    case CoefficientKind::Z:
      if (!x.is_integer()) throw Error(ErrorCode::InvalidArgument, "non-integer coefficient " + x.str() + " over Z");
      return x;
    case CoefficientKind::Q: return x;
    case CoefficientKind::Zp: {
      const std::int64_t d = mod(x.den(), p);
      if (d == 0) throw Error(ErrorCode::InvalidArgument, "denominator of " + x.str() + " vanishes mod p");
      return Rational(mod(checked_mul(mod(x.num(), p), inverse_mod(d, p)), p));
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// GradedRing

int GradedRing::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].name == name) return static_cast<int>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown basis element '" + std::string(name) + "'");
}

Element GradedRing::normalized(Element e) const {
  Element out;
  for (auto& [i, c] : e) {
    const Rational r = coefficients_.reduce(c);
    if (!r.is_zero()) out[i] = r;
  }
  return out;
}

Element GradedRing::element(const json& j) const {
  Element e;
  if (j.is_string()) {
    e[index_of(j.get<std::string>())] = Rational(1);
  } else if (j.is_object()) {
    for (const auto& [name, c] : j.items()) {
      const int i = index_of(name);
      e[i] = e.count(i) ? e[i] + coefficient(c) : coefficient(c);
    }
  } else {
    throw Error(ErrorCode::Parse, "ring element must be a basis name or an object of coefficients");
  }
  return normalized(std::move(e));
}

json GradedRing::element_json(const Element& e) const {
  json out = json::object();
  for (const auto& [i, c] : e) out[basis_[i].name] = c.is_integer() ? json(c.num()) : json(c.str());
  return out;
}

std::string GradedRing::element_str(const Element& e) const {
  if (e.empty()) return "0";
  std::string s;
  for (const auto& [i, c] : e) {
    if (!s.empty()) s += " + ";
    if (!(c == Rational(1))) s += c.str() + "*";
    s += basis_[i].name;
  }
  return s;
}

Element GradedRing::basis_product(int a, int b) const {
  if (a == 0) return {{b, Rational(1)}};
  if (b == 0) return {{a, Rational(1)}};
  auto it = table_.find({a, b});
  return it == table_.end() ? Element{} : it->second;
}

Element GradedRing::multiply(const Element& a, const Element& b) const {
  Element out;
  for (const auto& [i, ca] : a) {
    for (const auto& [j, cb] : b) {
      for (const auto& [k, ck] : basis_product(i, j)) {
        const Rational term = ca * cb * ck;
        out[k] = out.count(k) ? out[k] + term : term;
      }
    }
  }
  return normalized(std::move(out));
}

Element multiply(const GradedRing& ring, const Element& a, const Element& b) { return ring.multiply(a, b); }

GradedRing GradedRing::from_json(const json& j) {
  GradedRing ring;
  ring.coefficients_ = Coefficients::parse(j.value("coefficients", std::string("Z")));
  ring.basis_.push_back({"1", 0});
  for (const auto& b : j.at("basis")) {
    BasisElement e{b.at("name").get<std::string>(), b.at("degree").get<int>()};
    if (e.name.empty() || e.name == "1") throw Error(ErrorCode::Parse, "basis names must be nonempty and not \"1\"");
    if (e.degree < 1) throw Error(ErrorCode::Parse, "basis element " + e.name + " needs degree >= 1");
    for (const auto& o : ring.basis_) {
      if (o.name == e.name) throw Error(ErrorCode::Parse, "duplicate basis element " + e.name);
    }
    ring.basis_.push_back(std::move(e));
  }
  std::set<std::pair<int, int>> given;
  for (const auto& p : j.value("products", json::array())) {
    const int a = ring.index_of(p.at("a").get<std::string>());
    const int b = ring.index_of(p.at("b").get<std::string>());
    if (a == 0 || b == 0) throw Error(ErrorCode::Parse, "products with the unit are implicit");
    if (!given.insert({a, b}).second) throw Error(ErrorCode::Parse, "duplicate product entry");
    Element v = ring.element(p.at("value"));
    const int deg = ring.basis_[a].degree + ring.basis_[b].degree;
    for (const auto& [k, c] : v) {
      if (ring.basis_[k].degree != deg) {
        throw Error(ErrorCode::Parse, "product " + ring.basis_[a].name + "*" + ring.basis_[b].name +
                                          " is not of degree " + std::to_string(deg));
      }
    }
    if (!v.empty()) ring.table_[{a, b}] = std::move(v);
  }
  // Mirror entries by graded commutativity, checking any pair given both ways.
  for (const auto& [a, b] : given) {
    const bool odd = (ring.basis_[a].degree * ring.basis_[b].degree) % 2 != 0;
    Element mirrored;
    for (const auto& [k, c] : ring.basis_product(a, b)) mirrored[k] = odd ? -c : c;
    mirrored = ring.normalized(std::move(mirrored));
    if (given.count({b, a})) {
      if (ring.basis_product(b, a) != mirrored) {
        throw Error(ErrorCode::Parse, "table is not graded-commutative at " + ring.basis_[a].name + "," +
                                          ring.basis_[b].name);
      }
    } else if (!mirrored.empty()) {
      ring.table_[{b, a}] = std::move(mirrored);
    }
  }
  ring.check_structure();
  return ring;
}

void GradedRing::check_structure() const {
  const int n = static_cast<int>(basis_.size());
  for (int a = 1; a < n; ++a) {
    for (int b = 1; b < n; ++b) {
      for (int c = 1; c < n; ++c) {
        const Element left = multiply(basis_product(a, b), {{c, Rational(1)}});
        const Element right = multiply({{a, Rational(1)}}, basis_product(b, c));
        if (left != right) {
          throw Error(ErrorCode::Parse, "table is not associative at (" + basis_[a].name + "," + basis_[b].name +
                                            "," + basis_[c].name + ")");
        }
      }
    }
  }
}

json GradedRing::to_json() const {
  json j;
  j["coefficients"] = coefficients_.str();
  j["basis"] = json::array();
  for (std::size_t i = 1; i < basis_.size(); ++i) {
    j["basis"].push_back({{"name", basis_[i].name}, {"degree", basis_[i].degree}});
  }
  j["products"] = json::array();
  for (const auto& [ab, v] : table_) {
    j["products"].push_back({{"a", basis_[ab.first].name}, {"b", basis_[ab.second].name}, {"value", element_json(v)}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Cup-length certificates

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::None: return "none";
    case Rejection::ZeroClass: return "ZeroClass";
    case Rejection::ProductVanishes: return "ProductVanishes";
    case Rejection::AllInjective: return "AllInjective";
    case Rejection::AllSurjective: return "AllSurjective";
  }
  return "?";
}

CupLengthCertificate CupLengthCertificate::from_json(const json& j) {
  CupLengthCertificate c{j.at("map").get<std::string>(), GradedRing::from_json(j.at("ring")), {},
                         j.value("assertion", std::string("p*(alpha_i) = 0 for every class"))};
  for (const auto& e : j.at("classes")) c.classes.push_back(c.ring.element(e));
  if (c.classes.empty()) throw Error(ErrorCode::Parse, "cup certificate without classes");
  return c;
}

CupVerdict verify_cup_certificate(const CupLengthCertificate& cert) {
  CupVerdict v;
  if (cert.classes.empty()) throw Error(ErrorCode::InvalidArgument, "cup certificate without classes");
  for (std::size_t i = 0; i < cert.classes.size(); ++i) {
    if (cert.classes[i].empty()) {
      v.rejection = Rejection::ZeroClass;
      v.stage = static_cast<int>(i) + 1;
      v.message = "class " + std::to_string(i + 1) + " is zero";
      return v;
    }
  }
  v.product = cert.classes.front();
  for (std::size_t i = 1; i < cert.classes.size(); ++i) {
    v.product = cert.ring.multiply(v.product, cert.classes[i]);
    if (v.product.empty()) {
      v.rejection = Rejection::ProductVanishes;
      v.stage = static_cast<int>(i) + 1;
      v.message = "the product of the first " + std::to_string(i + 1) + " classes vanishes";
      return v;
    }
  }
  const int k = static_cast<int>(cert.classes.size());
  v.accepted = true;
  v.stage = k;
  v.claim = bounds::CupClaim{cert.map, k,
                             "cup-length certificate, " + std::to_string(k) + " classes; assumes " + cert.assertion};
  v.message = "product " + cert.ring.element_str(v.product) + " is nonzero, so sec(" + cert.map +
              ") >= " + std::to_string(k + 1);
  return v;
}

bounds::FactSet to_facts(const CupVerdict& verdict) {
  bounds::FactSet f;
  if (verdict.accepted && verdict.claim) f.cup_claims.push_back(*verdict.claim);
  return f;
}

// ---------------------------------------------------------------------------
// Integer matrices

std::vector<std::int64_t> smith_invariants(const IntMatrix& m) {
  auto a = m.entries;
  const int rows = m.rows;
  const int cols = m.cols;
  std::vector<std::int64_t> out;
  for (int t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      int pi = -1, pj = -1;
      for (int i = t; i < rows; ++i) {
        for (int j = t; j < cols; ++j) {
          if (a[i][j] != 0 && (pi < 0 || std::llabs(a[i][j]) < std::llabs(a[pi][pj]))) {
            pi = i;
            pj = j;
          }
        }
      }
      if (pi < 0) return out;
      std::swap(a[t], a[pi]);
      for (int i = 0; i < rows; ++i) std::swap(a[i][t], a[i][pj]);
      bool clean = true;
      for (int i = t + 1; i < rows; ++i) {
        const std::int64_t q = a[i][t] / a[t][t];
        for (int j = t; j < cols; ++j) a[i][j] = checked_add(a[i][j], -checked_mul(q, a[t][j]));
        if (a[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < cols; ++j) {
        const std::int64_t q = a[t][j] / a[t][t];
        for (int i = t; i < rows; ++i) a[i][j] = checked_add(a[i][j], -checked_mul(q, a[i][t]));
        if (a[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // The pivot must divide the rest of the block.
      int bad = -1;
      for (int i = t + 1; i < rows && bad < 0; ++i) {
        for (int j = t + 1; j < cols; ++j) {
          if (a[i][j] % a[t][t] != 0) {
            bad = i;
            break;
          }
        }
      }
      if (bad < 0) break;
      for (int j = t; j < cols; ++j) a[t][j] = checked_add(a[t][j], a[bad][j]);
    }
    out.push_back(std::llabs(a[t][t]));
  }
  return out;
}

int rank(const IntMatrix& m, const Coefficients& c) {
  if (c.kind != CoefficientKind::Zp) return static_cast<int>(smith_invariants(m).size());
  auto a = m.entries;
  for (auto& row : a) {
    for (auto& x : row) x = mod(x, c.p);
  }
  int r = 0;
  for (int col = 0; col < m.cols && r < m.rows; ++col) {
    int piv = -1;
    for (int i = r; i < m.rows; ++i) {
      if (a[i][col] != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(a[r], a[piv]);
    const std::int64_t inv = inverse_mod(a[r][col], c.p);
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || a[i][col] == 0) continue;
      const std::int64_t f = checked_mul(a[i][col], inv) % c.p;
      for (int j = col; j < m.cols; ++j) a[i][j] = mod(a[i][j] - checked_mul(f, a[r][j]) % c.p, c.p);
    }
    ++r;
  }
  return r;
}

bool injective(const IntMatrix& m, const Coefficients& c) { return rank(m, c) == m.cols; }

bool surjective(const IntMatrix& m, const Coefficients& c) {
  if (c.kind == CoefficientKind::Z) {
    const auto inv = smith_invariants(m);
    return static_cast<int>(inv.size()) == m.rows &&
           std::all_of(inv.begin(), inv.end(), [](std::int64_t d) { return d == 1; });
  }
  return rank(m, c) == m.rows;
}

// ---------------------------------------------------------------------------
// Induced-map certificates

InducedMapCertificate InducedMapCertificate::from_json(const json& j) {
  InducedMapCertificate c;
  c.space = j.at("space").get<std::string>();
  c.functor = j.value("functor", std::string("pi_*"));
  const std::string dir = j.at("direction").get<std::string>();
  if (dir == "pullback_noninjective") {
    c.direction = InducedDirection::PullbackNoninjective;
  } else if (dir == "pushforward_nonsurjective") {
    c.direction = InducedDirection::PushforwardNonsurjective;
  } else {
    throw Error(ErrorCode::Parse, "direction must be pullback_noninjective or pushforward_nonsurjective");
  }
  c.coefficients = Coefficients::parse(j.value("coefficients", std::string("Z")));
  for (const auto& mj : j.at("matrices")) {
    IntMatrix m;
    m.degree = mj.at("degree").get<int>();
    m.rows = mj.at("rows").get<int>();
    m.cols = mj.at("cols").get<int>();
    if (m.rows < 0 || m.cols < 0) throw Error(ErrorCode::Parse, "negative matrix size");
    m.entries.assign(m.rows, std::vector<std::int64_t>(m.cols, 0));
    const json entries = mj.value("entries", json::array());
    if (!entries.empty() || (m.rows > 0 && m.cols > 0)) {
      if (static_cast<int>(entries.size()) != m.rows) throw Error(ErrorCode::Parse, "matrix row count mismatch");
      for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(entries[i].size()) != m.cols) throw Error(ErrorCode::Parse, "matrix column count mismatch");
        for (int jj = 0; jj < m.cols; ++jj) m.entries[i][jj] = entries[i][jj].get<std::int64_t>();
      }
    }
    c.matrices.push_back(std::move(m));
  }
  if (c.matrices.empty()) throw Error(ErrorCode::Parse, "induced certificate without matrices");
  return c;
}

InducedVerdict verify_induced_certificate(const InducedMapCertificate& cert) {
  InducedVerdict v;
  const bool pullback = cert.direction == InducedDirection::PullbackNoninjective;
  for (const auto& m : cert.matrices) {
    const bool witness = pullback ? !injective(m, cert.coefficients) : !surjective(m, cert.coefficients);
    if (!witness) continue;
    v.accepted = true;
    v.degree = m.degree;
    const std::string what = std::string(pullback ? "not injective" : "not surjective") + " in degree " +
                             std::to_string(m.degree);
    const std::string source = "induced-map certificate: " + cert.functor + " of pi(2,1," + cert.space + ") " + what;
    bounds::AxiomFact a;
    a.quantity = bounds::Quantity::parse("sec(" + bounds::projection_id(2, 1, cert.space) + ")");
    a.interval = {2, 2};
    a.source = source;
    v.facts.axioms.push_back(a);
    v.facts.attributes[cert.space]["FPP"] = true;
    v.message = cert.functor + " " + what + ": sec(pi(2,1," + cert.space + ")) = 2, so " + cert.space +
                " has the FPP";
    return v;
  }
  v.rejection = pullback ? Rejection::AllInjective : Rejection::AllSurjective;
  v.message = pullback ? "every matrix is injective" : "every matrix is surjective";
  return v;
}

json verify_certificate_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  json out;
  out["type"] = type;
  if (type == "cup") {
    const auto cert = CupLengthCertificate::from_json(j);
    const auto v = verify_cup_certificate(cert);
    out["accepted"] = v.accepted;
    out["rejection"] = std::string(to_string(v.rejection));
    out["stage"] = v.stage;
    out["product"] = cert.ring.element_json(v.product);
    out["message"] = v.message;
    out["facts"] = to_facts(v).to_json();
  } else if (type == "induced") {
    const auto v = verify_induced_certificate(InducedMapCertificate::from_json(j));
    out["accepted"] = v.accepted;
    out["rejection"] = std::string(to_string(v.rejection));
    out["degree"] = v.degree ? json(*v.degree) : json(nullptr);
    out["message"] = v.message;
    out["facts"] = v.facts.to_json();
  } else {
    throw Error(ErrorCode::Parse, "certificate type must be \"cup\" or \"induced\"");
  }
  return out;
}

}  // namespace confsec::cert
