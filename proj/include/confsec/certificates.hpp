#pragma once

// Checkable lower-bound certificates: cup-length products and induced maps of pi_{2,1}.

#include "confsec/bounds.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confsec::cert {

/// Exact rational with 64-bit parts; throws InvalidArgument on overflow.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }

  /// "3", "-2/5".
  static Rational parse(std::string_view text);
  std::string str() const;

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const;
  bool operator==(const Rational&) const = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

enum class CoefficientKind { Z, Zp, Q };

struct Coefficients {
  CoefficientKind kind = CoefficientKind::Z;
  std::int64_t p = 0;  // prime, Zp only

  /// "Z", "Q", "Z_2", "Z_3", ...
  static Coefficients parse(std::string_view text);
  std::string str() const;
  /// Canonical representative: integers for Z (non-integers rejected), [0, p) for Zp.
  Rational reduce(const Rational& x) const;
};

/// Linear combination of basis elements; index -> nonzero coefficient.
using Element = std::map<int, Rational>;

struct BasisElement {
  std::string name;
  int degree = 0;
};

class GradedRing {
 public:
  /// {"coefficients":"Z", "basis":[{"name":"x","degree":1},..],
  ///  "products":[{"a":"x","b":"y","value":{"xy":1}},..]}
  /// The unit "1" (degree 0) is implicit. Missing products are zero; the
  /// mirrored product b*a is filled in by graded commutativity. Throws Parse
  /// when the table is not graded, associative and graded-commutative.
  static GradedRing from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const Coefficients& coefficients() const noexcept { return coefficients_; }
  const std::vector<BasisElement>& basis() const noexcept { return basis_; }
  int index_of(std::string_view name) const;  // throws InvalidArgument for unknown names

  /// Element from {"x":1,"y":"-1/2"} or a bare basis name.
  Element element(const nlohmann::json& j) const;
  nlohmann::json element_json(const Element& e) const;
  std::string element_str(const Element& e) const;

  Element multiply(const Element& a, const Element& b) const;
  Element basis_product(int a, int b) const;

 private:
  Element normalized(Element e) const;
  void check_structure() const;

  Coefficients coefficients_;
  std::vector<BasisElement> basis_;  // basis_[0] is the unit
  std::map<std::pair<int, int>, Element> table_;
};

Element multiply(const GradedRing& ring, const Element& a, const Element& b);

struct CupLengthCertificate {
  std::string map;  // e.g. "pi(2,1,T2)" or a declared map name
  GradedRing ring;
  std::vector<Element> classes;
  std::string assertion;  // the recorded p*(alpha_i) = 0 claim

  static CupLengthCertificate from_json(const nlohmann::json& j);
};

enum class Rejection { None, ZeroClass, ProductVanishes, AllInjective, AllSurjective };

std::string_view to_string(Rejection r);

struct CupVerdict {
  bool accepted = false;
  Rejection rejection = Rejection::None;
  int stage = 0;  // ZeroClass: index of the zero class; ProductVanishes: number of classes multiplied
  Element product;
  std::optional<bounds::CupClaim> claim;  // sec(map) >= k + 1
  std::string message;
};

CupVerdict verify_cup_certificate(const CupLengthCertificate& cert);

enum class InducedDirection { PullbackNoninjective, PushforwardNonsurjective };

/// Homomorphism Z^cols -> Z^rows (or over Q, Z_p); column j is the image of generator j.
struct IntMatrix {
  int degree = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::int64_t>> entries;  // rows x cols
};

struct InducedMapCertificate {
  std::string space;  // X in pi(2,1,X)
  std::string functor;  // "pi_2", "H_*", "H^*", ...
  InducedDirection direction = InducedDirection::PushforwardNonsurjective;
  Coefficients coefficients;
  std::vector<IntMatrix> matrices;

  static InducedMapCertificate from_json(const nlohmann::json& j);
};

struct InducedVerdict {
  bool accepted = false;
  Rejection rejection = Rejection::None;
  std::optional<int> degree;  // the degree that witnesses acceptance
  bounds::FactSet facts;      // sec(pi(2,1,X)) = 2 and FPP(X) when accepted
  std::string message;
};

InducedVerdict verify_induced_certificate(const InducedMapCertificate& cert);

/// Diagonal of the Smith normal form (nonzero invariant factors, positive, each dividing the next).
std::vector<std::int64_t> smith_invariants(const IntMatrix& m);
/// Rank over Q (kind Z or Q) or over Z_p.
int rank(const IntMatrix& m, const Coefficients& c);
bool injective(const IntMatrix& m, const Coefficients& c);
bool surjective(const IntMatrix& m, const Coefficients& c);

/// Facts for the bounds engine from an accepted cup certificate.
bounds::FactSet to_facts(const CupVerdict& verdict);

/// Dispatches on "type": "cup" or "induced"; returns {"accepted":..,"rejection":..,"facts":..}.
nlohmann::json verify_certificate_json(const nlohmann::json& j);

}  // namespace confsec::cert
