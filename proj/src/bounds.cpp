#include "bounds_engine.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>
#include <sstream>

namespace confsec::bounds {

using nlohmann::json;

namespace {

std::string strip(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::string bound_text(int v) { return v == kInfinity ? "inf" : std::to_string(v); }

int parse_bound(const json& j, const std::string& where) {
  if (j.is_string() && (j == "inf" || j == "infinity")) return kInfinity;
  if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() >= kInfinity) {
    throw Error(ErrorCode::Parse, where + ": bounds are integers >= 1 or \"inf\"");
  }
  return j.get<int>();
}

std::string attr_key(const std::string& subject, const std::string& name) { return subject + "|" + name; }

std::vector<DerivationPtr> nonnull(std::vector<DerivationPtr> in) {
  std::erase(in, nullptr);
  std::sort(in.begin(), in.end());
  in.erase(std::unique(in.begin(), in.end()), in.end());
  return in;
}

}  // namespace

std::string Interval::str() const { return "[" + bound_text(lo) + "," + bound_text(hi) + "]"; }

std::string_view to_string(Tri value) {
  switch (value) {
    case Tri::Unknown: return "unknown";
    case Tri::True: return "true";
    case Tri::False: return "false";
  }
  return "?";
}

std::string configuration_space_id(const std::string& space, int k) {
  if (k == 1) return space;
  return "F(" + space + "," + std::to_string(k) + ")";
}

std::string projection_id(int k, int r, const std::string& space) {
  return "pi(" + std::to_string(k) + "," + std::to_string(r) + "," + space + ")";
}

// ---------------------------------------------------------------------------
// Quantity

Quantity Quantity::parse(std::string_view text) {
  const std::string s = strip(text);
  const auto open = s.find('(');
  if (open == std::string::npos || s.empty() || s.back() != ')') {
    throw Error(ErrorCode::Parse, "quantity must look like kind(subject): '" + std::string(text) + "'");
  }
  const std::string head = s.substr(0, open);
  std::string subject = s.substr(open + 1, s.size() - open - 2);
  if (subject.empty()) throw Error(ErrorCode::Parse, "empty subject in '" + std::string(text) + "'");
  if (auto f = detail::parse_configuration_space(subject)) subject = configuration_space_id(f->first, f->second);
  const bool is_pi = detail::parse_projection(subject).has_value();
  if (subject.rfind("pi(", 0) == 0 && !is_pi) {
    throw Error(ErrorCode::Parse, "malformed projection '" + subject + "' (need pi(k,r,X), k > r >= 1)");
  }
  Quantity q;
  q.subject = subject;
  if (head == "cat") {
    q.kind = QuantityKind::Cat;
  } else if (head == "TC") {
    q.kind = is_pi ? QuantityKind::TCMap : QuantityKind::TC;
  } else if (head == "sec") {
    q.kind = QuantityKind::Sec;
  } else if (head == "secat") {
    q.kind = QuantityKind::Secat;
  } else {
    throw Error(ErrorCode::Parse, "unknown quantity kind '" + head + "' (cat, TC, sec, secat)");
  }
  if ((q.kind == QuantityKind::Cat) && is_pi) throw Error(ErrorCode::Parse, "cat of a map is undefined");
  return q;
}

std::string Quantity::str() const {
  switch (kind) {
    case QuantityKind::Cat: return "cat(" + subject + ")";
    case QuantityKind::TC:
    case QuantityKind::TCMap: return "TC(" + subject + ")";
    case QuantityKind::Sec: return "sec(" + subject + ")";
    case QuantityKind::Secat: return "secat(" + subject + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// FactSet

FactSet FactSet::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "facts file must be a JSON object");
  FactSet out;
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> known{"axioms", "attributes", "maps", "relations", "cup_claims",
                                             "presets", "description"};
    if (!known.count(key)) throw Error(ErrorCode::Parse, "unknown key '" + key + "' in facts file");
  }
  if (j.contains("axioms")) {
    for (const auto& a : j.at("axioms")) {
      if (!a.contains("q")) throw Error(ErrorCode::Parse, "axiom without \"q\"");
      AxiomFact f;
      f.quantity = Quantity::parse(a.at("q").get<std::string>());
      const std::string where = "axiom " + f.quantity.str();
      if (a.contains("eq")) {
        f.interval.lo = f.interval.hi = parse_bound(a.at("eq"), where);
      } else {
        if (a.contains("lo")) f.interval.lo = parse_bound(a.at("lo"), where);
        if (a.contains("ge")) f.interval.lo = parse_bound(a.at("ge"), where);
        if (a.contains("hi")) f.interval.hi = parse_bound(a.at("hi"), where);
        if (a.contains("le")) f.interval.hi = parse_bound(a.at("le"), where);
      }
      if (f.interval.lo > f.interval.hi) throw Error(ErrorCode::Parse, where + ": lo > hi");
      f.source = a.value("source", std::string("facts file"));
      out.axioms.push_back(std::move(f));
    }
  }
  if (j.contains("attributes")) {
    for (const auto& [subject, names] : j.at("attributes").items()) {
      for (const auto& n : names) {
        std::string name = n.get<std::string>();
        bool value = true;
        if (!name.empty() && name[0] == '!') {
          value = false;
          name.erase(0, 1);
        }
        if (name.empty()) throw Error(ErrorCode::Parse, "empty attribute for " + subject);
        out.attributes[strip(subject)][name] = value;
      }
    }
  }
  if (j.contains("maps")) {
    for (const auto& [name, decl] : j.at("maps").items()) {
      if (name.rfind("pi(", 0) == 0) throw Error(ErrorCode::Parse, "projections are built in: " + name);
      out.maps[name] = {strip(decl.at("total").get<std::string>()), strip(decl.at("base").get<std::string>())};
    }
  }
  if (j.contains("relations")) {
    for (const auto& r : j.at("relations")) {
      if (r.contains("homotopy_equivalent")) {
        const auto& p = r.at("homotopy_equivalent");
        out.homotopy_equivalent.emplace_back(strip(p.at(0).get<std::string>()), strip(p.at(1).get<std::string>()));
      } else if (r.contains("deformation_retract")) {
        const auto& p = r.at("deformation_retract");
        out.deformation_retracts.emplace_back(strip(p.at(0).get<std::string>()), strip(p.at(1).get<std::string>()));
      } else {
        throw Error(ErrorCode::Parse, "relation must be homotopy_equivalent or deformation_retract");
      }
    }
  }
  if (j.contains("cup_claims")) {
    for (const auto& c : j.at("cup_claims")) {
      CupClaim claim{strip(c.at("map").get<std::string>()), c.at("k").get<int>(),
                     c.value("provenance", std::string("cup-length certificate"))};
      if (claim.k < 1) throw Error(ErrorCode::Parse, "cup claim needs k >= 1");
      out.cup_claims.push_back(std::move(claim));
    }
  }
  out.presets = j.value("presets", true);
  return out;
}

json FactSet::to_json() const {
  json j;
  j["axioms"] = json::array();
  for (const auto& a : axioms) {
    json e{{"q", a.quantity.str()}, {"source", a.source}};
    auto b = [](int v) { return v == kInfinity ? json("inf") : json(v); };
    if (a.interval.exact()) {
      e["eq"] = b(a.interval.lo);
    } else {
      e["lo"] = b(a.interval.lo);
      e["hi"] = b(a.interval.hi);
    }
    j["axioms"].push_back(e);
  }
  j["attributes"] = json::object();
  for (const auto& [subject, names] : attributes) {
    for (const auto& [name, value] : names) j["attributes"][subject].push_back((value ? "" : "!") + name);
  }
  j["maps"] = json::object();
  for (const auto& [name, d] : maps) j["maps"][name] = {{"total", d.total}, {"base", d.base}};
  j["relations"] = json::array();
  for (const auto& [a, b] : homotopy_equivalent) j["relations"].push_back({{"homotopy_equivalent", {a, b}}});
  for (const auto& [a, b] : deformation_retracts) j["relations"].push_back({{"deformation_retract", {a, b}}});
  j["cup_claims"] = json::array();
  for (const auto& c : cup_claims) j["cup_claims"].push_back({{"map", c.map}, {"k", c.k}, {"provenance", c.provenance}});
  j["presets"] = presets;
  return j;
}

void FactSet::merge(const FactSet& other) {
  axioms.insert(axioms.end(), other.axioms.begin(), other.axioms.end());
  for (const auto& [subject, names] : other.attributes) {
    for (const auto& [name, value] : names) {
      auto& slot = attributes[subject];
      const auto it = slot.find(name);
      if (it != slot.end() && it->second != value) {
        throw Error(ErrorCode::Contradiction, "merged fact sets disagree on " + name + "(" + subject + ")");
      }
      slot[name] = value;
    }
  }
  maps.insert(other.maps.begin(), other.maps.end());
  homotopy_equivalent.insert(homotopy_equivalent.end(), other.homotopy_equivalent.begin(),
                             other.homotopy_equivalent.end());
  deformation_retracts.insert(deformation_retracts.end(), other.deformation_retracts.begin(),
                              other.deformation_retracts.end());
  cup_claims.insert(cup_claims.end(), other.cup_claims.begin(), other.cup_claims.end());
  presets = presets && other.presets;
}

// ---------------------------------------------------------------------------
// Engine

namespace detail {

std::optional<Projection> parse_projection(std::string_view raw) {
  const std::string id = strip(raw);
  if (id.rfind("pi(", 0) != 0 || id.back() != ')') return std::nullopt;
  const std::string body = id.substr(3, id.size() - 4);
  const auto c1 = body.find(',');
  if (c1 == std::string::npos) return std::nullopt;
  const auto c2 = body.find(',', c1 + 1);
  if (c2 == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    Projection p;
    p.k = std::stoi(body.substr(0, c1), &used);
    if (used != c1) return std::nullopt;
    p.r = std::stoi(body.substr(c1 + 1, c2 - c1 - 1), &used);
    if (used != c2 - c1 - 1) return std::nullopt;
    p.space = body.substr(c2 + 1);
    if (p.space.empty() || p.r < 1 || p.k <= p.r || p.k > 64) return std::nullopt;
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<std::pair<std::string, int>> parse_configuration_space(std::string_view raw) {
  const std::string id = strip(raw);
  if (id.rfind("F(", 0) != 0 || id.back() != ')') return std::nullopt;
  const std::string body = id.substr(2, id.size() - 3);
  const auto comma = body.rfind(',');
  if (comma == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    const int k = std::stoi(body.substr(comma + 1), &used);
    if (used != body.size() - comma - 1 || k < 1) return std::nullopt;
    return std::pair{body.substr(0, comma), k};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int saturating_add(int a, int b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  const long long s = static_cast<long long>(a) + b;
  return s >= kInfinity ? kInfinity : static_cast<int>(s);
}

int saturating_mul(int a, int b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  const long long s = static_cast<long long>(a) * b;
  return s >= kInfinity ? kInfinity : static_cast<int>(s);
}

Interval Engine::get(const std::string& q) const {
  const auto it = nodes_.find(q);
  return it == nodes_.end() ? Interval{} : it->second.interval;
}

DerivationPtr Engine::why_lo(const std::string& q) const {
  const auto it = nodes_.find(q);
  return it == nodes_.end() ? nullptr : it->second.lower;
}

DerivationPtr Engine::why_hi(const std::string& q) const {
  const auto it = nodes_.find(q);
  return it == nodes_.end() ? nullptr : it->second.upper;
}

Tri Engine::attr(const std::string& subject, const std::string& name) const {
  const auto it = attrs_.find(attr_key(subject, name));
  if (it == attrs_.end()) return Tri::Unknown;
  return it->second.value ? Tri::True : Tri::False;
}

DerivationPtr Engine::why_attr(const std::string& subject, const std::string& name) const {
  const auto it = attrs_.find(attr_key(subject, name));
  return it == attrs_.end() ? nullptr : it->second.why;
}

void Engine::raise(const std::string& q, int value, const std::string& rule, std::vector<DerivationPtr> premises) {
  Node& n = nodes_[q];
  if (value <= n.interval.lo) return;
  n.interval.lo = value;
  n.lower = std::make_shared<Derivation>(Derivation{rule, q + " >= " + bound_text(value), nonnull(std::move(premises))});
  changed_ = true;
  if (n.interval.lo > n.interval.hi) {
    throw ContradictionError(q, n.lower, n.upper,
                             q + ": derived lower bound " + bound_text(n.interval.lo) + " exceeds upper bound " +
                                 bound_text(n.interval.hi));
  }
}

void Engine::lower(const std::string& q, int value, const std::string& rule, std::vector<DerivationPtr> premises) {
  Node& n = nodes_[q];
  if (value >= n.interval.hi) return;
  n.interval.hi = value;
  n.upper = std::make_shared<Derivation>(Derivation{rule, q + " <= " + bound_text(value), nonnull(std::move(premises))});
  changed_ = true;
  if (n.interval.lo > n.interval.hi) {
    throw ContradictionError(q, n.lower, n.upper,
                             q + ": derived upper bound " + bound_text(n.interval.hi) + " is below lower bound " +
                                 bound_text(n.interval.lo));
  }
}

void Engine::assert_attr(const std::string& subject, const std::string& name, bool value, const std::string& rule,
                         std::vector<DerivationPtr> premises, const std::string& statement) {
  const std::string key = attr_key(subject, name);
  const std::string text =
      statement.empty() ? (value ? "" : "not ") + name + "(" + subject + ")" : statement;
  auto d = std::make_shared<Derivation>(Derivation{rule, text, nonnull(std::move(premises))});
  const auto it = attrs_.find(key);
  if (it != attrs_.end()) {
    if (it->second.value == value) return;
    const DerivationPtr yes = value ? DerivationPtr(d) : it->second.why;
    const DerivationPtr no = value ? it->second.why : DerivationPtr(d);
    throw ContradictionError(key, yes, no, name + "(" + subject + ") derived both true and false");
  }
  attrs_[key] = {value, d};
  changed_ = true;
}

void Engine::equate(const std::string& a, const std::string& b, const std::string& rule,
                    std::vector<DerivationPtr> guard) {
  auto with = [&](DerivationPtr extra) {
    auto v = guard;
    v.push_back(std::move(extra));
    return v;
  };
  raise(a, lo(b), rule, with(why_lo(b)));
  lower(a, hi(b), rule, with(why_hi(b)));
  raise(b, lo(a), rule, with(why_lo(a)));
  lower(b, hi(a), rule, with(why_hi(a)));
}

void Engine::warn(const std::string& message) {
  if (std::find(warnings_.begin(), warnings_.end(), message) == warnings_.end()) warnings_.push_back(message);
}

std::map<std::string, Interval> Engine::intervals() const {
  std::map<std::string, Interval> out;
  for (const auto& [k, n] : nodes_) out[k] = n.interval;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Universe and propagation

namespace {

using detail::Engine;
using detail::Universe;

Quantity resolve_with(const std::map<std::string, MapDecl>& maps, Quantity q) {
  if (q.kind == QuantityKind::TC && maps.count(q.subject)) q.kind = QuantityKind::TCMap;
  return q;
}

void note_subject(Universe& u, const std::map<std::string, MapDecl>& maps, const std::string& subject) {
  if (auto p = detail::parse_projection(subject)) {
    u.primitive_spaces.insert(p->space);
    u.max_k = std::max(u.max_k, p->k);
    return;
  }
  if (maps.count(subject)) return;
  if (auto f = detail::parse_configuration_space(subject)) {
    u.primitive_spaces.insert(f->first);
    u.max_k = std::max(u.max_k, f->second);
    u.spaces.insert(configuration_space_id(f->first, f->second));
    return;
  }
  u.primitive_spaces.insert(subject);
}

Universe build_universe(const FactSet& facts, std::span<const Quantity> interest) {
  Universe u;
  for (const auto& a : facts.axioms) note_subject(u, facts.maps, a.quantity.subject);
  for (const auto& [subject, names] : facts.attributes) note_subject(u, facts.maps, subject);
  for (const auto& q : interest) note_subject(u, facts.maps, q.subject);
  for (const auto& c : facts.cup_claims) note_subject(u, facts.maps, c.map);
  for (const auto& [a, b] : facts.homotopy_equivalent) {
    note_subject(u, facts.maps, a);
    note_subject(u, facts.maps, b);
  }
  for (const auto& [l, x] : facts.deformation_retracts) {
    note_subject(u, facts.maps, l);
    note_subject(u, facts.maps, x);
  }
  for (const auto& [name, d] : facts.maps) {
    u.maps[name] = {name, d.total, d.base, std::nullopt};
    u.spaces.insert(d.total);
    u.spaces.insert(d.base);
  }
  for (const auto& x : u.primitive_spaces) {
    u.spaces.insert(x);
    for (int k = 2; k <= u.max_k; ++k) {
      u.spaces.insert(configuration_space_id(x, k));
      for (int r = 1; r < k; ++r) {
        const std::string id = projection_id(k, r, x);
        u.maps[id] = {id, configuration_space_id(x, k), configuration_space_id(x, r), detail::Projection{k, r, x}};
      }
    }
  }
  u.homotopy_equivalent = facts.homotopy_equivalent;
  u.deformation_retracts = facts.deformation_retracts;
  for (const auto& c : facts.cup_claims) {
    auto d = std::make_shared<Derivation>(
        Derivation{"CERT", "cup-length certificate for " + c.map + " with " + std::to_string(c.k) +
                               " classes (" + c.provenance + ")",
                   {}});
    u.cup_claims.emplace_back(c, d);
  }
  return u;
}

}  // namespace

FactStore propagate(const FactSet& facts, std::span<const Quantity> interest, const PropagateOptions& options) {
  Universe u = build_universe(facts, interest);
  if (facts.presets) detail::preset_relations(u);
  Engine engine(std::move(u));

  for (const auto& a : facts.axioms) {
    const Quantity q = resolve_with(facts.maps, a.quantity);
    const std::string text = a.interval.exact() ? q.str() + " = " + bound_text(a.interval.lo)
                                                : q.str() + " in " + a.interval.str();
    auto d = std::make_shared<Derivation>(Derivation{"AXIOM", text + " (" + a.source + ")", {}});
    auto& node = engine.nodes()[q.str()];
    const Interval merged{std::max(node.interval.lo, a.interval.lo), std::min(node.interval.hi, a.interval.hi)};
    if (merged.lo > node.interval.lo) node.lower = d;
    if (merged.hi < node.interval.hi) node.upper = d;
    node.interval = merged;
    if (merged.lo > merged.hi) {
      throw ContradictionError(q.str(), node.lower, node.upper, q.str() + ": axioms disagree");
    }
  }
  for (const auto& [subject, names] : facts.attributes) {
    for (const auto& [name, value] : names) {
      engine.assert_attr(subject, name, value, "AXIOM", {},
                         (value ? "" : "not ") + name + "(" + subject + ") (facts file)");
    }
  }
  if (facts.presets) {
    const auto spaces = engine.universe().spaces;
    for (const auto& s : spaces) detail::apply_presets(engine, s);
  }

  const auto& rules = detail::rule_impls();
  std::vector<std::size_t> order(rules.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(options.rule_order_seed.value_or(0));

  int rounds = 0;
  while (true) {
    if (++rounds > options.max_rounds) {
      throw Error(ErrorCode::SearchBudgetExceeded, "propagation did not settle within the round limit");
    }
    if (options.rule_order_seed) std::shuffle(order.begin(), order.end(), rng);
    engine.reset_changed();
    bool any = false;
    for (std::size_t i : order) {
      rules[i].apply(engine);
      any = any || engine.changed();
      engine.reset_changed();
    }
    if (!any) break;
  }

  FactStore store;
  for (auto& [key, node] : engine.nodes()) store.values_[key] = {node.interval, node.lower, node.upper};
  for (auto& [key, a] : engine.attrs()) store.attributes_[key] = {a.value, a.why};
  store.maps_ = facts.maps;
  store.warnings_ = engine.warnings();
  store.rounds_ = rounds;
  return store;
}

Quantity FactStore::resolve(Quantity q) const { return resolve_with(maps_, std::move(q)); }

QueryResult FactStore::query(const Quantity& raw) const {
  const Quantity q = resolve(raw);
  const auto it = values_.find(q.str());
  if (it == values_.end()) return {};
  return {it->second.interval, it->second.lower, it->second.upper};
}

QueryResult FactStore::query(std::string_view text) const { return query(Quantity::parse(text)); }

AttributeResult FactStore::attribute(const std::string& subject, const std::string& name) const {
  const auto it = attributes_.find(attr_key(strip(subject), name));
  if (it == attributes_.end()) return {};
  return {it->second.value ? Tri::True : Tri::False, it->second.why};
}

std::vector<Quantity> FactStore::quantities() const {
  std::vector<Quantity> out;
  for (const auto& [key, node] : values_) out.push_back(resolve(Quantity::parse(key)));
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_into(const DerivationPtr& d, int indent, std::set<const Derivation*>& seen, std::ostringstream& out) {
  if (!d) return;
  out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << d->statement << "  [" << d->rule << "]";
  if (seen.count(d.get()) && !d->premises.empty()) {
    out << " (derived above)\n";
    return;
  }
  seen.insert(d.get());
  out << "\n";
  for (const auto& p : d->premises) render_into(p, indent + 1, seen, out);
}

json to_json_into(const DerivationPtr& d, std::set<const Derivation*>& seen) {
  json j{{"rule", d->rule}, {"statement", d->statement}};
  if (seen.count(d.get()) && !d->premises.empty()) {
    j["repeated"] = true;
    return j;
  }
  seen.insert(d.get());
  j["premises"] = json::array();
  for (const auto& p : d->premises) j["premises"].push_back(to_json_into(p, seen));
  return j;
}

}  // namespace

std::string render(const DerivationPtr& d, int indent) {
  std::ostringstream out;
  std::set<const Derivation*> seen;
  render_into(d, indent, seen, out);
  return out.str();
}

json to_json(const DerivationPtr& d) {
  if (!d) return nullptr;
  std::set<const Derivation*> seen;
  return to_json_into(d, seen);
}

json to_json(const Interval& iv) {
  auto b = [](int v) { return v == kInfinity ? json("inf") : json(v); };
  return {{"lo", b(iv.lo)}, {"hi", b(iv.hi)}};
}

std::string explain(const Quantity& q, const QueryResult& result) {
  std::ostringstream out;
  out << q.str() << " in " << result.interval.str() << "\n";
  out << "lower bound:\n";
  if (result.lower) {
    out << render(result.lower, 1);
  } else {
    out << "  " << q.str() << " >= 1  [trivial]\n";
  }
  out << "upper bound:\n";
  if (result.upper) {
    out << render(result.upper, 1);
  } else {
    out << "  none known\n";
  }
  return out.str();
}

}  // namespace confsec::bounds
