#include "confsec/finite.hpp"

#include "confsec/error.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <queue>
#include <set>

namespace confsec::finite {

namespace {

Mask bit(int i) { return Mask{1} << i; }

void charge(std::uint64_t& nodes, std::uint64_t budget) {
  if (++nodes > budget) {
    throw Error(ErrorCode::SearchBudgetExceeded,
                "node budget of " + std::to_string(budget) + " partial assignments exhausted");
  }
}

void require_same(const FinitePoset& a, const MapValues& f) {
  if (static_cast<int>(f.size()) != a.size()) {
    throw Error(ErrorCode::InvalidArgument, "map has " + std::to_string(f.size()) +
                                                " values for a domain of size " + std::to_string(a.size()));
  }
}

// Fixed-point-free monotone maps g: U -> P on an up-set U, in index order
// with pairwise constraint checks. Shared by the cover search.
bool search_local_section(const FinitePoset& p, Mask open_set, MapValues& g, int i,
                          std::uint64_t& nodes, std::uint64_t budget) {
  const int n = p.size();
  while (i < n && !((open_set >> i) & 1u)) ++i;
  if (i == n) return true;
  for (int v = 0; v < n; ++v) {
    if (v == i) continue;
    charge(nodes, budget);
    bool ok = true;
    for (int j = 0; j < i && ok; ++j) {
      if (!((open_set >> j) & 1u)) continue;
      if (p.leq(j, i) && !p.leq(g[j], v)) ok = false;
      if (p.leq(i, j) && !p.leq(v, g[j])) ok = false;
    }
    if (!ok) continue;
    g[i] = v;
    if (search_local_section(p, open_set, g, i + 1, nodes, budget)) return true;
  }
  g[i] = -1;
  return false;
}

void enumerate_monotone(const FinitePoset& domain, const FinitePoset& codomain, MapValues& current, int i,
                        std::vector<MapValues>& out, std::uint64_t& nodes, std::uint64_t budget) {
  if (i == domain.size()) {
    out.push_back(current);
    return;
  }
  Mask allowed = codomain.all();
  for (int j = 0; j < i; ++j) {
    if (domain.leq(j, i)) allowed &= codomain.up_set(current[j]);
    if (domain.leq(i, j)) allowed &= codomain.down_set(current[j]);
  }
  for (int v = 0; v < codomain.size(); ++v) {
    if (!((allowed >> v) & 1u)) continue;
    charge(nodes, budget);
    current[i] = v;
    enumerate_monotone(domain, codomain, current, i + 1, out, nodes, budget);
  }
}

bool pointwise_comparable(const FinitePoset& codomain, const MapValues& f, const MapValues& g) {
  bool le = true;
  bool ge = true;
  for (std::size_t i = 0; i < f.size(); ++i) {
    le = le && codomain.leq(f[i], g[i]);
    ge = ge && codomain.leq(g[i], f[i]);
  }
  return le || ge;
}

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// FinitePoset

FinitePoset FinitePoset::from_relations(int n, std::span<const std::pair<int, int>> leq) {
  if (n < 1 || n > kMaxPosetSize) {
    throw Error(ErrorCode::InvalidArgument, "poset size must lie in [1," + std::to_string(kMaxPosetSize) + "]");
  }
  FinitePoset p;
  p.n_ = n;
  p.up_.assign(n, 0);
  for (int i = 0; i < n; ++i) p.up_[i] = bit(i);
  for (const auto& [a, b] : leq) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw Error(ErrorCode::InvalidArgument, "relation index out of range");
    }
    p.up_[a] |= bit(b);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if ((p.up_[i] >> k) & 1u) p.up_[i] |= p.up_[k];
    }
  }
  p.down_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((p.up_[i] >> j) & 1u) p.down_[j] |= bit(i);
    }
  }
  for (int i = 0; i < n; ++i) {
    const Mask both = p.up_[i] & p.down_[i] & ~bit(i);
    if (both != 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "relation is not antisymmetric at points " + std::to_string(i) + " and " +
                      std::to_string(std::countr_zero(both)));
    }
  }
  return p;
}

FinitePoset FinitePoset::antichain(int n) { return from_relations(n, {}); }

FinitePoset FinitePoset::chain(int n) {
  std::vector<std::pair<int, int>> rel;
  for (int i = 0; i + 1 < n; ++i) rel.emplace_back(i, i + 1);
  return from_relations(n, rel);
}

FinitePoset FinitePoset::circle_model() {
  const std::vector<std::pair<int, int>> rel{{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  return from_relations(4, rel);
}

bool FinitePoset::is_up_set(Mask m) const noexcept {
  for (int i = 0; i < n_; ++i) {
    if (((m >> i) & 1u) && (up_[i] & ~m) != 0) return false;
  }
  return true;
}

std::vector<std::pair<int, int>> FinitePoset::relations() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i != j && leq(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

bool is_monotone(const FinitePoset& domain, const FinitePoset& codomain, const MapValues& values) {
  if (static_cast<int>(values.size()) != domain.size()) return false;
  for (int v : values) {
    if (v < 0 || v >= codomain.size()) return false;
  }
  for (int i = 0; i < domain.size(); ++i) {
    for (int j = 0; j < domain.size(); ++j) {
      if (domain.leq(i, j) && !codomain.leq(values[i], values[j])) return false;
    }
  }
  return true;
}

bool PosetMap::is_monotone() const { return finite::is_monotone(domain, codomain, values); }

// ---------------------------------------------------------------------------
// FPP

FppResult has_fpp(const FinitePoset& p, std::uint64_t budget) {
  const int n = p.size();
  FppResult result;
  MapValues f(n, -1);
  // Depth-first over points in index order; the candidate set for f(i) is the
  // intersection of the up/down sets forced by already assigned comparable points.
  std::vector<Mask> remaining(n + 1, 0);
  int i = 0;
  auto candidates = [&](int at) {
    Mask allowed = p.all() & ~bit(at);
    for (int j = 0; j < at; ++j) {
      if (p.leq(j, at)) allowed &= p.up_set(f[j]);
      if (p.leq(at, j)) allowed &= p.down_set(f[j]);
    }
    return allowed;
  };
  remaining[0] = candidates(0);
  while (i >= 0) {
    if (i == n) {
      result.has_fpp = false;
      result.witness = f;
      return result;
    }
    if (remaining[i] == 0) {
      f[i] = -1;
      --i;
      continue;
    }
    charge(result.nodes, budget);
    const int v = std::countr_zero(remaining[i]);
    remaining[i] &= ~bit(v);
    f[i] = v;
    ++i;
    if (i < n) remaining[i] = candidates(i);
  }
  result.has_fpp = true;
  return result;
}

// ---------------------------------------------------------------------------
// F(P,2)

int Config2::index_of(int x, int y) const {
  const auto it = std::find(pairs.begin(), pairs.end(), std::pair<int, int>{x, y});
  if (it == pairs.end()) return -1;
  return static_cast<int>(it - pairs.begin());
}

Config2 config2(const FinitePoset& p) {
  const int n = p.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "F(P,2) needs at least two points");
  if (n * (n - 1) > kMaxPosetSize) {
    throw Error(ErrorCode::InvalidArgument, "F(P,2) too large for a " + std::to_string(n) + "-point poset");
  }
  Config2 out;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x != y) out.pairs.emplace_back(x, y);
    }
  }
  std::vector<std::pair<int, int>> rel;
  for (std::size_t a = 0; a < out.pairs.size(); ++a) {
    for (std::size_t b = 0; b < out.pairs.size(); ++b) {
      if (a == b) continue;
      const auto [x, y] = out.pairs[a];
      const auto [u, v] = out.pairs[b];
      if (p.leq(x, u) && p.leq(y, v)) rel.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  out.poset = FinitePoset::from_relations(static_cast<int>(out.pairs.size()), rel);
  return out;
}

// ---------------------------------------------------------------------------
// sec(pi_{2,1})

std::string SecResult::str() const {
  switch (kind) {
    case SecKind::Finite: return std::to_string(value);
    case SecKind::ExceedsMax: return ">" + std::to_string(value);
    case SecKind::Infinite: return "Infinite";
  }
  return "?";
}

SecResult sec_pi21(const FinitePoset& p, int max_cover, std::uint64_t budget) {
  SecResult result;
  const int n = p.size();
  if (n < 2) {
    result.kind = SecKind::Infinite;
    result.theorem_applicable = false;
    return result;
  }
  if (n > 20) throw Error(ErrorCode::InvalidArgument, "sec search limited to 20 points");
  if (max_cover < 1) throw Error(ErrorCode::InvalidArgument, "max_cover must be >= 1");

  struct Admissible {
    Mask open_set;
    MapValues g;
  };
  std::vector<Admissible> admissible;
  for (Mask m = 1; m <= p.all(); ++m) {
    if (!p.is_up_set(m)) continue;
    MapValues g(n, -1);
    if (search_local_section(p, m, g, 0, result.nodes, budget)) admissible.push_back({m, g});
  }
  Mask reachable = 0;
  for (const auto& a : admissible) reachable |= a.open_set;
  if (reachable != p.all()) {
    result.kind = SecKind::Infinite;
    return result;
  }
  std::vector<Admissible> maximal;
  for (const auto& a : admissible) {
    const bool dominated = std::any_of(admissible.begin(), admissible.end(), [&](const Admissible& b) {
      return b.open_set != a.open_set && (a.open_set & ~b.open_set) == 0;
    });
    if (!dominated) maximal.push_back(a);
  }
  const int count = static_cast<int>(maximal.size());
  for (int m = 1; m <= std::min(max_cover, count); ++m) {
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      charge(result.nodes, budget);
      Mask covered = 0;
      for (int i : idx) covered |= maximal[i].open_set;
      if (covered == p.all()) {
        result.kind = SecKind::Finite;
        result.value = m;
        for (int i : idx) result.witnesses.push_back({maximal[i].open_set, maximal[i].g});
        return result;
      }
    } while (next_combination(idx, count));
  }
  result.kind = SecKind::ExceedsMax;
  result.value = max_cover;
  return result;
}

std::optional<std::vector<int>> section_from_map(const FinitePoset& p, const Config2& f2, Mask open_set,
                                                 const MapValues& g) {
  const int n = p.size();
  if (static_cast<int>(g.size()) != n || !p.is_up_set(open_set)) return std::nullopt;
  std::vector<int> section(n, -1);
  for (int x = 0; x < n; ++x) {
    if (!((open_set >> x) & 1u)) continue;
    if (g[x] < 0 || g[x] >= n || g[x] == x) return std::nullopt;
    section[x] = f2.index_of(x, g[x]);
    if (f2.pairs[section[x]].first != x) return std::nullopt;
  }
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (!((open_set >> x) & 1u) || !((open_set >> y) & 1u)) continue;
      if (p.leq(x, y) && !f2.poset.leq(section[x], section[y])) return std::nullopt;
    }
  }
  return section;
}

MapValues map_from_section(const Config2& f2, const std::vector<int>& section) {
  MapValues out(section.size(), -1);
  for (std::size_t x = 0; x < section.size(); ++x) {
    if (section[x] >= 0) out[x] = f2.pairs[section[x]].second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Homotopy and roots

std::vector<MapValues> homotopy_class(const FinitePoset& domain, const FinitePoset& codomain,
                                      const MapValues& f, std::uint64_t budget) {
  require_same(domain, f);
  if (!is_monotone(domain, codomain, f)) {
    throw Error(ErrorCode::InvalidArgument, "map is not monotone (not continuous)");
  }
  std::uint64_t nodes = 0;
  std::vector<MapValues> all;
  MapValues current(domain.size(), -1);
  enumerate_monotone(domain, codomain, current, 0, all, nodes, budget);
  std::sort(all.begin(), all.end());
  const auto start = std::lower_bound(all.begin(), all.end(), f) - all.begin();
  std::vector<char> seen(all.size(), 0);
  std::queue<std::size_t> frontier;
  frontier.push(static_cast<std::size_t>(start));
  seen[start] = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < all.size(); ++v) {
      if (seen[v]) continue;
      charge(nodes, budget);
      if (pointwise_comparable(codomain, all[u], all[v])) {
        seen[v] = 1;
        frontier.push(v);
      }
    }
  }
  std::vector<MapValues> component;
  for (std::size_t v = 0; v < all.size(); ++v) {
    if (seen[v]) component.push_back(all[v]);
  }
  return component;
}

bool homotopic(const FinitePoset& domain, const FinitePoset& codomain, const MapValues& f,
               const MapValues& g, std::uint64_t budget) {
  require_same(domain, g);
  if (!is_monotone(domain, codomain, g)) {
    throw Error(ErrorCode::InvalidArgument, "map is not monotone (not continuous)");
  }
  if (f == g) return true;
  const auto component = homotopy_class(domain, codomain, f, budget);
  return std::binary_search(component.begin(), component.end(), g);
}

int mr_bruteforce(const FinitePoset& domain, const FinitePoset& codomain, const MapValues& f, int a,
                  std::uint64_t budget) {
  if (a < 0 || a >= codomain.size()) throw Error(ErrorCode::InvalidArgument, "root target out of range");
  int best = domain.size();
  for (const auto& g : homotopy_class(domain, codomain, f, budget)) {
    best = std::min(best, static_cast<int>(std::count(g.begin(), g.end(), a)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Enumeration up to isomorphism

std::vector<FinitePoset> posets_up_to_isomorphism(int n) {
  if (n < 1 || n > 6) throw Error(ErrorCode::InvalidArgument, "enumeration supports 1..6 points");
  // Every poset has a linear extension, so it suffices to enumerate strict
  // orders contained in the natural order i < j and reduce by relabeling.
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  }
  std::vector<int> perm(n);
  std::vector<std::vector<int>> perms;
  std::iota(perm.begin(), perm.end(), 0);
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::set<std::uint64_t> seen;
  std::vector<FinitePoset> out;
  const std::uint64_t subsets = std::uint64_t{1} << slots.size();
  for (std::uint64_t s = 0; s < subsets; ++s) {
    std::vector<std::vector<char>> less(n, std::vector<char>(n, 0));
    for (std::size_t b = 0; b < slots.size(); ++b) {
      if ((s >> b) & 1u) less[slots[b].first][slots[b].second] = 1;
    }
    bool transitive = true;
    for (int i = 0; i < n && transitive; ++i) {
      for (int j = 0; j < n && transitive; ++j) {
        for (int k = 0; k < n && transitive; ++k) {
          if (less[i][j] && less[j][k] && !less[i][k]) transitive = false;
        }
      }
    }
    if (!transitive) continue;
    std::uint64_t canonical = ~std::uint64_t{0};
    for (const auto& q : perms) {
      std::uint64_t code = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (less[i][j]) code |= std::uint64_t{1} << (q[i] * n + q[j]);
        }
      }
      canonical = std::min(canonical, code);
    }
    if (!seen.insert(canonical).second) continue;
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (less[i][j]) rel.emplace_back(i, j);
      }
    }
    out.push_back(FinitePoset::from_relations(n, rel));
  }
  return out;
}

}  // namespace confsec::finite
