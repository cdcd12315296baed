#include "bounds_engine.hpp"

#include "confsec/geometry.hpp"
#include "confsec/selfmaps.hpp"

#include <algorithm>
#include <cctype>

namespace confsec::bounds {

namespace detail {

namespace {

int binomial(int n, int k) {
  long long out = 1;
  for (int i = 1; i <= k; ++i) {
    out = out * (n - k + i) / i;
    if (out >= kInfinity) return kInfinity;
  }
  return static_cast<int>(out);
}

std::optional<SpaceDescriptor> model(const std::string& id) {
  try {
    return SpaceDescriptor::parse(id);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// F(X,k) is empty when X has fewer than k points; only the discrete models are finite.
bool configurations_exist(const std::string& space, int k) {
  const auto m = model(space);
  if (m && m->kind() == SpaceKind::Discrete) return m->parameter() >= k;
  return true;
}

template <typename Fn>
void for_each_pi(Engine& e, Fn&& fn) {
  for (const auto& [id, m] : e.universe().maps) {
    if (m.pi) fn(m, *m.pi);
  }
}

template <typename Fn>
void for_each_map(Engine& e, Fn&& fn) {
  for (const auto& [id, m] : e.universe().maps) fn(m);
}

bool has_map(const Engine& e, const std::string& id) { return e.universe().maps.count(id) > 0; }

std::string base_space(const Projection& p) { return configuration_space_id(p.space, p.r); }

// ---------------------------------------------------------------------------

void r1(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    e.raise(sec_of(m.id), e.lo(secat_of(m.id)), "R1", {e.why_lo(secat_of(m.id))});
    e.lower(secat_of(m.id), e.hi(sec_of(m.id)), "R1", {e.why_hi(sec_of(m.id))});
  });
}

void r2(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    if (!e.is(m.id, "fibration")) return;
    e.equate(sec_of(m.id), secat_of(m.id), "R2", {e.why_attr(m.id, "fibration")});
  });
}

void r3(Engine& e) {
  for (const auto& [claim, why] : e.universe().cup_claims) {
    e.raise(sec_of(claim.map), saturating_add(claim.k, 1), "R3", {why});
  }
}

void r4(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    const std::string cb = cat_of(m.base);
    e.lower(secat_of(m.id), e.hi(cb), "R4", {e.why_hi(cb)});
    if (e.is(m.id, "fibration")) e.lower(sec_of(m.id), e.hi(cb), "R4", {e.why_hi(cb), e.why_attr(m.id, "fibration")});
  });
}

void r5(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    if (!e.is(m.id, "nullhomotopic")) return;
    e.equate(secat_of(m.id), cat_of(m.base), "R5", {e.why_attr(m.id, "nullhomotopic")});
  });
}

void r6(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (p.r != 1 || !e.is(p.space, "hausdorff") || !configurations_exist(p.space, p.k)) return;
    e.lower(sec_of(m.id), p.k, "R6", {e.why_attr(p.space, "hausdorff")});
  });
}

void r7(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (!e.is(p.space, "hausdorff") || !configurations_exist(p.space, p.k)) return;
    e.lower(sec_of(m.id), binomial(p.k, p.r), "R7", {e.why_attr(p.space, "hausdorff")});
  });
}

void r8(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (!e.is(p.space, "manifold_nb_dim2")) return;
    const std::string cb = cat_of(base_space(p));
    e.lower(sec_of(m.id), e.hi(cb), "R8", {e.why_attr(p.space, "manifold_nb_dim2"), e.why_hi(cb)});
  });
}

void r9(Engine& e) {
  for (const auto& x : e.universe().primitive_spaces) {
    const std::string pi21 = projection_id(2, 1, x);
    if (!has_map(e, pi21) || !e.is(x, "hausdorff") || !configurations_exist(x, 2)) continue;
    const auto h = e.why_attr(x, "hausdorff");
    if (e.is(x, "FPP")) e.raise(sec_of(pi21), 2, "R9", {h, e.why_attr(x, "FPP")});
    if (e.is_not(x, "FPP")) e.lower(sec_of(pi21), 1, "R9", {h, e.why_attr(x, "FPP")});
    if (e.lo(sec_of(pi21)) >= 2) e.assert_attr(x, "FPP", true, "R9", {h, e.why_lo(sec_of(pi21))});
    if (e.hi(sec_of(pi21)) <= 1) e.assert_attr(x, "FPP", false, "R9", {h, e.why_hi(sec_of(pi21))});
  }
}

void r10(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (p.r != 1) return;
    for (int j = 2; j < p.k; ++j) {
      const std::string lower_map = projection_id(j, 1, p.space);
      if (!has_map(e, lower_map)) continue;
      if (e.hi(sec_of(m.id)) <= 1) e.lower(sec_of(lower_map), 1, "R10", {e.why_hi(sec_of(m.id))});
      if (e.lo(sec_of(lower_map)) >= 2) e.raise(sec_of(m.id), 2, "R10", {e.why_lo(sec_of(lower_map))});
    }
    if (p.k >= 3 && e.is(p.space, "sphere")) {
      const std::string pair_map = projection_id(p.k, 2, p.space);
      if (!has_map(e, pair_map)) return;
      const auto s = e.why_attr(p.space, "sphere");
      if (e.hi(sec_of(m.id)) <= 1) e.lower(sec_of(pair_map), 1, "R10", {s, e.why_hi(sec_of(m.id))});
      if (e.hi(sec_of(pair_map)) <= 1) e.lower(sec_of(m.id), 1, "R10", {s, e.why_hi(sec_of(pair_map))});
      if (e.lo(sec_of(m.id)) >= 2) e.raise(sec_of(pair_map), 2, "R10", {s, e.why_lo(sec_of(m.id))});
      if (e.lo(sec_of(pair_map)) >= 2) e.raise(sec_of(m.id), 2, "R10", {s, e.why_lo(sec_of(pair_map))});
    }
  });
}

void r11(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    const std::string t = tc_of(m.id);
    e.raise(t, e.lo(cat_of(m.base)), "R11", {e.why_lo(cat_of(m.base))});
    e.raise(t, e.lo(sec_of(m.id)), "R11", {e.why_lo(sec_of(m.id))});
  });
}

void r12(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    if (!e.is(m.id, "has_section")) return;
    const auto s = e.why_attr(m.id, "has_section");
    e.raise(tc_of(m.id), e.lo(tc_of(m.base)), "R12", {s, e.why_lo(tc_of(m.base))});
    e.lower(tc_of(m.id), e.hi(tc_of(m.total)), "R12", {s, e.why_hi(tc_of(m.total))});
  });
}

void r13(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    if (!e.is(m.id, "fibration")) return;
    const auto f = e.why_attr(m.id, "fibration");
    e.lower(tc_of(m.id), e.hi(tc_of(m.base)), "R13", {f, e.why_hi(tc_of(m.base))});
    // pi(k,1) = pi(r,1) o pi(k,r): TC(pi(k,1)) <= TC(pi(r,1)) when pi(k,r) is a fibration.
    if (m.pi && m.pi->r >= 2) {
      const std::string outer = projection_id(m.pi->r, 1, m.pi->space);
      const std::string composite = projection_id(m.pi->k, 1, m.pi->space);
      if (has_map(e, outer) && has_map(e, composite)) {
        e.lower(tc_of(composite), e.hi(tc_of(outer)), "R13", {f, e.why_hi(tc_of(outer))});
      }
    }
  });
}

void r14(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    if (!e.is(m.id, "fibration") || !e.is(m.id, "has_section")) return;
    e.equate(tc_of(m.id), tc_of(m.base), "R14", {e.why_attr(m.id, "fibration"), e.why_attr(m.id, "has_section")});
  });
}

void r15(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    if (!e.is(m.id, "fibration") || !e.is(m.total, "ANR") || !e.is(m.base, "ANR")) return;
    const std::vector<DerivationPtr> guard{e.why_attr(m.id, "fibration"), e.why_attr(m.total, "ANR"),
                                           e.why_attr(m.base, "ANR")};
    const Interval before = e.get(tc_of(m.id));
    auto with = [&](std::vector<DerivationPtr> extra) {
      auto v = guard;
      v.insert(v.end(), extra.begin(), extra.end());
      return v;
    };
    e.raise(tc_of(m.id), e.lo(cat_of(m.base)), "R15", with({e.why_lo(cat_of(m.base))}));
    const int ce = e.hi(cat_of(m.total));
    const int sum = saturating_add(ce, saturating_mul(ce, e.hi(sec_of(m.id))));
    e.lower(tc_of(m.id), sum == kInfinity ? kInfinity : sum - 1, "R15",
            with({e.why_hi(cat_of(m.total)), e.why_hi(sec_of(m.id))}));
    e.lower(tc_of(m.id), e.hi(tc_of(m.base)), "R15", with({e.why_hi(tc_of(m.base))}));
    if (!(e.get(tc_of(m.id)) == before)) {
      e.warn("R15 is imported from a cited work whose TC(p) may differ from the definition used here; it tightened " +
             tc_of(m.id));
    }
  });
}

void r16(Engine& e) {
  for (const auto& x : e.universe().spaces) {
    if (!e.is(x, "path_connected_CW")) continue;
    const auto g = e.why_attr(x, "path_connected_CW");
    const std::string c = cat_of(x);
    const std::string t = tc_of(x);
    e.raise(t, e.lo(c), "R16", {g, e.why_lo(c)});
    e.lower(c, e.hi(t), "R16", {g, e.why_hi(t)});
    if (e.hi(c) != kInfinity) e.lower(t, 2 * e.hi(c) - 1, "R16", {g, e.why_hi(c)});
    if (e.lo(t) != kInfinity) e.raise(c, (e.lo(t) + 2) / 2, "R16", {g, e.why_lo(t)});
  }
}

void r17(Engine& e) {
  for (const auto& x : e.universe().spaces) {
    const std::string c = cat_of(x);
    const std::string t = tc_of(x);
    if (e.is(x, "contractible")) {
      e.lower(c, 1, "R17", {e.why_attr(x, "contractible")});
      e.lower(t, 1, "R17", {e.why_attr(x, "contractible")});
    }
    if (e.is_not(x, "contractible")) {
      e.raise(c, 2, "R17", {e.why_attr(x, "contractible")});
      e.raise(t, 2, "R17", {e.why_attr(x, "contractible")});
    }
    if (e.hi(c) <= 1) e.assert_attr(x, "contractible", true, "R17", {e.why_hi(c)});
    if (e.hi(t) <= 1) e.assert_attr(x, "contractible", true, "R17", {e.why_hi(t)});
    if (e.lo(c) >= 2) e.assert_attr(x, "contractible", false, "R17", {e.why_lo(c)});
    if (e.lo(t) >= 2) e.assert_attr(x, "contractible", false, "R17", {e.why_lo(t)});
  }
}

void r18(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (p.r != 1 || !e.is(p.space, "hausdorff")) return;
    const auto h = e.why_attr(p.space, "hausdorff");
    if (e.is(p.space, "FPP")) {
      const auto fpp = e.why_attr(p.space, "FPP");
      e.raise(tc_of(m.id), 2, "R18", {h, fpp});
      e.raise(tc_of(m.id), e.lo(cat_of(p.space)), "R18", {h, fpp, e.why_lo(cat_of(p.space))});
    }
    if (p.k == 2) {
      const std::string t = tc_of(m.id);
      const std::string tx = tc_of(p.space);
      const std::string tf = tc_of(m.total);
      if (e.hi(t) < e.lo(tx)) e.raise(sec_of(m.id), 2, "R18", {h, e.why_hi(t), e.why_lo(tx)});
      if (e.hi(tf) != kInfinity && e.lo(t) > e.hi(tf)) e.raise(sec_of(m.id), 2, "R18", {h, e.why_lo(t), e.why_hi(tf)});
      if (e.is_not(p.space, "contractible") && e.is_not(p.space, "FPP")) {
        e.assert_attr(m.total, "contractible", false, "R18",
                      {h, e.why_attr(p.space, "contractible"), e.why_attr(p.space, "FPP")});
      }
    }
  });
}

void r19(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (p.k <= 2 || p.r > 2 || !e.is(p.space, "even_sphere")) return;
    const auto g = e.why_attr(p.space, "even_sphere");
    e.raise(sec_of(m.id), 2, "R19", {g});
    e.lower(sec_of(m.id), 2, "R19", {g});
    e.raise(cat_of(base_space(p)), 2, "R19", {g});
    e.lower(cat_of(base_space(p)), 2, "R19", {g});
  });
}

void r20(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (p.r == 1 && e.is(p.space, "odd_dim_diff_manifold")) {
      e.lower(sec_of(m.id), 1, "R20", {e.why_attr(p.space, "odd_dim_diff_manifold")});
    }
    if (p.r == 2 && p.k > 2 && e.is(p.space, "odd_sphere")) {
      e.lower(sec_of(m.id), 1, "R20", {e.why_attr(p.space, "odd_sphere")});
    }
  });
}

void r21(Engine& e) {
  for (const auto& [l, x] : e.universe().deformation_retracts) {
    for (int k = 2; k <= e.universe().max_k; ++k) {
      const std::string ml = secat_of(projection_id(k, 1, l));
      const std::string mx = secat_of(projection_id(k, 1, x));
      auto rel = std::make_shared<Derivation>(Derivation{"AXIOM", l + " is a deformation retract of " + x, {}});
      e.raise(ml, e.lo(mx), "R21", {rel, e.why_lo(mx)});
      e.lower(mx, e.hi(ml), "R21", {rel, e.why_hi(ml)});
    }
  }
}

void r22(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (p.r != 1) return;
    if (e.is(p.space, "nonvanishing_vf") && e.is(p.space, "smooth")) {
      e.lower(sec_of(m.id), 1, "R22", {e.why_attr(p.space, "nonvanishing_vf"), e.why_attr(p.space, "smooth")});
    }
    if (e.is(p.space, "compact_b1_nonzero")) {
      e.lower(sec_of(m.id), 1, "R22", {e.why_attr(p.space, "compact_b1_nonzero")});
    }
  });
}

void r23(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    const std::string& x = p.space;
    if (e.is(x, "manifold_nb_dim2")) {
      const auto g = e.why_attr(x, "manifold_nb_dim2");
      if (e.hi(sec_of(m.id)) <= 1) {
        e.equate(tc_of(m.id), tc_of(base_space(p)), "R23", {g, e.why_hi(sec_of(m.id))});
      }
      if (p.r == 1 && e.is(x, "FPP")) {
        const auto fpp = e.why_attr(x, "FPP");
        e.raise(tc_of(m.id), 2, "R23", {g, fpp});
        e.raise(tc_of(m.id), e.lo(cat_of(x)), "R23", {g, fpp, e.why_lo(cat_of(x))});
        e.lower(tc_of(m.id), e.hi(tc_of(x)), "R23", {g, fpp, e.why_hi(tc_of(x))});
        e.assert_attr(x, "contractible", false, "R23", {g, fpp});
        if (p.k == 2) {
          const std::string cf = cat_of(m.total);
          if (e.hi(cf) != kInfinity) e.lower(tc_of(m.id), 3 * e.hi(cf) - 1, "R23", {g, fpp, e.why_hi(cf)});
        }
      }
    }
    if (p.r == 1 && e.is(x, "lie_group")) {
      const auto g = e.why_attr(x, "lie_group");
      e.lower(sec_of(m.id), 1, "R23", {g});
      e.assert_attr(m.id, "fibration", true, "R23", {g},
                    m.id + " is a trivial bundle: (g_i) -> (g_1, g_1^-1 g_i) splits F(G,k)");
    }
    if (p.k == 2 && e.is(m.id, "nullhomotopic") && e.is_not(x, "contractible") && e.is(x, "path_connected_CW")) {
      const std::vector<DerivationPtr> g{e.why_attr(m.id, "nullhomotopic"), e.why_attr(x, "contractible"),
                                         e.why_attr(x, "path_connected_CW")};
      e.raise(cat_of(x), 2, "R23", g);
      e.lower(cat_of(x), 2, "R23", g);
      e.raise(tc_of(x), 2, "R23", g);
      e.lower(tc_of(x), 3, "R23", g);
      for (const auto& q : {sec_of(m.id), secat_of(m.id)}) {
        e.raise(q, 2, "R23", g);
        e.lower(q, 2, "R23", g);
      }
    }
  });
  for (const auto& x : e.universe().primitive_spaces) {
    if (!e.is(x, "lie_group")) continue;
    const auto g = e.why_attr(x, "lie_group");
    e.assert_attr(x, "FPP", false, "R23", {g});
    e.equate(tc_of(x), cat_of(x), "R23", {g});
  }
}

// ---------------------------------------------------------------------------

void def_step(Engine& e) {
  for_each_map(e, [&](const MapInfo& m) {
    const std::string s = sec_of(m.id);
    if (m.pi && !configurations_exist(m.pi->space, m.pi->k)) {
      auto empty = std::make_shared<Derivation>(
          Derivation{"DEF", m.total + " is empty over a nonempty base, so " + m.id + " has no local section", {}});
      e.raise(s, kInfinity, "DEF", {empty});
    }
    if (e.is(m.id, "has_section")) e.lower(s, 1, "DEF", {e.why_attr(m.id, "has_section")});
    if (e.is_not(m.id, "has_section")) e.raise(s, 2, "DEF", {e.why_attr(m.id, "has_section")});
    if (e.hi(s) <= 1) e.assert_attr(m.id, "has_section", true, "DEF", {e.why_hi(s)});
    if (e.lo(s) >= 2) e.assert_attr(m.id, "has_section", false, "DEF", {e.why_lo(s)});
  });
}

void fn_step(Engine& e) {
  for_each_pi(e, [&](const MapInfo& m, const Projection& p) {
    if (!e.is(p.space, "manifold_nb_dim2")) return;
    e.assert_attr(m.id, "fibration", true, "FN", {e.why_attr(p.space, "manifold_nb_dim2")},
                  m.id + " is a locally trivial bundle (connected boundaryless manifold, dim >= 2)");
  });
}

void hinv_step(Engine& e) {
  for (const auto& [a, b] : e.universe().homotopy_equivalent) {
    auto rel = std::make_shared<Derivation>(Derivation{"AXIOM", a + " is homotopy equivalent to " + b, {}});
    e.equate(cat_of(a), cat_of(b), "HINV", {rel});
    e.equate(tc_of(a), tc_of(b), "HINV", {rel});
    for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      const Tri c = e.attr(from, "contractible");
      if (c != Tri::Unknown) e.assert_attr(to, "contractible", c == Tri::True, "HINV", {rel, e.why_attr(from, "contractible")});
    }
  }
}

std::vector<RuleImpl> make_rules() {
  return {
      {{"R1", "secat(p) <= sec(p)", "always"}, r1},
      {{"R2", "sec(p) = secat(p)", "fibration(p)"}, r2},
      {{"R3", "sec(p) >= k + 1 from k cohomology classes with vanishing pullback and nonzero cup product",
        "accepted cup-length certificate"},
       r3},
      {{"R4", "sec(p) <= cat(B); secat(f) <= cat(B) for every map", "fibration(p) for the first part"}, r4},
      {{"R5", "secat(p) = cat(B)", "nullhomotopic(p)"}, r5},
      {{"R6", "sec(pi(k,1,X)) <= k", "hausdorff(X), F(X,k) nonempty"}, r6},
      {{"R7", "sec(pi(k,r,X)) <= C(k,r)", "hausdorff(X), F(X,k) nonempty"}, r7},
      {{"R8", "sec(pi(k,r,M)) <= min(C(k,r), cat(F(M,r)))", "manifold_nb_dim2(M)"}, r8},
      {{"R9", "FPP(X) iff sec(pi(2,1,X)) = 2", "hausdorff(X), F(X,2) nonempty"}, r9},
      {{"R10", "sec(pi(k,1,X)) = 1 implies sec(pi(j,1,X)) = 1 for j <= k; on spheres sec(pi(k,2)) = 1 iff sec(pi(k,1)) = 1",
        "always; sphere(X) for the second part"},
       r10},
      {{"R11", "TC(p) >= max(cat(B), sec(p))", "always"}, r11},
      {{"R12", "TC(B) <= TC(p) <= TC(E)", "has_section(p)"}, r12},
      {{"R13", "TC(p' p) <= TC(p'); in particular TC(p) <= TC(B)", "fibration(p)"}, r13},
      {{"R14", "TC(p) = TC(B); TC(p) = 1 iff B contractible", "fibration(p), has_section(p)"}, r14},
      {{"R15", "cat(B) <= TC(p) <= min(cat(E) + cat(E) sec(p) - 1, TC(B)) (imported; TC(p) definition may differ)",
        "fibration(p), ANR(E), ANR(B)"},
       r15},
      {{"R16", "cat(X) <= TC(X) <= 2 cat(X) - 1", "path_connected_CW(X)"}, r16},
      {{"R17", "TC(X) = 1 iff X contractible iff cat(X) = 1", "always"}, r17},
      {{"R18",
        "FPP(X) implies TC(pi(k,1,X)) >= max(cat(X), 2); TC(pi(2,1,X)) < TC(X) or > TC(F(X,2)) implies sec(pi(2,1,X)) = 2; "
        "X not contractible without FPP implies F(X,2) not contractible",
        "hausdorff(X)"},
       r18},
      {{"R19", "sec(pi(k,r,S^d)) = cat(F(S^d,r)) = 2 for k > 2, r in {1,2}", "even_sphere(X)"}, r19},
      {{"R20", "sec(pi(k,1,M)) = 1; on odd spheres also sec(pi(k,2)) = 1",
        "odd_dim_diff_manifold(M); odd_sphere for r = 2"},
       r20},
      {{"R21", "secat(pi(k,1,L)) >= secat(pi(k,1,X))", "L deformation retract of X"}, r21},
      {{"R22", "sec(pi(k,1,M)) = 1", "smooth(M) with nonvanishing_vf(M), or compact_b1_nonzero(M)"}, r22},
      {{"R23",
        "sec(pi(k,r,M)) = 1 implies TC(pi(k,r,M)) = TC(F(M,r)); FPP(M) implies max(2, cat(M)) <= TC(pi(k,1,M)) <= TC(M) "
        "and TC(pi(2,1,M)) <= 3 cat(F(M,2)) - 1; Lie groups: no FPP, TC(G) = cat(G), sec(pi(k,1,G)) = 1; "
        "nullhomotopic pi(2,1,X) on non-contractible X gives cat(X) = 2, TC(X) in [2,3], sec = secat = 2",
        "manifold_nb_dim2(M) / lie_group(G) / nullhomotopic(pi(2,1,X)), path_connected_CW(X)"},
       r23},
      {{"DEF", "has_section(p) iff sec(p) = 1; sec(p) = inf when p is not surjective", "always"}, def_step},
      {{"FN", "pi(k,r,M) is a fibration", "manifold_nb_dim2(M)"}, fn_step},
      {{"HINV", "cat, TC and contractibility are homotopy invariant", "declared homotopy equivalence"}, hinv_step},
  };
}

}  // namespace

const std::vector<RuleImpl>& rule_impls() {
  static const std::vector<RuleImpl> rules = make_rules();
  return rules;
}

void preset_relations(Universe& u) {
  for (const auto& x : u.primitive_spaces) {
    const auto m = model(x);
    if (!m || m->kind() != SpaceKind::Sphere || u.max_k < 2) continue;
    u.homotopy_equivalent.emplace_back(configuration_space_id(x, 2), x);
  }
}

bool apply_presets(Engine& e, const std::string& space) {
  if (auto f = parse_configuration_space(space)) {
    const auto m = model(f->first);
    if (!m) return false;
    const std::string why = space + " is open in " + f->first + "^" + std::to_string(f->second);
    e.assert_attr(space, "hausdorff", true, "PRESET", {}, "hausdorff(" + space + "): " + why);
    if (m->kind() != SpaceKind::Discrete) e.assert_attr(space, "ANR", true, "PRESET", {}, "ANR(" + space + "): " + why);
    return true;
  }
  const auto m = model(space);
  if (!m) return false;
  auto set = [&](const std::string& name, bool value, const std::string& reason) {
    e.assert_attr(space, name, value, "PRESET", {},
                  (value ? "" : "not ") + name + "(" + space + "): " + reason);
  };
  const int d = m->parameter();
  set("hausdorff", true, "metric model space");
  switch (m->kind()) {
    case SpaceKind::Sphere:
      set("contractible", false, "spheres are not contractible");
      set("path_connected_CW", true, "CW model");
      set("ANR", true, "compact manifold");
      set("smooth", true, "smooth manifold");
      set("sphere", true, "model sphere");
      set("manifold_nb_dim2", d >= 2, d >= 2 ? "connected closed manifold of dim >= 2" : "dimension 1");
      set(d % 2 == 0 ? "even_sphere" : "odd_sphere", true, "dimension " + std::to_string(d));
      set("odd_dim_diff_manifold", d % 2 == 1, "dimension " + std::to_string(d));
      if (d % 2 == 1) set("nonvanishing_vf", true, "x -> Jx on an odd sphere");
      if (d == 1 || d == 3) set("lie_group", true, "unit complex numbers / unit quaternions");
      break;
    case SpaceKind::RealProjective:
      set("contractible", false, "nonzero mod 2 cohomology");
      set("path_connected_CW", true, "CW model");
      set("ANR", true, "compact manifold");
      set("smooth", true, "smooth manifold");
      set("manifold_nb_dim2", d >= 2, d >= 2 ? "connected closed manifold of dim >= 2" : "dimension 1");
      set("odd_dim_diff_manifold", d % 2 == 1, "dimension " + std::to_string(d));
      if (d % 2 == 0) set("FPP", true, "even-dimensional real projective spaces have the FPP (Lefschetz)");
      break;
    case SpaceKind::Torus:
      set("contractible", false, "nonzero first Betti number");
      set("path_connected_CW", true, "CW model");
      set("ANR", true, "compact manifold");
      set("smooth", true, "smooth manifold");
      set("compact_b1_nonzero", true, "b1(T^m) = m");
      set("lie_group", true, "abelian Lie group");
      set("manifold_nb_dim2", d >= 2, d >= 2 ? "connected closed manifold of dim >= 2" : "dimension 1");
      break;
    case SpaceKind::Euclidean:
      set("contractible", true, "convex");
      set("path_connected_CW", true, "CW model");
      set("ANR", true, "manifold");
      set("smooth", true, "smooth manifold");
      set("lie_group", true, "additive group");
      set("manifold_nb_dim2", d >= 2, d >= 2 ? "connected boundaryless manifold of dim >= 2" : "dimension 1");
      break;
    case SpaceKind::Disc:
      set("contractible", true, "convex");
      set("path_connected_CW", true, "CW model");
      set("ANR", true, "compact convex set");
      set("manifold_nb_dim2", false, "manifold with boundary");
      for (const auto& [id, info] : e.universe().maps) {
        if (!info.pi || info.pi->space != space) continue;
        e.assert_attr(id, "fibration", false, "PRESET", {},
                      "not fibration(" + id + "): fibres over interior and boundary points are not homotopy equivalent");
      }
      break;
    case SpaceKind::WedgeS2S1:
      set("contractible", false, "H^1 and H^2 nonzero");
      set("path_connected_CW", true, "CW model");
      set("ANR", true, "finite CW complex");
      set("manifold_nb_dim2", false, "not a manifold at the glue point");
      break;
    case SpaceKind::Discrete:
      set("contractible", d == 1, d == 1 ? "one point" : "disconnected");
      set("path_connected_CW", d == 1, d == 1 ? "one point" : "disconnected");
      set("ANR", true, "finite discrete");
      set("manifold_nb_dim2", false, "dimension 0");
      if (d == 1) set("FPP", true, "the only self-map is the identity");
      break;
  }
  if (auto f = fixed_point_free_map(*m)) {
    set("FPP", false, f->name() + " is fixed-point free (catalog)");
  }
  return true;
}

}  // namespace detail

const std::vector<Rule>& load_rules() {
  static const std::vector<Rule> rules = [] {
    std::vector<Rule> out;
    for (const auto& r : detail::rule_impls()) {
      if (r.rule.id.size() > 1 && r.rule.id[0] == 'R' && std::isdigit(static_cast<unsigned char>(r.rule.id[1]))) {
        out.push_back(r.rule);
      }
    }
    return out;
  }();
  return rules;
}

const std::vector<Rule>& auxiliary_steps() {
  static const std::vector<Rule> steps = [] {
    std::vector<Rule> out;
    for (const auto& r : detail::rule_impls()) {
      if (!(r.rule.id.size() > 1 && r.rule.id[0] == 'R' && std::isdigit(static_cast<unsigned char>(r.rule.id[1])))) {
        out.push_back(r.rule);
      }
    }
    return out;
  }();
  return steps;
}

FactSet standard_facts() {
  FactSet f;
  auto add = [&](const std::string& q, int lo, int hi, const std::string& source) {
    f.axioms.push_back({Quantity::parse(q), {lo, hi}, source});
  };
  for (int d = 1; d <= 8; ++d) {
    const std::string s = "S" + std::to_string(d);
    add("cat(" + s + ")", 2, 2, "cat of a sphere");
    add("TC(" + s + ")", d % 2 == 1 ? 2 : 3, d % 2 == 1 ? 2 : 3, "TC of a sphere (Farber)");
  }
  add("cat(RP2)", 3, 3, "cat(RP^n) = n + 1");
  add("TC(RP2)", 4, 4, "TC of the projective plane (Farber-Tabachnikov-Yuzvinsky)");
  for (int m = 1; m <= 4; ++m) {
    const std::string t = "T" + std::to_string(m);
    add("cat(" + t + ")", m + 1, m + 1, "cat of a torus");
    add("TC(" + t + ")", m + 1, m + 1, "TC of a torus");
  }
  return f;
}

}  // namespace confsec::bounds
