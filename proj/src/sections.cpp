#include "confsec/sections.hpp"

#include "confsec/error.hpp"
#include "confsec/kernels.hpp"
#include "confsec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace confsec {

namespace {

void require_distinct(std::span<const SpacePoint> pts, double separation) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (!(distance(pts[i], pts[j]) > separation)) {
        throw Error(ErrorCode::InvalidArgument,
                    "basepoints " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " are not distinct");
      }
    }
  }
}

void require_space(const SpaceDescriptor& space, std::span<const SpacePoint> pts, std::size_t k) {
  if (pts.size() != k) {
    throw Error(ErrorCode::InvalidArgument,
                "need " + std::to_string(k) + " basepoints, got " + std::to_string(pts.size()));
  }
  for (const auto& p : pts) {
    if (!(p.space() == space)) throw Error(ErrorCode::MismatchedSpace, p.space().id() + " point for " + space.id());
  }
}

std::string subset_name(const std::vector<int>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i] + 1);
  return s + "}";
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

ProjectionId ProjectionId::make(const SpaceDescriptor& space, int k, int r) {
  if (r < 1 || k <= r) {
    throw Error(ErrorCode::InvalidArgument,
                "projection needs k > r >= 1 (k=" + std::to_string(k) + ", r=" + std::to_string(r) + ")");
  }
  return {space, k, r};
}

std::string ProjectionId::str() const { return bounds::projection_id(k, r, space.id()); }

LocalSection::LocalSection(ProjectionId projection, std::vector<SpacePoint> excluded, Map map, std::string name,
                           double separation)
    : projection_(std::move(projection)),
      excluded_(std::move(excluded)),
      map_(std::move(map)),
      name_(std::move(name)),
      separation_(separation) {}

bool LocalSection::contains(const Configuration& x) const {
  if (x.k() != projection_.r || !(x.space() == projection_.space)) return false;
  for (const auto& p : x.points()) {
    for (const auto& q : excluded_) {
      if (!(distance(p, q) > separation_)) return false;
    }
  }
  return true;
}

Configuration LocalSection::operator()(const Configuration& x) const {
  if (!contains(x)) throw Error(ErrorCode::InvalidArgument, "configuration outside the region of " + name_);
  return map_(x);
}

std::vector<SpacePoint> default_basepoints(const SpaceDescriptor& space, int k) {
  std::vector<SpacePoint> pts;
  if (space.kind() == SpaceKind::Discrete) {
    if (k > space.parameter()) throw Error(ErrorCode::InvalidArgument, space.id() + " has fewer than k points");
    for (int i = 0; i < k; ++i) pts.push_back(SpacePoint::discrete(space.parameter(), i));
    return pts;
  }
  pts = sample(space, 0, static_cast<std::size_t>(k));
  require_distinct(pts, kDefaultSeparation);
  return pts;
}

SectionCover key_lemma_cover(const SpaceDescriptor& space, int k, std::span<const SpacePoint> basepoints) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "key lemma cover needs k >= 2");
  return binomial_cover(space, k, 1, basepoints);
}

SectionCover binomial_cover(const SpaceDescriptor& space, int k, int r, std::span<const SpacePoint> basepoints) {
  SectionCover cover{ProjectionId::make(space, k, r), {}, true};
  require_space(space, basepoints, static_cast<std::size_t>(k));
  require_distinct(basepoints, kDefaultSeparation);
  // Subsets in lexicographic order; for r = 1 piece i is the key lemma's U_i.
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    std::vector<SpacePoint> rest;
    for (int j = 0; j < k; ++j) {
      if (std::find(idx.begin(), idx.end(), j) == idx.end()) rest.push_back(basepoints[j]);
    }
    auto map = [space, rest](const Configuration& x) {
      std::vector<SpacePoint> pts = x.points();
      pts.insert(pts.end(), rest.begin(), rest.end());
      return Configuration::unchecked(space, std::move(pts));
    };
    cover.pieces.emplace_back(cover.projection, rest, map, "s_" + subset_name(idx));
    int i = r - 1;
    while (i >= 0 && idx[i] == k - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return cover;
}

LocalSection from_fpf_family(std::span<const SelfMap> fs, const FamilyCheck& check) {
  if (fs.empty()) throw Error(ErrorCode::InvalidArgument, "empty self-map family");
  const SpaceDescriptor space = fs.front().space();
  std::vector<SelfMap> all{SelfMap::identity(space)};
  for (const auto& f : fs) {
    if (!(f.space() == space)) throw Error(ErrorCode::MismatchedSpace, "family mixes spaces");
    all.push_back(f);
  }
  const auto nc = are_noncoincident(all, check.seed, check.samples);
  if (!nc.noncoincident) {
    const auto& w = *nc.witness;
    const std::string lhs = w.i == 0 ? "x" : "f_" + std::to_string(w.i + 1) + "(x)";
    throw Error(ErrorCode::CoincidenceDetected,
                lhs + " and f_" + std::to_string(w.j + 1) + "(x) agree to within " + std::to_string(w.distance) +
                    " (seed " + std::to_string(w.seed) + ")");
  }
  std::vector<SelfMap> maps(fs.begin(), fs.end());
  std::string name = "(x";
  for (const auto& f : maps) name += ", " + f.name() + "(x)";
  name += ")";
  auto map = [space, maps](const Configuration& x) {
    std::vector<SpacePoint> pts{x[0]};
    for (const auto& f : maps) pts.push_back(f(x[0]));
    return Configuration::unchecked(space, std::move(pts));
  };
  return {ProjectionId::make(space, static_cast<int>(fs.size()) + 1, 1), {}, map, name};
}

LocalSection sphere_sigma(int d) {
  const auto space = SpaceDescriptor::sphere(d);
  const SelfMap a = SelfMap::antipodal(space);
  auto map = [space, a](const Configuration& x) { return Configuration::unchecked(space, {x[0], a(x[0])}); };
  return {ProjectionId::make(space, 2, 1), {}, map, "sigma"};
}

LocalSection group_section(const SpaceDescriptor& space, int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "group section needs k >= 2");
  std::vector<SelfMap> fs;
  for (int j = 1; j < k; ++j) {
    switch (space.kind()) {
      case SpaceKind::Sphere:
        if (space.parameter() != 1) throw Error(ErrorCode::Unsupported, space.id() + " is not a group model");
        fs.push_back(SelfMap::group_translation(SpacePoint::circle(kernels::kTwoPi<double> * j / k)));
        break;
      case SpaceKind::Torus: {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(space.parameter());
        g(0) = kernels::kTwoPi<double> * j / k;
        fs.push_back(SelfMap::group_translation(SpacePoint(space, g)));
        break;
      }
      case SpaceKind::Euclidean: {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(space.parameter());
        g(0) = j;
        fs.push_back(SelfMap::group_translation(SpacePoint(space, g)));
        break;
      }
      case SpaceKind::Discrete:
        if (k > space.parameter()) throw Error(ErrorCode::InvalidArgument, "F(X,k) is empty for k > |X|");
        fs.push_back(SelfMap::group_translation(SpacePoint::discrete(space.parameter(), j)));
        break;
      default: throw Error(ErrorCode::Unsupported, space.id() + " is not a group model");
    }
  }
  return from_fpf_family(fs);
}

LocalSection drop_points(const LocalSection& s, int m) {
  const auto& pid = s.projection();
  if (pid.r != 1) throw Error(ErrorCode::InvalidArgument, "drop_points needs a section of pi_{k,1}");
  if (m < 1 || m > pid.k) throw Error(ErrorCode::InvalidArgument, "drop_points needs 1 <= m <= k");
  if (m == pid.k) return s;
  if (m == 1) throw Error(ErrorCode::InvalidArgument, "pi_{1,1} is the identity; m must be >= 2");
  auto map = [s, m](const Configuration& x) { return project(s.apply(x), m); };
  return {ProjectionId::make(pid.space, m, 1), s.excluded(), map,
          "drop_" + std::to_string(m) + "(" + s.name() + ")", s.separation()};
}

SectionCover single_piece_cover(LocalSection s) {
  SectionCover c{s.projection(), {}, true};
  c.pieces.push_back(std::move(s));
  return c;
}

VerificationReport verify_cover(const SectionCover& cover, const VerifyOptions& options) {
  const auto& pid = cover.projection;
  VerificationReport report;
  report.subject = pid.str();

  // Base configurations: random ones, then one placed at each excluded point.
  std::vector<Configuration> bases;
  bases.reserve(options.samples + 8);
  {
    std::mt19937_64 rng(options.seed);
    for (std::size_t i = 0; i < options.samples; ++i) {
      bases.push_back(sample_configuration(pid.space, pid.r, rng, options.separation));
    }
    std::vector<SpacePoint> marked;
    for (const auto& piece : cover.pieces) {
      for (const auto& p : piece.excluded()) {
        if (std::find(marked.begin(), marked.end(), p) == marked.end()) marked.push_back(p);
      }
    }
    for (const auto& p : marked) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<SpacePoint> pts{p};
        if (pid.r > 1) {
          auto rest = sample_configuration(pid.space, pid.r - 1, rng, options.separation);
          pts.insert(pts.end(), rest.points().begin(), rest.points().end());
        }
        auto c = Configuration::unchecked(pid.space, std::move(pts));
        if (c.is_valid(options.separation)) {
          bases.push_back(std::move(c));
          break;
        }
      }
    }
  }

  struct Acc {
    std::size_t covered = 0;
    std::size_t evaluated = 0;
    std::size_t inexact = 0;
    std::size_t probes = 0;
    double identity = 0.0;
    double separation = std::numeric_limits<double>::infinity();
    double ratio = 0.0;
    std::optional<std::size_t> first_uncovered;
  };
  const int threads = resolve_threads(options.threads);
  std::vector<Acc> acc(static_cast<std::size_t>(std::max(1, threads)));
  parallel_chunks(bases.size(), threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    Acc& a = acc[c];
    for (std::size_t i = b; i < e; ++i) {
      const auto& x = bases[i];
      std::mt19937_64 rng(stream_seed(options.seed, i));
      bool any = false;
      for (const auto& piece : cover.pieces) {
        if (!piece.contains(x)) continue;
        any = true;
        ++a.evaluated;
        const Configuration y = piece.apply(x);
        const Configuration back = project(y, pid.r);
        if (!(back == x)) {
          ++a.inexact;
          a.identity = std::max(a.identity, configuration_distance(back, x));
        }
        a.separation = std::min(a.separation, y.k() == pid.k ? y.min_separation() : 0.0);
        const Configuration x2 = jitter(x, options.probe_radius, rng, options.separation);
        const double dx = configuration_distance(x, x2);
        if (dx > 0.0 && dx <= options.probe_radius && piece.contains(x2)) {
          ++a.probes;
          a.ratio = std::max(a.ratio, configuration_distance(y, piece.apply(x2)) / dx);
        }
      }
      if (any) {
        ++a.covered;
      } else if (!a.first_uncovered) {
        a.first_uncovered = i;
      }
    }
  });
  Acc total;
  for (const auto& a : acc) {
    total.covered += a.covered;
    total.evaluated += a.evaluated;
    total.inexact += a.inexact;
    total.probes += a.probes;
    total.identity = std::max(total.identity, a.identity);
    total.separation = std::min(total.separation, a.separation);
    total.ratio = std::max(total.ratio, a.ratio);
    if (!total.first_uncovered && a.first_uncovered) total.first_uncovered = a.first_uncovered;
  }

  const double coverage = bases.empty() ? 1.0 : static_cast<double>(total.covered) / bases.size();
  if (cover.claims_cover) report.add("coverage", coverage, Relation::GreaterEqual, 1.0);
  report.add("identity_error", total.identity, Relation::LessEqual, options.identity_tolerance);
  report.add("min_separation", total.evaluated ? total.separation : 0.0, Relation::Greater, options.separation);
  report.add("continuity_ratio", total.ratio, Relation::LessEqual, options.continuity_limit);
  report.details["pieces"] = cover.pieces.size();
  report.details["samples"] = bases.size();
  report.details["coverage"] = coverage;
  report.details["evaluations"] = total.evaluated;
  report.details["inexact_identity"] = total.inexact;
  report.details["continuity_probes"] = total.probes;
  report.details["seed"] = options.seed;
  if (total.first_uncovered) report.details["first_uncovered_sample"] = *total.first_uncovered;
  return report;
}

SectionCover cover_from_recipe(std::string_view recipe, const SpaceDescriptor& space, int k, int r) {
  if (recipe == "key-lemma") {
    if (r != 1) throw Error(ErrorCode::InvalidArgument, "key-lemma covers project to r = 1");
    return key_lemma_cover(space, k, default_basepoints(space, k));
  }
  if (recipe == "binomial") return binomial_cover(space, k, r, default_basepoints(space, k));
  if (r != 1) throw Error(ErrorCode::InvalidArgument, std::string(recipe) + " gives sections of pi_{k,1}");
  if (recipe == "sigma") {
    if (space.kind() != SpaceKind::Sphere || k != 2) throw Error(ErrorCode::InvalidArgument, "sigma is pi(2,1,S^d)");
    return single_piece_cover(sphere_sigma(space.parameter()));
  }
  if (recipe == "group") return single_piece_cover(group_section(space, k));
  if (recipe == "fpf") {
    if (k != 2) throw Error(ErrorCode::InvalidArgument, "fpf recipe gives pi(2,1,X)");
    auto f = fixed_point_free_map(space);
    if (!f) throw Error(ErrorCode::Unsupported, "no catalog fixed-point-free map on " + space.id());
    return single_piece_cover(from_fpf_family(std::span<const SelfMap>(&*f, 1)));
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown recipe '" + std::string(recipe) + "' (key-lemma, binomial, sigma, group, fpf)");
}

std::string_view to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(Sec21 s) {
  switch (s) {
    case Sec21::One: return "1";
    case Sec21::Two: return "2";
    case Sec21::Infinite: return "inf";
    case Sec21::Unknown: return "unknown";
  }
  return "?";
}

FppVerdict fpp_verdict(const SpaceDescriptor& space, const bounds::FactStore* store) {
  if (!space.hausdorff()) throw Error(ErrorCode::InvalidArgument, "the characterization needs a Hausdorff space");
  FppVerdict v;
  if (space.kind() == SpaceKind::Discrete) {
    const int n = space.parameter();
    if (n > finite::kMaxPosetSize) throw Error(ErrorCode::Unsupported, "Discrete(n) with n > 64");
    const auto fpp = finite::has_fpp(finite::FinitePoset::antichain(n));
    if (n == 1) {
      v.fpp = Answer::Yes;
      v.sec21 = Sec21::Infinite;
      v.theorem_applicable = false;
      v.reason = "one point: only the identity, and F(X,2) is empty so pi_{2,1} has no local section";
      return v;
    }
    v.fpp = fpp.has_fpp ? Answer::Yes : Answer::No;
    v.finite_witness = fpp.witness;
  }
  if (auto f = fixed_point_free_map(space)) {
    v.fpp = Answer::No;
    v.sec21 = Sec21::One;
    v.witness = from_fpf_family(std::span<const SelfMap>(&*f, 1));
    v.reason = "catalog map " + f->name() + " has no fixed point; x -> (x, f(x)) is a global section";
    return v;
  }
  if (store) {
    const auto a = store->attribute(space.id(), "FPP");
    if (a.value == bounds::Tri::True) {
      v.fpp = Answer::Yes;
      v.sec21 = Sec21::Two;
      v.reason = "FPP holds by " + (a.why ? a.why->statement : std::string("fact")) +
                 "; no global section, and the key lemma cover has two pieces";
      return v;
    }
    if (a.value == bounds::Tri::False) {
      v.fpp = Answer::No;
      v.sec21 = Sec21::One;
      v.reason = "FPP fails by " + (a.why ? a.why->statement : std::string("fact")) + " (no explicit map)";
      return v;
    }
  }
  v.reason = "no catalog fixed-point-free map and no FPP fact";
  return v;
}

}  // namespace confsec
