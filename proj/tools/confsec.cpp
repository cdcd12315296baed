// confsec: command-line front end.
// Exit codes: 0 verified/accepted, 1 verification failure, rejection or contradiction, 2 invalid input.

#include "confsec/bounds.hpp"
#include "confsec/certificates.hpp"
#include "confsec/error.hpp"
#include "confsec/finite.hpp"
#include "confsec/json_io.hpp"
#include "confsec/parallel.hpp"
#include "confsec/planner.hpp"
#include "confsec/sections.hpp"
#include "confsec/selfmaps.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSchemaVersion = "confsec/1";

struct Global {
  std::string json_out;
  std::string manifest_out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> argv;
};

struct Outcome {
  int exit_code = 0;
  json result = json::object();
  std::string summary;
};

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw confsec::Error(confsec::ErrorCode::Parse, "cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

class Inputs {
 public:
  json read(const std::string& path) {
    digests_[path] = sha256_file(path);
    return confsec::io::read_json_file(path);
  }
  json manifest_entries() const {
    json out = json::array();
    for (const auto& [path, digest] : digests_) out.push_back({{"path", path}, {"sha256", digest}});
    return out;
  }

 private:
  std::map<std::string, std::string> digests_;
};

void print_report(const confsec::VerificationReport& r) {
  std::cout << r.subject << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.passed ? "ok  " : "FAIL") << " " << c.name << " = " << c.value << " ("
              << confsec::to_string(c.relation) << " " << c.threshold << ")\n";
  }
}

confsec::bounds::FactSet load_facts(Inputs& inputs, const std::vector<std::string>& files, bool standard) {
  confsec::bounds::FactSet facts = standard ? confsec::bounds::standard_facts() : confsec::bounds::FactSet{};
  for (const auto& f : files) facts.merge(confsec::bounds::FactSet::from_json(inputs.read(f)));
  return facts;
}

json contradiction_json(const confsec::bounds::ContradictionError& e) {
  return {{"subject", e.subject()},
          {"message", e.what()},
          {"lower", confsec::bounds::to_json(e.lower())},
          {"upper", confsec::bounds::to_json(e.upper())}};
}

Outcome report_contradiction(const confsec::bounds::ContradictionError& e) {
  std::cout << "contradiction: " << e.what() << "\n";
  std::cout << "one side:\n" << confsec::bounds::render(e.lower(), 1);
  std::cout << "other side:\n" << confsec::bounds::render(e.upper(), 1);
  return {1, {{"contradiction", contradiction_json(e)}}, "contradiction in " + e.subject()};
}

json mask_elements(confsec::finite::Mask m) {
  json out = json::array();
  for (int i = 0; i < 64; ++i) {
    if ((m >> i) & 1u) out.push_back(i);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw confsec::Error(confsec::ErrorCode::Parse, "expected comma-separated integers, got '" + text + "'");
    }
  }
  return out;
}

std::string schema_hint(const std::string& command) {
  static const std::map<std::string, std::string> hints{
      {"finite", "poset files look like {\"n\":4,\"leq\":[[0,2],[1,3]]} (schemas/poset.schema.json)"},
      {"certify", "certificates follow schemas/certificate.schema.json"},
      {"bounds", "facts files follow schemas/facts.schema.json, quantities look like TC(pi(2,1,S3))"},
      {"plan", "queries are {\"start\":{configuration},\"goal\":{configuration}} (schemas/space.schema.json)"},
      {"section", "spaces: S<d>, RP<d>, T<m>, R<m>, D<m>, S2vS1, Discrete<n>"},
      {"fpp", "spaces: S<d>, RP<d>, T<m>, R<m>, D<m>, S2vS1, Discrete<n>"},
  };
  auto it = hints.find(command);
  return it == hints.end() ? "" : it->second;
}

// ---------------------------------------------------------------------------
// Commands

Outcome cmd_catalog() {
  json rows = json::array();
  std::cout << std::left << std::setw(20) << "recipe" << std::setw(28) << "spaces" << std::setw(8) << "fpf"
            << std::setw(11) << "supported" << "note\n";
  for (const auto& e : confsec::catalog()) {
    std::cout << std::setw(20) << e.recipe << std::setw(28) << e.spaces << std::setw(8)
              << (e.fixed_point_free ? "yes" : "no") << std::setw(11) << (e.supported ? "yes" : "no") << e.note
              << "\n";
    rows.push_back({{"recipe", e.recipe},
                    {"spaces", e.spaces},
                    {"fixed_point_free", e.fixed_point_free},
                    {"supported", e.supported},
                    {"note", e.note}});
  }
  return {0, {{"recipes", rows}}, std::to_string(rows.size()) + " recipes"};
}

Outcome cmd_fpp(const Global& g, Inputs& inputs, const std::string& space_id, const std::vector<std::string>& facts,
                std::size_t samples) {
  const auto space = confsec::SpaceDescriptor::parse(space_id);
  const auto store = confsec::bounds::propagate(load_facts(inputs, facts, true));
  const auto v = confsec::fpp_verdict(space, &store);
  json r{{"space", space.id()},
         {"fpp", std::string(confsec::to_string(v.fpp))},
         {"sec21", std::string(confsec::to_string(v.sec21))},
         {"theorem_applicable", v.theorem_applicable},
         {"reason", v.reason}};
  std::cout << "space: " << space.id() << "\nFPP: " << confsec::to_string(v.fpp)
            << "\nsec(pi(2,1," << space.id() << ")): " << confsec::to_string(v.sec21) << "\n"
            << v.reason << "\n";
  int code = 0;
  if (v.witness) {
    json w{{"section", v.witness->name()}};
    if (auto f = confsec::fixed_point_free_map(space)) w["recipe"] = confsec::io::to_json(*f);
    const auto report = confsec::verify_cover(confsec::single_piece_cover(*v.witness),
                                              {.seed = g.seed, .samples = samples, .threads = g.threads});
    w["verification"] = report.to_json();
    r["witness"] = w;
    std::cout << "witness: " << v.witness->name() << "\n";
    print_report(report);
    if (!report.passed()) code = 1;
  }
  if (v.finite_witness) r["finite_witness"] = *v.finite_witness;
  return {code, r, std::string("FPP ") + std::string(confsec::to_string(v.fpp))};
}

Outcome cmd_finite(Inputs& inputs, const std::string& mode, const std::string& poset_file, int max_cover,
                   std::uint64_t budget, const std::string& map_text, int point) {
  namespace fin = confsec::finite;
  const fin::FinitePoset p = confsec::io::poset_from_json(inputs.read(poset_file));
  json r{{"poset", confsec::io::to_json(p)}};
  if (mode == "fpp") {
    const auto res = fin::has_fpp(p, budget);
    r["has_fpp"] = res.has_fpp;
    r["witness"] = res.witness ? json(*res.witness) : json(nullptr);
    r["nodes"] = res.nodes;
    std::cout << "FPP: " << (res.has_fpp ? "true" : "false") << "\n";
    if (res.witness) {
      std::cout << "fixed-point-free monotone map:";
      for (int x : *res.witness) std::cout << " " << x;
      std::cout << "\n";
    }
    return {0, r, res.has_fpp ? "FPP true" : "FPP false"};
  }
  if (mode == "sec") {
    const auto res = fin::sec_pi21(p, max_cover, budget);
    const auto fpp = fin::has_fpp(p, budget);
    r["sec"] = res.str();
    r["kind"] = res.kind == fin::SecKind::Finite ? "finite" : res.kind == fin::SecKind::ExceedsMax ? "exceeds_max"
                                                                                                  : "infinite";
    r["theorem_applicable"] = res.theorem_applicable;
    r["has_fpp"] = fpp.has_fpp;
    json pieces = json::array();
    for (const auto& w : res.witnesses) pieces.push_back({{"open_set", mask_elements(w.open_set)}, {"g", w.g}});
    r["witnesses"] = pieces;
    r["nodes"] = res.nodes;
    std::cout << "sec(pi(2,1,P)) = " << res.str() << "\nFPP: " << (fpp.has_fpp ? "true" : "false") << "\n";
    for (const auto& w : res.witnesses) {
      std::cout << "  U =";
      for (int i = 0; i < p.size(); ++i) {
        if ((w.open_set >> i) & 1u) std::cout << " " << i;
      }
      std::cout << "  g =";
      for (int x : w.g) std::cout << " " << x;
      std::cout << "\n";
    }
    // Sec = 1 iff no FPP holds for every space; the FPP iff sec = 2 direction needs Hausdorff.
    const bool global_ok = (res.kind == fin::SecKind::Finite && res.value == 1) == !fpp.has_fpp;
    const bool sec2 = res.kind == fin::SecKind::Finite && res.value == 2;
    r["section_iff_no_fpp"] = global_ok;
    r["fpp_iff_sec2"] = res.theorem_applicable ? json(fpp.has_fpp == sec2) : json(nullptr);
    if (res.theorem_applicable && fpp.has_fpp != sec2) {
      std::cout << "finding: FPP and sec = 2 disagree on this (non-Hausdorff) space\n";
    }
    return {global_ok ? 0 : 1, r, "sec " + res.str()};
  }
  // mr
  const auto values = parse_int_list(map_text);
  if (static_cast<int>(values.size()) != p.size()) {
    throw confsec::Error(confsec::ErrorCode::InvalidArgument, "--map needs one value per point");
  }
  if (!fin::is_monotone(p, p, values)) throw confsec::Error(confsec::ErrorCode::InvalidArgument, "--map is not monotone");
  const int mr = fin::mr_bruteforce(p, p, values, point, budget);
  r["map"] = values;
  r["point"] = point;
  r["mr"] = mr;
  std::cout << "MR[f," << point << "] = " << mr << "\n";
  return {0, r, "MR " + std::to_string(mr)};
}

Outcome cmd_section(const Global& g, const std::string& recipe, const std::string& space_id, int k, int r, int drop,
                    std::size_t samples) {
  const auto space = confsec::SpaceDescriptor::parse(space_id);
  auto cover = confsec::cover_from_recipe(recipe, space, k, r);
  if (drop > 0) {
    if (cover.pieces.size() != 1) throw confsec::Error(confsec::ErrorCode::InvalidArgument, "--drop needs a global section");
    cover = confsec::single_piece_cover(confsec::drop_points(cover.pieces.front(), drop));
  }
  const auto report = confsec::verify_cover(cover, {.seed = g.seed, .samples = samples, .threads = g.threads});
  print_report(report);
  json res = report.to_json();
  res["recipe"] = recipe;
  res["projection"] = cover.projection.str();
  json names = json::array();
  for (const auto& p : cover.pieces) names.push_back(p.name());
  res["piece_names"] = names;
  return {report.passed() ? 0 : 1, res, report.passed() ? "verified" : "verification failed"};
}

Outcome cmd_certify(Inputs& inputs, const std::string& kind, const std::string& file) {
  json j = inputs.read(file);
  if (!j.contains("type")) j["type"] = kind;
  if (j.at("type") != kind) {
    throw confsec::Error(confsec::ErrorCode::InvalidArgument, "file holds a " + j.at("type").get<std::string>() +
                                                                  " certificate, not " + kind);
  }
  json r = confsec::cert::verify_certificate_json(j);
  const bool ok = r.at("accepted").get<bool>();
  std::cout << (ok ? "accepted: " : "rejected (" + r.at("rejection").get<std::string>() + "): ")
            << r.at("message").get<std::string>() << "\n";
  return {ok ? 0 : 1, r, ok ? "accepted" : "rejected"};
}

Outcome cmd_bounds_query(Inputs& inputs, const std::vector<std::string>& facts, const std::vector<std::string>& quantities,
                         bool explain, bool standard, std::optional<std::uint64_t> rule_seed) {
  namespace b = confsec::bounds;
  const auto fs = load_facts(inputs, facts, standard);
  std::vector<b::Quantity> qs;
  for (const auto& q : quantities) qs.push_back(b::Quantity::parse(q));
  try {
    const auto store = b::propagate(fs, qs, {.rule_order_seed = rule_seed});
    json rows = json::array();
    for (const auto& q : qs) {
      const auto res = store.query(q);
      std::cout << q.str() << " = " << res.interval.str() << "\n";
      if (explain) std::cout << b::explain(q, res);
      rows.push_back({{"quantity", q.str()},
                      {"interval", b::to_json(res.interval)},
                      {"lower", b::to_json(res.lower)},
                      {"upper", b::to_json(res.upper)}});
    }
    for (const auto& w : store.warnings()) std::cout << "warning: " << w << "\n";
    json r{{"queries", rows}, {"warnings", store.warnings()}, {"rounds", store.rounds()}};
    return {0, r, std::to_string(rows.size()) + " queries"};
  } catch (const b::ContradictionError& e) {
    return report_contradiction(e);
  }
}

Outcome cmd_bounds_attribute(Inputs& inputs, const std::vector<std::string>& facts, const std::string& subject,
                             const std::string& name, bool standard) {
  namespace b = confsec::bounds;
  try {
    const auto store = b::propagate(load_facts(inputs, facts, standard));
    const auto a = store.attribute(subject, name);
    std::cout << name << "(" << subject << ") = " << b::to_string(a.value) << "\n";
    if (a.why) std::cout << b::render(a.why, 1);
    return {0, {{"subject", subject}, {"name", name}, {"value", std::string(b::to_string(a.value))},
                {"why", b::to_json(a.why)}},
            std::string(b::to_string(a.value))};
  } catch (const b::ContradictionError& e) {
    return report_contradiction(e);
  }
}

Outcome cmd_bounds_rules() {
  json rows = json::array();
  auto show = [&](const confsec::bounds::Rule& r) {
    std::cout << std::left << std::setw(6) << r.id << r.statement << "\n      guard: " << r.guard << "\n";
    rows.push_back({{"id", r.id}, {"statement", r.statement}, {"guard", r.guard}});
  };
  for (const auto& r : confsec::bounds::load_rules()) show(r);
  for (const auto& r : confsec::bounds::auxiliary_steps()) show(r);
  return {0, {{"rules", rows}}, std::to_string(rows.size()) + " rules"};
}

json optimality_json(const confsec::Planner& planner, int k, int r) {
  const auto store = confsec::bounds::propagate(confsec::bounds::standard_facts());
  const auto o = confsec::assess_optimality(planner, k, r, store);
  return {{"regions", o.regions}, {"tc", confsec::bounds::to_json(o.tc)}, {"status", o.status}};
}

Outcome cmd_plan(const Global& g, Inputs& inputs, const std::string& space_id, int k, int r, const std::string& start,
                 const std::string& goal, const std::string& out, const std::string& plot, double density) {
  const auto space = confsec::SpaceDescriptor::parse(space_id);
  confsec::PlanQuery q = confsec::random_query(space, k, r, g.seed);
  if (!start.empty() || !goal.empty()) {
    if (start.empty() || goal.empty()) throw confsec::Error(confsec::ErrorCode::InvalidArgument, "give both --start and --goal");
    q = confsec::PlanQuery::make(confsec::io::configuration_from_json(inputs.read(start)),
                                 confsec::io::configuration_from_json(inputs.read(goal)));
    if (!(q.space() == space) || q.k() != k || q.r() != r) {
      throw confsec::Error(confsec::ErrorCode::InvalidArgument, "start/goal do not match --space/--k/--r");
    }
  }
  const auto planner = confsec::Planner::for_problem(space, k, r);
  auto plan = planner.plan(q, density);
  plan.seed = g.seed;
  const auto report = confsec::verify_plan(plan, q, {.seed = g.seed});
  json pj = confsec::io::to_json(plan);
  pj["verification"] = report.to_json();
  pj["optimality"] = optimality_json(planner, k, r);
  pj["query"] = confsec::io::to_json(q);
  if (!out.empty()) confsec::io::write_json_file(out, pj);
  if (plot == "csv") {
    std::cout << confsec::trajectory_csv(plan);
  } else {
    std::cout << planner.name() << ": region " << plan.region_id << " of " << plan.region_count << " ("
              << pj["optimality"]["status"].get<std::string>() << "), " << plan.samples.size() << " samples, length "
              << plan.length() << "\n";
    print_report(report);
  }
  json res{{"region_id", plan.region_id},
           {"region_count", plan.region_count},
           {"planner", plan.planner},
           {"optimality", pj["optimality"]},
           {"verification", pj["verification"]},
           {"samples", plan.samples.size()}};
  return {report.passed() ? 0 : 1, res, report.passed() ? "plan verified" : "plan failed verification"};
}

Outcome cmd_plan_batch(const Global& g, Inputs& inputs, const std::string& scenarios_file) {
  const json doc = inputs.read(scenarios_file);
  if (!doc.contains("scenarios")) throw confsec::Error(confsec::ErrorCode::Parse, "scenarios file needs \"scenarios\"");
  json rows = json::array();
  bool all_ok = true;
  for (const auto& s : doc.at("scenarios")) {
    const auto space = confsec::SpaceDescriptor::parse(s.at("space").get<std::string>());
    const int k = s.value("k", 2), r = s.value("r", 1);
    std::vector<confsec::PlanQuery> queries;
    if (s.contains("queries")) {
      for (const auto& qj : s.at("queries")) queries.push_back(confsec::io::query_from_json(qj));
    }
    const int random = s.value("random", 0);
    const std::uint64_t seed = s.value("seed", g.seed);
    for (int i = 0; i < random; ++i) queries.push_back(confsec::random_query(space, k, r, seed + i));
    const auto items = confsec::plan_batch(queries, g.threads);
    std::map<int, int> hist;
    int failed = 0;
    double worst_end = 0, worst_ratio = 0;
    for (const auto& it : items) {
      ++hist[it.plan.region_id];
      if (!it.report.passed()) ++failed;
      worst_end = std::max(worst_end, it.report.find("endpoint_error")->value);
      if (const auto* c = it.report.find("continuity_ratio")) worst_ratio = std::max(worst_ratio, c->value);
    }
    const auto planner = confsec::Planner::for_problem(space, k, r);
    json h = json::object();
    for (auto [region, n] : hist) h[std::to_string(region)] = n;
    json row{{"space", space.id()},         {"k", k},
             {"r", r},                      {"planner", planner.name()},
             {"queries", items.size()},     {"failed", failed},
             {"regions_used", h},           {"max_endpoint_error", worst_end},
             {"max_continuity_ratio", worst_ratio}, {"optimality", optimality_json(planner, k, r)}};
    std::cout << space.id() << " k=" << k << " r=" << r << ": " << items.size() << " queries, " << failed
              << " failed, regions " << h.dump() << ", " << row["optimality"]["status"].get<std::string>() << "\n";
    all_ok = all_ok && failed == 0;
    rows.push_back(row);
  }
  return {all_ok ? 0 : 1, {{"scenarios", rows}}, all_ok ? "all plans verified" : "some plans failed"};
}

int exit_code_for(confsec::ErrorCode code) {
  switch (code) {
    case confsec::ErrorCode::InvalidArgument:
    case confsec::ErrorCode::MismatchedSpace:
    case confsec::ErrorCode::Unsupported:
    case confsec::ErrorCode::Parse: return 2;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confsec: sections of configuration-space projections, fixed points and motion planning"};
  app.set_version_flag("--version", std::string(CONFSEC_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  for (int i = 1; i < argc; ++i) g.argv.emplace_back(argv[i]);
  app.add_option("--json", g.json_out, "Write the machine-readable result here");
  app.add_option("--manifest", g.manifest_out, "Write the run manifest here");
  app.add_option("--seed", g.seed, "Seed for all sampling (default 0)");
  app.add_option("--threads", g.threads, "Worker threads (default: CONFSEC_THREADS or 1)");

  std::string command;
  std::function<Outcome(Inputs&)> action;

  auto* catalog = app.add_subcommand("catalog", "Self-map recipes");
  catalog->add_subcommand("list", "List recipes with their spaces and fixed-point status")->callback([&] {
    command = "catalog list";
    action = [&](Inputs&) { return cmd_catalog(); };
  });
  catalog->require_subcommand(1);

  std::string space_id;
  std::vector<std::string> facts;
  std::size_t samples = 10'000;
  auto* fpp = app.add_subcommand("fpp", "FPP verdict and sec(pi(2,1,X)) for a model space");
  fpp->add_option("--space", space_id, "Model space id")->required();
  fpp->add_option("--facts", facts, "Extra facts files");
  fpp->add_option("--samples", samples, "Samples for witness verification")->capture_default_str();
  fpp->callback([&] {
    command = "fpp";
    action = [&](Inputs& in) { return cmd_fpp(g, in, space_id, facts, std::min<std::size_t>(samples, 100'000'000)); };
  });

  std::string poset_file, map_text;
  int max_cover = 4, point = 0;
  std::uint64_t budget = confsec::finite::kDefaultBudget;
  auto* finite = app.add_subcommand("finite", "Exhaustive computations on finite posets");
  finite->require_subcommand(1);
  for (const char* mode : {"fpp", "sec", "mr"}) {
    auto* sub = finite->add_subcommand(mode, std::string("finite ") + mode);
    sub->add_option("--poset", poset_file, "Poset JSON file")->required();
    sub->add_option("--budget", budget, "Search node budget")->capture_default_str();
    if (std::string(mode) == "sec") sub->add_option("--max-cover", max_cover, "Largest cover tried")->capture_default_str();
    if (std::string(mode) == "mr") {
      sub->add_option("--map", map_text, "Monotone self-map as comma-separated images")->required();
      sub->add_option("--point", point, "Target point a")->required();
    }
    sub->callback([&, mode] {
      command = std::string("finite ") + mode;
      action = [&, mode](Inputs& in) { return cmd_finite(in, mode, poset_file, max_cover, budget, map_text, point); };
    });
  }

  std::string recipe;
  int k = 2, r = 1, drop = 0;
  auto* section = app.add_subcommand("section", "Local sections of pi(k,r,X)");
  section->require_subcommand(1);
  auto* verify = section->add_subcommand("verify", "Build a cover and verify it numerically");
  verify->add_option("--recipe", recipe, "key-lemma, binomial, sigma, group, fpf")->required();
  verify->add_option("--space", space_id, "Model space id")->required();
  verify->add_option("--k", k, "Number of points")->capture_default_str();
  verify->add_option("--r", r, "Points kept by the projection")->capture_default_str();
  verify->add_option("--drop", drop, "Keep the first m points of a global section");
  verify->add_option("--samples", samples, "Random base configurations")->capture_default_str();
  verify->callback([&] {
    command = "section verify";
    action = [&](Inputs&) { return cmd_section(g, recipe, space_id, k, r, drop, samples); };
  });

  std::string cert_file;
  auto* certify = app.add_subcommand("certify", "Check lower-bound certificates");
  certify->require_subcommand(1);
  for (const char* kind : {"cup", "induced"}) {
    auto* sub = certify->add_subcommand(kind, std::string(kind) + " certificate");
    sub->add_option("--file", cert_file, "Certificate JSON")->required();
    sub->callback([&, kind] {
      command = std::string("certify ") + kind;
      action = [&, kind](Inputs& in) { return cmd_certify(in, kind, cert_file); };
    });
  }

  std::vector<std::string> quantities;
  bool explain = false, no_standard = false;
  std::optional<std::uint64_t> rule_seed;
  std::string subject, attr_name;
  auto* bounds = app.add_subcommand("bounds", "Interval bounds for cat, TC, sec and secat");
  bounds->require_subcommand(1);
  auto* query = bounds->add_subcommand("query", "Propagate the facts and print intervals");
  query->add_option("--facts", facts, "Facts files");
  query->add_option("--quantity", quantities, "Quantity such as TC(pi(2,1,S3))")->required();
  query->add_flag("--explain", explain, "Print derivation trees");
  query->add_flag("--no-standard", no_standard, "Do not load the built-in sphere, RP2 and torus values");
  query->add_option("--rule-seed", rule_seed, "Apply rules in a seeded random order");
  query->callback([&] {
    command = "bounds query";
    action = [&](Inputs& in) { return cmd_bounds_query(in, facts, quantities, explain, !no_standard, rule_seed); };
  });
  auto* attribute = bounds->add_subcommand("attribute", "Propagate the facts and print one attribute");
  attribute->add_option("--facts", facts, "Facts files");
  attribute->add_option("--subject", subject, "Space or map id")->required();
  attribute->add_option("--name", attr_name, "Attribute, e.g. FPP")->required();
  attribute->add_flag("--no-standard", no_standard, "Do not load the built-in values");
  attribute->callback([&] {
    command = "bounds attribute";
    action = [&](Inputs& in) { return cmd_bounds_attribute(in, facts, subject, attr_name, !no_standard); };
  });
  bounds->add_subcommand("rules", "List the inference rules")->callback([&] {
    command = "bounds rules";
    action = [&](Inputs&) { return cmd_bounds_rules(); };
  });

  std::string start, goal, out, plot, scenarios;
  double density = confsec::kDefaultDensity;
  auto* plan = app.add_subcommand("plan", "Motion plans for the (k,r) problem");
  plan->add_option("--space", space_id, "Model space id");
  plan->add_option("--k", k, "Number of robots")->capture_default_str();
  plan->add_option("--r", r, "Robots with a prescribed goal")->capture_default_str();
  plan->add_option("--start", start, "Start configuration JSON (default: random from --seed)");
  plan->add_option("--goal", goal, "Goal configuration JSON");
  plan->add_option("--out", out, "Write the plan JSON here");
  plan->add_option("--plot", plot, "csv: print the trajectory as CSV")->check(CLI::IsMember({"csv"}));
  plan->add_option("--density", density, "Samples per unit path length")->capture_default_str();
  auto* batch = plan->add_subcommand("batch", "Plan and verify scenario files");
  batch->add_option("--scenarios", scenarios, "Scenario JSON")->required();
  batch->callback([&] {
    command = "plan batch";
    action = [&](Inputs& in) { return cmd_plan_batch(g, in, scenarios); };
  });
  plan->callback([&] {
    if (plan->got_subcommand(batch)) return;
    if (space_id.empty()) throw CLI::RequiredError("--space");
    command = "plan";
    action = [&](Inputs& in) { return cmd_plan(g, in, space_id, k, r, start, goal, out, plot, density); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Inputs inputs;
  Outcome outcome;
  try {
    if (g.threads > 0) g.threads = confsec::resolve_threads(g.threads);
    outcome = action(inputs);
  } catch (const confsec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    outcome.exit_code = exit_code_for(e.code());
    if (outcome.exit_code == 2) {
      const auto hint = schema_hint(command.substr(0, command.find(' ')));
      if (!hint.empty()) std::cerr << "hint: " << hint << "\n";
    }
    outcome.result = {{"error", e.what()}, {"code", std::string(confsec::to_string(e.code()))}};
    outcome.summary = e.what();
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    const auto hint = schema_hint(command.substr(0, command.find(' ')));
    if (!hint.empty()) std::cerr << "hint: " << hint << "\n";
    outcome.exit_code = 2;
    outcome.result = {{"error", e.what()}, {"code", "Parse"}};
    outcome.summary = e.what();
  }

  json manifest{{"tool", "confsec"},
                {"version", CONFSEC_VERSION},
                {"command", command},
                {"arguments", g.argv},
                {"seed", g.seed},
                {"inputs", inputs.manifest_entries()},
                {"outcome", {{"exit_code", outcome.exit_code}, {"summary", outcome.summary}}}};
  try {
    if (!g.json_out.empty()) {
      confsec::io::write_json_file(g.json_out, {{"schema", kSchemaVersion},
                                                {"command", command},
                                                {"exit_code", outcome.exit_code},
                                                {"result", outcome.result},
                                                {"manifest", manifest}});
    }
    if (!g.manifest_out.empty()) confsec::io::write_json_file(g.manifest_out, manifest);
  } catch (const confsec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return outcome.exit_code;
}
