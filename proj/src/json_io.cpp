#include "confsec/json_io.hpp"

#include "confsec/error.hpp"

#include <fstream>

namespace confsec::io {

namespace {

Eigen::VectorXd vector_from(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, "coordinates must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Parse, "coordinates must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json array_from(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json point_payload(const SpacePoint& p) {
  if (p.space().kind() == SpaceKind::WedgeS2S1) {
    return {{"branch", p.branch() == WedgeBranch::Circle ? "circle" : "sphere"}, {"coords", array_from(p.coords())}};
  }
  return array_from(p.coords());
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json to_json(const SpaceDescriptor& space) {
  return {{"id", space.id()},
          {"dim", space.dim()},
          {"hausdorff", space.hausdorff()},
          {"boundaryless_manifold", space.boundaryless_manifold()},
          {"metric", std::string(to_string(space.metric()))}};
}

json to_json(const SpacePoint& p) {
  json j{{"space", p.space().id()}, {"coords", array_from(p.coords())}};
  if (p.space().kind() == SpaceKind::WedgeS2S1) j["branch"] = p.branch() == WedgeBranch::Circle ? "circle" : "sphere";
  return j;
}

SpacePoint point_from_json(const json& j, const SpaceDescriptor& space) {
  if (j.is_array()) {
    if (space.kind() == SpaceKind::WedgeS2S1) {
      return j.size() == 1 ? SpacePoint::wedge_circle(j[0].get<double>()) : SpacePoint(space, vector_from(j));
    }
    return {space, vector_from(j)};
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "a point is a coordinate array or an object with \"coords\"");
  if (j.contains("space") && SpaceDescriptor::parse(j.at("space").get<std::string>()) != space) {
    throw Error(ErrorCode::MismatchedSpace, "point of " + j.at("space").get<std::string>() + " in " + space.id());
  }
  if (space.kind() == SpaceKind::Discrete && j.contains("index")) {
    return SpacePoint::discrete(space.parameter(), j.at("index").get<int>());
  }
  const Eigen::VectorXd v = vector_from(j.at("coords"));
  if (space.kind() == SpaceKind::WedgeS2S1) {
    const std::string branch = j.value("branch", std::string(v.size() == 1 ? "circle" : "sphere"));
    if (branch == "circle") {
      if (v.size() != 1) throw Error(ErrorCode::Parse, "circle-branch points have one angle");
      return SpacePoint::wedge_circle(v(0));
    }
    if (branch != "sphere") throw Error(ErrorCode::Parse, "wedge branch must be sphere or circle");
    return {space, v, WedgeBranch::Sphere};
  }
  return {space, v};
}

SpacePoint point_from_json(const json& j) {
  if (!j.is_object() || !j.contains("space")) throw Error(ErrorCode::Parse, "point needs \"space\"");
  return point_from_json(j, SpaceDescriptor::parse(j.at("space").get<std::string>()));
}

json to_json(const Configuration& c) {
  json pts = json::array();
  for (const auto& p : c.points()) pts.push_back(point_payload(p));
  return {{"space", c.space().id()}, {"points", pts}};
}

Configuration configuration_from_json(const json& j) {
  if (!j.is_object() || !j.contains("space") || !j.contains("points")) {
    throw Error(ErrorCode::Parse, "configuration needs \"space\" and \"points\"");
  }
  const auto space = SpaceDescriptor::parse(j.at("space").get<std::string>());
  std::vector<SpacePoint> pts;
  for (const auto& p : j.at("points")) pts.push_back(point_from_json(p, space));
  return Configuration(space, std::move(pts));
}

json to_json(const SelfMap& f) {
  json j{{"space", f.space().id()}, {"recipe", std::string(to_string(f.recipe()))}};
  if (f.translation()) j["translation"] = point_payload(*f.translation());
  if (f.recipe() == Recipe::VectorFieldFlow) j["epsilon"] = f.epsilon();
  if (f.recipe() == Recipe::Composite) {
    j["parts"] = json::array();
    for (const auto& p : f.parts()) j["parts"].push_back(to_json(p));
  }
  return j;
}

SelfMap selfmap_from_json(const json& j) {
  const std::string recipe = j.at("recipe").get<std::string>();
  if (recipe == "composite") {
    std::vector<SelfMap> parts;
    for (const auto& p : j.at("parts")) parts.push_back(selfmap_from_json(p));
    return SelfMap::composite(std::move(parts));
  }
  const auto space = SpaceDescriptor::parse(j.at("space").get<std::string>());
  if (recipe == "identity") return SelfMap::identity(space);
  if (recipe == "antipodal") return SelfMap::antipodal(space);
  if (recipe == "rp_odd_rotation") return SelfMap::rp_odd_rotation(space);
  if (recipe == "wedge_shift") return SelfMap::wedge_shift();
  if (recipe == "vector_field_flow") return SelfMap::vector_field_flow(space, j.value("epsilon", 0.5));
  if (recipe == "group_translation") {
    if (!j.contains("translation")) throw Error(ErrorCode::Parse, "group_translation needs \"translation\"");
    return SelfMap::group_translation(point_from_json(j.at("translation"), space));
  }
  for (const auto& entry : catalog()) {
    if (entry.recipe == recipe && !entry.supported) {
      throw Error(ErrorCode::Unsupported, recipe + " is listed in the catalog but not implemented");
    }
  }
  throw Error(ErrorCode::Parse, "unknown recipe '" + recipe + "'");
}

json to_json(const finite::FinitePoset& p) {
  json leq = json::array();
  for (const auto& [i, j] : p.relations()) leq.push_back({i, j});
  return {{"n", p.size()}, {"leq", leq}};
}

finite::FinitePoset poset_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n")) throw Error(ErrorCode::Parse, "poset needs \"n\" and \"leq\"");
  std::vector<std::pair<int, int>> rel;
  for (const auto& r : j.value("leq", json::array())) {
    if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::Parse, "each leq entry is [i, j]");
    rel.emplace_back(r[0].get<int>(), r[1].get<int>());
  }
  return finite::FinitePoset::from_relations(j.at("n").get<int>(), rel);
}

json to_json(const MotionPlan& plan) {
  json moves = json::array();
  for (const auto& m : plan.moves) {
    if (m.shift.size()) {
      moves.push_back({{"shift", array_from(m.shift)}});
    } else if (plan.space.kind() == SpaceKind::Sphere && plan.space.parameter() == 2) {
      moves.push_back({{"axis", array_from(Eigen::VectorXd(m.axis))}, {"angle", m.angle}});
    } else {
      moves.push_back({{"angle", m.angle}});
    }
  }
  json samples = json::array();
  for (const auto& [t, c] : plan.samples) {
    json pts = json::array();
    for (const auto& p : c.points()) pts.push_back(point_payload(p));
    samples.push_back({{"t", t}, {"points", pts}});
  }
  return {{"planner", plan.planner},   {"region_id", plan.region_id}, {"region_count", plan.region_count},
          {"space", plan.space.id()},  {"density", plan.density},     {"seed", plan.seed},
          {"length", plan.length()},   {"moves", moves},              {"samples", samples}};
}

PlanQuery query_from_json(const json& j) {
  return PlanQuery::make(configuration_from_json(j.at("start")), configuration_from_json(j.at("goal")));
}

json to_json(const PlanQuery& q) { return {{"start", to_json(q.start)}, {"goal", to_json(q.goal)}}; }

}  // namespace confsec::io
