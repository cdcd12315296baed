#pragma once

// JSON encodings shared by the CLI, the schemas and the tests.

#include "confsec/finite.hpp"
#include "confsec/geometry.hpp"
#include "confsec/planner.hpp"
#include "confsec/report.hpp"
#include "confsec/selfmaps.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace confsec::io {

using nlohmann::json;

/// Throws Parse with the path in the message.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// {"id":"S2","dim":2,"hausdorff":true,"boundaryless_manifold":true,"metric":"geodesic"}
json to_json(const SpaceDescriptor& space);

/// {"space":"S2","coords":[x,y,z]}; wedge points add "branch":"sphere"|"circle".
json to_json(const SpacePoint& p);
SpacePoint point_from_json(const json& j);
/// A point inside a configuration: a bare coordinate array, or {"coords":..,"branch":..}.
SpacePoint point_from_json(const json& j, const SpaceDescriptor& space);

/// {"space":"S2","points":[[..],[..]]}
json to_json(const Configuration& c);
Configuration configuration_from_json(const json& j);

/// {"space":"RP3","recipe":"rp_odd_rotation"}; group_translation adds "translation":[..],
/// vector_field_flow adds "epsilon", composite adds "parts":[..].
json to_json(const SelfMap& f);
SelfMap selfmap_from_json(const json& j);

/// {"n":4,"leq":[[i,j],..]}; the closure is computed on load.
json to_json(const finite::FinitePoset& p);
finite::FinitePoset poset_from_json(const json& j);

/// {"planner","region_id","region_count","space","moves":[..],"samples":[{"t":..,"points":[..]}],"density"}
json to_json(const MotionPlan& plan);

/// {"start":{configuration},"goal":{configuration}}
PlanQuery query_from_json(const json& j);
json to_json(const PlanQuery& q);

}  // namespace confsec::io
