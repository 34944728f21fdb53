#pragma once

// JSON values shared by the pipeline, run store and service. Keys keep
// insertion order so every document serializes byte-identically.

#include "json.hpp"
#include "medbuild/platform.hpp"

namespace medbuild::platform::detail {

using json = nlohmann::ordered_json;

json program_value(const FunctionalProgram& program);
FunctionalProgram program_from_value(const json& value, const std::string& path);
json scheme_pair_value(const layout::SchemePair& pair);
layout::SchemePair scheme_pair_from_value(const json& value);
json site_value(const layout::SitePolygon& site);
layout::SitePolygon site_from_value(const json& value, const std::string& path);
json scene_value(const massing::SceneModel& scene);

}  // namespace medbuild::platform::detail
