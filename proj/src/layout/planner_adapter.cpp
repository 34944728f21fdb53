#include "json.hpp"
#include "medbuild/layout.hpp"

namespace medbuild::layout {

std::string planner_payload(const FunctionalProgram& program, const SitePolygon& site, const PlanningConfig& config) {
    using json = nlohmann::ordered_json;
    json verts = json::array();
    for (const MmPoint& p : site.vertices) verts.push_back(json::array({p.x, p.y}));
    json typologies = json::array();
    for (Typology t : {Typology::MainStreet, Typology::Courtyard, Typology::PodiumTower, Typology::Organic, Typology::Dispersed}) {
        typologies.push_back(std::string(to_string(t)));
    }
    return json{
        {"task", "two distinct axis schemes"},
        {"site", {{"vertices", std::move(verts)}}},
        {"program",
         {{"level", program.level_label()},
          {"beds", program.beds.target_total},
          {"net_area_m2", program.total_area()},
          {"required_modules", required_modules(program, config.massing)}}},
        {"rules",
         {{"axes_inside_site", true},
          {"acyclic", true},
          {"min_axis_length_mm", config.layout.min_axis_length},
          {"tower_spacing_mm", config.layout.tower_spacing},
          {"snap_tolerance_mm", config.layout.snap_tolerance}}},
        {"typologies", std::move(typologies)},
        {"response_schema", "{\"schemes\":[{\"id\",\"building_mode\",\"axes\":[{\"start\",\"end\",\"type\"}]}]}"},
    }
        .dump();
}

SchemePair plan_with_external(PlannerClient& client, const FunctionalProgram& program, const SitePolygon& site,
                              const PlanningConfig& config) {
    const std::string response = client.complete(planner_payload(program, site, config));
    SchemePair pair;
    try {
        pair = parse_scheme_json(response);
    } catch (const SchemaError& e) {
        throw SchemeRejected(std::string("planner response is not valid scheme JSON: ") + e.what(), {});
    }
    std::vector<SchemeViolation> all;
    for (const AxisScheme* s : {&pair.s1, &pair.s2}) {
        for (SchemeViolation v : validate_scheme(*s, site, config.layout)) {
            v.message = s->id + ": " + v.message;
            all.push_back(std::move(v));
        }
        if (building_mode_of(s->axes, config.layout.snap_tolerance) != s->building_mode) {
            all.push_back({"building_mode", {}, s->id + ": declared building_mode does not match axis connectivity"});
        }
    }
    if (!all.empty()) throw SchemeRejected("planner schemes violate hard constraints", std::move(all));
    if (!schemes_distinct(pair.s1, pair.s2, config.layout)) {
        throw SchemeRejected("planner schemes are not distinct", {{"distinct", {}, "S1 and S2 do not differ in typology, orientation or topology"}});
    }
    return pair;
}

}  // namespace medbuild::layout
