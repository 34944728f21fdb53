#include <set>

#include "json.hpp"
#include "medbuild/layout.hpp"

namespace medbuild::layout {

namespace {

using json = nlohmann::ordered_json;

json parse_root(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& keys) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    for (const std::string& k : keys) {
        if (!obj.contains(k)) throw SchemaError(path + "." + k, "missing required field");
    }
    for (const auto& [k, _] : obj.items()) {
        if (!keys.count(k)) throw SchemaError(path + "." + k, "unexpected field");
    }
}

std::int64_t integer_at(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    throw SchemaError(path, "expected an integer millimetre coordinate");
}

MmPoint point_at(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [x_mm, y_mm]");
    return {integer_at(v[0], path + "[0]"), integer_at(v[1], path + "[1]")};
}

json point_json(const MmPoint& p) { return json::array({p.x, p.y}); }

}  // namespace

SchemePair parse_scheme_json(std::string_view text) {
    const json root = parse_root(text);
    expect_keys(root, "$", {"schemes"});
    const json& list = root["schemes"];
    if (!list.is_array()) throw SchemaError("$.schemes", "expected an array");
    if (list.size() != 2) throw SchemaError("$.schemes", "expected exactly two schemes");
    std::vector<AxisScheme> schemes;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "$.schemes[" + std::to_string(i) + "]";
        const json& s = list[i];
        expect_keys(s, path, {"id", "building_mode", "axes"});
        AxisScheme scheme;
        if (!s["id"].is_string()) throw SchemaError(path + ".id", "expected a string");
        scheme.id = s["id"].get<std::string>();
        const std::string want = i == 0 ? "S1" : "S2";
        if (scheme.id != want) throw SchemaError(path + ".id", "expected \"" + want + "\"");
        const json& mode = s["building_mode"];
        if (mode == "shared") scheme.building_mode = BuildingMode::Shared;
        else if (mode == "independent") scheme.building_mode = BuildingMode::Independent;
        else throw SchemaError(path + ".building_mode", "expected \"shared\" or \"independent\"");
        const json& axes = s["axes"];
        if (!axes.is_array()) throw SchemaError(path + ".axes", "expected an array");
        if (axes.empty()) throw SchemaError(path + ".axes", "at least one axis is required");
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const std::string ap = path + ".axes[" + std::to_string(k) + "]";
            expect_keys(axes[k], ap, {"start", "end", "type"});
            Axis a;
            a.start = point_at(axes[k]["start"], ap + ".start");
            a.end = point_at(axes[k]["end"], ap + ".end");
            const json& type = axes[k]["type"];
            const auto t = type.is_string() ? axis_type_from_string(type.get<std::string>()) : std::nullopt;
            if (!t) throw SchemaError(ap + ".type", "expected podium, tower_mid or tower_high");
            a.type = *t;
            scheme.axes.push_back(a);
        }
        schemes.push_back(std::move(scheme));
    }
    return SchemePair{std::move(schemes[0]), std::move(schemes[1])};
}

std::string serialize_scheme_json(const SchemePair& pair) {
    json list = json::array();
    for (const AxisScheme* s : {&pair.s1, &pair.s2}) {
        json axes = json::array();
        for (const Axis& a : s->axes) {
            axes.push_back(json{{"start", point_json(a.start)}, {"end", point_json(a.end)}, {"type", std::string(to_string(a.type))}});
        }
        list.push_back(json{{"id", s->id}, {"building_mode", std::string(to_string(s->building_mode))}, {"axes", std::move(axes)}});
    }
    return json{{"schemes", std::move(list)}}.dump(2);
}

SitePolygon parse_site_json(std::string_view text) {
    const json root = parse_root(text);
    expect_keys(root, "$", {"vertices"});
    const json& verts = root["vertices"];
    if (!verts.is_array()) throw SchemaError("$.vertices", "expected an array");
    SitePolygon site;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        site.vertices.push_back(point_at(verts[i], "$.vertices[" + std::to_string(i) + "]"));
    }
    check_site(site);
    return site;
}

std::string serialize_site_json(const SitePolygon& site) {
    json verts = json::array();
    for (const MmPoint& p : site.vertices) verts.push_back(point_json(p));
    return json{{"vertices", std::move(verts)}}.dump();
}

}  // namespace medbuild::layout
