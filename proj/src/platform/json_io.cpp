#include <cstdio>
#include <sstream>

#include "documents.hpp"

namespace medbuild::platform {

using detail::json;

namespace {

template <typename T>
void put(json& obj, const char* key, const std::optional<T>& v) {
    if (v) obj[key] = *v;
}

void put_extras(json& obj, const dql::Extras& extras) {
    if (extras.empty()) return;
    json e = json::object();
    for (const auto& [k, v] : extras) e[k] = v;
    obj["extras"] = std::move(e);
}

json composition(const dql::CompositionToken& t) {
    json parts = json::array();
    for (const auto& [code, frac] : t.parts) parts.push_back(json::array({std::string(1, code), frac}));
    json out{{"parts", std::move(parts)}};
    if (t.ambiguous) {
        out["ambiguous"] = true;
        out["raw"] = t.raw;
    }
    return out;
}

template <typename T>
T get(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw layout::SchemaError(path + "." + key, "missing required field");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw layout::SchemaError(path + "." + key, "wrong type");
    }
}

std::string trim_kind(TrimKind k) { return k == TrimKind::Quantity ? "quantity" : "area"; }

}  // namespace

std::string record_to_json(const dql::DqlRecord& r) {
    json out = json::object();
    if (r.population) {
        json d = json::object();
        put(d, "pop", r.population->pop);
        put(d, "age0_14", r.population->age0_14);
        put(d, "age15_64", r.population->age15_64);
        put(d, "age65_up", r.population->age65_up);
        put(d, "growth_rate", r.population->growth_rate);
        put(d, "gender", r.population->gender);
        put_extras(d, r.population->extras);
        out["P"] = std::move(d);
    }
    if (r.health) {
        json d = json::object();
        if (r.health->diseases) {
            json list = json::array();
            for (const dql::DiseaseEntry& e : *r.health->diseases) {
                json x{{"code", std::string(1, e.code)}, {"inc", e.incidence}, {"res", e.resource_factor}};
                put_extras(x, e.extras);
                list.push_back(std::move(x));
            }
            d["dis"] = std::move(list);
        }
        put(d, "risk", r.health->risk);
        put_extras(d, r.health->extras);
        out["H"] = std::move(d);
    }
    if (r.culture) {
        json d = json::object();
        if (r.culture->rel) d["rel"] = composition(*r.culture->rel);
        put(d, "sexsep", r.culture->sexsep);
        put(d, "trad", r.culture->trad);
        put(d, "hol", r.culture->hol);
        put_extras(d, r.culture->extras);
        out["C"] = std::move(d);
    }
    if (r.maternal) {
        json d = json::object();
        put(d, "fert", r.maternal->fert);
        put(d, "mar", r.maternal->mar);
        put(d, "health", r.maternal->health);
        put_extras(d, r.maternal->extras);
        out["M"] = std::move(d);
    }
    if (r.existing) {
        json d = json::object();
        put(d, "total_beds", r.existing->total_beds);
        put(d, "quality_factor", r.existing->quality_factor);
        put(d, "or_rooms", r.existing->or_rooms);
        put_extras(d, r.existing->extras);
        out["E"] = std::move(d);
    }
    if (r.infrastructure) {
        json d = json::object();
        put(d, "fac", r.infrastructure->fac);
        put(d, "water", r.infrastructure->water);
        put(d, "infra", r.infrastructure->infra);
        put_extras(d, r.infrastructure->extras);
        out["I"] = std::move(d);
    }
    if (r.social) {
        json d = json::object();
        put(d, "conflict", r.social->conflict);
        put(d, "ref", r.social->ref);
        put(d, "vio", r.social->vio);
        put(d, "trust", r.social->trust);
        put_extras(d, r.social->extras);
        out["S"] = std::move(d);
    }
    if (r.economy) {
        json d = json::object();
        put(d, "gdp", r.economy->gdp);
        put(d, "pov", r.economy->pov);
        if (r.economy->emp) d["emp"] = composition(*r.economy->emp);
        put(d, "budget", r.economy->budget);
        put_extras(d, r.economy->extras);
        out["X"] = std::move(d);
    }
    if (r.geoclimate) {
        json d = json::object();
        put(d, "temp", r.geoclimate->temp);
        put(d, "rain", r.geoclimate->rain);
        put(d, "disrisk", r.geoclimate->disrisk);
        put(d, "mat", r.geoclimate->mat);
        put(d, "construct_pref", r.geoclimate->construct_pref);
        put_extras(d, r.geoclimate->extras);
        out["G"] = std::move(d);
    }
    if (r.site) {
        json d = json::object();
        put(d, "size", r.site->size);
        put(d, "access", r.site->access);
        put(d, "utilities", r.site->utilities);
        put(d, "topography", r.site->topography);
        put_extras(d, r.site->extras);
        out["SITE"] = std::move(d);
    }
    return out.dump(2) + "\n";
}

namespace detail {

json program_value(const FunctionalProgram& p) {
    json additions = json::array();
    for (const BedAddition& a : p.beds.additions) additions.push_back(json{{"reason", a.reason}, {"beds", a.beds}});
    json departments = json::array();
    for (const DepartmentSpec& d : p.departments) {
        departments.push_back(json{{"name", d.name}, {"beds", d.beds}, {"rooms", d.rooms}});
    }
    json rooms = json::array();
    for (const RoomSpec& r : p.rooms) {
        rooms.push_back(json{{"department", r.department},
                             {"name", r.name},
                             {"quantity", r.quantity},
                             {"unit_area_m2", r.unit_area},
                             {"template_area_m2", r.template_area},
                             {"priority", r.priority},
                             {"min_quantity", r.min_quantity}});
    }
    json trims = json::array();
    for (const TrimAction& t : p.trim_log) {
        trims.push_back(json{{"target", t.target}, {"kind", trim_kind(t.kind)}, {"before", t.before}, {"after", t.after}, {"saved_usd", t.saved}});
    }
    return json{{"level", std::string(to_string(p.level))},
                {"level_label", p.level_label()},
                {"flags", p.flags},
                {"score", p.score},
                {"beds",
                 {{"projected_population", p.beds.projected_population},
                  {"theoretical_total", p.beds.theoretical_total},
                  {"effective_existing", p.beds.effective_existing},
                  {"net_base", p.beds.net_base},
                  {"additions", std::move(additions)},
                  {"target_total", p.beds.target_total}}},
                {"operating_rooms", p.operating_rooms},
                {"departments", std::move(departments)},
                {"rooms", std::move(rooms)},
                {"totals", {{"room_count", p.room_count()}, {"net_area_m2", p.total_area()}}},
                {"cost", {{"estimated_usd", p.cost.estimated}, {"budget_usd", p.cost.budget}, {"feasible", p.cost.feasible}}},
                {"trim_log", std::move(trims)}};
}

FunctionalProgram program_from_value(const json& v, const std::string& path) {
    FunctionalProgram p;
    const auto level = level_from_string(get<std::string>(v, "level", path));
    if (!level) throw layout::SchemaError(path + ".level", "unknown hospital level");
    p.level = *level;
    for (const std::string& f : get<std::vector<std::string>>(v, "flags", path)) p.flags.insert(f);
    p.score = get<double>(v, "score", path);
    const json beds = get<json>(v, "beds", path);
    const std::string bp = path + ".beds";
    p.beds.projected_population = get<double>(beds, "projected_population", bp);
    p.beds.theoretical_total = get<double>(beds, "theoretical_total", bp);
    p.beds.effective_existing = get<double>(beds, "effective_existing", bp);
    p.beds.net_base = get<double>(beds, "net_base", bp);
    for (const json& a : get<json>(beds, "additions", bp)) {
        p.beds.additions.push_back({get<std::string>(a, "reason", bp + ".additions[]"), get<double>(a, "beds", bp + ".additions[]")});
    }
    p.beds.target_total = get<long long>(beds, "target_total", bp);
    p.operating_rooms = get<long long>(v, "operating_rooms", path);
    for (const json& d : get<json>(v, "departments", path)) {
        const std::string dp = path + ".departments[]";
        p.departments.push_back({get<std::string>(d, "name", dp), get<long long>(d, "beds", dp), get<std::vector<std::string>>(d, "rooms", dp)});
    }
    for (const json& r : get<json>(v, "rooms", path)) {
        const std::string rp = path + ".rooms[]";
        RoomSpec s;
        s.department = get<std::string>(r, "department", rp);
        s.name = get<std::string>(r, "name", rp);
        s.quantity = get<long long>(r, "quantity", rp);
        s.unit_area = get<double>(r, "unit_area_m2", rp);
        s.template_area = get<double>(r, "template_area_m2", rp);
        s.priority = get<std::string>(r, "priority", rp);
        s.min_quantity = get<int>(r, "min_quantity", rp);
        if (s.quantity < 0 || !(s.unit_area > 0.0)) throw layout::SchemaError(rp, "quantity must be >= 0 and area > 0");
        p.rooms.push_back(std::move(s));
    }
    const json cost = get<json>(v, "cost", path);
    p.cost.estimated = get<double>(cost, "estimated_usd", path + ".cost");
    p.cost.budget = get<double>(cost, "budget_usd", path + ".cost");
    p.cost.feasible = get<bool>(cost, "feasible", path + ".cost");
    for (const json& t : get<json>(v, "trim_log", path)) {
        const std::string tp = path + ".trim_log[]";
        TrimAction a;
        a.target = get<std::string>(t, "target", tp);
        const std::string kind = get<std::string>(t, "kind", tp);
        if (kind != "quantity" && kind != "area") throw layout::SchemaError(tp + ".kind", "expected quantity or area");
        a.kind = kind == "quantity" ? TrimKind::Quantity : TrimKind::Area;
        a.before = get<double>(t, "before", tp);
        a.after = get<double>(t, "after", tp);
        a.saved = get<double>(t, "saved_usd", tp);
        p.trim_log.push_back(std::move(a));
    }
    return p;
}

json scheme_pair_value(const layout::SchemePair& pair) { return json::parse(layout::serialize_scheme_json(pair)); }

layout::SchemePair scheme_pair_from_value(const json& value) { return layout::parse_scheme_json(value.dump()); }

json site_value(const layout::SitePolygon& site) { return json::parse(layout::serialize_site_json(site)); }

layout::SitePolygon site_from_value(const json& value, const std::string& path) {
    try {
        return layout::parse_site_json(value.dump());
    } catch (const layout::SchemaError& e) {
        throw layout::SchemaError(path + e.path().substr(1), e.what());
    }
}

json scene_value(const massing::SceneModel& scene) { return json::parse(massing::export_scene(scene, "scene-json")); }

}  // namespace detail

std::string program_to_json(const FunctionalProgram& program) { return detail::program_value(program).dump(2) + "\n"; }

FunctionalProgram program_from_json(std::string_view text) {
    json v;
    try {
        v = json::parse(text);
    } catch (const json::parse_error& e) {
        throw layout::SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
    return detail::program_from_value(v, "$");
}

std::string program_table(const FunctionalProgram& p) {
    std::ostringstream out;
    char line[256];
    out << "Hospital level: " << p.level_label() << "  (score " << dql::format_number(p.score) << ")\n";
    out << "Beds: " << p.beds.target_total << "  (projected population " << std::llround(p.beds.projected_population) << ")\n";
    out << "Operating rooms: " << p.operating_rooms << "\n\n";
    std::snprintf(line, sizeof line, "%-28s %-30s %5s %9s %10s  %s\n", "Department", "Room", "Qty", "Unit m2", "Total m2", "Priority");
    out << line;
    for (const RoomSpec& r : p.rooms) {
        std::snprintf(line, sizeof line, "%-28.28s %-30.30s %5lld %9.1f %10.1f  %s\n", r.department.c_str(), r.name.c_str(),
                      r.quantity, r.unit_area, r.total_area(), r.priority.c_str());
        out << line;
    }
    std::snprintf(line, sizeof line, "%-28s %-30s %5lld %9s %10.1f\n", "Total", "", p.room_count(), "", p.total_area());
    out << line << "\n";
    std::snprintf(line, sizeof line, "Estimated cost: %.0f USD  Budget: %.0f USD  %s\n", p.cost.estimated, p.cost.budget,
                  p.cost.feasible ? "within budget" : "OVER BUDGET");
    out << line << "\nTrim ledger (" << p.trim_log.size() << " actions)\n";
    if (p.trim_log.empty()) out << "  none\n";
    for (std::size_t i = 0; i < p.trim_log.size(); ++i) {
        const TrimAction& t = p.trim_log[i];
        std::snprintf(line, sizeof line, "  %3zu. %-50.50s %-8s %10.2f -> %10.2f  saved %.0f USD\n", i + 1, t.target.c_str(),
                      trim_kind(t.kind).c_str(), t.before, t.after, t.saved);
        out << line;
    }
    return out.str();
}

}  // namespace medbuild::platform
