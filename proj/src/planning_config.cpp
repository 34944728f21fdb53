#include "medbuild/planning_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "medbuild/hashing.hpp"

namespace medbuild {

namespace detail {
extern const std::string_view kDefaultConfigJson;
}

using json = nlohmann::ordered_json;

std::string_view to_string(HospitalLevel level) {
    switch (level) {
        case HospitalLevel::Clinic: return "Clinic";
        case HospitalLevel::Primary: return "Primary";
        case HospitalLevel::Secondary: return "Secondary";
        case HospitalLevel::Tertiary: return "Tertiary";
    }
    return "Clinic";
}

std::optional<HospitalLevel> level_from_string(std::string_view name) {
    for (HospitalLevel l : {HospitalLevel::Clinic, HospitalLevel::Primary, HospitalLevel::Secondary, HospitalLevel::Tertiary}) {
        if (to_string(l) == name) return l;
    }
    return std::nullopt;
}

double Ramp::operator()(double x) const {
    if (points.empty()) return 0.0;
    if (x <= points.front().first) return points.front().second;
    if (x >= points.back().first) return points.back().second;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto [x1, y1] = points[i];
        if (x <= x1) {
            const auto [x0, y0] = points[i - 1];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return points.back().second;
}

int PlanningConfig::priority_rank(const std::string& priority) const {
    const auto it = std::find(priority_hierarchy.begin(), priority_hierarchy.end(), priority);
    if (it == priority_hierarchy.end()) throw ConfigError("unknown priority class '" + priority + "'");
    return static_cast<int>(it - priority_hierarchy.begin());
}

bool PlanningConfig::is_protected(const std::string& priority) const {
    return std::find(protected_priorities.begin(), protected_priorities.end(), priority) != protected_priorities.end();
}

// ---------------------------------------------------------------------------
// JSON reading

namespace {

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

    bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

    Reader at(const char* key) const {
        if (!node_.is_object()) fail("expected an object");
        if (!node_.contains(key)) fail(std::string("missing key '") + key + "'");
        return Reader(node_.at(key), path_ + "." + key);
    }

    Reader at(std::size_t i) const { return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]"); }

    double number() const {
        if (!node_.is_number()) fail("expected a number");
        return node_.get<double>();
    }
    int integer() const {
        if (!node_.is_number_integer()) fail("expected an integer");
        return node_.get<int>();
    }
    std::string string() const {
        if (!node_.is_string()) fail("expected a string");
        return node_.get<std::string>();
    }
    std::size_t size() const {
        if (!node_.is_array()) fail("expected an array");
        return node_.size();
    }
    std::vector<std::string> keys() const {
        if (!node_.is_object()) fail("expected an object");
        std::vector<std::string> out;
        for (auto it = node_.begin(); it != node_.end(); ++it) out.push_back(it.key());
        return out;
    }
    Reader operator[](const std::string& key) const { return Reader(node_.at(key), path_ + "." + key); }

    double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
    int integer_or(const char* key, int fallback) const { return has(key) ? at(key).integer() : fallback; }

    const std::string& path() const { return path_; }

private:
    const json& node_;
    std::string path_;
};

HospitalLevel read_level(const Reader& r, const std::string& name) {
    auto level = level_from_string(name);
    if (!level) r.fail("unknown hospital level '" + name + "'");
    return *level;
}

Ramp read_ramp(const Reader& r) {
    Ramp ramp;
    for (std::size_t i = 0; i < r.size(); ++i) {
        Reader pt = r.at(i);
        if (pt.size() != 2) pt.fail("ramp breakpoint must be [x, y]");
        ramp.points.emplace_back(pt.at(std::size_t{0}).number(), pt.at(std::size_t{1}).number());
    }
    return ramp;
}

Condition read_condition(const Reader& r) {
    return Condition{r.at("field").string(), r.at("op").string(), r.at("threshold").number()};
}

std::vector<Condition> read_conditions(const Reader& r) {
    std::vector<Condition> out;
    for (std::size_t i = 0; i < r.size(); ++i) out.push_back(read_condition(r.at(i)));
    return out;
}

CountRule read_count(const Reader& r) {
    CountRule c;
    if (r.has("source")) {
        const std::string s = r.at("source").string();
        if (s == "formula") c.source = CountSource::Formula;
        else if (s == "ward") c.source = CountSource::Ward;
        else if (s == "operating_rooms") c.source = CountSource::OperatingRooms;
        else if (s == "delivery_rooms") c.source = CountSource::DeliveryRooms;
        else r.fail("unknown count source '" + s + "'");
    }
    c.fixed = r.number_or("fixed", 0.0);
    c.per_department_bed = r.number_or("per_department_bed", 0.0);
    c.per_total_bed = r.number_or("per_total_bed", 0.0);
    c.per_kpop = r.number_or("per_kpop", 0.0);
    c.beds_per_room = r.number_or("beds_per_room", 1.0);
    c.min = r.integer_or("min", 0);
    if (r.has("max")) c.max = r.at("max").integer();
    return c;
}

std::vector<GdpBand> read_bands(const Reader& r) {
    std::vector<GdpBand> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        Reader b = r.at(i);
        GdpBand band;
        if (b.has("upto_gdp")) band.upto_gdp = b.at("upto_gdp").number();
        band.multiplier = b.at("multiplier").number();
        out.push_back(band);
    }
    return out;
}

std::vector<DepartmentTemplate> read_departments(const Reader& r) {
    std::vector<DepartmentTemplate> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        Reader d = r.at(i);
        DepartmentTemplate dept;
        dept.name = d.at("name").string();
        dept.bed_share = d.number_or("bed_share", 0.0);
        if (d.has("requires_flag")) dept.requires_flag = d.at("requires_flag").string();
        Reader rooms = d.at("rooms");
        for (std::size_t j = 0; j < rooms.size(); ++j) {
            Reader t = rooms.at(j);
            RoomTemplate room;
            room.name = t.at("name").string();
            room.area = t.at("area").number();
            room.priority = t.at("priority").string();
            room.count = read_count(t.at("count"));
            room.min_quantity = t.integer_or("min_quantity", 0);
            if (t.has("requires_flag")) room.requires_flag = t.at("requires_flag").string();
            dept.rooms.push_back(std::move(room));
        }
        out.push_back(std::move(dept));
    }
    return out;
}

std::vector<std::string> read_strings(const Reader& r) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < r.size(); ++i) out.push_back(r.at(i).string());
    return out;
}

// ---------------------------------------------------------------------------
// JSON writing

json write_ramp(const Ramp& ramp) {
    json out = json::array();
    for (const auto& [x, y] : ramp.points) out.push_back(json::array({x, y}));
    return out;
}

json write_conditions(const std::vector<Condition>& conds) {
    json out = json::array();
    for (const Condition& c : conds) out.push_back({{"field", c.field}, {"op", c.op}, {"threshold", c.threshold}});
    return out;
}

json write_count(const CountRule& c) {
    json out = json::object();
    switch (c.source) {
        case CountSource::Formula: out["source"] = "formula"; break;
        case CountSource::Ward: out["source"] = "ward"; break;
        case CountSource::OperatingRooms: out["source"] = "operating_rooms"; break;
        case CountSource::DeliveryRooms: out["source"] = "delivery_rooms"; break;
    }
    out["fixed"] = c.fixed;
    out["per_department_bed"] = c.per_department_bed;
    out["per_total_bed"] = c.per_total_bed;
    out["per_kpop"] = c.per_kpop;
    out["beds_per_room"] = c.beds_per_room;
    out["min"] = c.min;
    if (c.max) out["max"] = *c.max;
    return out;
}

json write_bands(const std::vector<GdpBand>& bands) {
    json out = json::array();
    for (const GdpBand& b : bands) {
        json j = json::object();
        if (b.upto_gdp) j["upto_gdp"] = *b.upto_gdp;
        j["multiplier"] = b.multiplier;
        out.push_back(j);
    }
    return out;
}

const std::set<std::string>& known_fields() {
    static const std::set<std::string> fields{
        "P.pop",          "P.growth_rate",  "P.age0_14", "P.age15_64",   "P.age65_up",
        "P.gender",       "P.projected",    "H.complexity", "H.risk",    "C.trad",
        "M.fert",         "M.mar",          "M.health",  "E.total_beds", "E.quality_factor",
        "E.or_rooms",     "E.effective",    "E.effective_per_1000",      "I.fac",
        "I.water",        "I.infra",        "I.mean",    "S.conflict",   "S.ref",
        "S.vio",          "S.trust",        "X.gdp",     "X.pov",        "X.budget",
        "G.temp",         "G.rain",         "G.disrisk", "G.mat",        "SITE.size"};
    return fields;
}

void check_ramp(const Ramp& ramp, const std::string& where) {
    if (ramp.points.empty()) throw ConfigError(where + ": ramp needs at least one breakpoint");
    for (std::size_t i = 1; i < ramp.points.size(); ++i) {
        if (!(ramp.points[i].first > ramp.points[i - 1].first)) {
            throw ConfigError(where + ": ramp breakpoints must have strictly increasing x");
        }
    }
}

void check_condition(const Condition& c, const std::string& where) {
    static const std::set<std::string> ops{"<", "<=", ">", ">=", "==", "!="};
    if (!known_fields().count(c.field)) throw ConfigError(where + ": unknown field '" + c.field + "'");
    if (!ops.count(c.op)) throw ConfigError(where + ": unknown operator '" + c.op + "'");
}

void check_bands(const std::vector<GdpBand>& bands, const std::string& where) {
    if (bands.empty()) throw ConfigError(where + ": at least one band required");
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (!(bands[i].multiplier > 0.0)) throw ConfigError(where + ": multipliers must be positive");
        const bool last = i + 1 == bands.size();
        if (last != !bands[i].upto_gdp.has_value()) {
            throw ConfigError(where + ": only the last band is open-ended");
        }
        if (i > 0 && bands[i].upto_gdp && !(*bands[i].upto_gdp > *bands[i - 1].upto_gdp)) {
            throw ConfigError(where + ": band limits must increase");
        }
    }
}

}  // namespace

PlanningConfig load_config_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    const Reader root(doc, "$");
    PlanningConfig cfg;
    try {
        cfg.schema_version = root.at("schema_version").integer();
        if (cfg.schema_version != 1) root.fail("unsupported schema_version " + std::to_string(cfg.schema_version));
        cfg.planning_years = root.at("planning_years").number();
        cfg.defaults_profile = root.at("defaults_profile").string();

        const Reader lm = root.at("level_model");
        cfg.level_model.population = read_ramp(lm.at("population_ramp"));
        cfg.level_model.health = read_ramp(lm.at("health_ramp"));
        cfg.level_model.w_p = lm.at("w_p").number();
        cfg.level_model.w_h = lm.at("w_h").number();
        const Reader mods = lm.at("modifiers");
        for (std::size_t i = 0; i < mods.size(); ++i) {
            Reader m = mods.at(i);
            Modifier mod{m.at("id").string(), m.at("field").string(), std::nullopt};
            if (m.has("ramp")) mod.ramp = read_ramp(m.at("ramp"));
            cfg.level_model.modifiers.push_back(std::move(mod));
        }
        const Reader weights = lm.at("modifier_weights");
        for (const std::string& k : weights.keys()) cfg.level_model.modifier_weights[k] = weights[k].number();
        const Reader thresholds = lm.at("thresholds");
        for (const std::string& k : thresholds.keys()) {
            cfg.level_model.thresholds.emplace_back(read_level(thresholds, k), thresholds[k].number());
        }

        const Reader rates = root.at("bed_rate_per_1000");
        for (const std::string& k : rates.keys()) cfg.bed_rate_per_1000[read_level(rates, k)] = rates[k].number();

        const Reader demand = root.at("additional_demand");
        for (std::size_t i = 0; i < demand.size(); ++i) {
            Reader d = demand.at(i);
            cfg.additional_demand.push_back(
                DemandRule{d.at("reason").string(), read_conditions(d.at("when")), d.at("mode").string(), d.at("value").number()});
        }

        if (root.has("extensions")) {
            const Reader ext = root.at("extensions");
            for (std::size_t i = 0; i < ext.size(); ++i) {
                Reader e = ext.at(i);
                cfg.extensions.push_back(
                    LevelExtension{read_level(e, e.at("level").string()), e.at("flag").string(), read_conditions(e.at("any_of"))});
            }
        }

        const Reader surg = root.at("surgical");
        cfg.surgical.daily_op_hours = surg.at("daily_op_hours").number();
        cfg.surgical.annual_op_days = surg.at("annual_op_days").number();
        cfg.surgical.or_utilization = surg.at("or_utilization").number();
        const Reader specs = surg.at("specialties");
        for (const std::string& k : specs.keys()) {
            cfg.surgical.specialties[k] = SurgicalSpecialty{specs[k].at("surgery_rate").number(), specs[k].at("avg_duration").number()};
        }

        const Reader mat = root.at("maternity");
        cfg.maternity.births_per_capita_per_fertility = mat.at("births_per_capita_per_fertility").number();
        cfg.maternity.births_per_delivery_room = mat.at("births_per_delivery_room").number();

        const Reader catalog = root.at("catalog");
        for (const std::string& k : catalog.keys()) cfg.catalog[read_level(catalog, k)] = read_departments(catalog[k]);

        cfg.space_standard = read_bands(root.at("space_standard"));

        const Reader cost = root.at("cost");
        cfg.cost.base_rate = cost.at("base_rate_usd_per_m2").number();
        cfg.cost.gross_up = cost.at("gross_up").number();
        const Reader mm = cost.at("material_multipliers");
        for (const std::string& k : mm.keys()) cfg.cost.material_multipliers[k] = mm[k].number();
        cfg.cost.labor_bands = read_bands(cost.at("labor_bands"));

        cfg.priority_hierarchy = read_strings(root.at("priority_hierarchy"));
        cfg.protected_priorities = read_strings(root.at("protected_priorities"));

        const Reader trim = root.at("trim");
        cfg.trim.quantity_step = trim.at("quantity_step").integer();
        cfg.trim.area_step_fraction = trim.at("area_step_fraction").number();
        cfg.trim.area_floor_fraction = trim.at("area_floor_fraction").number();

        if (root.has("massing")) {
            const Reader m = root.at("massing");
            MassingParams& mp = cfg.massing;
            mp.room_depth = m.number_or("room_depth_mm", mp.room_depth);
            mp.corridor_width = m.number_or("corridor_width_mm", mp.corridor_width);
            mp.floor_height = m.number_or("floor_height_mm", mp.floor_height);
            mp.module_area = m.number_or("module_area_m2", mp.module_area);
            if (m.has("floors_by_axis_type")) {
                const Reader f = m.at("floors_by_axis_type");
                mp.floors_podium = f.at("podium").integer();
                mp.floors_tower_mid = f.at("tower_mid").integer();
                mp.floors_tower_high = f.at("tower_high").integer();
            }
            mp.overprovision = m.number_or("overprovision", mp.overprovision);
            mp.grid_scale = m.integer_or("grid_scale", static_cast<int>(mp.grid_scale));
        }
        if (root.has("layout")) {
            const Reader l = root.at("layout");
            LayoutParams& lp = cfg.layout;
            lp.snap_tolerance = l.number_or("snap_tolerance_mm", lp.snap_tolerance);
            lp.min_axis_length = l.number_or("min_axis_length_mm", lp.min_axis_length);
            lp.tower_spacing = l.number_or("tower_spacing_mm", lp.tower_spacing);
            lp.boundary_sample_step = l.number_or("boundary_sample_step_mm", lp.boundary_sample_step);
            lp.distinct_orientation_deg = l.number_or("distinct_orientation_deg", lp.distinct_orientation_deg);
            lp.capacity_margin = l.number_or("capacity_margin", lp.capacity_margin);
            lp.wing_gap = l.number_or("wing_gap_mm", lp.wing_gap);
            lp.main_street_min_aspect = l.number_or("main_street_min_aspect", lp.main_street_min_aspect);
            lp.courtyard_min_site_area = l.number_or("courtyard_min_site_area_m2", lp.courtyard_min_site_area);
            lp.dispersed_min_site_area = l.number_or("dispersed_min_site_area_m2", lp.dispersed_min_site_area);
            lp.dispersed_max_coverage = l.number_or("dispersed_max_coverage", lp.dispersed_max_coverage);
            lp.organic_min_irregularity = l.number_or("organic_min_irregularity", lp.organic_min_irregularity);
            lp.inscribed_raster = l.integer_or("inscribed_raster", lp.inscribed_raster);
        }

        const Reader reg = root.at("code_registry");
        for (const std::string& group : reg.keys()) {
            for (const std::string& code : reg[group].keys()) cfg.code_registry[group][code] = reg[group][code].number();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    check_config(cfg);
    return cfg;
}

PlanningConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_json(ss.str());
}

std::string_view default_config_text() { return detail::kDefaultConfigJson; }

const PlanningConfig& default_config() {
    static const PlanningConfig cfg = load_config_json(default_config_text());
    return cfg;
}

void check_config(const PlanningConfig& cfg) {
    if (!(cfg.planning_years >= 0.0)) throw ConfigError("planning_years must be non-negative");
    try {
        (void)dql::parse_dql(cfg.defaults_profile);
    } catch (const dql::ParseError& e) {
        throw ConfigError(std::string("defaults_profile: ") + e.what());
    }

    const LevelModel& lm = cfg.level_model;
    check_ramp(lm.population, "level_model.population_ramp");
    check_ramp(lm.health, "level_model.health_ramp");
    for (const Modifier& m : lm.modifiers) {
        if (!known_fields().count(m.field)) throw ConfigError("modifier " + m.id + ": unknown field '" + m.field + "'");
        if (m.ramp) check_ramp(*m.ramp, "modifier " + m.id);
    }
    if (lm.thresholds.empty()) throw ConfigError("level_model.thresholds: at least one threshold required");
    for (std::size_t i = 0; i < lm.thresholds.size(); ++i) {
        if (lm.thresholds[i].first == HospitalLevel::Clinic) throw ConfigError("level_model.thresholds: Clinic is the base band");
        if (i > 0) {
            if (!(static_cast<int>(lm.thresholds[i].first) > static_cast<int>(lm.thresholds[i - 1].first)) ||
                !(lm.thresholds[i].second > lm.thresholds[i - 1].second)) {
                throw ConfigError("level_model.thresholds must be strictly increasing");
            }
        }
    }

    for (HospitalLevel l : {HospitalLevel::Clinic, HospitalLevel::Primary, HospitalLevel::Secondary, HospitalLevel::Tertiary}) {
        const auto it = cfg.bed_rate_per_1000.find(l);
        if (it == cfg.bed_rate_per_1000.end() || !(it->second > 0.0)) {
            throw ConfigError("bed_rate_per_1000." + std::string(to_string(l)) + " must be positive");
        }
    }

    for (const DemandRule& r : cfg.additional_demand) {
        for (const Condition& c : r.when) check_condition(c, "additional_demand '" + r.reason + "'");
        if (r.mode != "fraction_of_base" && r.mode != "absolute" && r.mode != "per_1000_projected") {
            throw ConfigError("additional_demand '" + r.reason + "': unknown mode '" + r.mode + "'");
        }
        if (!(r.value >= 0.0)) throw ConfigError("additional_demand '" + r.reason + "': value must be non-negative");
    }
    for (const LevelExtension& e : cfg.extensions) {
        for (const Condition& c : e.any_of) check_condition(c, "extension '" + e.flag + "'");
    }

    const SurgicalParams& s = cfg.surgical;
    if (!(s.daily_op_hours > 0.0) || !(s.annual_op_days > 0.0)) throw ConfigError("surgical hours and days must be positive");
    if (!(s.or_utilization > 0.0 && s.or_utilization <= 1.0)) throw ConfigError("surgical.or_utilization must lie in (0, 1]");
    for (const auto& [name, spec] : s.specialties) {
        if (!(spec.surgery_rate >= 0.0) || !(spec.avg_duration >= 0.0)) throw ConfigError("surgical specialty " + name + " is negative");
    }
    if (!(cfg.maternity.births_per_delivery_room > 0.0) || !(cfg.maternity.births_per_capita_per_fertility >= 0.0)) {
        throw ConfigError("maternity parameters out of range");
    }

    {
        std::set<std::string> seen;
        for (const std::string& p : cfg.priority_hierarchy) {
            if (!seen.insert(p).second) throw ConfigError("priority_hierarchy repeats '" + p + "'");
        }
        if (seen.empty()) throw ConfigError("priority_hierarchy is empty");
        for (const std::string& p : cfg.protected_priorities) {
            if (!seen.count(p)) throw ConfigError("protected priority '" + p + "' is not in the hierarchy");
        }
    }

    for (const auto& [level, depts] : cfg.catalog) {
        std::set<std::string> names;
        for (const DepartmentTemplate& d : depts) {
            const std::string where = "catalog." + std::string(to_string(level)) + "." + d.name;
            if (!names.insert(d.name).second) throw ConfigError(where + ": duplicate department");
            if (!(d.bed_share >= 0.0)) throw ConfigError(where + ": bed_share must be non-negative");
            std::set<std::string> rooms;
            for (const RoomTemplate& t : d.rooms) {
                if (!rooms.insert(t.name).second) throw ConfigError(where + ": duplicate room " + t.name);
                if (!(t.area > 0.0)) throw ConfigError(where + "." + t.name + ": area must be positive");
                if (t.min_quantity < 0 || t.count.min < 0) throw ConfigError(where + "." + t.name + ": negative minimum");
                if (t.count.max && *t.count.max < t.count.min) throw ConfigError(where + "." + t.name + ": max below min");
                if (t.count.source == CountSource::Ward && !(t.count.beds_per_room > 0.0)) {
                    throw ConfigError(where + "." + t.name + ": beds_per_room must be positive");
                }
                (void)cfg.priority_rank(t.priority);
            }
        }
    }

    check_bands(cfg.space_standard, "space_standard");
    check_bands(cfg.cost.labor_bands, "cost.labor_bands");
    if (!(cfg.cost.base_rate >= 0.0) || !(cfg.cost.gross_up >= 1.0)) throw ConfigError("cost: base rate >= 0 and gross_up >= 1 required");
    for (const auto& [code, m] : cfg.cost.material_multipliers) {
        if (!(m > 0.0)) throw ConfigError("cost.material_multipliers." + code + " must be positive");
    }
    const MassingParams& mp = cfg.massing;
    if (!(mp.room_depth > 0.0) || !(mp.corridor_width > 0.0) || !(mp.floor_height > 0.0) || !(mp.module_area > 0.0)) {
        throw ConfigError("massing dimensions must be positive");
    }
    if (!(mp.floors_podium >= 1 && mp.floors_podium <= mp.floors_tower_mid && mp.floors_tower_mid <= mp.floors_tower_high)) {
        throw ConfigError("massing floors must satisfy 1 <= podium <= tower_mid <= tower_high");
    }
    if (!(mp.overprovision >= 1.0)) throw ConfigError("massing.overprovision must be at least 1");
    if (mp.grid_scale < 1) throw ConfigError("massing.grid_scale must be a positive integer");
    const LayoutParams& lp = cfg.layout;
    if (!(lp.snap_tolerance >= 0.0) || !(lp.min_axis_length > 0.0) || !(lp.tower_spacing >= 0.0) ||
        !(lp.boundary_sample_step > 0.0) || !(lp.capacity_margin >= 1.0) || !(lp.wing_gap >= 0.0) || lp.inscribed_raster < 8) {
        throw ConfigError("layout parameters out of range");
    }
    if (cfg.trim.quantity_step < 1) throw ConfigError("trim.quantity_step must be at least 1");
    if (!(cfg.trim.area_step_fraction > 0.0) || !(cfg.trim.area_floor_fraction > 0.0 && cfg.trim.area_floor_fraction <= 1.0)) {
        throw ConfigError("trim area parameters out of range");
    }
}

std::string config_to_json(const PlanningConfig& cfg) {
    json root = json::object();
    root["schema_version"] = cfg.schema_version;
    root["planning_years"] = cfg.planning_years;
    root["defaults_profile"] = cfg.defaults_profile;

    json lm = json::object();
    lm["population_ramp"] = write_ramp(cfg.level_model.population);
    lm["health_ramp"] = write_ramp(cfg.level_model.health);
    lm["w_p"] = cfg.level_model.w_p;
    lm["w_h"] = cfg.level_model.w_h;
    json mods = json::array();
    for (const Modifier& m : cfg.level_model.modifiers) {
        json j = {{"id", m.id}, {"field", m.field}};
        if (m.ramp) j["ramp"] = write_ramp(*m.ramp);
        mods.push_back(j);
    }
    lm["modifiers"] = mods;
    json weights = json::object();
    for (const auto& [k, v] : cfg.level_model.modifier_weights) weights[k] = v;
    lm["modifier_weights"] = weights;
    json thresholds = json::object();
    for (const auto& [level, v] : cfg.level_model.thresholds) thresholds[std::string(to_string(level))] = v;
    lm["thresholds"] = thresholds;
    root["level_model"] = lm;

    json rates = json::object();
    for (const auto& [level, v] : cfg.bed_rate_per_1000) rates[std::string(to_string(level))] = v;
    root["bed_rate_per_1000"] = rates;

    json demand = json::array();
    for (const DemandRule& r : cfg.additional_demand) {
        demand.push_back({{"reason", r.reason}, {"when", write_conditions(r.when)}, {"mode", r.mode}, {"value", r.value}});
    }
    root["additional_demand"] = demand;

    json ext = json::array();
    for (const LevelExtension& e : cfg.extensions) {
        ext.push_back({{"level", std::string(to_string(e.level))}, {"flag", e.flag}, {"any_of", write_conditions(e.any_of)}});
    }
    root["extensions"] = ext;

    json specs = json::object();
    for (const auto& [name, s] : cfg.surgical.specialties) {
        specs[name] = {{"surgery_rate", s.surgery_rate}, {"avg_duration", s.avg_duration}};
    }
    root["surgical"] = {{"daily_op_hours", cfg.surgical.daily_op_hours},
                        {"annual_op_days", cfg.surgical.annual_op_days},
                        {"or_utilization", cfg.surgical.or_utilization},
                        {"specialties", specs}};
    root["maternity"] = {{"births_per_capita_per_fertility", cfg.maternity.births_per_capita_per_fertility},
                         {"births_per_delivery_room", cfg.maternity.births_per_delivery_room}};

    json catalog = json::object();
    for (const auto& [level, depts] : cfg.catalog) {
        json list = json::array();
        for (const DepartmentTemplate& d : depts) {
            json dj = {{"name", d.name}, {"bed_share", d.bed_share}};
            if (d.requires_flag) dj["requires_flag"] = *d.requires_flag;
            json rooms = json::array();
            for (const RoomTemplate& t : d.rooms) {
                json tj = {{"name", t.name}, {"area", t.area}, {"priority", t.priority}, {"count", write_count(t.count)},
                           {"min_quantity", t.min_quantity}};
                if (t.requires_flag) tj["requires_flag"] = *t.requires_flag;
                rooms.push_back(tj);
            }
            dj["rooms"] = rooms;
            list.push_back(dj);
        }
        catalog[std::string(to_string(level))] = list;
    }
    root["catalog"] = catalog;
    root["space_standard"] = write_bands(cfg.space_standard);

    json mm = json::object();
    for (const auto& [k, v] : cfg.cost.material_multipliers) mm[k] = v;
    root["cost"] = {{"base_rate_usd_per_m2", cfg.cost.base_rate},
                    {"gross_up", cfg.cost.gross_up},
                    {"material_multipliers", mm},
                    {"labor_bands", write_bands(cfg.cost.labor_bands)}};
    root["priority_hierarchy"] = cfg.priority_hierarchy;
    root["protected_priorities"] = cfg.protected_priorities;
    root["trim"] = {{"quantity_step", cfg.trim.quantity_step},
                    {"area_step_fraction", cfg.trim.area_step_fraction},
                    {"area_floor_fraction", cfg.trim.area_floor_fraction}};
    json reg = json::object();
    for (const auto& [group, codes] : cfg.code_registry) {
        json g = json::object();
        for (const auto& [code, v] : codes) g[code] = v;
        reg[group] = g;
    }
    root["code_registry"] = reg;
    const MassingParams& mp = cfg.massing;
    root["massing"] = {{"room_depth_mm", mp.room_depth},
                       {"corridor_width_mm", mp.corridor_width},
                       {"floor_height_mm", mp.floor_height},
                       {"module_area_m2", mp.module_area},
                       {"floors_by_axis_type",
                        {{"podium", mp.floors_podium}, {"tower_mid", mp.floors_tower_mid}, {"tower_high", mp.floors_tower_high}}},
                       {"overprovision", mp.overprovision},
                       {"grid_scale", mp.grid_scale}};
    const LayoutParams& lp = cfg.layout;
    root["layout"] = {{"snap_tolerance_mm", lp.snap_tolerance},
                      {"min_axis_length_mm", lp.min_axis_length},
                      {"tower_spacing_mm", lp.tower_spacing},
                      {"boundary_sample_step_mm", lp.boundary_sample_step},
                      {"distinct_orientation_deg", lp.distinct_orientation_deg},
                      {"capacity_margin", lp.capacity_margin},
                      {"wing_gap_mm", lp.wing_gap},
                      {"main_street_min_aspect", lp.main_street_min_aspect},
                      {"courtyard_min_site_area_m2", lp.courtyard_min_site_area},
                      {"dispersed_min_site_area_m2", lp.dispersed_min_site_area},
                      {"dispersed_max_coverage", lp.dispersed_max_coverage},
                      {"organic_min_irregularity", lp.organic_min_irregularity},
                      {"inscribed_raster", lp.inscribed_raster}};
    return root.dump(2);
}

std::string config_hash(const PlanningConfig& cfg) { return sha256_hex(config_to_json(cfg)); }

// ---------------------------------------------------------------------------
// defaults merge and field resolution

namespace {

template <class T>
void fill(std::optional<T>& field, const std::optional<T>& fallback) {
    if (!field && fallback) field = fallback;
}

template <class Dim, class Merge>
void merge_dim(std::optional<Dim>& dim, const std::optional<Dim>& fallback, Merge&& merge) {
    if (!fallback) return;
    if (!dim) {
        dim = fallback;
        return;
    }
    merge(*dim, *fallback);
}

}  // namespace

dql::DqlRecord merge_defaults(const dql::DqlRecord& record, const PlanningConfig& config) {
    const dql::DqlRecord defaults = dql::parse_dql(config.defaults_profile);
    dql::DqlRecord r = record;
    merge_dim(r.population, defaults.population, [](auto& d, const auto& f) {
        fill(d.pop, f.pop);
        fill(d.age0_14, f.age0_14);
        fill(d.age15_64, f.age15_64);
        fill(d.age65_up, f.age65_up);
        fill(d.growth_rate, f.growth_rate);
        fill(d.gender, f.gender);
    });
    merge_dim(r.health, defaults.health, [](auto& d, const auto& f) {
        fill(d.diseases, f.diseases);
        fill(d.risk, f.risk);
    });
    merge_dim(r.culture, defaults.culture, [](auto& d, const auto& f) {
        fill(d.rel, f.rel);
        fill(d.sexsep, f.sexsep);
        fill(d.trad, f.trad);
        fill(d.hol, f.hol);
    });
    merge_dim(r.maternal, defaults.maternal, [](auto& d, const auto& f) {
        fill(d.fert, f.fert);
        fill(d.mar, f.mar);
        fill(d.health, f.health);
    });
    merge_dim(r.existing, defaults.existing, [](auto& d, const auto& f) {
        fill(d.total_beds, f.total_beds);
        fill(d.quality_factor, f.quality_factor);
        fill(d.or_rooms, f.or_rooms);
    });
    merge_dim(r.infrastructure, defaults.infrastructure, [](auto& d, const auto& f) {
        fill(d.fac, f.fac);
        fill(d.water, f.water);
        fill(d.infra, f.infra);
    });
    merge_dim(r.social, defaults.social, [](auto& d, const auto& f) {
        fill(d.conflict, f.conflict);
        fill(d.ref, f.ref);
        fill(d.vio, f.vio);
        fill(d.trust, f.trust);
    });
    merge_dim(r.economy, defaults.economy, [](auto& d, const auto& f) {
        fill(d.gdp, f.gdp);
        fill(d.pov, f.pov);
        fill(d.emp, f.emp);
        fill(d.budget, f.budget);
    });
    merge_dim(r.geoclimate, defaults.geoclimate, [](auto& d, const auto& f) {
        fill(d.temp, f.temp);
        fill(d.rain, f.rain);
        fill(d.disrisk, f.disrisk);
        fill(d.mat, f.mat);
        fill(d.construct_pref, f.construct_pref);
    });
    merge_dim(r.site, defaults.site, [](auto& d, const auto& f) {
        fill(d.size, f.size);
        fill(d.access, f.access);
        fill(d.utilities, f.utilities);
        fill(d.topography, f.topography);
    });
    return r;
}

namespace {

std::optional<double> registry_value(const PlanningConfig& config, const std::string& group,
                                     const std::optional<std::string>& code) {
    if (!code) return std::nullopt;
    const auto g = config.code_registry.find(group);
    if (g == config.code_registry.end()) throw ConfigError("code registry has no group '" + group + "'");
    const auto it = g->second.find(*code);
    if (it == g->second.end()) throw ConfigError("code '" + *code + "' is not registered under '" + group + "'");
    return it->second;
}

double projected(const dql::DqlRecord& r, const PlanningConfig& config) {
    const double pop = r.population && r.population->pop ? *r.population->pop : 0.0;
    const double growth = r.population && r.population->growth_rate ? *r.population->growth_rate : 0.0;
    return pop * std::pow(1.0 + growth / 100.0, config.planning_years);
}

template <class Dim, class Get>
std::optional<double> get(const std::optional<Dim>& dim, Get&& g) {
    if (!dim) return std::nullopt;
    return g(*dim);
}

}  // namespace

std::optional<double> resolve_field(const dql::DqlRecord& r, const PlanningConfig& config, std::string_view path) {
    const std::string p(path);
    if (p == "P.pop") return get(r.population, [](const auto& d) { return d.pop; });
    if (p == "P.growth_rate") return get(r.population, [](const auto& d) { return d.growth_rate; });
    if (p == "P.age0_14") return get(r.population, [](const auto& d) { return d.age0_14; });
    if (p == "P.age15_64") return get(r.population, [](const auto& d) { return d.age15_64; });
    if (p == "P.age65_up") return get(r.population, [](const auto& d) { return d.age65_up; });
    if (p == "P.gender") return get(r.population, [](const auto& d) { return d.gender; });
    if (p == "P.projected") {
        if (!r.population || !r.population->pop) return std::nullopt;
        return projected(r, config);
    }
    if (p == "H.complexity") {
        double total = 0.0;
        if (r.health && r.health->diseases) {
            for (const auto& d : *r.health->diseases) total += d.incidence * d.resource_factor;
        }
        return total;
    }
    if (p == "H.risk") return registry_value(config, "risk", r.health ? r.health->risk : std::nullopt);
    if (p == "C.trad") return get(r.culture, [](const auto& d) { return d.trad; });
    if (p == "M.fert") return get(r.maternal, [](const auto& d) { return d.fert; });
    if (p == "M.mar") return get(r.maternal, [](const auto& d) { return d.mar; });
    if (p == "M.health") return get(r.maternal, [](const auto& d) { return d.health; });
    if (p == "E.total_beds") return get(r.existing, [](const auto& d) { return d.total_beds; });
    if (p == "E.quality_factor") return get(r.existing, [](const auto& d) { return d.quality_factor; });
    if (p == "E.or_rooms") return get(r.existing, [](const auto& d) { return d.or_rooms; });
    if (p == "E.effective" || p == "E.effective_per_1000") {
        double effective = 0.0;
        if (r.existing) effective = r.existing->total_beds.value_or(0.0) * r.existing->quality_factor.value_or(0.0);
        if (p == "E.effective") return effective;
        const double proj = projected(r, config);
        return proj > 0.0 ? effective / proj * 1000.0 : 0.0;
    }
    if (p == "I.fac") return get(r.infrastructure, [](const auto& d) { return d.fac; });
    if (p == "I.water") return get(r.infrastructure, [](const auto& d) { return d.water; });
    if (p == "I.infra") return get(r.infrastructure, [](const auto& d) { return d.infra; });
    if (p == "I.mean") {
        if (!r.infrastructure) return std::nullopt;
        double sum = 0.0;
        int n = 0;
        for (const auto& v : {r.infrastructure->fac, r.infrastructure->water, r.infrastructure->infra}) {
            if (v) {
                sum += *v;
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        return sum / n;
    }
    if (p == "S.conflict") return registry_value(config, "conflict", r.social ? r.social->conflict : std::nullopt);
    if (p == "S.ref") return get(r.social, [](const auto& d) { return d.ref; });
    if (p == "S.vio") return get(r.social, [](const auto& d) { return d.vio; });
    if (p == "S.trust") return get(r.social, [](const auto& d) { return d.trust; });
    if (p == "X.gdp") return get(r.economy, [](const auto& d) { return d.gdp; });
    if (p == "X.pov") return get(r.economy, [](const auto& d) { return d.pov; });
    if (p == "X.budget") return get(r.economy, [](const auto& d) { return d.budget; });
    if (p == "G.temp") return get(r.geoclimate, [](const auto& d) { return d.temp; });
    if (p == "G.rain") return get(r.geoclimate, [](const auto& d) { return d.rain; });
    if (p == "G.disrisk") return registry_value(config, "disrisk", r.geoclimate ? r.geoclimate->disrisk : std::nullopt);
    if (p == "G.mat") return registry_value(config, "mat", r.geoclimate ? r.geoclimate->mat : std::nullopt);
    if (p == "SITE.size") return get(r.site, [](const auto& d) { return d.size; });
    throw ConfigError("unknown field path '" + p + "'");
}

bool evaluate(const Condition& c, const dql::DqlRecord& record, const PlanningConfig& config) {
    const auto v = resolve_field(record, config, c.field);
    if (!v) return false;
    if (c.op == "<") return *v < c.threshold;
    if (c.op == "<=") return *v <= c.threshold;
    if (c.op == ">") return *v > c.threshold;
    if (c.op == ">=") return *v >= c.threshold;
    if (c.op == "==") return *v == c.threshold;
    if (c.op == "!=") return *v != c.threshold;
    throw ConfigError("unknown operator '" + c.op + "'");
}

}  // namespace medbuild
