#include <array>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "medbuild/massing.hpp"

namespace medbuild::massing {

namespace {

using json = nlohmann::ordered_json;

json room_json(const RoomRef& r) {
    return json{{"id", r.id},       {"department", r.department}, {"name", r.name},
                {"priority", r.priority}, {"unit_area_m2", r.unit_area}, {"modules", r.modules}};
}

template <typename T>
T field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw layout::SchemaError(path + "." + key, "missing required field");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw layout::SchemaError(path + "." + key, "wrong type");
    }
}

std::array<double, 3> triple(const json& obj, const char* key, const std::string& path) {
    const auto v = field<std::vector<double>>(obj, key, path);
    if (v.size() != 3) throw layout::SchemaError(path + "." + key, "expected three numbers");
    return {v[0], v[1], v[2]};
}

void put_number(std::string& out, double v) {
    char buf[64];
    const double r = std::round(v * 1000.0) / 1000.0;
    std::snprintf(buf, sizeof buf, "%.3f", r == 0.0 ? 0.0 : r);  // no "-0.000"
    out += buf;
}

}  // namespace

SceneModel synthesize_scene(const Allocation& allocation, const FloorStack& stack, const layout::AxisScheme& scheme,
                            const FunctionalProgram& program, const MassingParams& params, std::uint64_t seed,
                            const std::string& config_hash) {
    const geom::ScaleMap scale{params.grid_scale};
    SceneModel scene;
    SceneMetadata& m = scene.metadata;
    m.scheme_id = scheme.id;
    m.seed = seed;
    m.config_hash = config_hash;
    m.level = program.level_label();
    m.beds = program.beds.target_total;
    m.rooms = program.room_count();
    m.program_area = program.total_area();
    m.estimated_cost = program.cost.estimated;
    m.required_modules = stack.required_modules;
    m.stacking_early_exit = stack.early_exit;

    for (const FloorPlan& f : allocation.floors) {
        const double z = static_cast<double>(f.index) * params.floor_height;
        scene.floors.push_back({f.index, z, f.axes.size(), geom::area(f.contour, scale), f.usable_area, f.capacity,
                                f.used_modules(), f.cells.size()});
        for (const RoomPlacement& p : f.allocated) {
            for (std::size_t ci : p.cells) {
                const GridCell& c = f.cells[ci];
                scene.modules.push_back({p.room.id, p.room.name, p.room.department, f.index, c.ox, c.oy, z, c.width, c.depth,
                                         params.floor_height, c.angle_deg});
                m.module_area += c.width * c.depth / 1e6;
            }
        }
    }
    scene.unallocated = allocation.unallocated;
    return scene;
}

SceneModel build_scene(const FunctionalProgram& program, const layout::AxisScheme& scheme, const PlanningConfig& config,
                       std::uint64_t seed, const std::string& config_hash) {
    FloorStack stack = calculate_optimal_floor_plan(program, scheme, config.massing);
    const Allocation allocation = allocate_rooms(program, stack, config);
    return synthesize_scene(allocation, stack, scheme, program, config.massing, seed, config_hash);
}

std::string export_scene(const SceneModel& scene, std::string_view format) {
    if (format == "scene-json") {
        const SceneMetadata& m = scene.metadata;
        json floors = json::array();
        for (const FloorSummary& f : scene.floors) {
            floors.push_back(json{{"index", f.index},
                                  {"z_mm", f.z},
                                  {"axis_count", f.axis_count},
                                  {"contour_area_m2", f.contour_area},
                                  {"usable_area_m2", f.usable_area},
                                  {"capacity_modules", f.capacity},
                                  {"used_modules", f.used_modules},
                                  {"cell_count", f.cell_count}});
        }
        json modules = json::array();
        for (const Module& md : scene.modules) {
            modules.push_back(json{{"room_id", md.room_id},
                                   {"room", md.room},
                                   {"department", md.department},
                                   {"floor", md.floor},
                                   {"origin_mm", {md.x, md.y, md.z}},
                                   {"size_mm", {md.w, md.d, md.h}},
                                   {"angle_deg", md.angle_deg}});
        }
        json unallocated = json::array();
        for (const RoomRef& r : scene.unallocated) unallocated.push_back(room_json(r));
        const json doc{{"schema_version", scene.schema_version},
                       {"metadata",
                        {{"scheme_id", m.scheme_id},
                         {"seed", m.seed},
                         {"config_hash", m.config_hash},
                         {"level", m.level},
                         {"beds", m.beds},
                         {"rooms", m.rooms},
                         {"program_area_m2", m.program_area},
                         {"module_area_m2", m.module_area},
                         {"estimated_cost_usd", m.estimated_cost},
                         {"required_modules", m.required_modules},
                         {"stacking_early_exit", m.stacking_early_exit}}},
                       {"floors", std::move(floors)},
                       {"modules", std::move(modules)},
                       {"unallocated", std::move(unallocated)}};
        return doc.dump(2) + "\n";
    }
    if (format == "obj") {
        std::string out = "# medbuild scene " + scene.metadata.scheme_id + ", units mm\n";
        std::size_t base = 1;
        std::string group;
        for (const Module& md : scene.modules) {
            if (md.room_id != group) {
                group = md.room_id;
                std::string name = group;
                for (char& ch : name) {
                    if (ch == ' ') ch = '_';
                }
                out += "g " + name + "\n";
            }
            const double a = md.angle_deg * M_PI / 180.0;
            const double ux = std::cos(a), uy = std::sin(a);
            const double local[4][2] = {{0, 0}, {md.w, 0}, {md.w, md.d}, {0, md.d}};
            for (double z : {md.z, md.z + md.h}) {
                for (const auto& l : local) {
                    out += "v ";
                    put_number(out, md.x + l[0] * ux - l[1] * uy);
                    out += ' ';
                    put_number(out, md.y + l[0] * uy + l[1] * ux);
                    out += ' ';
                    put_number(out, z);
                    out += '\n';
                }
            }
            // Bottom 0-3, top 4-7; faces wound outward.
            static const int tris[12][3] = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                                            {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
            for (const auto& t : tris) {
                out += "f " + std::to_string(base + t[0]) + " " + std::to_string(base + t[1]) + " " +
                       std::to_string(base + t[2]) + "\n";
            }
            base += 8;
        }
        return out;
    }
    throw UnsupportedFormat("unsupported scene format '" + std::string(format) + "'; use scene-json or obj");
}

SceneModel import_scene_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw layout::SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
    SceneModel scene;
    scene.schema_version = field<int>(doc, "schema_version", "$");
    if (scene.schema_version != 1) throw layout::SchemaError("$.schema_version", "unsupported version");
    const json md = field<json>(doc, "metadata", "$");
    SceneMetadata& m = scene.metadata;
    m.scheme_id = field<std::string>(md, "scheme_id", "$.metadata");
    m.seed = field<std::uint64_t>(md, "seed", "$.metadata");
    m.config_hash = field<std::string>(md, "config_hash", "$.metadata");
    m.level = field<std::string>(md, "level", "$.metadata");
    m.beds = field<long long>(md, "beds", "$.metadata");
    m.rooms = field<long long>(md, "rooms", "$.metadata");
    m.program_area = field<double>(md, "program_area_m2", "$.metadata");
    m.module_area = field<double>(md, "module_area_m2", "$.metadata");
    m.estimated_cost = field<double>(md, "estimated_cost_usd", "$.metadata");
    m.required_modules = field<long long>(md, "required_modules", "$.metadata");
    m.stacking_early_exit = field<bool>(md, "stacking_early_exit", "$.metadata");

    const json floors = field<json>(doc, "floors", "$");
    for (std::size_t i = 0; i < floors.size(); ++i) {
        const std::string p = "$.floors[" + std::to_string(i) + "]";
        const json& f = floors[i];
        scene.floors.push_back({field<int>(f, "index", p), field<double>(f, "z_mm", p), field<std::size_t>(f, "axis_count", p),
                                field<double>(f, "contour_area_m2", p), field<double>(f, "usable_area_m2", p),
                                field<long long>(f, "capacity_modules", p), field<long long>(f, "used_modules", p),
                                field<std::size_t>(f, "cell_count", p)});
    }
    const json modules = field<json>(doc, "modules", "$");
    for (std::size_t i = 0; i < modules.size(); ++i) {
        const std::string p = "$.modules[" + std::to_string(i) + "]";
        const json& j = modules[i];
        const auto o = triple(j, "origin_mm", p), s = triple(j, "size_mm", p);
        scene.modules.push_back({field<std::string>(j, "room_id", p), field<std::string>(j, "room", p),
                                 field<std::string>(j, "department", p), field<int>(j, "floor", p), o[0], o[1], o[2], s[0],
                                 s[1], s[2], field<double>(j, "angle_deg", p)});
    }
    const json un = field<json>(doc, "unallocated", "$");
    for (std::size_t i = 0; i < un.size(); ++i) {
        const std::string p = "$.unallocated[" + std::to_string(i) + "]";
        const json& r = un[i];
        scene.unallocated.push_back({field<std::string>(r, "id", p), field<std::string>(r, "department", p),
                                     field<std::string>(r, "name", p), field<std::string>(r, "priority", p),
                                     field<double>(r, "unit_area_m2", p), field<long long>(r, "modules", p)});
    }
    return scene;
}

}  // namespace medbuild::massing
