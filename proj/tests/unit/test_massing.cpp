#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "files.hpp"
#include "fuzz.hpp"
#include "medbuild/massing.hpp"
#include "oracles.hpp"

using namespace medbuild;
using namespace medbuild::massing;

namespace {

Axis ax(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1, AxisType t = AxisType::Podium) {
    return Axis{{x0, y0}, {x1, y1}, t};
}

layout::AxisScheme scheme(std::vector<Axis> axes) {
    layout::AxisScheme s;
    s.id = "S1";
    s.axes = std::move(axes);
    return s;
}

FunctionalProgram rooms(std::vector<RoomSpec> list) {
    FunctionalProgram p;
    p.rooms = std::move(list);
    return p;
}

RoomSpec room(const char* name, long long qty, double area, const char* priority = "essential") {
    return RoomSpec{name, "Dept", qty, area, area, priority, 0};
}

}  // namespace

TEST_CASE("axes_for_floor") {
    MassingParams mp;
    mp.floors_podium = 2;
    mp.floors_tower_mid = 6;
    const std::vector<Axis> axes{ax(0, 0, 30000, 0), ax(0, 20000, 30000, 20000, AxisType::TowerMid),
                                 ax(0, 60000, 30000, 60000, AxisType::TowerHigh)};
    CHECK(axes_for_floor(axes, 0, mp) == axes);
    CHECK(axes_for_floor(axes, 1, mp).size() == 3);
    CHECK(axes_for_floor(axes, 3, mp) == std::vector<Axis>{axes[1], axes[2]});
    CHECK(axes_for_floor(axes, 6, mp) == std::vector<Axis>{axes[2]});
    CHECK(axes_for_floor(axes, 12, mp).empty());
    CHECK(axes_for_floor({axes[0]}, 2, mp).empty());
}

TEST_CASE("floor stacking") {
    const MassingParams mp;  // 25 m² modules, 10 m of rooms across a 2.4 m corridor
    const FunctionalProgram ten = rooms({room("R", 10, 25)});

    // 32.5 m of double-loaded axis holds floor(325 / 25) = 13 modules.
    const FloorStack one = calculate_optimal_floor_plan(ten, scheme({ax(0, 0, 32500, 0)}), mp);
    REQUIRE(one.floors.size() == 1);
    CHECK(one.floors[0].capacity == 13);
    CHECK_FALSE(one.early_exit);

    // Capacity 5 per floor, three podium floors: 15 >= 13.
    const FloorStack three = calculate_optimal_floor_plan(ten, scheme({ax(0, 0, 12500, 0)}), mp);
    CHECK(three.floors.size() == 3);
    CHECK(three.floors[0].capacity == 5);
    CHECK(three.cumulative_capacity == 15);
    CHECK_FALSE(three.early_exit);

    MassingParams low = mp;
    low.floors_podium = 2;
    const FloorStack capped = calculate_optimal_floor_plan(ten, scheme({ax(0, 0, 12500, 0)}), low);
    CHECK(capped.floors.size() == 2);
    CHECK(capped.early_exit);

    CHECK(calculate_optimal_floor_plan(rooms({}), scheme({ax(0, 0, 12500, 0)}), mp).floors.size() <= 1);
    CHECK_THROWS_AS(calculate_optimal_floor_plan(ten, scheme({ax(0, 0, 2000, 0)}), mp), ZeroCapacity);

    // A crossing counts its corridor overlap once.
    const FloorStack cross = calculate_optimal_floor_plan(ten, scheme({ax(0, 0, 40000, 0), ax(20000, -20000, 20000, 20000)}), mp);
    const double c = 2.4, d = 12.4;
    const double contour = 2 * 40 * d - d * d;
    const double corridors = 2 * 40 * c - c * c;
    CHECK(cross.floors[0].usable_area == doctest::Approx(contour - corridors));
}

TEST_CASE("structural grid") {
    const PlanningConfig& cfg = default_config();
    FloorStack st = calculate_optimal_floor_plan(rooms({room("R", 1, 25)}), scheme({ax(0, 0, 30000, 0)}), cfg.massing);
    const std::vector<GridCell> cells = generate_structural_grid(st.floors[0], cfg.massing);
    CHECK(cells.size() == 12);
    CHECK(static_cast<double>(cells.size()) * 25 == doctest::Approx(st.floors[0].usable_area).epsilon(25.0 / 300));
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const auto key = [](const GridCell& g) { return std::make_tuple(g.axis, g.step, -g.side); };
        CHECK(key(cells[i - 1]) < key(cells[i]));
    }

    st = calculate_optimal_floor_plan(rooms({room("R", 1, 25)}), scheme({ax(0, 0, 30000, 0), ax(0, 0, 0, 30000)}), cfg.massing);
    const std::vector<GridCell> l = generate_structural_grid(st.floors[0], cfg.massing);
    std::set<std::pair<long long, long long>> centres;
    for (const GridCell& g : l) centres.insert({std::llround(g.cx), std::llround(g.cy)});
    CHECK(centres.size() == l.size());
    CHECK(l.size() < 24);

    // Adjacency along one side of a straight axis is a path.
    const auto adj = cell_adjacency(cells);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j : adj[i]) {
            const bool same_side = cells[i].side == cells[j].side && std::llabs(cells[i].step - cells[j].step) == 1;
            CHECK(same_side);
        }
    }
}

TEST_CASE("allocation examples") {
    const PlanningConfig& cfg = default_config();
    // 30 m axis: 6 cells per side, capacity 12. A and B fill floor 0 down to
    // one spare module, so C goes to floor 1.
    const FunctionalProgram p = rooms({room("A", 1, 150), room("B", 1, 125), room("C", 1, 50)});
    const FloorStack st = calculate_optimal_floor_plan(p, scheme({ax(0, 0, 30000, 0)}), cfg.massing);
    REQUIRE(st.floors.size() == 2);
    const Allocation a = allocate_rooms(p, st, cfg);
    REQUIRE(a.floors.size() == 2);
    CHECK(a.floors[0].allocated.size() == 2);
    CHECK(a.floors[0].used_modules() == 11);
    REQUIRE(a.floors[1].allocated.size() == 1);
    CHECK(a.floors[1].allocated[0].room.id == "Dept/C#1");
    CHECK(a.unallocated.empty());

    // Free capacity alone is not enough: each side of the corridor holds 5.
    const FunctionalProgram wide = rooms({room("W", 1, 150)});
    const Allocation w = allocate_rooms(wide, calculate_optimal_floor_plan(wide, scheme({ax(0, 0, 25000, 0)}), cfg.massing), cfg);
    CHECK(w.floors.empty());
    CHECK(w.unallocated.size() == 1);

    const FunctionalProgram small = rooms({room("A", 2, 20)});
    const Allocation b = allocate_rooms(small, calculate_optimal_floor_plan(small, scheme({ax(0, 0, 25000, 0)}), cfg.massing), cfg);
    CHECK(b.floors.size() == 1);
    CHECK(b.unallocated.empty());

    const FunctionalProgram huge = rooms({room("Big", 1, 1000), room("Small", 1, 25, "support")});
    const Allocation c = allocate_rooms(huge, calculate_optimal_floor_plan(huge, scheme({ax(0, 0, 25000, 0)}), cfg.massing), cfg);
    REQUIRE(c.unallocated.size() == 1);
    CHECK(c.unallocated[0].id == "Dept/Big#1");
    CHECK(c.floors.size() == 1);
}

TEST_CASE("allocation order") {
    const FunctionalProgram p = rooms({room("Store", 1, 30, "support"), room("Theatre", 2, 40, "critical"),
                                       room("Clean", 1, 60, "support"), room("Exam", 1, 10, "critical")});
    std::vector<std::string> ids;
    for (const RoomRef& r : allocation_order(p, default_config())) ids.push_back(r.id);
    CHECK(ids == std::vector<std::string>{"Dept/Theatre#1", "Dept/Theatre#2", "Dept/Exam#1", "Dept/Clean#1", "Dept/Store#1"});
}

TEST_CASE("conservation, contiguity and first-fit on real programs") {
    const PlanningConfig& cfg = default_config();
    fuzz::Rng rng(77);
    for (int i = 0; i < 8; ++i) {
        const dql::DqlRecord rec = fuzz::random_planning_record(rng);
        if (*rec.population->pop > 3e5) continue;
        const FunctionalProgram p = generate_program(rec, cfg);
        layout::SchemePair pair;
        try {
            pair = layout::generate_schemes(p, fuzz::random_site(rng), static_cast<std::uint64_t>(i), cfg);
        } catch (const layout::SiteTooSmall&) {
            continue;
        }
        const FloorStack st = calculate_optimal_floor_plan(p, pair.s1, cfg.massing);
        const Allocation a = allocate_rooms(p, st, cfg);

        std::multiset<std::string> seen;
        for (const FloorPlan& f : a.floors) {
            std::set<std::size_t> used;
            for (const RoomPlacement& pl : f.allocated) {
                seen.insert(pl.room.id);
                CHECK(static_cast<long long>(pl.cells.size()) == pl.room.modules);
                for (std::size_t c : pl.cells) CHECK(used.insert(c).second);
                // Cells of one room form a single component under the floor adjacency.
                std::vector<std::pair<int, int>> edges;
                const auto adj = cell_adjacency(f.cells);
                std::map<std::size_t, int> local;
                for (std::size_t c : pl.cells) local.emplace(c, static_cast<int>(local.size()));
                for (std::size_t c : pl.cells)
                    for (std::size_t t : adj[c])
                        if (local.count(t) && c < t) edges.emplace_back(local[c], local[t]);
                CHECK(oracle::component_count(static_cast<int>(local.size()), edges) == 1);
            }
            CHECK(f.used_modules() <= f.capacity);
        }
        for (const RoomRef& r : a.unallocated) seen.insert(r.id);
        std::multiset<std::string> expected;
        for (const RoomRef& r : allocation_order(p, cfg)) expected.insert(r.id);
        CHECK(seen == expected);

        // Replaying capacities alone, every room lands no earlier than first fit allows.
        std::vector<long long> remaining;
        for (const FloorPlan& f : st.floors) remaining.push_back(f.capacity);
        std::map<std::string, int> floor_of;
        for (const FloorPlan& f : a.floors)
            for (const RoomPlacement& pl : f.allocated) floor_of[pl.room.id] = f.index;
        for (const RoomRef& r : allocation_order(p, cfg)) {
            const auto it = floor_of.find(r.id);
            if (it == floor_of.end()) continue;
            const auto ff = oracle::first_fit(remaining, r.modules);
            REQUIRE(ff.has_value());
            CHECK(static_cast<int>(*ff) <= it->second);
            remaining[static_cast<std::size_t>(it->second)] -= r.modules;
        }
    }
}

TEST_CASE("scene export") {
    SceneModel empty;
    empty.metadata.scheme_id = "S1";
    CHECK(import_scene_json(export_scene(empty, "scene-json")) == empty);
    CHECK(export_scene(empty, "obj").find("\nv ") == std::string::npos);
    CHECK_THROWS_AS(export_scene(empty, "fbx"), UnsupportedFormat);

    SceneModel one = empty;
    one.modules.push_back({"Dept/R#1", "R", "Dept", 0, 1000, 2000, 0, 5000, 5000, 4000, 30});
    const std::string obj = export_scene(one, "obj");
    std::size_t v = 0, f = 0, pos = 0;
    while ((pos = obj.find('\n', pos)) != std::string::npos) {
        ++pos;
        if (obj.compare(pos, 2, "v ") == 0) ++v;
        if (obj.compare(pos, 2, "f ") == 0) ++f;
    }
    if (obj.rfind("v ", 0) == 0) ++v;
    CHECK(v == 8);
    CHECK(f == 12);

    const PlanningConfig& cfg = default_config();
    const FunctionalProgram p = generate_program(dql::parse_dql(fixture("case1.dql")), cfg);
    const layout::SchemePair pair = layout::generate_schemes(p, layout::parse_site_json(fixture("site_case1.json")), 7, cfg);
    const SceneModel s = build_scene(p, pair.s1, cfg, 7, config_hash(cfg));
    const std::string text = export_scene(s, "scene-json");
    CHECK(import_scene_json(text) == s);
    CHECK(export_scene(import_scene_json(text), "scene-json") == text);
    CHECK(export_scene(build_scene(p, pair.s1, cfg, 7, config_hash(cfg)), "scene-json") == text);
    CHECK(s.metadata.program_area == doctest::Approx(p.total_area()));
    for (const Module& m : s.modules) CHECK(m.z == m.floor * cfg.massing.floor_height);

    // Per room, module area covers the unit area and overshoots by less than one module.
    std::map<std::string, double> area;
    std::map<std::string, double> unit;
    for (const Module& m : s.modules) area[m.room_id] += m.w * m.d / 1e6;
    for (const FloorSummary& fl : s.floors) CHECK(fl.used_modules <= fl.capacity);
    for (const RoomRef& r : allocation_order(p, cfg)) unit[r.id] = r.unit_area;
    for (const auto& [id, a] : area) {
        CHECK(a >= unit[id] - 1e-6);
        CHECK(a < unit[id] + cfg.massing.module_area);
    }
}
