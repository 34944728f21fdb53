#include <cmath>

#include "medbuild/massing.hpp"

namespace medbuild::massing {

namespace {

int floors_of(AxisType t, const MassingParams& p) {
    switch (t) {
        case AxisType::Podium: return p.floors_podium;
        case AxisType::TowerMid: return p.floors_tower_mid;
        case AxisType::TowerHigh: return p.floors_tower_high;
    }
    return p.floors_podium;
}

}  // namespace

std::vector<Axis> axes_for_floor(const std::vector<Axis>& axes, int floor_index, const MassingParams& params) {
    std::vector<Axis> out;
    for (const Axis& a : axes) {
        if (floors_of(a.type, params) > floor_index) out.push_back(a);
    }
    return out;
}

long long FloorPlan::used_modules() const {
    long long n = 0;
    for (const RoomPlacement& p : allocated) n += p.room.modules;
    return n;
}

FloorStack calculate_optimal_floor_plan(const FunctionalProgram& program, const layout::AxisScheme& scheme,
                                        const MassingParams& params) {
    const geom::ScaleMap scale{params.grid_scale};
    FloorStack stack;
    stack.required_modules = layout::required_modules(program, params);
    const double demand = static_cast<double>(stack.required_modules) * params.overprovision;
    for (int index = 0; static_cast<double>(stack.cumulative_capacity) < demand; ++index) {
        FloorPlan floor;
        floor.index = index;
        floor.axes = axes_for_floor(scheme.axes, index, params);
        if (floor.axes.empty()) {
            stack.early_exit = true;
            break;
        }
        floor.contour = geom::floor_contour(floor.axes, params.room_depth, params.corridor_width, scale);
        std::vector<geom::GridPolygon> corridors;
        for (const Axis& a : floor.axes) corridors.push_back(geom::axis_rectangle(a, 0.0, params.corridor_width, scale));
        // Corridors lie inside the contour, so their union is subtracted once.
        floor.usable_area = geom::area(floor.contour, scale) - geom::area(geom::unite(corridors), scale);
        floor.capacity = static_cast<long long>(std::floor(floor.usable_area / params.module_area + 1e-9));
        if (index == 0 && floor.capacity <= 0) {
            throw ZeroCapacity("ground floor has no room for a single module; axes are too short");
        }
        stack.cumulative_capacity += floor.capacity;
        stack.floors.push_back(std::move(floor));
    }
    return stack;
}

}  // namespace medbuild::massing
