#pragma once

// Floor stacking, first-fit room allocation, structural grid and modular scene
// synthesis for one axis scheme.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medbuild/geometry.hpp"
#include "medbuild/layout.hpp"
#include "medbuild/planning_config.hpp"
#include "medbuild/program.hpp"

namespace medbuild::massing {

class ZeroCapacity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedFormat : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axes whose type's floor count exceeds `floor_index`.
std::vector<Axis> axes_for_floor(const std::vector<Axis>& axes, int floor_index, const MassingParams& params);

/// One room module slot: module_width along the axis by room_depth across it,
/// on one side of the corridor.
struct GridCell {
    std::size_t axis = 0;   // index into the floor's axes
    int side = 1;           // +1 left of the axis direction, -1 right
    long long step = 0;     // position along the axis, from the start point
    double cx = 0.0, cy = 0.0;   // footprint centre, mm
    double ox = 0.0, oy = 0.0;   // corner at local (0, 0), mm
    double angle_deg = 0.0;      // local u direction
    double width = 0.0, depth = 0.0;

    bool operator==(const GridCell&) const = default;
};

/// One instance of a program room.
struct RoomRef {
    std::string id;  // "department/room#n", n from 1
    std::string department;
    std::string name;
    std::string priority;
    double unit_area = 0.0;
    long long modules = 0;

    bool operator==(const RoomRef&) const = default;
};

struct RoomPlacement {
    RoomRef room;
    int floor_index = 0;
    std::vector<std::size_t> cells;  // indices into the floor's cells, edge-connected

    bool operator==(const RoomPlacement&) const = default;
};

struct FloorPlan {
    int index = 0;
    std::vector<Axis> axes;
    geom::PolygonTree contour;
    double usable_area = 0.0;  // m², contour minus corridors
    long long capacity = 0;    // floor(usable_area / module_area)
    std::vector<GridCell> cells;
    std::vector<RoomPlacement> allocated;

    long long used_modules() const;
};

struct FloorStack {
    std::vector<FloorPlan> floors;
    long long required_modules = 0;
    long long cumulative_capacity = 0;
    bool early_exit = false;  // stopped because a floor had no axes
};

/// Floor stacking: adds floors until cumulative capacity reaches
/// overprovision·required modules or a floor has no axes. Throws ZeroCapacity.
FloorStack calculate_optimal_floor_plan(const FunctionalProgram& program, const layout::AxisScheme& scheme,
                                        const MassingParams& params);

/// Cells along each axis on both sides of its corridor, keeping those whose
/// centre is inside the contour and outside every corridor and which do not
/// overlap an earlier cell. Ordered by axis, step, then side.
std::vector<GridCell> generate_structural_grid(const FloorPlan& floor, const MassingParams& params);

/// Cell pairs sharing an edge of positive length.
std::vector<std::vector<std::size_t>> cell_adjacency(const std::vector<GridCell>& cells);

/// Room instances in allocation order: priority rank, larger unit area, then id.
std::vector<RoomRef> allocation_order(const FunctionalProgram& program, const PlanningConfig& config);

struct Allocation {
    std::vector<FloorPlan> floors;  // empty floors removed; indices kept
    std::vector<RoomRef> unallocated;
};

/// Allocation and packing: each room goes to the lowest floor with enough remaining
/// capacity and a connected block of free cells, packed compactly.
Allocation allocate_rooms(const FunctionalProgram& program, FloorStack stack, const PlanningConfig& config);

struct FloorSummary {
    int index = 0;
    double z = 0.0;
    std::size_t axis_count = 0;
    double contour_area = 0.0;
    double usable_area = 0.0;
    long long capacity = 0;
    long long used_modules = 0;
    std::size_t cell_count = 0;

    bool operator==(const FloorSummary&) const = default;
};

struct Module {
    std::string room_id;
    std::string room;
    std::string department;
    int floor = 0;
    double x = 0.0, y = 0.0, z = 0.0;  // box origin, mm
    double w = 0.0, d = 0.0, h = 0.0;  // along axis, across, height
    double angle_deg = 0.0;            // rotation of the box about its origin

    bool operator==(const Module&) const = default;
};

struct SceneMetadata {
    std::string scheme_id;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string level;
    long long beds = 0;
    long long rooms = 0;
    double program_area = 0.0;  // m², net program
    double module_area = 0.0;   // m², Σ module footprints
    double estimated_cost = 0.0;
    long long required_modules = 0;
    bool stacking_early_exit = false;

    bool operator==(const SceneMetadata&) const = default;
};

struct SceneModel {
    int schema_version = 1;
    SceneMetadata metadata;
    std::vector<FloorSummary> floors;
    std::vector<Module> modules;
    std::vector<RoomRef> unallocated;

    bool operator==(const SceneModel&) const = default;
};

SceneModel synthesize_scene(const Allocation& allocation, const FloorStack& stack, const layout::AxisScheme& scheme,
                            const FunctionalProgram& program, const MassingParams& params, std::uint64_t seed,
                            const std::string& config_hash);

/// Stacking, allocation, packing and synthesis end to end for one scheme.
SceneModel build_scene(const FunctionalProgram& program, const layout::AxisScheme& scheme, const PlanningConfig& config,
                       std::uint64_t seed, const std::string& config_hash);

/// "scene-json" or "obj". Throws UnsupportedFormat.
std::string export_scene(const SceneModel& scene, std::string_view format);
SceneModel import_scene_json(std::string_view text);

}  // namespace medbuild::massing
