#pragma once

// Integer-grid polygon geometry.
//
// World coordinates are millimetres; grid coordinates are round(mm * S).
// Boolean operations are exact on the grid: edges are split at their mutual
// intersections, each resulting segment is classified by the winding numbers
// on its two sides, and the kept segments are traced into rings. Outer rings
// are counter-clockwise, holes clockwise.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "medbuild/axis.hpp"

namespace medbuild::geom {

class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateAxis : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPolygon : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |coordinate| bound. Keeps every intersection computation inside 128 bits.
inline constexpr std::int64_t kGridLimit = std::int64_t{1} << 40;

struct ScaleMap {
    std::int64_t s = 100;  // grid units per millimetre
};

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
};

struct GridPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;

    auto operator<=>(const GridPoint&) const = default;
};

struct GridPolygon {
    std::vector<GridPoint> ring;  // implicitly closed

    bool operator==(const GridPolygon&) const = default;
};

struct PolygonNode {
    GridPolygon outer;
    std::vector<GridPolygon> holes;
    std::vector<PolygonNode> children;  // islands inside this node's holes

    bool operator==(const PolygonNode&) const = default;
};

struct PolygonTree {
    std::vector<PolygonNode> roots;

    bool empty() const { return roots.empty(); }
    bool operator==(const PolygonTree&) const = default;
};

GridPoint to_grid(WorldPoint p, ScaleMap scale);
WorldPoint to_world(GridPoint g, ScaleMap scale);

/// Twice the signed area; positive for counter-clockwise rings.
__int128 signed_area2(const GridPolygon& polygon);

/// Throws InvalidPolygon unless the ring is simple with nonzero area.
void check_simple(const GridPolygon& polygon);

/// Rectangle of width 2*depth + corridor centred on the axis, spanning its length.
GridPolygon axis_rectangle(const Axis& axis, double depth_mm, double corridor_mm, ScaleMap scale);

PolygonTree unite(const std::vector<GridPolygon>& polygons);
PolygonTree difference(const GridPolygon& a, const GridPolygon& b);
PolygonTree intersection(const GridPolygon& a, const GridPolygon& b);

PolygonTree unite(const PolygonTree& a, const PolygonTree& b);
PolygonTree difference(const PolygonTree& a, const PolygonTree& b);
PolygonTree intersection(const PolygonTree& a, const PolygonTree& b);

PolygonTree floor_contour(const std::vector<Axis>& axes, double depth_mm, double corridor_mm, ScaleMap scale);

/// Every ring of the tree, outers counter-clockwise and holes clockwise.
std::vector<GridPolygon> rings(const PolygonTree& tree);

/// Twice the net area in grid units².
__int128 area2(const PolygonTree& tree);

/// Net area in m².
double area(const PolygonTree& tree, ScaleMap scale);

enum class Location { Outside, Boundary, Inside };

Location locate(GridPoint p, const PolygonTree& tree);
Location locate(GridPoint p, const GridPolygon& polygon);

/// Closed-set membership: boundary points count as inside.
bool point_in_tree(GridPoint p, const PolygonTree& tree);

/// Stable text form, used for hashing and byte-level comparisons.
std::string to_text(const PolygonTree& tree);

}  // namespace medbuild::geom
