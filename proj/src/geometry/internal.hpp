#pragma once

#include <vector>

#include "medbuild/geometry.hpp"

namespace medbuild::geom::detail {

using i128 = __int128;

inline i128 cross(GridPoint o, GridPoint a, GridPoint b) {
    return static_cast<i128>(a.x - o.x) * (b.y - o.y) - static_cast<i128>(a.y - o.y) * (b.x - o.x);
}

inline int sign(i128 v) { return (v > 0) - (v < 0); }

/// Orders points bottom-to-top, then left-to-right.
inline bool lower_left(GridPoint a, GridPoint b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

/// True when p lies on the closed segment ab (collinear and inside the bounding box).
bool on_segment(GridPoint p, GridPoint a, GridPoint b);

/// Drops repeated consecutive vertices and a repeated closing vertex.
std::vector<GridPoint> dedupe_ring(const std::vector<GridPoint>& ring);

/// Assembles oriented rings (outer CCW, hole CW) into a canonical tree.
PolygonTree build_tree(std::vector<GridPolygon> rings);

}  // namespace medbuild::geom::detail
