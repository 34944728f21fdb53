#include <cmath>
#include <string>

#include "internal.hpp"

namespace medbuild {

double Axis::length() const {
    const double dx = static_cast<double>(end.x - start.x);
    const double dy = static_cast<double>(end.y - start.y);
    return std::hypot(dx, dy);
}

}  // namespace medbuild

namespace medbuild::geom {

using detail::cross;
using detail::i128;

namespace {

std::int64_t scaled(double v, std::int64_t s) {
    const double g = v * static_cast<double>(s);
    if (!std::isfinite(g) || std::fabs(g) > static_cast<double>(kGridLimit)) {
        throw OverflowError("coordinate " + std::to_string(v) + " exceeds the grid range at S=" + std::to_string(s));
    }
    return std::llround(g);
}

bool segments_touch(GridPoint a, GridPoint b, GridPoint c, GridPoint d) {
    const int d1 = detail::sign(cross(c, d, a));
    const int d2 = detail::sign(cross(c, d, b));
    const int d3 = detail::sign(cross(a, b, c));
    const int d4 = detail::sign(cross(a, b, d));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    return detail::on_segment(a, c, d) || detail::on_segment(b, c, d) || detail::on_segment(c, a, b) ||
           detail::on_segment(d, a, b);
}

}  // namespace

namespace detail {

bool on_segment(GridPoint p, GridPoint a, GridPoint b) {
    if (cross(a, b, p) != 0) return false;
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

std::vector<GridPoint> dedupe_ring(const std::vector<GridPoint>& ring) {
    std::vector<GridPoint> out;
    for (const GridPoint& p : ring) {
        if (out.empty() || out.back() != p) out.push_back(p);
    }
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    return out;
}

}  // namespace detail

GridPoint to_grid(WorldPoint p, ScaleMap scale) { return GridPoint{scaled(p.x, scale.s), scaled(p.y, scale.s)}; }

WorldPoint to_world(GridPoint g, ScaleMap scale) {
    const double s = static_cast<double>(scale.s);
    return WorldPoint{static_cast<double>(g.x) / s, static_cast<double>(g.y) / s};
}

i128 signed_area2(const GridPolygon& polygon) {
    i128 sum = 0;
    const auto& r = polygon.ring;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const GridPoint& a = r[i];
        const GridPoint& b = r[(i + 1) % r.size()];
        sum += static_cast<i128>(a.x) * b.y - static_cast<i128>(b.x) * a.y;
    }
    return sum;
}

void check_simple(const GridPolygon& polygon) {
    const std::vector<GridPoint> r = detail::dedupe_ring(polygon.ring);
    if (r.size() < 3) throw InvalidPolygon("polygon needs at least 3 distinct vertices");
    for (const GridPoint& p : r) {
        if (p.x > kGridLimit || p.x < -kGridLimit || p.y > kGridLimit || p.y < -kGridLimit) {
            throw InvalidPolygon("polygon vertex outside the grid range");
        }
    }
    if (signed_area2(GridPolygon{r}) == 0) throw InvalidPolygon("polygon has zero area");
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GridPoint a = r[i], b = r[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const GridPoint c = r[j], d = r[(j + 1) % n];
            const bool next = j == i + 1;
            const bool wrap = i == 0 && j == n - 1;
            if (next || wrap) {
                // Adjacent edges share exactly one vertex; anything more is a fold-back.
                const GridPoint far_ab = next ? a : b;
                const GridPoint far_cd = next ? d : c;
                if (detail::on_segment(far_ab, c, d) || detail::on_segment(far_cd, a, b)) {
                    throw InvalidPolygon("polygon folds back on itself");
                }
                continue;
            }
            if (segments_touch(a, b, c, d)) throw InvalidPolygon("polygon is self-intersecting");
        }
    }
}

GridPolygon axis_rectangle(const Axis& axis, double depth_mm, double corridor_mm, ScaleMap scale) {
    const double len = axis.length();
    if (!(len > 0.0)) throw DegenerateAxis("axis has zero length");
    if (!(depth_mm >= 0.0) || !(corridor_mm >= 0.0) || !(2.0 * depth_mm + corridor_mm > 0.0)) {
        throw DegenerateAxis("axis rectangle needs positive width");
    }
    const double half = depth_mm + corridor_mm / 2.0;
    const double ux = static_cast<double>(axis.end.x - axis.start.x) / len;
    const double uy = static_cast<double>(axis.end.y - axis.start.y) / len;
    const double nx = -uy * half;
    const double ny = ux * half;
    const double ax = static_cast<double>(axis.start.x), ay = static_cast<double>(axis.start.y);
    const double bx = static_cast<double>(axis.end.x), by = static_cast<double>(axis.end.y);
    GridPolygon rect{{to_grid({ax - nx, ay - ny}, scale), to_grid({bx - nx, by - ny}, scale),
                      to_grid({bx + nx, by + ny}, scale), to_grid({ax + nx, ay + ny}, scale)}};
    return rect;
}

PolygonTree floor_contour(const std::vector<Axis>& axes, double depth_mm, double corridor_mm, ScaleMap scale) {
    std::vector<GridPolygon> rects;
    rects.reserve(axes.size());
    for (const Axis& a : axes) rects.push_back(axis_rectangle(a, depth_mm, corridor_mm, scale));
    return unite(rects);
}

}  // namespace medbuild::geom
