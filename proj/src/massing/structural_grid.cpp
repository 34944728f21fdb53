#include <algorithm>
#include <array>
#include <cmath>

#include "medbuild/massing.hpp"

namespace medbuild::massing {

namespace {

// Overlaps and shared edges are judged with this slack so rounding in the
// cell corners never creates or hides contact.
constexpr double kContactMm = 1.0;

struct P {
    double x, y;
};

std::array<P, 4> corners(const GridCell& c) {
    const double a = c.angle_deg * M_PI / 180.0;
    const P u{std::cos(a), std::sin(a)}, v{-std::sin(a), std::cos(a)};
    return {P{c.ox, c.oy}, P{c.ox + c.width * u.x, c.oy + c.width * u.y},
            P{c.ox + c.width * u.x + c.depth * v.x, c.oy + c.width * u.y + c.depth * v.y},
            P{c.ox + c.depth * v.x, c.oy + c.depth * v.y}};
}

struct Bounds {
    double x0, y0, x1, y1;
};

Bounds bounds(const std::array<P, 4>& q) {
    Bounds b{q[0].x, q[0].y, q[0].x, q[0].y};
    for (const P& p : q) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

bool boxes_near(const Bounds& a, const Bounds& b, double slack) {
    return a.x0 <= b.x1 + slack && b.x0 <= a.x1 + slack && a.y0 <= b.y1 + slack && b.y0 <= a.y1 + slack;
}

// Separating-axis test: true when the interiors overlap by more than kContactMm.
bool interiors_overlap(const std::array<P, 4>& a, const std::array<P, 4>& b) {
    for (const auto* q : {&a, &b}) {
        for (int i = 0; i < 2; ++i) {
            const P e{(*q)[i + 1].x - (*q)[i].x, (*q)[i + 1].y - (*q)[i].y};
            const double len = std::hypot(e.x, e.y);
            const P n{-e.y / len, e.x / len};
            double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
            for (const P& p : a) {
                const double d = p.x * n.x + p.y * n.y;
                amin = std::min(amin, d);
                amax = std::max(amax, d);
            }
            for (const P& p : b) {
                const double d = p.x * n.x + p.y * n.y;
                bmin = std::min(bmin, d);
                bmax = std::max(bmax, d);
            }
            if (std::min(amax, bmax) - std::max(amin, bmin) <= kContactMm) return false;
        }
    }
    return true;
}

bool share_edge(const std::array<P, 4>& a, const std::array<P, 4>& b) {
    for (int i = 0; i < 4; ++i) {
        const P p0 = a[i], p1 = a[(i + 1) % 4];
        const P d{p1.x - p0.x, p1.y - p0.y};
        const double len = std::hypot(d.x, d.y);
        const P u{d.x / len, d.y / len};
        for (int j = 0; j < 4; ++j) {
            const P q0 = b[j], q1 = b[(j + 1) % 4];
            const double off0 = (q0.x - p0.x) * -u.y + (q0.y - p0.y) * u.x;
            const double off1 = (q1.x - p0.x) * -u.y + (q1.y - p0.y) * u.x;
            if (std::fabs(off0) > kContactMm || std::fabs(off1) > kContactMm) continue;
            const double t0 = (q0.x - p0.x) * u.x + (q0.y - p0.y) * u.y;
            const double t1 = (q1.x - p0.x) * u.x + (q1.y - p0.y) * u.y;
            const double overlap = std::min(len, std::max(t0, t1)) - std::max(0.0, std::min(t0, t1));
            if (overlap > kContactMm) return true;
        }
    }
    return false;
}

}  // namespace

std::vector<GridCell> generate_structural_grid(const FloorPlan& floor, const MassingParams& params) {
    const geom::ScaleMap scale{params.grid_scale};
    std::vector<geom::GridPolygon> corridor_rects;
    for (const Axis& a : floor.axes) corridor_rects.push_back(geom::axis_rectangle(a, 0.0, params.corridor_width, scale));
    const geom::PolygonTree corridors = geom::unite(corridor_rects);

    const double width = params.module_width();
    const double depth = params.room_depth;
    const double half_corridor = params.corridor_width / 2.0;

    std::vector<GridCell> cells;
    std::vector<std::array<P, 4>> shapes;
    std::vector<Bounds> boxes;
    for (std::size_t ai = 0; ai < floor.axes.size(); ++ai) {
        const Axis& a = floor.axes[ai];
        const double len = a.length();
        const P u{static_cast<double>(a.end.x - a.start.x) / len, static_cast<double>(a.end.y - a.start.y) / len};
        const P n{-u.y, u.x};
        const double angle = std::atan2(u.y, u.x) * 180.0 / M_PI;
        const long long steps = static_cast<long long>(std::floor(len / width + 1e-9));
        for (long long k = 0; k < steps; ++k) {
            for (int side : {1, -1}) {
                GridCell c;
                c.axis = ai;
                c.side = side;
                c.step = k;
                c.width = width;
                c.depth = depth;
                c.angle_deg = angle;
                const double along = static_cast<double>(k) * width;
                const double off = side > 0 ? half_corridor : -(half_corridor + depth);
                c.ox = static_cast<double>(a.start.x) + along * u.x + off * n.x;
                c.oy = static_cast<double>(a.start.y) + along * u.y + off * n.y;
                const double mid = side * (half_corridor + depth / 2.0);
                c.cx = static_cast<double>(a.start.x) + (along + width / 2.0) * u.x + mid * n.x;
                c.cy = static_cast<double>(a.start.y) + (along + width / 2.0) * u.y + mid * n.y;

                const geom::GridPoint centre = geom::to_grid({c.cx, c.cy}, scale);
                if (!geom::point_in_tree(centre, floor.contour) || geom::point_in_tree(centre, corridors)) continue;
                const auto shape = corners(c);
                const Bounds box = bounds(shape);
                bool clash = false;
                for (std::size_t j = 0; j < cells.size() && !clash; ++j) {
                    clash = boxes_near(box, boxes[j], -kContactMm) && interiors_overlap(shape, shapes[j]);
                }
                if (clash) continue;
                cells.push_back(c);
                shapes.push_back(shape);
                boxes.push_back(box);
            }
        }
    }
    return cells;
}

std::vector<std::vector<std::size_t>> cell_adjacency(const std::vector<GridCell>& cells) {
    std::vector<std::array<P, 4>> shapes;
    std::vector<Bounds> boxes;
    for (const GridCell& c : cells) {
        shapes.push_back(corners(c));
        boxes.push_back(bounds(shapes.back()));
    }
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return boxes[a].x0 < boxes[b].x0; });
    std::vector<std::vector<std::size_t>> adj(cells.size());
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const std::size_t j = order[oj];
            if (boxes[j].x0 > boxes[i].x1 + kContactMm) break;
            if (boxes_near(boxes[i], boxes[j], kContactMm) && share_edge(shapes[i], shapes[j])) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

}  // namespace medbuild::massing
