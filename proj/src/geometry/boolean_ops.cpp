#include <algorithm>
#include <array>
#include <map>

#include "internal.hpp"

namespace medbuild::geom {

using detail::cross;
using detail::i128;
using detail::sign;

namespace {

enum class Op { Union, Intersection, Difference };

struct Edge {
    GridPoint a, b;
    int operand;  // 0 or 1
};

// Rounds n/d half away from zero.
i128 div_round(i128 n, i128 d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const i128 q = n / d;
    const i128 r = n % d;
    if (2 * (r < 0 ? -r : r) >= d) return n < 0 ? q - 1 : q + 1;
    return q;
}

bool boxes_overlap(const Edge& s, const Edge& t) {
    return std::max(std::min(s.a.x, s.b.x), std::min(t.a.x, t.b.x)) <= std::min(std::max(s.a.x, s.b.x), std::max(t.a.x, t.b.x)) &&
           std::max(std::min(s.a.y, s.b.y), std::min(t.a.y, t.b.y)) <= std::min(std::max(s.a.y, s.b.y), std::max(t.a.y, t.b.y));
}

bool strictly_inside(GridPoint p, GridPoint a, GridPoint b) { return p != a && p != b && detail::on_segment(p, a, b); }

// Splits edges at mutual intersections until no two edges cross or touch
// except at shared endpoints. Crossing points are rounded to the grid, which
// can create new contacts, hence the fixpoint loop.
std::vector<Edge> split_edges(std::vector<Edge> edges) {
    for (int pass = 0;; ++pass) {
        if (pass > 256) throw InvalidPolygon("edge arrangement did not converge");
        std::vector<std::vector<GridPoint>> cuts(edges.size());
        bool any = false;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const Edge& s = edges[i];
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                const Edge& t = edges[j];
                if (!boxes_overlap(s, t)) continue;
                const int d1 = sign(cross(t.a, t.b, s.a));
                const int d2 = sign(cross(t.a, t.b, s.b));
                const int d3 = sign(cross(s.a, s.b, t.a));
                const int d4 = sign(cross(s.a, s.b, t.b));
                if (d1 * d2 < 0 && d3 * d4 < 0) {
                    const i128 den = cross(GridPoint{0, 0}, GridPoint{s.b.x - s.a.x, s.b.y - s.a.y},
                                           GridPoint{t.b.x - t.a.x, t.b.y - t.a.y});
                    const i128 num = cross(GridPoint{0, 0}, GridPoint{t.a.x - s.a.x, t.a.y - s.a.y},
                                           GridPoint{t.b.x - t.a.x, t.b.y - t.a.y});
                    const GridPoint x{s.a.x + static_cast<std::int64_t>(div_round(num * (s.b.x - s.a.x), den)),
                                      s.a.y + static_cast<std::int64_t>(div_round(num * (s.b.y - s.a.y), den))};
                    if (x != s.a && x != s.b) cuts[i].push_back(x);
                    if (x != t.a && x != t.b) cuts[j].push_back(x);
                    continue;
                }
                if (strictly_inside(t.a, s.a, s.b)) cuts[i].push_back(t.a);
                if (strictly_inside(t.b, s.a, s.b)) cuts[i].push_back(t.b);
                if (strictly_inside(s.a, t.a, t.b)) cuts[j].push_back(s.a);
                if (strictly_inside(s.b, t.a, t.b)) cuts[j].push_back(s.b);
            }
        }
        for (const auto& c : cuts) any = any || !c.empty();
        if (!any) return edges;

        std::vector<Edge> next;
        next.reserve(edges.size() * 2);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const Edge& e = edges[i];
            std::vector<GridPoint>& c = cuts[i];
            const i128 dx = e.b.x - e.a.x, dy = e.b.y - e.a.y;
            const auto along = [&](GridPoint p) { return (p.x - e.a.x) * dx + (p.y - e.a.y) * dy; };
            std::sort(c.begin(), c.end(), [&](GridPoint p, GridPoint q) {
                const i128 ap = along(p), aq = along(q);
                return ap != aq ? ap < aq : p < q;
            });
            c.erase(std::unique(c.begin(), c.end()), c.end());
            GridPoint from = e.a;
            for (const GridPoint& p : c) {
                if (p != from) next.push_back(Edge{from, p, e.operand});
                from = p;
            }
            if (from != e.b) next.push_back(Edge{from, e.b, e.operand});
        }
        edges = std::move(next);
    }
}

struct Segment {
    GridPoint lo, hi;             // lo < hi in (x, y) order
    std::array<int, 2> w{0, 0};  // net traversals lo->hi per operand
};

bool member(Op op, const std::array<int, 2>& w) {
    const bool a = w[0] != 0, b = w[1] != 0;
    switch (op) {
        case Op::Union: return a || b;
        case Op::Intersection: return a && b;
        case Op::Difference: return a && !b;
    }
    return false;
}

// Winding numbers on both sides of each segment, then keep the segments that
// separate a member face from a non-member face, oriented interior-left.
std::vector<Edge> classify(Op op, const std::vector<Segment>& segs) {
    std::vector<Edge> kept;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& e = segs[i];
        const GridPoint q2{e.lo.x + e.hi.x, e.lo.y + e.hi.y};  // doubled midpoint
        std::array<int, 2> side{0, 0};
        const bool vertical = e.lo.x == e.hi.x;
        for (std::size_t j = 0; j < segs.size(); ++j) {
            if (j == i) continue;
            const Segment& f = segs[j];
            const GridPoint lo2{2 * f.lo.x, 2 * f.lo.y};
            if (!vertical) {
                // Downward ray at x = mid.x + eps; counts edges below.
                if (!(lo2.x <= q2.x && q2.x < 2 * f.hi.x)) continue;
                if (cross(lo2, GridPoint{2 * f.hi.x, 2 * f.hi.y}, q2) > 0) {
                    side[0] += f.w[0];
                    side[1] += f.w[1];
                }
            } else {
                // Leftward ray at y = mid.y + eps; counts edges to the left.
                const GridPoint ylo = f.lo.y <= f.hi.y ? f.lo : f.hi;
                const GridPoint yhi = f.lo.y <= f.hi.y ? f.hi : f.lo;
                if (!(2 * ylo.y <= q2.y && q2.y < 2 * yhi.y)) continue;
                if (cross(GridPoint{2 * ylo.x, 2 * ylo.y}, GridPoint{2 * yhi.x, 2 * yhi.y}, q2) < 0) {
                    const int s = f.hi.y > f.lo.y ? -1 : 1;
                    side[0] += s * f.w[0];
                    side[1] += s * f.w[1];
                }
            }
        }
        // `side` is below (non-vertical) or left (vertical) of e.
        std::array<int, 2> other = side;
        if (!vertical) {
            other[0] += e.w[0];
            other[1] += e.w[1];
            const bool above = member(op, other), below = member(op, side);
            if (above == below) continue;
            kept.push_back(above ? Edge{e.lo, e.hi, 0} : Edge{e.hi, e.lo, 0});
        } else {
            other[0] -= e.w[0];
            other[1] -= e.w[1];
            const bool left = member(op, side), right = member(op, other);
            if (left == right) continue;
            kept.push_back(left ? Edge{e.lo, e.hi, 0} : Edge{e.hi, e.lo, 0});
        }
    }
    return kept;
}

// Counter-clockwise angle order starting just after `ref`.
bool ccw_before(GridPoint ref, GridPoint d1, GridPoint d2) {
    const GridPoint o{0, 0};
    const auto half = [&](GridPoint d) {
        const i128 c = cross(o, ref, d);
        const i128 dot = static_cast<i128>(ref.x) * d.x + static_cast<i128>(ref.y) * d.y;
        return (c > 0 || (c == 0 && dot > 0)) ? 0 : 1;
    };
    const int h1 = half(d1), h2 = half(d2);
    if (h1 != h2) return h1 < h2;
    return cross(o, d1, d2) > 0;
}

std::vector<std::vector<GridPoint>> trace(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& p, const Edge& q) {
        return p.a != q.a ? p.a < q.a : p.b < q.b;
    });
    std::map<GridPoint, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < edges.size(); ++i) out[edges[i].a].push_back(i);

    std::vector<char> used(edges.size(), 0);
    std::vector<std::vector<GridPoint>> result;
    for (std::size_t start = 0; start < edges.size(); ++start) {
        if (used[start]) continue;
        std::vector<GridPoint> ring;
        std::size_t cur = start;
        while (!used[cur]) {
            used[cur] = 1;
            ring.push_back(edges[cur].a);
            const GridPoint v = edges[cur].b;
            const GridPoint back{edges[cur].a.x - v.x, edges[cur].a.y - v.y};
            const auto it = out.find(v);
            if (it == out.end()) throw InvalidPolygon("open boundary in Boolean result");
            // Tightest left turn: the first outgoing edge clockwise from `back`,
            // i.e. the last one counter-clockwise.
            std::size_t best = it->second.front();
            for (std::size_t k : it->second) {
                const GridPoint dk{edges[k].b.x - v.x, edges[k].b.y - v.y};
                const GridPoint db{edges[best].b.x - v.x, edges[best].b.y - v.y};
                if (ccw_before(back, db, dk)) best = k;
            }
            cur = best;
        }
        if (cur != start) throw InvalidPolygon("inconsistent boundary in Boolean result");
        result.push_back(std::move(ring));
    }
    return result;
}

// Splits a closed walk at repeated vertices into simple loops.
void split_loops(const std::vector<GridPoint>& walk, std::vector<std::vector<GridPoint>>& out) {
    std::vector<GridPoint> stack;
    std::map<GridPoint, std::size_t> pos;
    for (const GridPoint& p : walk) {
        const auto it = pos.find(p);
        if (it != pos.end()) {
            std::vector<GridPoint> loop(stack.begin() + static_cast<std::ptrdiff_t>(it->second), stack.end());
            for (std::size_t k = it->second + 1; k < stack.size(); ++k) pos.erase(stack[k]);
            stack.resize(it->second + 1);
            if (loop.size() >= 3) out.push_back(std::move(loop));
            continue;
        }
        pos[p] = stack.size();
        stack.push_back(p);
    }
    if (stack.size() >= 3) out.push_back(std::move(stack));
}

std::vector<GridPoint> drop_collinear(std::vector<GridPoint> r) {
    bool changed = true;
    while (changed && r.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < r.size() && r.size() >= 3; ++i) {
            const GridPoint& prev = r[(i + r.size() - 1) % r.size()];
            const GridPoint& next = r[(i + 1) % r.size()];
            if (cross(prev, r[i], next) == 0) {
                r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return r;
}

void add_ring(std::vector<Edge>& edges, const std::vector<GridPoint>& ring, int operand) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const GridPoint a = ring[i], b = ring[(i + 1) % ring.size()];
        if (a != b) edges.push_back(Edge{a, b, operand});
    }
}

std::vector<GridPoint> prepared(const GridPolygon& p) {
    check_simple(p);
    std::vector<GridPoint> r = detail::dedupe_ring(p.ring);
    if (signed_area2(GridPolygon{r}) < 0) std::reverse(r.begin(), r.end());
    return r;
}

PolygonTree run(Op op, std::vector<Edge> input) {
    std::vector<Edge> edges = split_edges(std::move(input));

    std::map<std::pair<GridPoint, GridPoint>, std::array<int, 2>> merged;
    for (const Edge& e : edges) {
        const bool fwd = e.a < e.b;
        auto& w = merged[fwd ? std::make_pair(e.a, e.b) : std::make_pair(e.b, e.a)];
        w[static_cast<std::size_t>(e.operand)] += fwd ? 1 : -1;
    }
    std::vector<Segment> segs;
    for (const auto& [key, w] : merged) {
        if (w[0] != 0 || w[1] != 0) segs.push_back(Segment{key.first, key.second, w});
    }

    std::vector<std::vector<GridPoint>> loops;
    for (const auto& walk : trace(classify(op, segs))) split_loops(walk, loops);

    std::vector<GridPolygon> rings;
    for (auto& loop : loops) {
        std::vector<GridPoint> r = drop_collinear(std::move(loop));
        if (r.size() >= 3 && signed_area2(GridPolygon{r}) != 0) rings.push_back(GridPolygon{std::move(r)});
    }
    return detail::build_tree(std::move(rings));
}

PolygonTree run_polygons(Op op, const GridPolygon& a, const GridPolygon& b) {
    std::vector<Edge> edges;
    add_ring(edges, prepared(a), 0);
    add_ring(edges, prepared(b), 1);
    return run(op, std::move(edges));
}

PolygonTree run_trees(Op op, const PolygonTree& a, const PolygonTree& b) {
    std::vector<Edge> edges;
    for (const GridPolygon& r : rings(a)) add_ring(edges, r.ring, 0);
    for (const GridPolygon& r : rings(b)) add_ring(edges, r.ring, 1);
    return run(op, std::move(edges));
}

}  // namespace

PolygonTree unite(const std::vector<GridPolygon>& polygons) {
    std::vector<Edge> edges;
    for (const GridPolygon& p : polygons) add_ring(edges, prepared(p), 0);
    return run(Op::Union, std::move(edges));
}

PolygonTree difference(const GridPolygon& a, const GridPolygon& b) { return run_polygons(Op::Difference, a, b); }
PolygonTree intersection(const GridPolygon& a, const GridPolygon& b) { return run_polygons(Op::Intersection, a, b); }

PolygonTree unite(const PolygonTree& a, const PolygonTree& b) { return run_trees(Op::Union, a, b); }
PolygonTree difference(const PolygonTree& a, const PolygonTree& b) { return run_trees(Op::Difference, a, b); }
PolygonTree intersection(const PolygonTree& a, const PolygonTree& b) { return run_trees(Op::Intersection, a, b); }

}  // namespace medbuild::geom
