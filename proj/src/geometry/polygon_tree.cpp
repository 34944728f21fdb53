#include <algorithm>
#include <optional>
#include <sstream>

#include "internal.hpp"

namespace medbuild::geom {

using detail::cross;
using detail::i128;

namespace {

// Location of a doubled-coordinate point relative to a ring given in
// ordinary coordinates.
Location locate2(GridPoint q2, const std::vector<GridPoint>& ring) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GridPoint a{2 * ring[i].x, 2 * ring[i].y};
        const GridPoint b{2 * ring[(i + 1) % n].x, 2 * ring[(i + 1) % n].y};
        if (detail::on_segment(q2, a, b)) return Location::Boundary;
        if ((a.y > q2.y) != (b.y > q2.y)) {
            // x of the edge at q2.y compared with q2.x, without division.
            const i128 c = cross(a, b, q2);
            if ((b.y > a.y) ? c > 0 : c < 0) inside = !inside;
        }
    }
    return inside ? Location::Inside : Location::Outside;
}

// A point of `inner` strictly off the boundary of `outer`; vertices first,
// then edge midpoints. Returns the doubled coordinates.
std::optional<Location> inside_of(const std::vector<GridPoint>& inner, const std::vector<GridPoint>& outer) {
    for (const GridPoint& p : inner) {
        const Location l = locate2(GridPoint{2 * p.x, 2 * p.y}, outer);
        if (l != Location::Boundary) return l;
    }
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const GridPoint& a = inner[i];
        const GridPoint& b = inner[(i + 1) % inner.size()];
        const Location l = locate2(GridPoint{a.x + b.x, a.y + b.y}, outer);
        if (l != Location::Boundary) return l;
    }
    return std::nullopt;
}

i128 abs128(i128 v) { return v < 0 ? -v : v; }

std::vector<GridPoint> rotate_to_lowest(std::vector<GridPoint> r) {
    const auto it = std::min_element(r.begin(), r.end(), detail::lower_left);
    std::rotate(r.begin(), it, r.end());
    return r;
}

bool ring_less(const GridPolygon& a, const GridPolygon& b) {
    return std::lexicographical_compare(a.ring.begin(), a.ring.end(), b.ring.begin(), b.ring.end(), detail::lower_left);
}

void sort_nodes(std::vector<PolygonNode>& nodes) {
    for (PolygonNode& n : nodes) {
        std::sort(n.holes.begin(), n.holes.end(), ring_less);
        sort_nodes(n.children);
    }
    std::sort(nodes.begin(), nodes.end(), [](const PolygonNode& a, const PolygonNode& b) { return ring_less(a.outer, b.outer); });
}

template <class F>
void for_each_ring(const std::vector<PolygonNode>& nodes, F&& f) {
    for (const PolygonNode& n : nodes) {
        f(n.outer);
        for (const GridPolygon& h : n.holes) f(h);
        for_each_ring(n.children, f);
    }
}

void write_ring(std::ostringstream& os, char tag, int depth, const GridPolygon& r) {
    os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << tag;
    for (const GridPoint& p : r.ring) os << ' ' << p.x << ',' << p.y;
    os << '\n';
}

void write_nodes(std::ostringstream& os, const std::vector<PolygonNode>& nodes, int depth) {
    for (const PolygonNode& n : nodes) {
        write_ring(os, 'O', depth, n.outer);
        for (const GridPolygon& h : n.holes) write_ring(os, 'H', depth, h);
        write_nodes(os, n.children, depth + 1);
    }
}

}  // namespace

namespace detail {

PolygonTree build_tree(std::vector<GridPolygon> input) {
    struct Item {
        GridPolygon ring;
        i128 area2;  // signed
        std::optional<std::size_t> parent;
    };
    std::vector<Item> items;
    for (GridPolygon& r : input) {
        r.ring = rotate_to_lowest(std::move(r.ring));
        const i128 a = signed_area2(r);
        items.push_back(Item{std::move(r), a, std::nullopt});
    }
    // Parent: the smallest ring of opposite orientation that contains this one.
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = 0; j < items.size(); ++j) {
            if (i == j || (items[i].area2 > 0) == (items[j].area2 > 0)) continue;
            if (abs128(items[j].area2) <= abs128(items[i].area2)) continue;
            const auto loc = inside_of(items[i].ring.ring, items[j].ring.ring);
            if (loc != Location::Inside) continue;
            if (!items[i].parent || abs128(items[j].area2) < abs128(items[*items[i].parent].area2)) items[i].parent = j;
        }
    }

    // Outer rings become nodes; holes attach to their parent outer; outers with
    // a parent hole become children of that hole's outer.
    std::vector<std::optional<std::size_t>> node_of(items.size());
    std::vector<PolygonNode> flat;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].area2 > 0) {
            node_of[i] = flat.size();
            flat.push_back(PolygonNode{items[i].ring, {}, {}});
        }
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].area2 < 0) {
            if (!items[i].parent) throw InvalidPolygon("hole without an enclosing outer ring");
            flat[*node_of[*items[i].parent]].holes.push_back(items[i].ring);
        }
    }
    // Children are attached deepest-first so each subtree is complete when moved.
    std::vector<std::size_t> outers;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].area2 > 0) outers.push_back(i);
    }
    const auto depth = [&](std::size_t i) {
        int d = 0;
        for (auto p = items[i].parent; p; p = items[*p].parent) ++d;
        return d;
    };
    std::stable_sort(outers.begin(), outers.end(), [&](std::size_t a, std::size_t b) { return depth(a) > depth(b); });
    PolygonTree tree;
    for (std::size_t i : outers) {
        PolygonNode node = std::move(flat[*node_of[i]]);
        if (items[i].parent) {
            const std::size_t hole = *items[i].parent;
            const std::size_t host = *items[hole].parent;
            flat[*node_of[host]].children.push_back(std::move(node));
        } else {
            tree.roots.push_back(std::move(node));
        }
    }
    sort_nodes(tree.roots);
    return tree;
}

}  // namespace detail

std::vector<GridPolygon> rings(const PolygonTree& tree) {
    std::vector<GridPolygon> out;
    for_each_ring(tree.roots, [&](const GridPolygon& r) { out.push_back(r); });
    return out;
}

i128 area2(const PolygonTree& tree) {
    i128 sum = 0;
    for_each_ring(tree.roots, [&](const GridPolygon& r) { sum += signed_area2(r); });
    return sum;
}

double area(const PolygonTree& tree, ScaleMap scale) {
    const double s = static_cast<double>(scale.s);
    return static_cast<double>(area2(tree)) / 2.0 / (s * s) / 1e6;
}

Location locate(GridPoint p, const GridPolygon& polygon) { return locate2(GridPoint{2 * p.x, 2 * p.y}, polygon.ring); }

Location locate(GridPoint p, const PolygonTree& tree) {
    int depth = 0;
    bool boundary = false;
    for_each_ring(tree.roots, [&](const GridPolygon& r) {
        const Location l = locate(p, r);
        if (l == Location::Boundary) boundary = true;
        if (l == Location::Inside) depth += signed_area2(r) > 0 ? 1 : -1;
    });
    if (boundary) return Location::Boundary;
    return depth > 0 ? Location::Inside : Location::Outside;
}

bool point_in_tree(GridPoint p, const PolygonTree& tree) { return locate(p, tree) != Location::Outside; }

std::string to_text(const PolygonTree& tree) {
    std::ostringstream os;
    write_nodes(os, tree.roots, 0);
    return os.str();
}

}  // namespace medbuild::geom
