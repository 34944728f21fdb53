#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "medbuild/geometry.hpp"
#include "medbuild/layout.hpp"

namespace medbuild {

std::string_view to_string(AxisType type) {
    switch (type) {
        case AxisType::Podium: return "podium";
        case AxisType::TowerMid: return "tower_mid";
        case AxisType::TowerHigh: return "tower_high";
    }
    return "podium";
}

std::optional<AxisType> axis_type_from_string(std::string_view name) {
    for (AxisType t : {AxisType::Podium, AxisType::TowerMid, AxisType::TowerHigh}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

}  // namespace medbuild

namespace medbuild::layout {

std::string_view to_string(Typology t) {
    switch (t) {
        case Typology::MainStreet: return "main_street_wings";
        case Typology::Courtyard: return "courtyard";
        case Typology::PodiumTower: return "podium_tower";
        case Typology::Organic: return "organic_aggregate";
        case Typology::Dispersed: return "dispersed_pavilions";
    }
    return "main_street_wings";
}

std::string_view to_string(BuildingMode m) { return m == BuildingMode::Shared ? "shared" : "independent"; }

namespace {

struct Vec {
    double x, y;
};

Vec vec(MmPoint p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

double cross(Vec a, Vec b) { return a.x * b.y - a.y * b.x; }

double point_segment_distance(Vec p, Vec a, Vec b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double segment_distance(const Axis& s, const Axis& t) {
    const Vec a = vec(s.start), b = vec(s.end), c = vec(t.start), d = vec(t.end);
    const double d1 = cross({d.x - c.x, d.y - c.y}, {a.x - c.x, a.y - c.y});
    const double d2 = cross({d.x - c.x, d.y - c.y}, {b.x - c.x, b.y - c.y});
    const double d3 = cross({b.x - a.x, b.y - a.y}, {c.x - a.x, c.y - a.y});
    const double d4 = cross({b.x - a.x, b.y - a.y}, {d.x - a.x, d.y - a.y});
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

// Closed containment with a small tolerance for points on the boundary.
bool inside_site(Vec p, const SitePolygon& site) {
    constexpr double kOnBoundary = 1e-6;  // mm
    const auto& v = site.vertices;
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Vec a = vec(v[j]), b = vec(v[i]);
        if (point_segment_distance(p, a, b) <= kOnBoundary) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

void check_site(const SitePolygon& site) {
    if (site.vertices.size() < 3) throw InvalidSite("site needs at least 3 vertices");
    geom::GridPolygon poly;
    for (const MmPoint& p : site.vertices) poly.ring.push_back(geom::GridPoint{p.x, p.y});
    try {
        geom::check_simple(poly);
    } catch (const geom::InvalidPolygon& e) {
        throw InvalidSite(std::string("site polygon: ") + e.what());
    }
}

double site_area_m2(const SitePolygon& site) {
    geom::GridPolygon poly;
    for (const MmPoint& p : site.vertices) poly.ring.push_back(geom::GridPoint{p.x, p.y});
    const double a2 = static_cast<double>(geom::signed_area2(poly));
    return std::fabs(a2) / 2.0 / 1e6;
}

std::vector<std::size_t> AxisGraph::degrees() const {
    std::vector<std::size_t> deg(nodes.size(), 0);
    for (const auto& [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

AxisGraph axis_graph(const std::vector<Axis>& axes, double snap_tolerance) {
    std::vector<MmPoint> ends;
    for (const Axis& a : axes) {
        ends.push_back(a.start);
        ends.push_back(a.end);
    }
    std::vector<std::size_t> parent(ends.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t i = 0; i < ends.size(); ++i) {
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
            const double d = std::hypot(static_cast<double>(ends[i].x - ends[j].x), static_cast<double>(ends[i].y - ends[j].y));
            if (d <= snap_tolerance) {
                const std::size_t ri = find_root(parent, i), rj = find_root(parent, j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }
    AxisGraph g;
    std::map<std::size_t, std::size_t> node_of_root;
    std::vector<std::size_t> node(ends.size());
    for (std::size_t i = 0; i < ends.size(); ++i) {
        const std::size_t r = find_root(parent, i);
        auto it = node_of_root.find(r);
        if (it == node_of_root.end()) {
            it = node_of_root.emplace(r, g.nodes.size()).first;
            g.nodes.push_back(ends[i]);
        }
        node[i] = it->second;
    }
    for (std::size_t k = 0; k < axes.size(); ++k) g.edges.emplace_back(node[2 * k], node[2 * k + 1]);

    std::vector<std::size_t> comp(g.nodes.size());
    std::iota(comp.begin(), comp.end(), std::size_t{0});
    std::size_t components = g.nodes.size();
    for (const auto& [u, v] : g.edges) {
        const std::size_t ru = find_root(comp, u), rv = find_root(comp, v);
        if (ru != rv) {
            comp[std::max(ru, rv)] = std::min(ru, rv);
            --components;
        }
    }
    g.components = components;
    return g;
}

std::vector<std::vector<std::size_t>> find_cycles(const AxisGraph& graph) {
    std::vector<std::size_t> parent(graph.nodes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> forest(graph.nodes.size());  // (neighbour, edge)
    std::vector<std::vector<std::size_t>> cycles;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [u, v] = graph.edges[e];
        const std::size_t ru = find_root(parent, u), rv = find_root(parent, v);
        if (ru != rv) {
            parent[std::max(ru, rv)] = std::min(ru, rv);
            forest[u].push_back({v, e});
            forest[v].push_back({u, e});
            continue;
        }
        // Closing edge: the forest path from u to v plus e.
        std::vector<std::size_t> cycle{e};
        if (u != v) {
            std::vector<std::optional<std::pair<std::size_t, std::size_t>>> prev(graph.nodes.size());
            std::vector<bool> seen(graph.nodes.size(), false);
            std::deque<std::size_t> queue{u};
            seen[u] = true;
            while (!queue.empty() && !seen[v]) {
                const std::size_t x = queue.front();
                queue.pop_front();
                for (const auto& [y, edge] : forest[x]) {
                    if (seen[y]) continue;
                    seen[y] = true;
                    prev[y] = std::make_pair(x, edge);
                    queue.push_back(y);
                }
            }
            for (std::size_t x = v; x != u; x = prev[x]->first) cycle.push_back(prev[x]->second);
        }
        std::sort(cycle.begin(), cycle.end());
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

BuildingMode building_mode_of(const std::vector<Axis>& axes, double snap_tolerance) {
    return axis_graph(axes, snap_tolerance).components <= 1 ? BuildingMode::Shared : BuildingMode::Independent;
}

std::vector<SchemeViolation> validate_scheme(const AxisScheme& scheme, const SitePolygon& site, const LayoutParams& params) {
    std::vector<SchemeViolation> out;
    const auto& axes = scheme.axes;

    for (std::size_t i = 0; i < axes.size(); ++i) {
        const Axis& a = axes[i];
        const double len = a.length();
        bool outside = false;
        const Vec s = vec(a.start), e = vec(a.end);
        const auto steps = static_cast<long long>(std::ceil(len / params.boundary_sample_step));
        for (long long k = 0; k <= steps && !outside; ++k) {
            const double t = steps == 0 ? 0.0 : std::min(1.0, static_cast<double>(k) / static_cast<double>(steps));
            outside = !inside_site({s.x + t * (e.x - s.x), s.y + t * (e.y - s.y)}, site);
        }
        if (outside) out.push_back({"boundary", {i}, "axis " + std::to_string(i) + " leaves the site"});
        if (len < params.min_axis_length) {
            out.push_back({"degenerate", {i}, "axis " + std::to_string(i) + " is shorter than the minimum length"});
        }
    }

    for (auto& cycle : find_cycles(axis_graph(axes, params.snap_tolerance))) {
        out.push_back({"cycle", cycle, "axes form a closed loop"});
    }

    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].type != AxisType::TowerHigh) continue;
        for (std::size_t j = i + 1; j < axes.size(); ++j) {
            if (axes[j].type != AxisType::TowerHigh) continue;
            const Vec u{static_cast<double>(axes[i].end.x - axes[i].start.x), static_cast<double>(axes[i].end.y - axes[i].start.y)};
            const Vec w{static_cast<double>(axes[j].end.x - axes[j].start.x), static_cast<double>(axes[j].end.y - axes[j].start.y)};
            const bool parallel = std::fabs(cross(u, w)) <= std::sin(M_PI / 180.0) * std::hypot(u.x, u.y) * std::hypot(w.x, w.y);
            if (parallel && segment_distance(axes[i], axes[j]) < params.tower_spacing) {
                out.push_back({"tower_spacing", {i, j}, "parallel towers " + std::to_string(i) + " and " + std::to_string(j) +
                                                            " are closer than the daylight spacing"});
            }
        }
    }
    return out;
}

double dominant_orientation(const std::vector<Axis>& axes) {
    std::map<int, double> weight;
    for (const Axis& a : axes) {
        double deg = std::atan2(static_cast<double>(a.end.y - a.start.y), static_cast<double>(a.end.x - a.start.x)) * 180.0 / M_PI;
        deg = std::fmod(deg + 360.0, 180.0);
        weight[static_cast<int>(std::lround(deg)) % 180] += a.length();
    }
    int best = 0;
    double best_w = -1.0;
    for (const auto& [deg, w] : weight) {
        if (w > best_w + 1e-9) {
            best = deg;
            best_w = w;
        }
    }
    return best;
}

bool schemes_distinct(const AxisScheme& a, const AxisScheme& b, const LayoutParams& params) {
    if (a.typology && b.typology && *a.typology != *b.typology) return true;
    const double d = std::fabs(dominant_orientation(a.axes) - dominant_orientation(b.axes));
    if (std::min(d, 180.0 - d) >= params.distinct_orientation_deg) return true;
    auto da = axis_graph(a.axes, params.snap_tolerance).degrees();
    auto db = axis_graph(b.axes, params.snap_tolerance).degrees();
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    return da != db;
}

long long required_modules(const FunctionalProgram& program, const MassingParams& params) {
    long long n = 0;
    for (const RoomSpec& r : program.rooms) {
        n += r.quantity * static_cast<long long>(std::ceil(r.unit_area / params.module_area - 1e-9));
    }
    return n;
}

}  // namespace medbuild::layout
