// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Every check compares the engine against a reference written here or in
// tests/support, never against the engine's own helpers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <sys/wait.h>

#include "files.hpp"
#include "fuzz.hpp"
#include "httplib.h"
#include "json.hpp"
#include "medbuild/geometry.hpp"
#include "medbuild/platform.hpp"
#include "oracles.hpp"

using namespace medbuild;
using json = nlohmann::ordered_json;

namespace {

// Collects the first few failure messages of one criterion.
struct Check {
    std::vector<std::string> failures;
    long long count = 0;

    void operator()(bool ok, const std::string& what) {
        ++count;
        if (!ok && failures.size() < 8) failures.push_back(what);
        else if (!ok) failures.back() = "... and more";
    }
};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

// ---- 1. DQL fidelity ----------------------------------------------------

void dql_fidelity(Check& check) {
    const dql::DqlRecord r = dql::parse_dql(fixture("case1.dql"));
    check(r.population && r.population->pop == 50000.0, "pop");
    check(r.population && r.population->gender == 1.01, "gender");
    const std::vector<std::tuple<char, double, double>> want{{'H', 80, 0.6}, {'D', 120, 0.1}, {'V', 80, 0.25}};
    std::vector<std::tuple<char, double, double>> got;
    if (r.health && r.health->diseases) {
        for (const auto& d : *r.health->diseases) got.emplace_back(d.code, d.incidence, d.resource_factor);
    }
    check(got == want, "disease list");
    check(r.economy && r.economy->budget == 5.0, "budget");
    check(r.geoclimate && r.geoclimate->temp == 27.0, "temp");
    check(r.geoclimate && r.geoclimate->rain == 800.0, "rain");

    fuzz::Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const dql::DqlRecord rec = fuzz::random_record(rng);
        const std::string s1 = dql::serialize_dql(rec);
        const dql::DqlRecord back = dql::parse_dql(s1);
        check(back == rec, "parse(serialize(r)) == r for record " + std::to_string(i));
        check(dql::serialize_dql(back) == s1, "serialize fixpoint for record " + std::to_string(i));
    }
}

// ---- 2. formula oracles ---------------------------------------------------

SurgicalParams surgical(double hours, double days, double util) {
    SurgicalParams p;
    p.daily_op_hours = hours;
    p.annual_op_days = days;
    p.or_utilization = util;
    return p;
}

void formula_oracles(Check& check) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> pop(1, 1e7), growth(-10, 15);
    std::uniform_int_distribution<int> years(0, 50);
    for (int i = 0; i < 1000; ++i) {
        const double p = pop(rng), g = growth(rng), y = years(rng);
        const double got = project_population(p, g, y), want = oracle::projected_population(p, g, y);
        check(std::fabs(got - want) <= 1e-9 * std::fabs(want), "project_population(" + fmt(p) + ", " + fmt(g) + ", " + fmt(y) + ")");
    }

    struct Case {
        double hours, days, util;
        std::vector<SpecialtyLoad> loads;
        double existing;
        long long want;
    };
    const std::vector<SpecialtyLoad> mix{{50, 20, 2}, {30, 15, 4}, {10, 5, 6}};
    const std::vector<Case> cases{
        {8, 250, .75, {{60, 40, 2}}, 0, 4},     {8, 250, .75, {{60, 40, 2}}, 1, 3},
        {8, 250, .75, {}, 2, 0},                {8, 250, .75, {{0, 40, 2}}, 0, 0},
        {8, 250, .75, {{60, 40, 2}}, 10, 0},    {8, 250, .75, {{75, 40, 1}}, 0, 2},
        {8, 250, .75, {{75, 40, 1}}, 2, 0},     {10, 300, 1, {{100, 50, 1.5}}, 0, 3},
        {10, 300, 1, {{100, 50, 1.5}, {20, 100, 3}}, 0, 5},
        {12, 365, .8, {{200, 30, 2.5}}, 0, 5},  {12, 365, .8, {{200, 30, 2.5}}, 3, 2},
        {8, 250, .5, {{10, 10, 1}}, 0, 1},      {8, 250, .5, {{10, 10, 1}}, 1, 0},
        {6, 200, .9, mix, 0, 4},                {6, 200, .9, mix, 5, 0},
        {24, 365, 1, {{1000, 60, 3}}, 0, 21},   {24, 365, 1, {{1000, 60, 3}}, 20, 1},
        {8, 250, .75, {{150, 40, 2}}, 0, 8},    {8, 250, .75, {{150, 40, 2}}, 8, 0},
        {8, 250, .75, {{151, 40, 2}}, 0, 9},
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Case& c = cases[i];
        const long long got = required_operating_rooms(c.loads, c.existing, surgical(c.hours, c.days, c.util));
        check(got == c.want, "operating rooms case " + std::to_string(i + 1) + ": got " + std::to_string(got) + ", want " +
                                 std::to_string(c.want));
    }
}

// ---- 3. calibration -----------------------------------------------------

void calibration(Check& check) {
    const json doc = json::parse(fixture("calibration.json"));
    const double bed_tol = doc["tolerance"]["beds"], area_tol = doc["tolerance"]["area"];
    for (const json& c : doc["cases"]) {
        const std::string name = c["name"];
        const FunctionalProgram p = generate_program(dql::parse_dql(fixture(c["dql"])), default_config());
        const double beds = static_cast<double>(p.beds.target_total), area = p.total_area();
        const double want_beds = c["beds"], want_area = c["area_m2"], budget = c["budget_musd"];
        check(p.level_label() == c["level"].get<std::string>(), name + ": level " + p.level_label());
        check(std::fabs(beds - want_beds) <= bed_tol * want_beds, name + ": beds " + fmt(beds));
        check(std::fabs(area - want_area) <= area_tol * want_area, name + ": area " + fmt(area));
        check(p.cost.estimated <= budget * 1e6, name + ": cost " + fmt(p.cost.estimated));
    }
}

// ---- 4. budget safety ---------------------------------------------------

// Cost recomputed from the config tables: Σ area · base · material · labor · gross.
double oracle_cost(const std::vector<RoomSpec>& rooms, const dql::DqlRecord& merged, const PlanningConfig& cfg) {
    double area = 0;
    for (const RoomSpec& r : rooms) area += static_cast<double>(r.quantity) * r.unit_area;
    if (rooms.empty()) return 0;
    const auto& mats = cfg.cost.material_multipliers;
    const std::string mat = merged.geoclimate && merged.geoclimate->mat ? *merged.geoclimate->mat : "default";
    const double material = mats.count(mat) ? mats.at(mat) : mats.at("default");
    const double gdp = merged.economy->gdp.value();
    double labor = 0;
    std::optional<double> best_bound;
    for (const GdpBand& b : cfg.cost.labor_bands) {
        if (b.upto_gdp && gdp <= *b.upto_gdp && (!best_bound || *b.upto_gdp < *best_bound)) {
            best_bound = b.upto_gdp;
            labor = b.multiplier;
        }
    }
    if (!best_bound) {
        for (const GdpBand& b : cfg.cost.labor_bands) {
            if (!b.upto_gdp) labor = b.multiplier;
        }
    }
    return area * cfg.cost.base_rate * material * labor * cfg.cost.gross_up;
}

void budget_safety(Check& check) {
    const PlanningConfig& cfg = default_config();
    fuzz::Rng rng(4);
    int trimmed = 0, infeasible = 0;
    for (int i = 0; i < 200; ++i) {
        const dql::DqlRecord rec = fuzz::random_planning_record(rng);
        const std::string tag = "record " + std::to_string(i);
        const FunctionalProgram p = generate_program(rec, cfg);
        const dql::DqlRecord merged = merge_defaults(rec, cfg);
        const double budget = *rec.economy->budget * 1e6;
        const double cost = oracle_cost(p.rooms, merged, cfg);
        check(std::fabs(cost - p.cost.estimated) <= 1e-9 * std::max(1.0, cost), tag + ": cost recomputes");
        if (p.cost.feasible) check(cost <= budget, tag + ": feasible but " + fmt(cost) + " > " + fmt(budget));
        else ++infeasible;
        if (!p.trim_log.empty()) ++trimmed;

        // Replay the ledger from the untrimmed program.
        std::vector<RoomSpec> rooms = compile_departments(p.level, p.flags, merged, p.beds, cfg).rooms;
        const std::vector<RoomSpec> untrimmed = rooms;
        double running = oracle_cost(rooms, merged, cfg);
        bool replay_ok = true;
        for (const TrimAction& a : p.trim_log) {
            auto it = std::find_if(rooms.begin(), rooms.end(), [&](const RoomSpec& r) { return r.department + "/" + r.name == a.target; });
            if (it == rooms.end()) {
                replay_ok = false;
                break;
            }
            check(!cfg.is_protected(it->priority), tag + ": trimmed protected room " + a.target);
            if (a.kind == TrimKind::Quantity) {
                replay_ok = replay_ok && static_cast<double>(it->quantity) == a.before;
                it->quantity = static_cast<long long>(a.after);
            } else {
                replay_ok = replay_ok && it->unit_area == a.before;
                it->unit_area = a.after;
            }
            const double next = oracle_cost(rooms, merged, cfg);
            check(next < running, tag + ": trim of " + a.target + " did not reduce cost");
            check(std::fabs((running - next) - a.saved) <= 1e-6 * std::max(1.0, running), tag + ": saved amount of " + a.target);
            running = next;
        }
        check(replay_ok && rooms == p.rooms, tag + ": ledger replay reproduces the final rooms");
        for (std::size_t k = 0; k < untrimmed.size(); ++k) {
            if (cfg.is_protected(untrimmed[k].priority)) {
                check(k < p.rooms.size() && p.rooms[k] == untrimmed[k], tag + ": protected room changed " + untrimmed[k].name);
            }
        }
    }
    check(trimmed > 10, "too few trimmed programs to be meaningful: " + std::to_string(trimmed));
    std::printf("  budget: %d of 200 trimmed, %d infeasible after trimming\n", trimmed, infeasible);
}

// ---- 5. geometry --------------------------------------------------------

std::vector<oracle::Rect> random_rects(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> pos(0, 63);
    std::vector<oracle::Rect> out;
    for (int i = 0; i < n; ++i) {
        int x0 = pos(rng), x1 = pos(rng), y0 = pos(rng), y1 = pos(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        out.push_back({x0, y0, x1 + 1, y1 + 1});
    }
    return out;
}

// Cell centres of the 64×64 window sit on odd grid points after doubling.
geom::PolygonTree as_tree(const std::vector<oracle::Rect>& rs) {
    std::vector<geom::GridPolygon> polys;
    for (const auto& r : rs) {
        polys.push_back(geom::GridPolygon{{{2 * r.x0, 2 * r.y0}, {2 * r.x1, 2 * r.y0}, {2 * r.x1, 2 * r.y1}, {2 * r.x0, 2 * r.y1}}});
    }
    return geom::unite(polys);
}

std::string geometry_run(Check& check) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(1, 6);
    std::string digest;
    for (int t = 0; t < 500; ++t) {
        const auto ra = random_rects(rng, count(rng)), rb = random_rects(rng, count(rng));
        const geom::PolygonTree a = as_tree(ra), b = as_tree(rb);
        const geom::PolygonTree u = geom::unite(a, b), in = geom::intersection(a, b), d = geom::difference(a, b);
        const auto ca = oracle::raster(ra, 64, 64), cb = oracle::raster(rb, 64, 64);
        long long nu = 0, ni = 0, nd = 0;
        bool agree = true;
        for (int j = 0; j < 64; ++j) {
            for (int k = 0; k < 64; ++k) {
                const bool ia = ca[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                const bool ib = cb[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                const geom::GridPoint c{2 * k + 1, 2 * j + 1};
                agree = agree && geom::point_in_tree(c, u) == (ia || ib) && geom::point_in_tree(c, in) == (ia && ib) &&
                        geom::point_in_tree(c, d) == (ia && !ib);
                nu += ia || ib;
                ni += ia && ib;
                nd += ia && !ib;
            }
        }
        const std::string tag = "configuration " + std::to_string(t);
        check(agree, tag + ": membership differs from the raster");
        check(geom::area2(u) == static_cast<__int128>(8 * nu), tag + ": union area");
        check(geom::area2(in) == static_cast<__int128>(8 * ni), tag + ": intersection area");
        check(geom::area2(d) == static_cast<__int128>(8 * nd), tag + ": difference area");
        check(geom::area2(u) + geom::area2(in) == geom::area2(a) + geom::area2(b), tag + ": inclusion-exclusion");
        check(geom::area2(d) + geom::area2(in) == geom::area2(a), tag + ": difference plus intersection");
        check(geom::to_text(geom::unite(b, a)) == geom::to_text(u), tag + ": union is symmetric byte-for-byte");
        digest += geom::to_text(u) + geom::to_text(in) + geom::to_text(d);
    }
    return digest;
}

void geometry(Check& check) {
    const std::string first = geometry_run(check);
    Check again;
    check(geometry_run(again) == first, "second run produced different bytes");
}

// ---- 6. layout ------------------------------------------------------------

struct Site {
    std::string name;
    layout::SitePolygon polygon;
    FunctionalProgram program;
};

bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
    const double cr = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    if (std::fabs(cr) > 1e-6 * std::hypot(bx - ax, by - ay)) return false;
    return std::min(ax, bx) - 1e-6 <= px && px <= std::max(ax, bx) + 1e-6 && std::min(ay, by) - 1e-6 <= py &&
           py <= std::max(ay, by) + 1e-6;
}

// Closed point-in-polygon by ray crossing.
bool inside_site(double x, double y, const layout::SitePolygon& s) {
    const auto& v = s.vertices;
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const double xi = static_cast<double>(v[i].x), yi = static_cast<double>(v[i].y);
        const double xj = static_cast<double>(v[j].x), yj = static_cast<double>(v[j].y);
        if (on_segment(x, y, xi, yi, xj, yj)) return true;
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
    }
    return in;
}

int orient(const MmPoint& a, const MmPoint& b, const MmPoint& c) {
    const __int128 v = static_cast<__int128>(b.x - a.x) * (c.y - a.y) - static_cast<__int128>(b.y - a.y) * (c.x - a.x);
    return v > 0 ? 1 : v < 0 ? -1 : 0;
}

bool axis_inside(const Axis& a, const layout::SitePolygon& s) {
    const auto& v = s.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const MmPoint &p = v[i], &q = v[(i + 1) % v.size()];
        const int o1 = orient(a.start, a.end, p), o2 = orient(a.start, a.end, q);
        const int o3 = orient(p, q, a.start), o4 = orient(p, q, a.end);
        if (o1 * o2 < 0 && o3 * o4 < 0) return false;  // proper crossing
    }
    const double len = a.length();
    const int steps = std::max(1, static_cast<int>(len / 100.0));
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const double x = static_cast<double>(a.start.x) + t * static_cast<double>(a.end.x - a.start.x);
        const double y = static_cast<double>(a.start.y) + t * static_cast<double>(a.end.y - a.start.y);
        if (!inside_site(x, y, s)) return false;
    }
    return true;
}

// Endpoint graph: endpoints closer than `tol` (transitively) are one node.
std::pair<int, std::vector<std::pair<int, int>>> endpoint_graph(const std::vector<Axis>& axes, double tol) {
    std::vector<MmPoint> pts;
    for (const Axis& a : axes) {
        pts.push_back(a.start);
        pts.push_back(a.end);
    }
    std::vector<int> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]); };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (std::hypot(static_cast<double>(pts[i].x - pts[j].x), static_cast<double>(pts[i].y - pts[j].y)) <= tol) {
                parent[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
            }
        }
    }
    std::map<int, int> id;
    for (std::size_t i = 0; i < pts.size(); ++i) id.emplace(find(static_cast<int>(i)), static_cast<int>(id.size()));
    std::vector<std::pair<int, int>> edges;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        edges.emplace_back(id[find(static_cast<int>(2 * k))], id[find(static_cast<int>(2 * k + 1))]);
    }
    return {static_cast<int>(id.size()), edges};
}

double orientation(const std::vector<Axis>& axes) {
    std::map<int, double> w;
    for (const Axis& a : axes) {
        double deg = std::atan2(static_cast<double>(a.end.y - a.start.y), static_cast<double>(a.end.x - a.start.x)) * 180.0 / M_PI;
        if (deg < 0) deg += 180.0;
        if (deg >= 180.0) deg -= 180.0;
        w[static_cast<int>(std::lround(deg)) % 180] += std::hypot(static_cast<double>(a.end.x - a.start.x), static_cast<double>(a.end.y - a.start.y));
    }
    int best = 0;
    double bw = -1;
    for (const auto& [d, x] : w) {
        if (x > bw + 1e-9) {
            best = d;
            bw = x;
        }
    }
    return best;
}

std::vector<int> degree_multiset(const std::vector<Axis>& axes, double tol) {
    const auto [n, edges] = endpoint_graph(axes, tol);
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (const auto& [u, v] : edges) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    std::sort(deg.begin(), deg.end());
    return deg;
}

std::vector<Site> layout_sites() {
    const PlanningConfig& cfg = default_config();
    std::vector<Site> sites;
    for (int c = 1; c <= 4; ++c) {
        const std::string n = std::to_string(c);
        sites.push_back({"case" + n, layout::parse_site_json(fixture("site_case" + n + ".json")),
                         generate_program(dql::parse_dql(fixture("case" + n + ".dql")), cfg)});
    }
    sites.push_back({"L-shape",
                     layout::SitePolygon{{{0, 0}, {160000, 0}, {160000, 60000}, {70000, 60000}, {70000, 130000}, {0, 130000}}},
                     sites[0].program});
    return sites;
}

void layout_suite(Check& check) {
    const PlanningConfig& cfg = default_config();
    const LayoutParams& lp = cfg.layout;
    int pairs = 0;
    for (const Site& site : layout_sites()) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const std::string tag = site.name + " seed " + std::to_string(seed);
            layout::SchemePair pair;
            try {
                pair = layout::generate_schemes(site.program, site.polygon, seed, cfg);
            } catch (const std::exception& e) {
                check(false, tag + ": " + e.what());
                continue;
            }
            ++pairs;
            for (const layout::AxisScheme* s : {&pair.s1, &pair.s2}) {
                const std::string st = tag + " " + s->id;
                check(!s->axes.empty(), st + ": no axes");
                for (std::size_t k = 0; k < s->axes.size(); ++k) {
                    const Axis& a = s->axes[k];
                    check(axis_inside(a, site.polygon), st + ": axis " + std::to_string(k) + " leaves the site");
                    check(a.length() >= lp.min_axis_length, st + ": axis " + std::to_string(k) + " shorter than the minimum");
                }
                const auto [n, edges] = endpoint_graph(s->axes, lp.snap_tolerance);
                check(!oracle::has_cycle_dfs(n, edges), st + ": axis graph has a cycle");
                const bool shared = oracle::component_count(n, edges) == 1;
                check(shared == (s->building_mode == layout::BuildingMode::Shared), st + ": building_mode disagrees with connectivity");
            }
            const double d = std::fabs(orientation(pair.s1.axes) - orientation(pair.s2.axes));
            const bool distinct = (pair.s1.typology && pair.s2.typology && *pair.s1.typology != *pair.s2.typology) ||
                                  std::min(d, 180.0 - d) >= lp.distinct_orientation_deg ||
                                  degree_multiset(pair.s1.axes, lp.snap_tolerance) != degree_multiset(pair.s2.axes, lp.snap_tolerance);
            check(distinct, tag + ": S1 and S2 are not distinct");
        }
    }
    check(pairs == 250, "generated " + std::to_string(pairs) + " of 250 scheme pairs");
}

// ---- 7. massing properties ----------------------------------------------

// Edge contact between two cells of equal orientation, judged in the frame of `a`.
bool touching(const massing::GridCell& a, const massing::GridCell& b) {
    const double da = std::fmod(std::fabs(a.angle_deg - b.angle_deg), 180.0);
    if (std::min(da, 180.0 - da) > 1e-6) return false;
    const double t = a.angle_deg * M_PI / 180.0;
    const double dx = b.cx - a.cx, dy = b.cy - a.cy;
    const double du = std::fabs(dx * std::cos(t) + dy * std::sin(t)), dv = std::fabs(-dx * std::sin(t) + dy * std::cos(t));
    return (std::fabs(du - a.width) < 1.0 && dv < 1.0) || (std::fabs(dv - a.depth) < 1.0 && du < 1.0);
}

long long largest_free_block(const massing::FloorPlan& f) {
    std::vector<char> used(f.cells.size(), 0);
    for (const auto& p : f.allocated)
        for (std::size_t c : p.cells) used[c] = 1;
    std::vector<int> free_ids(f.cells.size(), -1);
    int n = 0;
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        if (!used[i]) free_ids[i] = n++;
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        for (std::size_t j = i + 1; j < f.cells.size(); ++j)
            if (!used[i] && !used[j] && touching(f.cells[i], f.cells[j])) edges.emplace_back(free_ids[i], free_ids[j]);
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]); };
    for (const auto& [u, v] : edges) parent[static_cast<std::size_t>(find(u))] = find(v);
    std::map<int, long long> size;
    for (int i = 0; i < n; ++i) ++size[find(i)];
    long long best = 0;
    for (const auto& [r, s] : size) best = std::max(best, s);
    return best;
}

void massing_properties(Check& check) {
    const PlanningConfig& cfg = default_config();
    const MassingParams& mp = cfg.massing;
    fuzz::Rng rng(7);
    int pairs = 0, early = 0, unallocated = 0;
    for (int attempt = 0; pairs < 100 && attempt < 1000; ++attempt) {
        const dql::DqlRecord rec = fuzz::random_planning_record(rng);
        const layout::SitePolygon site = fuzz::random_site(rng);
        const std::uint64_t seed = rng();
        const FunctionalProgram p = generate_program(rec, cfg);
        layout::SchemePair schemes;
        try {
            schemes = layout::generate_schemes(p, site, seed, cfg);
        } catch (const layout::SiteTooSmall&) {
            continue;
        }
        const layout::AxisScheme& s = pairs % 2 == 0 ? schemes.s1 : schemes.s2;
        ++pairs;
        const std::string tag = "pair " + std::to_string(pairs);

        long long required = 0;
        for (const RoomSpec& r : p.rooms) required += r.quantity * static_cast<long long>(std::ceil(r.unit_area / mp.module_area - 1e-9));
        const massing::FloorStack stack = massing::calculate_optimal_floor_plan(p, s, mp);
        long long cum = 0;
        for (const auto& f : stack.floors) cum += f.capacity;
        check(stack.required_modules == required, tag + ": required modules");
        int top = 0;
        for (const Axis& a : s.axes) {
            top = std::max(top, a.type == AxisType::Podium ? mp.floors_podium : a.type == AxisType::TowerMid ? mp.floors_tower_mid : mp.floors_tower_high);
        }
        const bool capacity_reached = static_cast<double>(cum) >= mp.overprovision * static_cast<double>(required);
        const bool exit_fired = stack.early_exit && static_cast<int>(stack.floors.size()) == top;
        check(capacity_reached != exit_fired, tag + ": exactly one stopping branch (capacity " + std::to_string(cum) + ")");
        early += exit_fired;

        const massing::Allocation a = massing::allocate_rooms(p, stack, cfg);
        std::multiset<std::string> expected, seen;
        std::map<std::string, double> unit_area;
        for (const RoomSpec& r : p.rooms) {
            for (long long k = 1; k <= r.quantity; ++k) {
                const std::string id = r.department + "/" + r.name + "#" + std::to_string(k);
                expected.insert(id);
                unit_area[id] = r.unit_area;
            }
        }
        for (const auto& f : a.floors) {
            check(!f.allocated.empty(), tag + ": empty floor retained");
            for (const auto& pl : f.allocated) seen.insert(pl.room.id);
        }
        for (const auto& r : a.unallocated) seen.insert(r.id);
        check(seen == expected, tag + ": conservation");
        unallocated += static_cast<int>(a.unallocated.size());
        for (const auto& r : a.unallocated) {
            for (const auto& f : a.floors) {
                const long long remaining = f.capacity - f.used_modules();
                check(remaining < r.modules || largest_free_block(f) < r.modules, tag + ": " + r.id + " fits floor " + std::to_string(f.index));
            }
        }

        const massing::SceneModel scene = massing::synthesize_scene(a, stack, s, p, mp, seed, "h");
        std::map<std::string, double> module_area;
        for (const auto& m : scene.modules) module_area[m.room_id] += m.w * m.d / 1e6;
        for (const auto& [id, area] : module_area) {
            const double u = unit_area[id];
            check(area >= u - 1e-6 && area < u + mp.module_area, tag + ": module area of " + id);
        }
        const std::string hash = config_hash(cfg);
        const std::string once = massing::export_scene(massing::build_scene(p, s, cfg, seed, hash), "scene-json");
        const std::string twice = massing::export_scene(massing::build_scene(p, s, cfg, seed, hash), "scene-json");
        check(once == twice, tag + ": scene bytes differ between runs");
    }
    check(pairs == 100, "only " + std::to_string(pairs) + " fuzzed pairs generated");
    std::printf("  massing: %d pairs, %d early exits, %d unallocated rooms\n", pairs, early, unallocated);
}

// ---- 8. service and CLI ---------------------------------------------------

std::string run_cli(const std::string& args, int* code) {
    const std::string cmd = std::string(MEDBUILD_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::string out;
    if (!pipe) {
        *code = -1;
        return out;
    }
    char buf[65536];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = ::pclose(pipe);
    *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

void service_cli(Check& check) {
    const auto runs = std::filesystem::temp_directory_path() / ("medbuild_acceptance_" + std::to_string(::getpid()));
    std::filesystem::remove_all(runs);
    platform::Service service(default_config(), runs);
    std::promise<int> bound;
    std::thread server([&] { service.serve("127.0.0.1", 0, [&](int port) { bound.set_value(port); }); });
    const int port = bound.get_future().get();
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(120, 0);

    const std::string fx = MEDBUILD_FIXTURE_DIR;
    const json doc = json::parse(fixture("calibration.json"));
    for (const json& c : doc["cases"]) {
        const std::string name = c["name"];
        const std::uint64_t seed = c["seed"];
        const json body{{"dql", fixture(c["dql"])}, {"site", json::parse(fixture(c["site"]))}, {"seed", seed}};
        const auto http = client.Post("/api/pipeline?view=outputs", body.dump(), "application/json");
        int code = 0;
        const std::string cli = run_cli("pipeline " + fx + "/" + c["dql"].get<std::string>() + " --site " + fx + "/" +
                                            c["site"].get<std::string>() + " --seed " + std::to_string(seed) + " --outputs-only",
                                        &code);
        check(http && http->status == 200, name + ": HTTP pipeline failed");
        check(code == 0, name + ": CLI pipeline failed: " + cli.substr(0, 200));
        check(http && http->body == cli, name + ": HTTP and CLI outputs differ");
        check(http && http->get_header_value("X-Config-Hash") == service.config_hash(), name + ": missing X-Config-Hash");

        const auto stored = client.Post("/api/pipeline", body.dump(), "application/json");
        check(stored && stored->status == 200, name + ": persisted run failed");
        if (!stored || stored->status != 200) continue;
        const json run = json::parse(stored->body);
        const std::string id = run["run_id"];
        const auto fetched = client.Get("/api/runs/" + id);
        check(fetched && fetched->body == stored->body, name + ": stored run differs when fetched");
        const platform::PipelineRun again = platform::run_pipeline(platform::inputs_from_run_json(stored->body), default_config());
        check(platform::outputs_json(again) == run["outputs"].dump(2) + "\n", name + ": re-execution differs");
        const std::string rerun = run_cli("rerun " + (runs / (id + ".json")).string(), &code);
        check(code == 0 && rerun == "identical\n", name + ": CLI rerun: " + rerun.substr(0, 200));
    }
    service.stop();
    server.join();
    std::filesystem::remove_all(runs);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;  // 0 when the criterion has no time bound
        void (*run)(Check&);
    };
    const Criterion criteria[] = {
        {"dql_fidelity", 1, dql_fidelity},          {"formula_oracles", 1, formula_oracles},
        {"calibration", 5, calibration},            {"budget_safety", 30, budget_safety},
        {"geometry_oracle", 60, geometry},          {"layout_suite", 30, layout_suite},
        {"massing_properties", 60, massing_properties}, {"service_cli_contract", 0, service_cli},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(check);
        } catch (const std::exception& e) {
            check(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0 && s > c.limit_s) check(false, "took " + fmt(s) + " s, limit " + fmt(c.limit_s) + " s");
        const bool ok = check.failures.empty();
        failed += !ok;
        std::printf("%s %s (%.2f s, %lld checks)\n", ok ? "PASS" : "FAIL", c.name, s, check.count);
        for (const std::string& f : check.failures) std::printf("  - %s\n", f.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
