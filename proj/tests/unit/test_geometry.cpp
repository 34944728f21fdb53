#include <cmath>
#include <random>

#include "doctest.h"
#include "medbuild/geometry.hpp"
#include "oracles.hpp"

using namespace medbuild;
using namespace medbuild::geom;

namespace {

GridPolygon rect(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1) {
    return GridPolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

// Rectangles in cell units become grid polygons at twice the size so that
// cell centres land on odd integer grid points.
GridPolygon doubled(const oracle::Rect& r) { return rect(2 * r.x0, 2 * r.y0, 2 * r.x1, 2 * r.y1); }

PolygonTree unite_cells(const std::vector<oracle::Rect>& rs) {
    std::vector<GridPolygon> polys;
    for (const auto& r : rs) polys.push_back(doubled(r));
    return unite(polys);
}

long long cells_of(const PolygonTree& t) { return static_cast<long long>(area2(t) / 2 / 4); }

std::vector<oracle::Rect> random_rects(std::mt19937_64& rng, int n, int window) {
    std::uniform_int_distribution<int> pos(0, window - 1);
    std::vector<oracle::Rect> out;
    for (int i = 0; i < n; ++i) {
        int x0 = pos(rng), x1 = pos(rng), y0 = pos(rng), y1 = pos(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        out.push_back({x0, y0, x1 + 1, y1 + 1});
    }
    return out;
}

void check_orientation(const PolygonTree& t) {
    for (const auto& node : t.roots) {
        CHECK(signed_area2(node.outer) > 0);
        for (const auto& h : node.holes) CHECK(signed_area2(h) < 0);
    }
}

}  // namespace

TEST_CASE("to_grid and to_world") {
    CHECK(to_grid({0, 0}, {100}) == GridPoint{0, 0});
    CHECK(to_grid({1.234, 5.678}, {100}) == GridPoint{123, 568});
    const WorldPoint back = to_world({123, 568}, {100});
    CHECK(back.x == doctest::Approx(1.23));
    CHECK(back.y == doctest::Approx(5.68));
    CHECK(to_grid({-0.005, 0.005}, {100}) == GridPoint{-1, 1});  // half away from zero
    CHECK_THROWS_AS(to_grid({1e12, 0}, {100}), OverflowError);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const WorldPoint p{u(rng), u(rng)};
        const WorldPoint q = to_world(to_grid(p, {100}), {100});
        REQUIRE(std::fabs(q.x - p.x) <= 0.5 / 100 + 1e-9);
        REQUIRE(std::fabs(q.y - p.y) <= 0.5 / 100 + 1e-9);
    }
}

TEST_CASE("axis_rectangle") {
    const Axis h{{0, 0}, {10000, 0}, AxisType::Podium};
    const GridPolygon r = axis_rectangle(h, 6000, 2400, {100});
    // Half width is 6000 + 1200 mm, i.e. 720,000 grid units at S=100.
    CHECK(r.ring == std::vector<GridPoint>{{0, -720000}, {1000000, -720000}, {1000000, 720000}, {0, 720000}});
    CHECK(signed_area2(r) > 0);

    const Axis v{{0, 0}, {0, 10000}, AxisType::Podium};
    CHECK(signed_area2(axis_rectangle(v, 6000, 2400, {100})) == signed_area2(r));

    const Axis d{{0, 0}, {7071, 7071}, AxisType::Podium};
    const GridPolygon dr = axis_rectangle(d, 5000, 2400, {100});
    const double len = std::hypot(7071.0, 7071.0);
    const double ux = 7071.0 / len, uy = 7071.0 / len, half = 6200.0;
    const double ex[4][2] = {{uy * half, -ux * half},
                             {7071 + uy * half, 7071 - ux * half},
                             {7071 - uy * half, 7071 + ux * half},
                             {-uy * half, ux * half}};
    for (int k = 0; k < 4; ++k) {
        CHECK(std::fabs(static_cast<double>(dr.ring[k].x) - ex[k][0] * 100) <= 1.0);
        CHECK(std::fabs(static_cast<double>(dr.ring[k].y) - ex[k][1] * 100) <= 1.0);
    }
    CHECK_THROWS_AS(axis_rectangle(Axis{{5, 5}, {5, 5}, AxisType::Podium}, 5000, 2400, {100}), DegenerateAxis);
}

TEST_CASE("union examples") {
    const PolygonTree two = unite({rect(0, 0, 1, 1), rect(3, 0, 4, 1)});
    CHECK(two.roots.size() == 2);
    CHECK(area2(two) == 4);

    const PolygonTree l = unite({rect(0, 0, 40, 100), rect(0, 60, 100, 100)});
    CHECK(l.roots.size() == 1);
    CHECK(area2(l) / 2 == 40 * 100 * 2 - 1600);

    // Four bars enclosing a courtyard.
    const PolygonTree ring = unite({rect(0, 0, 10, 2), rect(0, 8, 10, 10), rect(0, 0, 2, 10), rect(8, 0, 10, 10)});
    REQUIRE(ring.roots.size() == 1);
    REQUIRE(ring.roots[0].holes.size() == 1);
    CHECK(-signed_area2(ring.roots[0].holes[0]) / 2 == 36);
    CHECK(area2(ring) / 2 == 64);
    CHECK_FALSE(point_in_tree({5, 5}, ring));
    CHECK(point_in_tree({1, 5}, ring));
    check_orientation(ring);
}

TEST_CASE("canonical form") {
    const PolygonTree t = unite({rect(5, 5, 10, 10)});
    REQUIRE(t.roots.size() == 1);
    CHECK(t.roots[0].outer.ring.front() == GridPoint{5, 5});
    // Operand order and ring start do not matter.
    const GridPolygon a{{{10, 0}, {10, 4}, {0, 4}, {0, 0}}};
    const GridPolygon b = rect(2, 2, 6, 8);
    CHECK(to_text(unite({a, b})) == to_text(unite({b, a})));
    // Clockwise operands are accepted and normalised.
    const GridPolygon cw{{{0, 0}, {0, 4}, {10, 4}, {10, 0}}};
    CHECK(to_text(unite({cw, b})) == to_text(unite({a, b})));
}

TEST_CASE("corner contact keeps rings separate") {
    const PolygonTree t = unite({rect(0, 0, 2, 2), rect(2, 2, 4, 4)});
    CHECK(t.roots.size() == 2);
    CHECK(area2(t) == 16);
    // Hole touching the outer boundary at a single vertex.
    const PolygonTree h = difference(rect(0, 0, 8, 8), GridPolygon{{{4, 0}, {6, 3}, {2, 3}}});
    REQUIRE(h.roots.size() == 1);
    CHECK(h.roots[0].holes.size() == 1);
    CHECK(area2(h) == 128 - 12);
    check_orientation(h);
}

TEST_CASE("difference and intersection") {
    const GridPolygon a = rect(0, 0, 10, 10);
    const GridPolygon b = rect(5, 5, 15, 15);
    CHECK(area2(intersection(a, b)) == 50);
    CHECK(area2(difference(a, b)) == 150);
    CHECK(intersection(a, rect(20, 20, 30, 30)).empty());
    const PolygonTree punched = difference(a, rect(3, 3, 6, 6));
    REQUIRE(punched.roots.size() == 1);
    CHECK(punched.roots[0].holes.size() == 1);
    CHECK(locate({4, 4}, punched) == Location::Outside);
    CHECK(locate({3, 4}, punched) == Location::Boundary);
    // Island inside a hole.
    const PolygonTree island = unite(punched, unite({rect(4, 4, 5, 5)}));
    REQUIRE(island.roots.size() == 1);
    CHECK(island.roots[0].children.size() == 1);
    CHECK(area2(island) == 200 - 18 + 2);
}

TEST_CASE("oblique operands") {
    const GridPolygon diamond{{{0, -50}, {50, 0}, {0, 50}, {-50, 0}}};
    const GridPolygon sq = rect(-30, -30, 30, 30);
    const PolygonTree u = unite({diamond, sq});
    const PolygonTree i = intersection(diamond, sq);
    const PolygonTree da = difference(diamond, sq);
    check_orientation(u);
    check_orientation(i);
    // Exact because every crossing lands on an integer point here.
    CHECK(area2(u) + area2(i) == signed_area2(diamond) + signed_area2(sq));
    CHECK(area2(da) + area2(i) == signed_area2(diamond));
}

TEST_CASE("invalid input") {
    const GridPolygon bow{{{0, 0}, {10, 10}, {10, 0}, {0, 10}}};
    CHECK_THROWS_AS(unite({bow}), InvalidPolygon);
    CHECK_THROWS_AS(unite({GridPolygon{{{0, 0}, {1, 1}, {2, 2}}}}), InvalidPolygon);
}

TEST_CASE("rasterisation agreement on random rectangle sets") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> count(1, 5);
    for (int trial = 0; trial < 60; ++trial) {
        const auto ra = random_rects(rng, count(rng), 64);
        const auto rb = random_rects(rng, count(rng), 64);
        const PolygonTree a = unite_cells(ra), b = unite_cells(rb);
        const PolygonTree u = unite(a, b), in = intersection(a, b), d = difference(a, b);
        const auto ca = oracle::raster(ra, 64, 64), cb = oracle::raster(rb, 64, 64);
        long long nu = 0, ni = 0, nd = 0;
        for (int j = 0; j < 64; ++j) {
            for (int k = 0; k < 64; ++k) {
                const bool ia = ca[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                const bool ib = cb[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                const GridPoint c{2 * k + 1, 2 * j + 1};
                REQUIRE(point_in_tree(c, u) == (ia || ib));
                REQUIRE(point_in_tree(c, in) == (ia && ib));
                REQUIRE(point_in_tree(c, d) == (ia && !ib));
                nu += ia || ib;
                ni += ia && ib;
                nd += ia && !ib;
            }
        }
        CHECK(cells_of(u) == nu);
        CHECK(cells_of(in) == ni);
        CHECK(cells_of(d) == nd);
        CHECK(area2(u) + area2(in) == area2(a) + area2(b));
        check_orientation(u);
        check_orientation(d);
    }
}

TEST_CASE("floor contour shapes") {
    const ScaleMap s{1};
    // U: three axes, open courtyard.
    const std::vector<Axis> u{{{0, 0}, {60000, 0}, AxisType::Podium},
                              {{0, 0}, {0, 40000}, AxisType::Podium},
                              {{60000, 0}, {60000, 40000}, AxisType::Podium}};
    const PolygonTree tu = floor_contour(u, 5000, 2400, s);
    REQUIRE(tu.roots.size() == 1);
    CHECK(tu.roots[0].holes.empty());
    // T: overlap removed.
    const std::vector<Axis> t{{{0, 0}, {60000, 0}, AxisType::Podium}, {{30000, 0}, {30000, 30000}, AxisType::Podium}};
    const PolygonTree tt = floor_contour(t, 5000, 2400, s);
    const __int128 sum = signed_area2(axis_rectangle(t[0], 5000, 2400, s)) + signed_area2(axis_rectangle(t[1], 5000, 2400, s));
    CHECK(area2(tt) < sum);
    // Closed square of axes encloses a courtyard.
    const std::vector<Axis> sq{{{0, 0}, {60000, 0}, AxisType::Podium},
                               {{60000, 0}, {60000, 60000}, AxisType::Podium},
                               {{60000, 60000}, {0, 60000}, AxisType::Podium},
                               {{0, 60000}, {0, 0}, AxisType::Podium}};
    const PolygonTree ts = floor_contour(sq, 5000, 2400, s);
    REQUIRE(ts.roots.size() == 1);
    CHECK(ts.roots[0].holes.size() == 1);
    CHECK(area(unite({rect(0, 0, 1000000, 1000000)}), {100}) == doctest::Approx(100.0));
}
