#include <catch2/catch_amalgamated.hpp>

#include "dtr/geometry.hpp"

#include <cmath>
#include <random>

using namespace dtr;

namespace {

// Independent in-circle oracle: sign of the standard 3x3 lifted determinant.
// Positive means d lies inside the circumcircle of CCW (a,b,c).
double incircle_det(Point2 a, Point2 b, Point2 c, Point2 d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
           ad2 * (bdx * cdy - cdx * bdy);
}

// Oracle circumcenter: solve the two perpendicular-bisector equations with
// Cramer's rule, no shared code with the implementation.
Point2 bisector_circumcenter(Point2 a, Point2 b, Point2 c)
{
    // (b-a).(p - (a+b)/2) = 0 and (c-a).(p - (a+c)/2) = 0
    const double a11 = b.x - a.x, a12 = b.y - a.y;
    const double a21 = c.x - a.x, a22 = c.y - a.y;
    const double r1 = 0.5 * (b.x * b.x - a.x * a.x + b.y * b.y - a.y * a.y);
    const double r2 = 0.5 * (c.x * c.x - a.x * a.x + c.y * c.y - a.y * a.y);
    const double det = a11 * a22 - a12 * a21;
    return {(r1 * a22 - r2 * a12) / det, (a11 * r2 - a21 * r1) / det};
}

std::vector<Point2> random_points(std::mt19937& rng, int n)
{
    std::uniform_real_distribution<double> coord(0.0, 10.0);
    std::vector<Point2> pts(n);
    for (auto& p : pts)
        p = {coord(rng), coord(rng)};
    return pts;
}

double convex_hull_area(std::vector<Point2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    auto build = [&](bool lower) {
        std::vector<Point2> h;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const Point2 p = lower ? pts[k] : pts[pts.size() - 1 - k];
            while (h.size() >= 2 && cross(h.back() - h[h.size() - 2], p - h[h.size() - 2]) <= 0)
                h.pop_back();
            h.push_back(p);
        }
        return h;
    };
    auto lo = build(true);
    auto hi = build(false);
    lo.pop_back();
    hi.pop_back();
    lo.insert(lo.end(), hi.begin(), hi.end());
    double area = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const Point2 p = lo[i];
        const Point2 q = lo[(i + 1) % lo.size()];
        area += cross(p, q);
    }
    return 0.5 * std::abs(area);
}

} // namespace

TEST_CASE("orient2d signs")
{
    CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
    CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
    CHECK(orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
}

TEST_CASE("orient2d antisymmetry on random inputs")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int i = 0; i < 2000; ++i) {
        const Point2 a{coord(rng), coord(rng)};
        const Point2 b{coord(rng), coord(rng)};
        const Point2 c{coord(rng), coord(rng)};
        CHECK(orient2d(a, b, c) == -orient2d(b, a, c));
    }
}

TEST_CASE("circumcenter known values")
{
    const Point2 cc = circumcenter({0, 0}, {2, 0}, {0, 2});
    CHECK(cc.x == Catch::Approx(1.0).margin(1e-12));
    CHECK(cc.y == Catch::Approx(1.0).margin(1e-12));

    const Point2 eq = circumcenter({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0});
    CHECK(eq.x == Catch::Approx(0.5).margin(1e-12));
    CHECK(eq.y == Catch::Approx(std::sqrt(3.0) / 6.0).margin(1e-12));

    CHECK_THROWS_AS(circumcenter({0, 0}, {1, 1}, {2, 2}), std::invalid_argument);
}

TEST_CASE("circumcenter matches bisector oracle and is equidistant")
{
    const Point2 a{0, 0}, b{4, 0}, c{1, 3};
    const Point2 cc = circumcenter(a, b, c);
    const Point2 oracle = bisector_circumcenter(a, b, c);
    CHECK(cc.x == Catch::Approx(oracle.x).margin(1e-9));
    CHECK(cc.y == Catch::Approx(oracle.y).margin(1e-9));

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    int checked = 0;
    while (checked < 500) {
        const Point2 p{coord(rng), coord(rng)};
        const Point2 q{coord(rng), coord(rng)};
        const Point2 r{coord(rng), coord(rng)};
        if (orient2d(p, q, r) == 0)
            continue;
        const Point2 u = circumcenter(p, q, r);
        const double d1 = distance(u, p);
        const double d2 = distance(u, q);
        const double d3 = distance(u, r);
        const double dmax = std::max({d1, d2, d3});
        CHECK(std::abs(d1 - d2) / dmax <= 1e-9);
        CHECK(std::abs(d1 - d3) / dmax <= 1e-9);
        ++checked;
    }
}

TEST_CASE("in_circumcircle boundary convention")
{
    const std::vector<Point2> pts{{0, 0}, {2, 0}, {0, 2}, {1, 1}, {2, 2}, {10, 10}};
    const Triangle t{0, 1, 2};
    CHECK(in_circumcircle(t, pts, pts[3]));        // circumcenter is inside
    CHECK_FALSE(in_circumcircle(t, pts, pts[4]));  // cocircular -> not inside
    CHECK_FALSE(in_circumcircle(t, pts, pts[5]));  // far outside
}

TEST_CASE("triangle_metrics")
{
    const std::vector<Point2> pts{{0, 0}, {3, 0}, {0, 4}};
    const auto m = triangle_metrics({0, 1, 2}, pts);
    CHECK(m.s_min == Catch::Approx(3.0));
    CHECK(m.s_mid == Catch::Approx(4.0));
    CHECK(m.s_max == Catch::Approx(5.0));
    CHECK(m.area == Catch::Approx(6.0));

    const std::vector<Point2> eq{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}};
    const auto me = triangle_metrics({0, 1, 2}, eq);
    CHECK(me.s_min == Catch::Approx(1.0));
    CHECK(me.s_max == Catch::Approx(1.0));
    CHECK(me.area == Catch::Approx(std::sqrt(3.0) / 4.0));

    // Independent distance/shoelace evaluation.
    const std::vector<Point2> thin{{0, 0}, {2, 0}, {1, 0.1}};
    const auto mt = triangle_metrics({0, 1, 2}, thin);
    const double d01 = std::hypot(2.0, 0.0);
    const double d12 = std::hypot(1.0, 0.1);
    CHECK(mt.s_max == Catch::Approx(d01));
    CHECK(mt.s_min == Catch::Approx(d12));
    CHECK(mt.area == Catch::Approx(0.1));
}

TEST_CASE("delaunay small cases")
{
    SECTION("single triangle")
    {
        const auto tri = delaunay_triangulate(std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}});
        REQUIRE(tri.triangles.size() == 1);
        CHECK(tri.circumcenters.size() == 1);
    }
    SECTION("collinear input is empty")
    {
        const auto tri = delaunay_triangulate(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}});
        CHECK(tri.triangles.empty());
    }
    SECTION("two points is empty")
    {
        const auto tri = delaunay_triangulate(std::vector<Point2>{{0, 0}, {1, 0}});
        CHECK(tri.triangles.empty());
    }
    SECTION("duplicates are merged")
    {
        const auto tri = delaunay_triangulate(
            std::vector<Point2>{{0, 0}, {0, 0}, {1, 0}, {0, 1}, {1, 0}});
        CHECK(tri.points.size() == 3);
        REQUIRE(tri.triangles.size() == 1);
        CHECK(tri.source == std::vector<int>{0, 2, 3});
    }
}

TEST_CASE("delaunay picks the empty-circumcircle diagonal of a quad")
{
    // Brute-force oracle: try both diagonals of the quad, keep the one whose
    // two triangles exclude the opposite vertices.
    const std::vector<Point2> quad{{0, 0}, {4, 0}, {5, 3}, {1, 4}};
    const auto tri = delaunay_triangulate(quad);
    REQUIRE(tri.triangles.size() == 2);

    auto splits_ok = [&](int d0, int d1, int o0, int o1) {
        const Triangle t1{d0, d1, o0};
        const Triangle t2{d0, d1, o1};
        return !in_circumcircle(t1, quad, quad[o1]) && !in_circumcircle(t2, quad, quad[o0]);
    };
    const bool diag02 = splits_ok(0, 2, 1, 3);
    const bool diag13 = splits_ok(1, 3, 0, 2);
    REQUIRE(diag02 != diag13); // exactly one valid diagonal for this quad

    auto has_edge = [&](int u, int v) {
        for (const auto& t : tri.triangles) {
            const int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
            for (auto& ed : e)
                if ((ed[0] == u && ed[1] == v) || (ed[0] == v && ed[1] == u))
                    return true;
        }
        return false;
    };
    if (diag02)
        CHECK(has_edge(0, 2));
    else
        CHECK(has_edge(1, 3));
}

TEST_CASE("delaunay empty-circumcircle property on random point sets")
{
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> size(3, 200);
    for (int iter = 0; iter < 40; ++iter) {
        const auto pts = random_points(rng, size(rng));
        const auto tri = delaunay_triangulate(pts);
        for (const auto& t : tri.triangles) {
            const Point2 a = tri.points[t.a];
            const Point2 b = tri.points[t.b];
            const Point2 c = tri.points[t.c];
            REQUIRE(orient2d(a, b, c) == 1); // stored CCW
            for (std::size_t j = 0; j < tri.points.size(); ++j) {
                const int ji = static_cast<int>(j);
                if (ji == t.a || ji == t.b || ji == t.c)
                    continue;
                // Legal when outside or within kGeomEps of the circle.
                if (incircle_det(a, b, c, tri.points[j]) > 0.0) {
                    const Point2 cc = circumcenter(a, b, c);
                    const double r = distance(a, cc);
                    REQUIRE(distance(tri.points[j], cc) >= r - kGeomEps);
                }
            }
        }
    }
}

TEST_CASE("delaunay covers the convex hull")
{
    std::mt19937 rng(99);
    for (int iter = 0; iter < 20; ++iter) {
        const auto pts = random_points(rng, 60);
        const auto tri = delaunay_triangulate(pts);
        double total = 0.0;
        for (const auto& t : tri.triangles)
            total += triangle_metrics(t, tri.points).area;
        const double hull = convex_hull_area(pts);
        CHECK(total == Catch::Approx(hull).epsilon(1e-6));
    }
}

TEST_CASE("delaunay is deterministic")
{
    std::mt19937 rng(5);
    const auto pts = random_points(rng, 120);
    const auto t1 = delaunay_triangulate(pts);
    const auto t2 = delaunay_triangulate(pts);
    REQUIRE(t1.triangles.size() == t2.triangles.size());
    for (std::size_t i = 0; i < t1.triangles.size(); ++i) {
        CHECK(t1.triangles[i].a == t2.triangles[i].a);
        CHECK(t1.triangles[i].b == t2.triangles[i].b);
        CHECK(t1.triangles[i].c == t2.triangles[i].c);
    }
}

TEST_CASE("circumcenter equidistance over triangulations")
{
    std::mt19937 rng(31);
    const auto pts = random_points(rng, 150);
    const auto tri = delaunay_triangulate(pts);
    REQUIRE(!tri.triangles.empty());
    for (std::size_t i = 0; i < tri.triangles.size(); ++i) {
        const auto& t = tri.triangles[i];
        const Point2 cc = tri.circumcenters[i];
        const double da = distance(cc, tri.points[t.a]);
        const double db = distance(cc, tri.points[t.b]);
        const double dc = distance(cc, tri.points[t.c]);
        const double dmax = std::max({da, db, dc});
        CHECK(std::abs(da - db) / dmax <= 1e-9);
        CHECK(std::abs(da - dc) / dmax <= 1e-9);
    }
}

TEST_CASE("ray_segment_intersect")
{
    const double s2 = std::sqrt(2.0) / 2.0;
    SECTION("perpendicular wall")
    {
        const auto t = ray_segment_intersect({0, 0}, {1, 0}, {2, -1}, {2, 1});
        REQUIRE(t.has_value());
        CHECK(*t == Catch::Approx(2.0));
    }
    SECTION("behind the ray")
    {
        CHECK_FALSE(ray_segment_intersect({0, 0}, {1, 0}, {-2, -1}, {-2, 1}).has_value());
    }
    SECTION("diagonal midpoint hit")
    {
        const auto t = ray_segment_intersect({0, 0}, {s2, s2}, {0, 2}, {2, 0});
        REQUIRE(t.has_value());
        CHECK(*t == Catch::Approx(std::sqrt(2.0)));
    }
    SECTION("parallel disjoint")
    {
        CHECK_FALSE(ray_segment_intersect({0, 0}, {1, 0}, {0, 1}, {5, 1}).has_value());
    }
    SECTION("collinear overlap returns nearest parameter")
    {
        const auto t = ray_segment_intersect({0, 0}, {1, 0}, {3, 0}, {5, 0});
        REQUIRE(t.has_value());
        CHECK(*t == Catch::Approx(3.0));
    }
}

TEST_CASE("point_segment_distance and polygon_contains")
{
    CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == Catch::Approx(1.0));
    CHECK(point_segment_distance({3, 0}, {-1, 0}, {1, 0}) == Catch::Approx(2.0));

    const std::vector<Point2> square{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
    CHECK(polygon_contains(square, {2, 2}));
    CHECK_FALSE(polygon_contains(square, {5, 2}));
    CHECK_FALSE(polygon_contains(square, {-1, -1}));
}
