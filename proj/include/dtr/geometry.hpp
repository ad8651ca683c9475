#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dtr {

// Absolute metric tolerance shared by all planar predicates. Distances below
// this count as zero; collinear/cocircular ties resolve by index order so the
// whole pipeline stays deterministic.
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(Point2 p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point2 p) { return std::sqrt(norm_sq(p)); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Vertex indices into some point array. Stored counter-clockwise.
struct Triangle {
    int a = -1;
    int b = -1;
    int c = -1;
};

struct Triangulation {
    std::vector<Point2> points;         // deduplicated input, original order
    std::vector<Triangle> triangles;    // CCW, canonically sorted
    std::vector<Point2> circumcenters;  // parallel to triangles
    std::vector<int> source;            // points[i] came from input[source[i]]

    bool empty() const { return triangles.empty(); }
};

// Sign of the signed area of (a,b,c): +1 CCW, -1 CW, 0 collinear within
// kGeomEps of the line through a and b.
inline int orient2d(Point2 a, Point2 b, Point2 c)
{
    const double det = cross(b - a, c - a);
    const double tol = kGeomEps * distance(a, b);
    if (std::abs(det) <= tol)
        return 0;
    return det > 0.0 ? 1 : -1;
}

// Circumcenter of the triangle (a,b,c). Throws on (near-)collinear vertices.
inline Point2 circumcenter(Point2 a, Point2 b, Point2 c)
{
    const Point2 ab = b - a;
    const Point2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    if (orient2d(a, b, c) == 0)
        throw std::invalid_argument("circumcenter: degenerate triangle");
    const double ab2 = norm_sq(ab);
    const double ac2 = norm_sq(ac);
    const double ux = (ac.y * ab2 - ab.y * ac2) / d;
    const double uy = (ab.x * ac2 - ac.x * ab2) / d;
    return {a.x + ux, a.y + uy};
}

inline Point2 circumcenter(const Triangle& t, std::span<const Point2> pts)
{
    return circumcenter(pts[t.a], pts[t.b], pts[t.c]);
}

// True iff p is strictly inside the circumcircle of t. Points within kGeomEps
// of the circle (cocircular) are reported as not inside.
inline bool in_circumcircle(const Triangle& t, std::span<const Point2> pts, Point2 p)
{
    const Point2 cc = circumcenter(t, pts);
    const double r = distance(pts[t.a], cc);
    return distance(p, cc) < r - kGeomEps;
}

struct TriangleMetrics {
    double s_min = 0.0;
    double s_mid = 0.0;
    double s_max = 0.0;
    double area = 0.0;
};

inline TriangleMetrics triangle_metrics(const Triangle& t, std::span<const Point2> pts)
{
    double s[3] = {distance(pts[t.a], pts[t.b]),
                   distance(pts[t.b], pts[t.c]),
                   distance(pts[t.c], pts[t.a])};
    std::sort(s, s + 3);
    const double area = 0.5 * std::abs(cross(pts[t.b] - pts[t.a], pts[t.c] - pts[t.a]));
    return {s[0], s[1], s[2], area};
}

// Smallest t >= 0 with origin + t*dir on segment [sa,sb], or nullopt.
// dir must have unit norm. Parallel-and-disjoint yields nullopt; collinear
// overlap yields the nearest covered parameter.
inline std::optional<double> ray_segment_intersect(Point2 origin, Point2 dir,
                                                   Point2 sa, Point2 sb)
{
    const Point2 e = sb - sa;
    const Point2 w = sa - origin;
    const double denom = cross(dir, e);
    if (std::abs(denom) < 1e-14) {
        // Parallel. Only a collinear segment can still be hit.
        if (std::abs(cross(w, dir)) > kGeomEps)
            return std::nullopt;
        const double ta = dot(w, dir);
        const double tb = dot(sb - origin, dir);
        const double lo = std::min(ta, tb);
        const double hi = std::max(ta, tb);
        if (hi < 0.0)
            return std::nullopt;
        return std::max(lo, 0.0);
    }
    const double t = cross(w, e) / denom;
    const double s = cross(w, dir) / denom;
    if (t < -1e-12 || s < -1e-12 || s > 1.0 + 1e-12)
        return std::nullopt;
    return std::max(t, 0.0);
}

inline double point_segment_distance(Point2 p, Point2 sa, Point2 sb)
{
    const Point2 e = sb - sa;
    const double len2 = norm_sq(e);
    if (len2 == 0.0)
        return distance(p, sa);
    const double u = std::clamp(dot(p - sa, e) / len2, 0.0, 1.0);
    return distance(p, sa + u * e);
}

// Even-odd test against a closed polygon (last vertex implicitly joins the first).
inline bool polygon_contains(std::span<const Point2> poly, Point2 p)
{
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = poly[i];
        const Point2 b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xi)
                inside = !inside;
        }
    }
    return inside;
}

namespace detail {

inline std::uint64_t edge_key(int u, int v)
{
    if (u > v)
        std::swap(u, v);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
}

inline std::uint64_t cell_key(std::int64_t ix, std::int64_t iy)
{
    std::uint64_t h = static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ull;
    h ^= static_cast<std::uint64_t>(iy) + 0x632be59bd9b4e019ull + (h << 6) + (h >> 2);
    return h;
}

// Merge points closer than kGeomEps, keeping the first occurrence.
inline void dedup_points(std::span<const Point2> input, std::vector<Point2>& kept,
                         std::vector<int>& source)
{
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    grid.reserve(input.size() * 2);
    kept.clear();
    source.clear();
    for (int i = 0; i < static_cast<int>(input.size()); ++i) {
        const Point2 p = input[i];
        if (!is_finite(p))
            throw std::invalid_argument("delaunay_triangulate: non-finite point");
        const auto ix = static_cast<std::int64_t>(std::floor(p.x / kGeomEps));
        const auto iy = static_cast<std::int64_t>(std::floor(p.y / kGeomEps));
        bool duplicate = false;
        for (std::int64_t dx = -1; dx <= 1 && !duplicate; ++dx) {
            for (std::int64_t dy = -1; dy <= 1 && !duplicate; ++dy) {
                auto it = grid.find(cell_key(ix + dx, iy + dy));
                if (it == grid.end())
                    continue;
                for (int k : it->second) {
                    if (distance(kept[k], p) < kGeomEps) {
                        duplicate = true;
                        break;
                    }
                }
            }
        }
        if (duplicate)
            continue;
        grid[cell_key(ix, iy)].push_back(static_cast<int>(kept.size()));
        kept.push_back(p);
        source.push_back(i);
    }
}

// Edge -> up to two incident triangle slots.
struct EdgeMap {
    std::unordered_map<std::uint64_t, std::array<int, 2>> map;

    void add(int u, int v, int tri)
    {
        auto& slots = map.try_emplace(edge_key(u, v), std::array<int, 2>{-1, -1}).first->second;
        if (slots[0] < 0)
            slots[0] = tri;
        else
            slots[1] = tri;
    }
    void remove(int u, int v, int tri)
    {
        auto it = map.find(edge_key(u, v));
        if (it == map.end())
            return;
        auto& slots = it->second;
        if (slots[0] == tri)
            slots[0] = slots[1];
        slots[1] = -1;
        if (slots[0] < 0)
            map.erase(it);
    }
};

} // namespace detail

// Delaunay triangulation by lexicographic incremental hull construction
// followed by Lawson edge flips. Points closer than kGeomEps are merged
// first; fewer than three non-collinear points give an empty triangulation.
inline Triangulation delaunay_triangulate(std::span<const Point2> input)
{
    Triangulation out;
    detail::dedup_points(input, out.points, out.source);
    const auto& pts = out.points;
    const int m = static_cast<int>(pts.size());
    if (m < 3)
        return out;

    std::vector<int> ord(m);
    for (int i = 0; i < m; ++i)
        ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](int i, int j) {
        if (pts[i].x != pts[j].x)
            return pts[i].x < pts[j].x;
        return pts[i].y < pts[j].y;
    });

    // First point breaking collinearity of the sorted prefix.
    int apex = 2;
    while (apex < m && orient2d(pts[ord[0]], pts[ord[1]], pts[ord[apex]]) == 0)
        ++apex;
    if (apex == m)
        return out; // all collinear

    std::vector<Triangle> tris;
    detail::EdgeMap edges;
    auto add_tri = [&](int a, int b, int c) {
        const int id = static_cast<int>(tris.size());
        tris.push_back({a, b, c});
        edges.add(a, b, id);
        edges.add(b, c, id);
        edges.add(c, a, id);
    };

    // Fan from the collinear prefix chain to the apex, oriented CCW.
    const int side = orient2d(pts[ord[0]], pts[ord[1]], pts[ord[apex]]);
    for (int i = 0; i + 1 < apex; ++i) {
        if (side > 0)
            add_tri(ord[i], ord[i + 1], ord[apex]);
        else
            add_tri(ord[i + 1], ord[i], ord[apex]);
    }

    std::vector<int> hull;
    if (side > 0) {
        for (int i = 0; i < apex; ++i)
            hull.push_back(ord[i]);
        hull.push_back(ord[apex]);
    } else {
        for (int i = apex - 1; i >= 0; --i)
            hull.push_back(ord[i]);
        hull.push_back(ord[apex]);
    }

    // Insert remaining points; each is lexicographically outside the hull.
    std::vector<char> vis;
    for (int t = apex + 1; t < m; ++t) {
        const int p = ord[t];
        const int n = static_cast<int>(hull.size());
        vis.assign(n, 0);
        int visible = 0;
        for (int j = 0; j < n; ++j) {
            if (orient2d(pts[hull[j]], pts[hull[(j + 1) % n]], pts[p]) < 0) {
                vis[j] = 1;
                ++visible;
            }
        }
        if (visible == 0)
            continue; // tolerance degeneracy; drop the point
        int start = 0;
        while (!(vis[start] && !vis[(start + n - 1) % n]))
            ++start;
        int arc = 1;
        while (vis[(start + arc) % n])
            ++arc;
        for (int j = 0; j < arc; ++j) {
            const int a = hull[(start + j) % n];
            const int b = hull[(start + j + 1) % n];
            add_tri(a, p, b);
        }
        std::vector<int> next_hull;
        next_hull.reserve(n - arc + 2);
        for (int j = 0; j <= n - arc; ++j)
            next_hull.push_back(hull[(start + arc + j) % n]);
        next_hull.push_back(p);
        hull = std::move(next_hull);
    }

    // Lawson flips until every interior edge satisfies the in-circle test.
    std::deque<std::uint64_t> queue;
    for (const auto& [key, slots] : edges.map)
        if (slots[1] >= 0)
            queue.push_back(key);

    auto third_vertex = [&](const Triangle& tr, int u, int v) {
        if (tr.a != u && tr.a != v)
            return tr.a;
        if (tr.b != u && tr.b != v)
            return tr.b;
        return tr.c;
    };
    auto has_directed_edge = [&](const Triangle& tr, int u, int v) {
        return (tr.a == u && tr.b == v) || (tr.b == u && tr.c == v) || (tr.c == u && tr.a == v);
    };

    const long long flip_budget = 20LL * m * m + 1000;
    long long steps = 0;
    while (!queue.empty() && steps++ < flip_budget) {
        const std::uint64_t key = queue.front();
        queue.pop_front();
        auto it = edges.map.find(key);
        if (it == edges.map.end() || it->second[1] < 0)
            continue;
        const int t1 = it->second[0];
        const int t2 = it->second[1];
        int u = static_cast<int>(key >> 32);
        int v = static_cast<int>(key & 0xffffffffu);
        // Orient so t1 holds the directed edge u->v.
        if (!has_directed_edge(tris[t1], u, v))
            std::swap(u, v);
        const int c = third_vertex(tris[t1], u, v);
        const int d = third_vertex(tris[t2], u, v);
        Point2 cc;
        try {
            cc = circumcenter(pts[u], pts[v], pts[c]);
        } catch (const std::invalid_argument&) {
            continue;
        }
        const double r = distance(pts[u], cc);
        if (!(distance(pts[d], cc) < r - kGeomEps))
            continue;
        // Flip only across a strictly convex quad u,d,v,c.
        if (orient2d(pts[u], pts[d], pts[c]) <= 0 || orient2d(pts[d], pts[v], pts[c]) <= 0)
            continue;
        edges.remove(u, v, t1);
        edges.remove(v, c, t1);
        edges.remove(c, u, t1);
        edges.remove(u, v, t2);
        edges.remove(d, v, t2);
        edges.remove(u, d, t2);
        tris[t1] = {u, d, c};
        tris[t2] = {d, v, c};
        edges.add(u, d, t1);
        edges.add(d, c, t1);
        edges.add(c, u, t1);
        edges.add(d, v, t2);
        edges.add(v, c, t2);
        edges.add(c, d, t2);
        queue.push_back(detail::edge_key(u, d));
        queue.push_back(detail::edge_key(d, v));
        queue.push_back(detail::edge_key(v, c));
        queue.push_back(detail::edge_key(c, u));
    }

    // Canonical order: smallest vertex first (cyclic, CCW preserved), then sort.
    for (auto& tr : tris) {
        while (tr.a > tr.b || tr.a > tr.c) {
            const int tmp = tr.a;
            tr.a = tr.b;
            tr.b = tr.c;
            tr.c = tmp;
        }
    }
    std::sort(tris.begin(), tris.end(), [](const Triangle& l, const Triangle& r) {
        if (l.a != r.a)
            return l.a < r.a;
        if (l.b != r.b)
            return l.b < r.b;
        return l.c < r.c;
    });

    out.triangles = std::move(tris);
    out.circumcenters.reserve(out.triangles.size());
    for (const auto& tr : out.triangles)
        out.circumcenters.push_back(circumcenter(tr, pts));
    return out;
}

inline Triangulation delaunay_triangulate(const std::vector<Point2>& input)
{
    return delaunay_triangulate(std::span<const Point2>(input));
}

} // namespace dtr
