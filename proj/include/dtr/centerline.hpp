#pragma once

#include "dtr/geometry.hpp"
#include "dtr/scan.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dtr {

// Thresholds for the triangle retention heuristics. A triangle survives when
// it is isosceles-like and pointed, or large in area; with
// require_two_classes set its vertices must additionally span at least two
// wall segments.
struct TriangleFilterParams {
    double isosceles_tolerance = 0.2;
    double pointedness_min = 2.0;
    double area_min = 2.42; // half the squared nominal track width (2.2 m)
    bool require_two_classes = true;
};

struct OrderingParams {
    double max_step = 1.5;
    double backward_tolerance = 0.2;
};

// Resampled racing line in the vehicle frame. Spacing is uniform at ds and
// curvature is unsigned.
struct CenterlinePath {
    std::vector<Point2> points;
    std::vector<double> curvature;
    std::vector<double> arc_length;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct TriangleClass {
    bool isosceles_like = false;
    bool pointed = false;
    bool large_area = false;
    bool two_class = true;
    bool retained = false;
};

inline TriangleClass classify_triangle(const Triangle& t, std::span<const Point2> pts,
                                       std::span<const int> labels,
                                       const TriangleFilterParams& p)
{
    TriangleClass c;
    const auto m = triangle_metrics(t, pts);
    c.isosceles_like = m.s_max <= (1.0 + p.isosceles_tolerance) * m.s_mid;
    c.pointed = m.s_max >= p.pointedness_min * m.s_min;
    c.large_area = m.area >= p.area_min;
    if (!labels.empty())
        c.two_class = !(labels[t.a] == labels[t.b] && labels[t.b] == labels[t.c]);
    c.retained = ((c.isosceles_like && c.pointed) || c.large_area) &&
                 (!p.require_two_classes || c.two_class);
    return c;
}

inline std::vector<TriangleClass> classify_triangles(const Triangulation& tri,
                                                     std::span<const int> labels,
                                                     const TriangleFilterParams& p)
{
    if (p.require_two_classes && labels.size() != tri.points.size())
        throw std::invalid_argument("classify_triangles: labels required per point");
    std::vector<TriangleClass> out;
    out.reserve(tri.triangles.size());
    for (const auto& t : tri.triangles)
        out.push_back(classify_triangle(t, tri.points, labels, p));
    return out;
}

inline std::vector<int> filter_triangles(const Triangulation& tri, std::span<const int> labels,
                                         const TriangleFilterParams& p)
{
    const auto classes = classify_triangles(tri, labels, p);
    std::vector<int> retained;
    for (int i = 0; i < static_cast<int>(classes.size()); ++i)
        if (classes[i].retained)
            retained.push_back(i);
    return retained;
}

// A circumcenter is usable as a waypoint when it lies ahead of the car and
// inside observed free space: closer than the measured range at its bearing,
// by at least margin_free.
inline bool circumcenter_in_scan(Point2 c, const LidarScan& scan, double margin_free)
{
    if (c.x <= 0.0)
        return false;
    const int beam = scan.beam_index(std::atan2(c.y, c.x));
    if (beam < 0)
        return false;
    return norm(c) < scan.ranges[beam] - margin_free;
}

inline std::vector<Point2> candidate_circumcenters(const Triangulation& tri,
                                                   std::span<const int> retained,
                                                   const LidarScan& scan, double margin_free)
{
    std::vector<Point2> out;
    out.reserve(retained.size());
    for (int idx : retained) {
        const Point2 c = tri.circumcenters[idx];
        if (circumcenter_in_scan(c, scan, margin_free))
            out.push_back(c);
    }
    return out;
}

// Greedy nearest-neighbor chaining from the candidate closest to the car.
// Each step must stay within max_step and must not move more than
// backward_tolerance against the current local direction (+x to start, then
// the last chain displacement). Ties go to the lower candidate index.
inline std::vector<Point2> order_greedy(const std::vector<Point2>& candidates,
                                        const OrderingParams& p)
{
    std::vector<Point2> chain;
    if (candidates.empty())
        return chain;

    int start = 0;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i)
        if (norm_sq(candidates[i]) < norm_sq(candidates[start]))
            start = i;

    std::vector<char> used(candidates.size(), 0);
    used[start] = 1;
    chain.push_back(candidates[start]);
    Point2 cur = candidates[start];
    Point2 dir{1.0, 0.0};

    for (;;) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
            if (used[i])
                continue;
            const Point2 d = candidates[i] - cur;
            const double dist = norm(d);
            if (dist > p.max_step)
                continue;
            if (dot(d, dir) < -p.backward_tolerance)
                continue;
            if (dist < best_d) {
                best_d = dist;
                best = i;
            }
        }
        if (best < 0)
            break;
        used[best] = 1;
        if (best_d <= 1e-9)
            continue; // coincident circumcenter (mirrored triangle pair)
        dir = (1.0 / best_d) * (candidates[best] - cur);
        cur = candidates[best];
        chain.push_back(cur);
    }
    return chain;
}

namespace detail {

// Invert a small dense matrix in place (Gauss-Jordan, partial pivot).
inline void invert_small(std::vector<double>& m, int n)
{
    std::vector<double> inv(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        inv[i * n + i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[r * n + col]) > std::abs(m[piv * n + col]))
                piv = r;
        if (std::abs(m[piv * n + col]) < 1e-14)
            throw std::runtime_error("invert_small: singular matrix");
        if (piv != col)
            for (int k = 0; k < n; ++k) {
                std::swap(m[piv * n + k], m[col * n + k]);
                std::swap(inv[piv * n + k], inv[col * n + k]);
            }
        const double s = 1.0 / m[col * n + col];
        for (int k = 0; k < n; ++k) {
            m[col * n + k] *= s;
            inv[col * n + k] *= s;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const double f = m[r * n + col];
            if (f == 0.0)
                continue;
            for (int k = 0; k < n; ++k) {
                m[r * n + k] -= f * m[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    m = std::move(inv);
}

// Hat matrix H = A (A^T A)^-1 A^T for polynomial least squares over integer
// offsets centered on the window. Row e smooths the point at offset e.
inline std::vector<double> sg_hat_matrix(int window, int order)
{
    const int n = order + 1;
    const double h = 0.5 * (window - 1);
    std::vector<double> a(window * n);
    for (int j = 0; j < window; ++j) {
        double pw = 1.0;
        for (int k = 0; k < n; ++k) {
            a[j * n + k] = pw;
            pw *= (j - h);
        }
    }
    std::vector<double> g(n * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int j = 0; j < window; ++j)
                s += a[j * n + r] * a[j * n + c];
            g[r * n + c] = s;
        }
    invert_small(g, n);
    std::vector<double> hat(window * window, 0.0);
    for (int e = 0; e < window; ++e)
        for (int j = 0; j < window; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    s += a[e * n + r] * g[r * n + c] * a[j * n + c];
            hat[e * window + j] = s;
        }
    return hat;
}

// Natural cubic spline over one coordinate: second derivatives at the knots.
inline std::vector<double> natural_spline_m(const std::vector<double>& u,
                                            const std::vector<double>& f)
{
    const int n = static_cast<int>(u.size());
    std::vector<double> m(n, 0.0);
    if (n < 3)
        return m;
    std::vector<double> diag(n, 0.0), lower(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double h0 = u[i] - u[i - 1];
        const double h1 = u[i + 1] - u[i];
        lower[i] = h0 / 6.0;
        diag[i] = (h0 + h1) / 3.0;
        upper[i] = h1 / 6.0;
        rhs[i] = (f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0;
    }
    // Thomas solve on rows 1..n-2 (natural ends stay zero).
    for (int i = 2; i + 1 < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (int i = n - 2; i >= 1; --i)
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    return m;
}

struct SplineSeg {
    double u0, h;
    double f0, f1, m0, m1;

    double value(double t) const
    {
        const double b = (f1 - f0) / h - h * (2.0 * m0 + m1) / 6.0;
        return f0 + t * (b + t * (m0 / 2.0 + t * (m1 - m0) / (6.0 * h)));
    }
    double deriv1(double t) const
    {
        return (f1 - f0) / h - h * (2.0 * m0 + m1) / 6.0 + t * (m0 + t * (m1 - m0) / (2.0 * h));
    }
    double deriv2(double t) const { return m0 + t * (m1 - m0) / h; }
};

} // namespace detail

// Savitzky-Golay smoothing applied per coordinate. Boundary points use the
// least-squares fit of the first/last full window evaluated off-center, so
// polynomials up to `order` pass through unchanged everywhere. Inputs shorter
// than the window are returned as-is.
inline std::vector<Point2> smooth_savitzky_golay(const std::vector<Point2>& points, int window,
                                                 int order)
{
    if (window <= 0 || window % 2 == 0)
        throw std::invalid_argument("smooth_savitzky_golay: window must be odd and positive");
    if (order < 0 || order >= window)
        throw std::invalid_argument("smooth_savitzky_golay: order must be below window");
    const int n = static_cast<int>(points.size());
    if (n < window)
        return points;

    const auto hat = detail::sg_hat_matrix(window, order);
    const int h = (window - 1) / 2;
    std::vector<Point2> out(n);
    for (int i = 0; i < n; ++i) {
        int base, e;
        if (i < h) {
            base = 0;
            e = i;
        } else if (i >= n - h) {
            base = n - window;
            e = i - base;
        } else {
            base = i - h;
            e = h;
        }
        double sx = 0.0, sy = 0.0;
        const double* row = &hat[e * window];
        for (int j = 0; j < window; ++j) {
            sx += row[j] * points[base + j].x;
            sy += row[j] * points[base + j].y;
        }
        out[i] = {sx, sy};
    }
    return out;
}

// Natural cubic spline through the points (chord-length parameter), resampled
// at uniform arc-length spacing ds with analytic curvature per sample. Two
// distinct points degrade to a straight segment with zero curvature.
inline CenterlinePath fit_spline_resample(const std::vector<Point2>& points, double ds)
{
    if (ds <= 0.0)
        throw std::invalid_argument("fit_spline_resample: ds must be positive");
    std::vector<Point2> pts;
    pts.reserve(points.size());
    for (const auto& p : points)
        if (pts.empty() || distance(pts.back(), p) > 1e-12)
            pts.push_back(p);
    const int n = static_cast<int>(pts.size());
    if (n < 2)
        throw std::invalid_argument("fit_spline_resample: degenerate path");

    std::vector<double> u(n, 0.0);
    for (int i = 1; i < n; ++i)
        u[i] = u[i - 1] + distance(pts[i - 1], pts[i]);

    CenterlinePath path;
    if (n == 2) {
        const double len = u[1];
        const Point2 d = (1.0 / len) * (pts[1] - pts[0]);
        const int count = static_cast<int>(std::floor(len / ds + 1e-9));
        for (int k = 0; k <= count; ++k) {
            const double s = k * ds;
            path.points.push_back(pts[0] + s * d);
            path.curvature.push_back(0.0);
            path.arc_length.push_back(s);
        }
        if (path.points.size() < 2) {
            path.points.push_back(pts[1]);
            path.curvature.push_back(0.0);
            path.arc_length.push_back(len);
        }
        return path;
    }

    std::vector<double> fx(n), fy(n);
    for (int i = 0; i < n; ++i) {
        fx[i] = pts[i].x;
        fy[i] = pts[i].y;
    }
    const auto mx = detail::natural_spline_m(u, fx);
    const auto my = detail::natural_spline_m(u, fy);

    auto seg_at = [&](int i) {
        const double h = u[i + 1] - u[i];
        return std::pair<detail::SplineSeg, detail::SplineSeg>{
            {u[i], h, fx[i], fx[i + 1], mx[i], mx[i + 1]},
            {u[i], h, fy[i], fy[i + 1], my[i], my[i + 1]}};
    };
    auto speed = [&](const detail::SplineSeg& sx, const detail::SplineSeg& sy, double t) {
        return std::hypot(sx.deriv1(t), sy.deriv1(t));
    };

    // Fine u->s table, Simpson per subinterval.
    constexpr int kSub = 16;
    std::vector<double> fu{0.0}, fs{0.0};
    fu[0] = u[0];
    for (int i = 0; i + 1 < n; ++i) {
        const auto [sx, sy] = seg_at(i);
        const double h = u[i + 1] - u[i];
        for (int k = 0; k < kSub; ++k) {
            const double t0 = h * k / kSub;
            const double t1 = h * (k + 1) / kSub;
            const double tm = 0.5 * (t0 + t1);
            const double seg =
                (t1 - t0) / 6.0 *
                (speed(sx, sy, t0) + 4.0 * speed(sx, sy, tm) + speed(sx, sy, t1));
            fu.push_back(u[i] + t1);
            fs.push_back(fs.back() + seg);
        }
    }
    const double total = fs.back();

    auto u_at_arc = [&](double s) {
        auto it = std::lower_bound(fs.begin(), fs.end(), s);
        if (it == fs.begin())
            return fu.front();
        if (it == fs.end())
            return fu.back();
        const auto j = static_cast<std::size_t>(it - fs.begin());
        const double w = (s - fs[j - 1]) / (fs[j] - fs[j - 1]);
        return fu[j - 1] + w * (fu[j] - fu[j - 1]);
    };

    const int count = static_cast<int>(std::floor(total / ds + 1e-9));
    for (int k = 0; k <= count; ++k) {
        const double s = k * ds;
        const double uu = u_at_arc(s);
        int i = static_cast<int>(std::upper_bound(u.begin(), u.end(), uu) - u.begin()) - 1;
        i = std::clamp(i, 0, n - 2);
        const auto [sx, sy] = seg_at(i);
        const double t = uu - u[i];
        const double x1 = sx.deriv1(t), y1 = sy.deriv1(t);
        const double x2 = sx.deriv2(t), y2 = sy.deriv2(t);
        const double den = std::pow(x1 * x1 + y1 * y1, 1.5);
        path.points.push_back({sx.value(t), sy.value(t)});
        path.curvature.push_back(den > 0.0 ? std::abs(x1 * y2 - y1 * x2) / den : 0.0);
        path.arc_length.push_back(s);
    }
    if (path.points.size() < 2) {
        const auto [sx, sy] = seg_at(n - 2);
        const double t = u[n - 1] - u[n - 2];
        path.points.push_back({sx.value(t), sy.value(t)});
        path.curvature.push_back(path.curvature.back());
        path.arc_length.push_back(total);
    }
    return path;
}

struct ExtractionParams {
    double cell = 0.10;
    double gap_threshold = 0.5;
    TriangleFilterParams filter;
    OrderingParams ordering;
    double margin_free = 0.15;
    int sg_window = 7;
    int sg_order = 3;
    double ds = 0.1;
};

// Every intermediate stage of one extraction, for inspection dumps.
struct ExtractionTrace {
    std::vector<ScanPoint> points;
    Triangulation triangulation;
    std::vector<int> labels;
    std::vector<TriangleClass> classes;
    std::vector<char> candidate;
    std::vector<Point2> chain;
    std::vector<Point2> smoothed;
    std::optional<CenterlinePath> path;
};

// Full per-cycle pipeline. Returns nullopt when fewer than two ordered
// waypoints survive; the controller owns the fallback policy.
inline std::optional<CenterlinePath> extract_centerline(const LidarScan& scan,
                                                        const ExtractionParams& p,
                                                        ExtractionTrace* trace = nullptr)
{
    auto points = segment_walls(subsample_boxed(scan_to_points(scan), p.cell), p.gap_threshold);
    std::vector<Point2> positions;
    positions.reserve(points.size());
    for (const auto& sp : points)
        positions.push_back(sp.position);
    auto tri = delaunay_triangulate(positions);

    std::vector<int> labels(tri.points.size());
    for (std::size_t i = 0; i < tri.points.size(); ++i)
        labels[i] = points[tri.source[i]].segment_id;

    const auto classes = classify_triangles(tri, labels, p.filter);
    std::vector<Point2> candidates;
    std::vector<char> cand_flags(tri.triangles.size(), 0);
    for (std::size_t i = 0; i < tri.triangles.size(); ++i) {
        if (!classes[i].retained)
            continue;
        if (circumcenter_in_scan(tri.circumcenters[i], scan, p.margin_free)) {
            cand_flags[i] = 1;
            candidates.push_back(tri.circumcenters[i]);
        }
    }
    auto chain = order_greedy(candidates, p.ordering);

    std::optional<CenterlinePath> path;
    std::vector<Point2> smoothed;
    if (chain.size() >= 2) {
        smoothed = smooth_savitzky_golay(chain, p.sg_window, p.sg_order);
        try {
            path = fit_spline_resample(smoothed, p.ds);
        } catch (const std::invalid_argument&) {
            path.reset();
        }
    }

    if (trace) {
        trace->points = std::move(points);
        trace->triangulation = std::move(tri);
        trace->labels = std::move(labels);
        trace->classes = classes;
        trace->candidate = std::move(cand_flags);
        trace->chain = std::move(chain);
        trace->smoothed = std::move(smoothed);
        trace->path = path;
    }
    return path;
}

} // namespace dtr
