#pragma once

#include "dtr/control.hpp"
#include "dtr/geometry.hpp"
#include "dtr/scan.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace dtr {

struct Segment {
    Point2 a;
    Point2 b;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

// Closed polyline world. Polylines close implicitly (last vertex joins the
// first); inner may be empty for corridor-style tracks. trap_regions are
// assertion-only polygons, not physical walls.
struct TrackDefinition {
    std::string name;
    std::vector<Point2> outer;
    std::vector<Point2> inner;
    std::vector<std::vector<Point2>> obstacles;
    Pose start_pose;
    Segment finish_line;
    std::vector<std::vector<Point2>> trap_regions;

    std::vector<Segment> wall_segments() const
    {
        std::vector<Segment> segs;
        auto close = [&](const std::vector<Point2>& poly) {
            const std::size_t n = poly.size();
            for (std::size_t i = 0; i < n; ++i)
                segs.push_back({poly[i], poly[(i + 1) % n]});
        };
        close(outer);
        if (!inner.empty())
            close(inner);
        for (const auto& ob : obstacles)
            close(ob);
        return segs;
    }

    bool is_drivable(Point2 p) const
    {
        if (!polygon_contains(outer, p))
            return false;
        if (!inner.empty() && polygon_contains(inner, p))
            return false;
        for (const auto& ob : obstacles)
            if (polygon_contains(ob, p))
                return false;
        return true;
    }

    bool in_trap(Point2 p) const
    {
        for (const auto& region : trap_regions)
            if (polygon_contains(region, p))
                return true;
        return false;
    }
};

struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v = 0.0;
};

struct LidarSpec {
    int beams = 1080;
    double fov = 1.5 * M_PI; // 270 degrees
    double range_max = 10.0;
    double noise_sigma = 0.0;
};

inline double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI)
        a += 2.0 * M_PI;
    return a;
}

// Kinematic bicycle plant. The commanded speed applies for the whole step;
// rate limiting already happened in the controller.
inline VehicleState kinematic_step(const VehicleState& s, const ControlCommand& cmd, double dt,
                                   double wheelbase)
{
    if (dt <= 0.0)
        throw std::invalid_argument("kinematic_step: dt must be positive");
    VehicleState n;
    n.v = cmd.speed;
    n.x = s.x + n.v * std::cos(s.theta) * dt;
    n.y = s.y + n.v * std::sin(s.theta) * dt;
    n.theta = wrap_angle(s.theta + n.v / wheelbase * std::tan(cmd.steer) * dt);
    return n;
}

namespace detail {

// Beam-index window covered by the angular interval [lo, hi] (vehicle frame),
// widened by one beam against rounding.
inline std::pair<int, int> beam_window(double lo, double hi, double angle_min, double inc, int n)
{
    int i0 = static_cast<int>(std::floor((lo - angle_min) / inc)) - 1;
    int i1 = static_cast<int>(std::ceil((hi - angle_min) / inc)) + 1;
    i0 = std::max(i0, 0);
    i1 = std::min(i1, n - 1);
    return {i0, i1};
}

} // namespace detail

// Cast one scan from the vehicle pose. Segments are angularly culled before
// ray tests; beams that reach nothing carry the range_max sentinel. Optional
// Gaussian range noise for robustness experiments.
inline LidarScan simulate_lidar(const VehicleState& s, const TrackDefinition& track,
                                const LidarSpec& spec, std::mt19937* noise_rng = nullptr)
{
    LidarScan scan;
    const int n = spec.beams;
    scan.angle_increment = spec.fov / (n - 1);
    scan.angle_min = -0.5 * (n - 1) * scan.angle_increment;
    scan.range_max = spec.range_max;
    scan.ranges.assign(n, spec.range_max);

    std::vector<Point2> dirs(n);
    for (int i = 0; i < n; ++i) {
        const double a = s.theta + scan.angle(i);
        dirs[i] = {std::cos(a), std::sin(a)};
    }
    const Point2 origin{s.x, s.y};

    for (const auto& seg : track.wall_segments()) {
        const Point2 ra = seg.a - origin;
        const Point2 rb = seg.b - origin;
        const double aa = wrap_angle(std::atan2(ra.y, ra.x) - s.theta);
        const double ab = wrap_angle(std::atan2(rb.y, rb.x) - s.theta);
        double lo = std::min(aa, ab);
        double hi = std::max(aa, ab);
        std::vector<std::pair<double, double>> spans;
        if (hi - lo > M_PI) {
            // Minor arc wraps through +-pi.
            spans.push_back({-M_PI, lo});
            spans.push_back({hi, M_PI});
        } else {
            spans.push_back({lo, hi});
        }
        for (const auto& [slo, shi] : spans) {
            const auto [i0, i1] =
                detail::beam_window(slo, shi, scan.angle_min, scan.angle_increment, n);
            for (int i = i0; i <= i1; ++i) {
                if (auto t = ray_segment_intersect(origin, dirs[i], seg.a, seg.b))
                    if (*t < scan.ranges[i])
                        scan.ranges[i] = *t;
            }
        }
    }

    if (noise_rng && spec.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (auto& r : scan.ranges)
            if (r < spec.range_max - 1e-9)
                r = std::clamp(r + noise(*noise_rng), 0.01, spec.range_max);
    }
    return scan;
}

// True iff the hull circle of the given radius touches any wall (strictly).
inline bool check_collision(const VehicleState& s, const TrackDefinition& track, double radius)
{
    const Point2 p{s.x, s.y};
    for (const auto& seg : track.wall_segments())
        if (point_segment_distance(p, seg.a, seg.b) < radius)
            return true;
    return false;
}

// Parameter along prev->next where the displacement crosses the finish line
// in the forward direction (left normal of a->b), or nullopt.
inline std::optional<double> lap_crossing_param(Point2 prev, Point2 next, const Segment& finish)
{
    const Point2 d = next - prev;
    const Point2 e = finish.b - finish.a;
    const Point2 fwd{-e.y, e.x};
    if (dot(d, fwd) <= 0.0)
        return std::nullopt;
    const double denom = cross(d, e);
    if (std::abs(denom) < 1e-15)
        return std::nullopt;
    const Point2 w = finish.a - prev;
    const double t = cross(w, e) / denom;
    const double u = cross(w, d) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0)
        return std::nullopt;
    return t;
}

inline bool lap_crossing(const VehicleState& prev, const VehicleState& next,
                         const Segment& finish)
{
    return lap_crossing_param({prev.x, prev.y}, {next.x, next.y}, finish).has_value();
}

struct EpisodeConfig {
    double dt = 0.025;
    double max_time = 600.0;
    int lap_target = 5;
    double lap_rearm = 1.0; // seconds between countable crossings
    double collision_radius = 0.15;
    double wheelbase = 0.33;
    LidarSpec lidar;
    unsigned seed = 0; // range noise only
};

struct TrajectorySample {
    double t = 0.0;
    VehicleState state;
    ControlCommand cmd;
};

struct EpisodeResult {
    std::vector<TrajectorySample> trajectory;
    std::vector<double> lap_times;
    int collisions = 0;
    std::optional<double> first_collision_time;
    std::vector<double> cycle_latencies; // controller compute only, seconds
    int trap_entries = 0;
    bool completed = false;
    std::string abort_reason; // empty when completed
};

// Closed-loop episode: scan -> controller (timed) -> plant -> collision and
// lap bookkeeping, until lap_target laps, a collision, or max_time. Lap times
// span consecutive finish crossings, with sub-step interpolation; the first
// crossing only arms the timer.
inline EpisodeResult run_episode(const std::function<ControlCommand(const LidarScan&)>& controller,
                                 const TrackDefinition& track, const EpisodeConfig& cfg)
{
    using clock = std::chrono::steady_clock;
    EpisodeResult result;
    VehicleState state{track.start_pose.x, track.start_pose.y, track.start_pose.theta, 0.0};
    std::mt19937 noise_rng(cfg.seed);
    std::mt19937* rng = cfg.lidar.noise_sigma > 0.0 ? &noise_rng : nullptr;

    double t = 0.0;
    double last_cross = -std::numeric_limits<double>::infinity();
    const int max_steps = static_cast<int>(cfg.max_time / cfg.dt);

    for (int step = 0; step < max_steps; ++step) {
        const auto scan = simulate_lidar(state, track, cfg.lidar, rng);
        ControlCommand cmd;
        const auto t0 = clock::now();
        try {
            cmd = controller(scan);
        } catch (const std::exception& e) {
            result.abort_reason = std::string("controller_error: ") + e.what();
            return result;
        }
        result.cycle_latencies.push_back(std::chrono::duration<double>(clock::now() - t0).count());
        result.trajectory.push_back({t, state, cmd});
        if (track.in_trap({state.x, state.y}))
            ++result.trap_entries;

        const VehicleState next = kinematic_step(state, cmd, cfg.dt, cfg.wheelbase);
        if (const auto frac =
                lap_crossing_param({state.x, state.y}, {next.x, next.y}, track.finish_line)) {
            const double t_cross = t + *frac * cfg.dt;
            if (t_cross >= last_cross + cfg.lap_rearm) {
                if (std::isfinite(last_cross))
                    result.lap_times.push_back(t_cross - last_cross);
                last_cross = t_cross;
                if (static_cast<int>(result.lap_times.size()) >= cfg.lap_target) {
                    result.completed = true;
                    return result;
                }
            }
        }
        state = next;
        t += cfg.dt;

        if (check_collision(state, track, cfg.collision_radius)) {
            result.collisions = 1;
            result.first_collision_time = t;
            result.trajectory.push_back({t, state, cmd});
            if (track.in_trap({state.x, state.y}))
                ++result.trap_entries;
            result.abort_reason = "collision";
            return result;
        }
    }
    result.abort_reason = "timeout";
    return result;
}

} // namespace dtr
