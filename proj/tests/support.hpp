#pragma once

// Shared synthetic-scan helpers for the unit suites. The raycaster here is
// intentionally separate from the simulator so sim tests can use it as an
// oracle.

#include "dtr/geometry.hpp"
#include "dtr/scan.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace dtr::test {

using Wall = std::pair<Point2, Point2>;

inline LidarScan cast_scan(const std::vector<Wall>& walls, int beams = 1080,
                           double fov = 1.5 * M_PI, double range_max = 10.0)
{
    LidarScan scan;
    scan.angle_increment = fov / (beams - 1);
    scan.angle_min = -0.5 * (beams - 1) * scan.angle_increment;
    scan.range_max = range_max;
    scan.ranges.assign(beams, range_max);
    for (int i = 0; i < beams; ++i) {
        const double th = scan.angle(i);
        const Point2 dir{std::cos(th), std::sin(th)};
        double best = range_max;
        for (const auto& w : walls)
            if (auto t = ray_segment_intersect({0, 0}, dir, w.first, w.second))
                best = std::min(best, *t);
        scan.ranges[i] = best;
    }
    return scan;
}

inline std::vector<Wall> corridor_walls(double half_width, double x0, double x1)
{
    return {{{x0, -half_width}, {x1, -half_width}}, {{x0, half_width}, {x1, half_width}}};
}

// Reflection about the x axis: beam i of the mirrored scan looks along the
// negated bearing of beam n-1-i, so the range array simply reverses.
inline LidarScan mirror_scan(LidarScan scan)
{
    std::reverse(scan.ranges.begin(), scan.ranges.end());
    return scan;
}

} // namespace dtr::test
