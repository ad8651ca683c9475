#pragma once

#include "dtr/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace dtr {

// Polar range scan in the vehicle frame (x forward, y left, angles from +x).
// Beams with no return carry the range_max sentinel.
struct LidarScan {
    double angle_min = 0.0;
    double angle_increment = 0.0;
    double range_max = 0.0;
    std::vector<double> ranges;

    int beam_count() const { return static_cast<int>(ranges.size()); }

    // Beam angle evaluated about the scan midpoint; this keeps angles of a
    // symmetric scan exact mirror images instead of accumulating one-sided
    // rounding from angle_min.
    double angle(int i) const
    {
        const double c = 0.5 * (beam_count() - 1);
        const double mid = angle_min + c * angle_increment;
        return mid + (i - c) * angle_increment;
    }

    // Nearest beam index for a bearing, or -1 outside the field of view.
    int beam_index(double bearing) const
    {
        const double c = 0.5 * (beam_count() - 1);
        const double mid = angle_min + c * angle_increment;
        const double u = (bearing - mid) / angle_increment + c;
        const auto i = static_cast<long long>(std::llround(u));
        if (i < 0 || i >= beam_count())
            return -1;
        return static_cast<int>(i);
    }

    bool has_return(int i) const
    {
        const double r = ranges[i];
        return std::isfinite(r) && r > 0.0 && r < range_max - 1e-9;
    }
};

struct ScanPoint {
    Point2 position;
    int beam_index = -1;
    int segment_id = -1; // unassigned until segment_walls runs
};

// One Cartesian point per returning beam, ordered by beam index.
inline std::vector<ScanPoint> scan_to_points(const LidarScan& scan)
{
    std::vector<ScanPoint> out;
    out.reserve(scan.ranges.size());
    for (int i = 0; i < scan.beam_count(); ++i) {
        if (!scan.has_return(i))
            continue;
        const double r = scan.ranges[i];
        const double th = scan.angle(i);
        out.push_back({{r * std::cos(th), r * std::sin(th)}, i, -1});
    }
    return out;
}

// Boxed subsampling: at most one point per axis-aligned grid cell. Within a
// cell the point nearest the sensor wins (ties to the lower beam index),
// which keeps the reduction invariant under scan mirroring. Beam ordering of
// the survivors is preserved.
inline std::vector<ScanPoint> subsample_boxed(const std::vector<ScanPoint>& points, double cell)
{
    if (cell <= 0.0)
        throw std::invalid_argument("subsample_boxed: cell must be positive");
    std::unordered_map<std::uint64_t, int> best; // cell -> index into points
    best.reserve(points.size() * 2);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const Point2 p = points[i].position;
        const auto ix = static_cast<std::int64_t>(std::floor(p.x / cell));
        const auto iy = static_cast<std::int64_t>(std::floor(p.y / cell));
        const auto key = detail::cell_key(ix, iy);
        auto [it, inserted] = best.try_emplace(key, i);
        if (!inserted && norm_sq(p) < norm_sq(points[it->second].position))
            it->second = i;
    }
    std::vector<ScanPoint> out;
    out.reserve(best.size());
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const Point2 p = points[i].position;
        const auto ix = static_cast<std::int64_t>(std::floor(p.x / cell));
        const auto iy = static_cast<std::int64_t>(std::floor(p.y / cell));
        if (best.at(detail::cell_key(ix, iy)) == i)
            out.push_back(points[i]);
    }
    return out;
}

// Distance-threshold wall segmentation: a new segment id starts whenever two
// consecutive points are farther apart than gap_threshold.
inline std::vector<ScanPoint> segment_walls(std::vector<ScanPoint> points, double gap_threshold)
{
    if (gap_threshold <= 0.0)
        throw std::invalid_argument("segment_walls: gap_threshold must be positive");
    int id = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && distance(points[i - 1].position, points[i].position) > gap_threshold)
            ++id;
        points[i].segment_id = id;
    }
    return points;
}

} // namespace dtr
