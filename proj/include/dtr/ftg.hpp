#pragma once

#include "dtr/control.hpp"
#include "dtr/scan.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace dtr {

// Follow-The-Gap baseline. The speed table maps rising |steer| bounds to
// non-increasing speeds; the first bound above the commanded |steer| wins.
struct FtgParams {
    double bubble_radius = 0.3;
    double gap_range_threshold = 1.5;
    std::vector<std::pair<double, double>> steer_speed_table{
        {0.1, 4.0}, {0.2, 2.5}, {0.4, 1.5}};
};

// Zero every beam whose endpoint lies within bubble_radius of the closest
// measured point.
inline std::vector<double> apply_bubble(const LidarScan& scan, double bubble_radius)
{
    std::vector<double> ranges = scan.ranges;
    int closest = -1;
    for (int i = 0; i < scan.beam_count(); ++i) {
        if (!scan.has_return(i))
            continue;
        if (closest < 0 || ranges[i] < ranges[closest])
            closest = i;
    }
    if (closest < 0)
        return ranges;
    const double cth = scan.angle(closest);
    const Point2 cp{ranges[closest] * std::cos(cth), ranges[closest] * std::sin(cth)};
    for (int i = 0; i < scan.beam_count(); ++i) {
        const double th = scan.angle(i);
        const Point2 p{ranges[i] * std::cos(th), ranges[i] * std::sin(th)};
        if (distance(p, cp) < bubble_radius)
            ranges[i] = 0.0;
    }
    return ranges;
}

// Longest maximal run of beams with range above the threshold, as an
// inclusive index pair. Equal-length runs prefer the one holding the
// furthest range (a mirror-stable choice), then the lower start index.
inline std::optional<std::pair<int, int>> find_largest_gap(const std::vector<double>& ranges,
                                                           double threshold)
{
    const int n = static_cast<int>(ranges.size());
    int best_start = -1, best_len = 0;
    double best_range = -1.0;
    int i = 0;
    while (i < n) {
        if (ranges[i] <= threshold) {
            ++i;
            continue;
        }
        int j = i;
        double far = ranges[i];
        while (j + 1 < n && ranges[j + 1] > threshold)
            far = std::max(far, ranges[++j]);
        const int len = j - i + 1;
        if (len > best_len || (len == best_len && far > best_range)) {
            best_start = i;
            best_len = len;
            best_range = far;
        }
        i = j + 1;
    }
    if (best_start < 0)
        return std::nullopt;
    return std::make_pair(best_start, best_start + best_len - 1);
}

// Steer toward the furthest point inside the largest gap; speed from the
// steer table. Beams tied at the maximum range (a no-return plateau, for
// instance) aim at the plateau's center bearing. With no gap: straight at
// v_min.
inline ControlCommand ftg_step(const LidarScan& scan, const FtgParams& p,
                               const VehicleParams& vp)
{
    const auto ranges = apply_bubble(scan, p.bubble_radius);
    const auto gap = find_largest_gap(ranges, p.gap_range_threshold);
    if (!gap)
        return {0.0, vp.v_min};

    double far = ranges[gap->first];
    for (int i = gap->first; i <= gap->second; ++i)
        far = std::max(far, ranges[i]);
    int lo = gap->second, hi = gap->first;
    for (int i = gap->first; i <= gap->second; ++i) {
        if (ranges[i] == far) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    const double bearing = 0.5 * (scan.angle(lo) + scan.angle(hi));
    const double steer = std::clamp(bearing, -vp.max_steer, vp.max_steer);

    double speed = p.steer_speed_table.empty() ? vp.v_min : p.steer_speed_table.back().second;
    for (const auto& [bound, v] : p.steer_speed_table) {
        if (std::abs(steer) <= bound) {
            speed = v;
            break;
        }
    }
    return {steer, speed};
}

} // namespace dtr
