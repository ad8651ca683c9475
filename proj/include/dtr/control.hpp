#pragma once

#include "dtr/centerline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace dtr {

struct VehicleParams {
    double wheelbase = 0.33;
    double max_steer = 0.4;
    double mu = 0.8;        // tire-road friction estimate
    double a_y_max = 6.0;   // underestimated lateral acceleration limit, m/s^2
    double a_accel = 4.0;
    double a_decel = 6.0;
    double v_min = 0.5;
    double v_max = 5.0;
};

// Per-cycle output: steering angle (positive left) and target speed.
struct ControlCommand {
    double steer = 0.0;
    double speed = 0.0;
};

// Memory threaded through dtr_step: rate limiting needs the previous command,
// the fallback policy needs the last good path.
struct ControllerState {
    double previous_speed = 0.0;
    std::optional<CenterlinePath> held_path;
    int hold_count = 0;
};

struct DtrParams {
    VehicleParams vehicle;
    ExtractionParams extraction;
    double k_la = 0.6;       // lookahead gain, seconds
    double la_min = 0.6;
    double la_max = 3.0;
    double preview = 4.0;    // speed-planning horizon along the path, meters
    double kappa_eps = 1e-3; // below this curvature the path counts as straight
    double dt = 0.025;
    int hold_cycles = 5;
};

// First path sample at arc length >= clamp(k_la * v, la_min, la_max); the
// last sample when the path is shorter.
inline Point2 lookahead_point(const CenterlinePath& path, double v, double k_la, double la_min,
                              double la_max)
{
    if (path.empty())
        throw std::invalid_argument("lookahead_point: empty path");
    const double ld = std::clamp(k_la * v, la_min, la_max);
    for (std::size_t i = 0; i < path.size(); ++i)
        if (path.arc_length[i] >= ld)
            return path.points[i];
    return path.points.back();
}

// Kinematic-bicycle pure pursuit: steer = atan(2 L sin(alpha) / L_d) with
// alpha the bearing of the target, clamped to the steering range.
inline double pure_pursuit_steer(Point2 target, double wheelbase, double max_steer)
{
    const double ld = norm(target);
    if (ld <= 0.0)
        throw std::invalid_argument("pure_pursuit_steer: target at origin");
    const double alpha = std::atan2(target.y, target.x);
    const double steer = std::atan(2.0 * wheelbase * std::sin(alpha) / ld);
    return std::clamp(steer, -max_steer, max_steer);
}

// v_adm = sqrt(mu * a_y_max / kappa), clamped to [v_min, v_max]; straight
// path (kappa <= kappa_eps) allows v_max.
inline double admissible_speed(double kappa, const VehicleParams& p, double kappa_eps = 1e-3)
{
    if (kappa <= kappa_eps)
        return p.v_max;
    return std::clamp(std::sqrt(p.mu * p.a_y_max / kappa), p.v_min, p.v_max);
}

// Minimum admissible speed over all samples inside the preview horizon.
inline double target_speed(const CenterlinePath& path, double preview, const VehicleParams& p,
                           double kappa_eps = 1e-3)
{
    if (path.empty())
        throw std::invalid_argument("target_speed: empty path");
    double v = p.v_max;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path.arc_length[i] > preview)
            break;
        v = std::min(v, admissible_speed(path.curvature[i], p, kappa_eps));
    }
    return v;
}

inline double limit_acceleration(double previous, double target, double dt,
                                 const VehicleParams& p)
{
    if (dt <= 0.0)
        throw std::invalid_argument("limit_acceleration: dt must be positive");
    return std::clamp(target, previous - p.a_decel * dt, previous + p.a_accel * dt);
}

// One DTR control cycle: extract the centerline and track it; on extraction
// failure reuse the held path for up to hold_cycles, then steer straight and
// decay toward v_min.
inline std::pair<ControlCommand, ControllerState> dtr_step(const LidarScan& scan,
                                                           const ControllerState& state,
                                                           const DtrParams& p)
{
    ControllerState next = state;
    auto path = extract_centerline(scan, p.extraction);
    const CenterlinePath* active = nullptr;
    if (path) {
        next.held_path = *path;
        next.hold_count = 0;
        active = &*next.held_path;
    } else if (state.held_path && state.hold_count < p.hold_cycles) {
        next.hold_count = state.hold_count + 1;
        active = &*next.held_path;
    }

    ControlCommand cmd;
    if (active) {
        const Point2 target =
            lookahead_point(*active, state.previous_speed, p.k_la, p.la_min, p.la_max);
        cmd.steer = pure_pursuit_steer(target, p.vehicle.wheelbase, p.vehicle.max_steer);
        const double v = target_speed(*active, p.preview, p.vehicle, p.kappa_eps);
        cmd.speed = limit_acceleration(state.previous_speed, v, p.dt, p.vehicle);
    } else {
        cmd.steer = 0.0;
        cmd.speed = limit_acceleration(state.previous_speed, p.vehicle.v_min, p.dt, p.vehicle);
        next.held_path.reset();
    }
    next.previous_speed = cmd.speed;
    return {cmd, next};
}

} // namespace dtr
