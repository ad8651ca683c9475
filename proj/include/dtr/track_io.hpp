#pragma once

#include "dtr/sim.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace dtr {

// Malformed track file; the message names the offending field.
struct TrackFormatError : std::runtime_error {
    explicit TrackFormatError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline std::vector<Point2> parse_polyline(const nlohmann::json& j, const std::string& field,
                                          std::size_t min_points)
{
    if (!j.is_array())
        throw TrackFormatError("track field '" + field + "' must be an array of [x, y] pairs");
    std::vector<Point2> poly;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw TrackFormatError("track field '" + field + "' must hold [x, y] pairs");
        poly.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    if (poly.size() < min_points)
        throw TrackFormatError("track field '" + field + "' needs at least " +
                               std::to_string(min_points) + " points");
    return poly;
}

} // namespace detail

inline TrackDefinition parse_track(const nlohmann::json& j)
{
    static const std::set<std::string> known{"name",        "outer",       "inner",
                                             "obstacles",   "start_pose",  "finish_line",
                                             "trap_regions"};
    if (!j.is_object())
        throw TrackFormatError("track document must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw TrackFormatError("unknown track field '" + key + "'");
    for (const auto& req : {"name", "outer", "inner", "start_pose", "finish_line"})
        if (!j.contains(req))
            throw TrackFormatError(std::string("missing track field '") + req + "'");

    TrackDefinition track;
    if (!j["name"].is_string())
        throw TrackFormatError("track field 'name' must be a string");
    track.name = j["name"].get<std::string>();
    track.outer = detail::parse_polyline(j["outer"], "outer", 3);
    track.inner = detail::parse_polyline(j["inner"], "inner", 0); // empty allowed
    if (!track.inner.empty() && track.inner.size() < 3)
        throw TrackFormatError("track field 'inner' needs at least 3 points (or none)");

    if (j.contains("obstacles")) {
        if (!j["obstacles"].is_array())
            throw TrackFormatError("track field 'obstacles' must be an array");
        for (const auto& ob : j["obstacles"])
            track.obstacles.push_back(detail::parse_polyline(ob, "obstacles", 3));
    }
    if (j.contains("trap_regions")) {
        if (!j["trap_regions"].is_array())
            throw TrackFormatError("track field 'trap_regions' must be an array");
        for (const auto& region : j["trap_regions"])
            track.trap_regions.push_back(detail::parse_polyline(region, "trap_regions", 3));
    }

    const auto& pose = j["start_pose"];
    if (!pose.is_object() || !pose.contains("x") || !pose.contains("y") ||
        !pose.contains("theta"))
        throw TrackFormatError("track field 'start_pose' must hold x, y and theta");
    track.start_pose = {pose["x"].get<double>(), pose["y"].get<double>(),
                        pose["theta"].get<double>()};

    const auto& fin = j["finish_line"];
    if (!fin.is_object() || !fin.contains("a") || !fin.contains("b"))
        throw TrackFormatError("track field 'finish_line' must hold segment ends a and b");
    auto endpoint = [](const nlohmann::json& e, const char* which) {
        if (!e.is_array() || e.size() != 2)
            throw TrackFormatError(std::string("finish_line '") + which + "' must be [x, y]");
        return Point2{e[0].get<double>(), e[1].get<double>()};
    };
    track.finish_line = {endpoint(fin["a"], "a"), endpoint(fin["b"], "b")};

    if (!track.is_drivable({track.start_pose.x, track.start_pose.y}))
        throw TrackFormatError("track field 'start_pose' lies outside the drivable region");
    return track;
}

inline TrackDefinition load_track(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw TrackFormatError("cannot open track file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw TrackFormatError("track file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_track(j);
}

} // namespace dtr
