#pragma once

#include <cmath>

#include "smcl/grid_map.hpp"

namespace smcl {

inline constexpr double kPi = 3.141592653589793;

// Wraps to (-pi, pi].
inline double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    return a;
}

struct Pose2D
{
    double x = 0.0; // meters, map frame
    double y = 0.0;
    double theta = 0.0; // radians, (-pi, pi]

    Pose2D() = default;
    Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

    WorldPoint position() const { return {x, y}; }
};

struct CameraIntrinsics
{
    double fx = 0.0; // pixels
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int image_width = 0;
    int image_height = 0;

    void validate() const; // throws std::invalid_argument
    double horizontal_fov() const { return 2.0 * std::atan(0.5 * image_width / fx); }
};

enum class TraceOutcome
{
    hit_class,
    blocked_by_wall,
    max_range_reached,
    exited_map,
};

struct TraceResult
{
    TraceOutcome outcome;
    double distance = 0.0; // meters; meaningful for hit_class and blocked_by_wall
};

// Horizontal bearing of the ray through pixel (u, v), camera frame. The
// rotation between camera and body is taken as identity, and the vertical
// component is dropped: the map is 2D. Center column maps to bearing 0,
// increasing u to positive bearing.
double pixel_to_bearing(const CameraIntrinsics& intrinsics, double u, double v);

// Inverse of pixel_to_bearing in u; used by the simulator to place bounding
// box centers.
double bearing_to_pixel_u(const CameraIntrinsics& intrinsics, double bearing);

// Amanatides-Woo cell traversal from a world start point along a map-frame
// bearing. Stops at the first occupied cell (blocked_by_wall, distance to
// the cell entry face), at max_range, or on leaving the map.
// Throws std::invalid_argument when the start is outside the map.
TraceResult ray_cast_occupancy(const SemanticGridMap& map, const WorldPoint& start,
                               double bearing, double max_range);

// Semantic trace: the camera-frame bearing is rotated into the map frame by
// the particle heading, then cells are walked until one carries the class
// bit (hit_class) or is occupied without it (blocked_by_wall). A cell with
// both keeps the class bit precedence, so objects flush with walls stay
// detectable.
TraceResult trace_semantic(const SemanticGridMap& map, const Pose2D& particle_pose,
                           double bearing_camera, int class_index, double max_range);

} // namespace smcl
