#include "smcl/geometry.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

namespace smcl {

void CameraIntrinsics::validate() const
{
    if (!(fx > 0.0) || !(fy > 0.0))
        throw std::invalid_argument("camera focal lengths must be positive");
    if (image_width <= 0 || image_height <= 0)
        throw std::invalid_argument("camera image size must be positive");
    if (!(cx > 0.0) || cx >= image_width || !(cy > 0.0) || cy >= image_height)
        throw std::invalid_argument("camera principal point outside image");
}

double pixel_to_bearing(const CameraIntrinsics& intrinsics, double u, double /*v*/)
{
    return std::atan2((u - intrinsics.cx) / intrinsics.fx, 1.0);
}

double bearing_to_pixel_u(const CameraIntrinsics& intrinsics, double bearing)
{
    return intrinsics.cx + intrinsics.fx * std::tan(bearing);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Amanatides-Woo walk. Calls visit(cx, cy, entry_distance) for the start
// cell and every cell the ray enters, in order; a returned result stops the
// walk. Entry distances never exceed max_range.
template <typename Visit>
TraceResult traverse_cells(const SemanticGridMap& map, const WorldPoint& start, double bearing,
                           double max_range, Visit&& visit)
{
    GridIndex cell = map.grid_of(start);
    if (!map.in_bounds(cell.x, cell.y))
        throw std::invalid_argument("trace start outside map bounds");

    const double dir_x = std::cos(bearing);
    const double dir_y = std::sin(bearing);
    const double res = map.resolution();
    const WorldPoint org = map.origin();

    int step_x = 0, step_y = 0;
    double t_max_x = kInf, t_max_y = kInf;
    double t_delta_x = kInf, t_delta_y = kInf;

    if (dir_x > 0.0)
    {
        step_x = 1;
        t_max_x = (org.x + (cell.x + 1) * res - start.x) / dir_x;
        t_delta_x = res / dir_x;
    }
    else if (dir_x < 0.0)
    {
        step_x = -1;
        t_max_x = (start.x - (org.x + cell.x * res)) / -dir_x;
        t_delta_x = res / -dir_x;
    }
    if (dir_y > 0.0)
    {
        step_y = 1;
        t_max_y = (org.y + (cell.y + 1) * res - start.y) / dir_y;
        t_delta_y = res / dir_y;
    }
    else if (dir_y < 0.0)
    {
        step_y = -1;
        t_max_y = (start.y - (org.y + cell.y * res)) / -dir_y;
        t_delta_y = res / -dir_y;
    }

    double t = 0.0;
    while (true)
    {
        if (auto r = visit(cell.x, cell.y, t))
            return *r;

        const double t_next = std::min(t_max_x, t_max_y);
        if (t_next > max_range)
            return {TraceOutcome::max_range_reached, max_range};

        if (t_max_x <= t_max_y)
        {
            cell.x += step_x;
            t = t_max_x;
            t_max_x += t_delta_x;
        }
        else
        {
            cell.y += step_y;
            t = t_max_y;
            t_max_y += t_delta_y;
        }
        if (!map.in_bounds(cell.x, cell.y))
            return {TraceOutcome::exited_map, t};
    }
}

} // namespace

TraceResult ray_cast_occupancy(const SemanticGridMap& map, const WorldPoint& start,
                               double bearing, double max_range)
{
    return traverse_cells(map, start, bearing, max_range,
                          [&map](int cx, int cy, double t) -> std::optional<TraceResult> {
                              if (map.is_occupied(cx, cy))
                                  return TraceResult{TraceOutcome::blocked_by_wall, t};
                              return std::nullopt;
                          });
}

TraceResult trace_semantic(const SemanticGridMap& map, const Pose2D& particle_pose,
                           double bearing_camera, int class_index, double max_range)
{
    if (class_index < 0 || class_index >= static_cast<int>(map.class_table().size()))
        throw std::out_of_range("class index outside map class table");

    const double bearing_map = particle_pose.theta + bearing_camera;
    return traverse_cells(
        map, particle_pose.position(), bearing_map, max_range,
        [&map, class_index](int cx, int cy, double t) -> std::optional<TraceResult> {
            const CellValue v = map.at(cx, cy);
            // Class bit wins over occupancy: annotated objects often sit on
            // wall cells.
            if (has_class_bit(v, class_index))
                return TraceResult{TraceOutcome::hit_class, t};
            if (occupancy_of(v) == Occupancy::occupied)
                return TraceResult{TraceOutcome::blocked_by_wall, t};
            return std::nullopt;
        });
}

} // namespace smcl
