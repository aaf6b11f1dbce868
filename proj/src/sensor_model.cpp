#include "smcl/sensor_model.hpp"

#include <cmath>
#include <stdexcept>

namespace smcl {

void SensorModelParams::validate() const
{
    if (!(sigma_g > 0.0) || !(sigma_s > 0.0) || !(tau_t > 0.0) || !(r_max > 0.0) ||
        !(tof_valid_range > 0.0))
        throw std::invalid_argument("sensor model parameters must be positive");
    if (min_valid_beams <= 0)
        throw std::invalid_argument("min_valid_beams must be positive");
    if (!(miss_penalty > 0.0) || !(miss_penalty < 1.0))
        throw std::invalid_argument("miss_penalty must lie in (0, 1)");
    if (!(tof_fov_horizontal > 0.0) || !(tof_fov_vertical > 0.0))
        throw std::invalid_argument("ToF field of view must be positive");
}

BeamGeometry BeamGeometry::from(const SensorModelParams& params)
{
    BeamGeometry g;
    for (int b = 0; b < kMiddleRowBeams; ++b)
    {
        const int sensor = b / kTofGridSize;
        const int column = b % kTofGridSize;
        const double a = kSensorMountYaw[sensor] +
                         tof_zone_bearing(column, params.tof_fov_horizontal);
        g.ux[b] = std::cos(a);
        g.uy[b] = std::sin(a);
    }
    return g;
}

std::optional<double> beam_end_log_likelihood(const Pose2D& pose, const TofFrame& frame,
                                              const DistanceField& edt,
                                              const SensorModelParams& params,
                                              const BeamGeometry& beams)
{
    const double log_norm = -std::log(std::sqrt(2.0 * kPi * params.sigma_g));
    const double inv_two_sigma_sq = 1.0 / (2.0 * params.sigma_g * params.sigma_g);

    const double cos_t = std::cos(pose.theta);
    const double sin_t = std::sin(pose.theta);

    int valid = 0;
    double log_sum = 0.0;
    for (int b = 0; b < kMiddleRowBeams; ++b)
    {
        const auto range = frame.middle_row_beam(b);
        if (!range || *range > params.tof_valid_range)
            continue;
        ++valid;

        const double dx = cos_t * beams.ux[b] - sin_t * beams.uy[b];
        const double dy = sin_t * beams.ux[b] + cos_t * beams.uy[b];
        const WorldPoint end{pose.x + *range * dx, pose.y + *range * dy};
        const double d = edt.distance_at_world(end).value_or(params.r_max);
        log_sum += log_norm - d * d * inv_two_sigma_sq;
    }

    if (valid < params.min_valid_beams)
        return std::nullopt;
    return log_sum;
}

std::optional<double> beam_end_log_likelihood(const Pose2D& pose, const TofFrame& frame,
                                              const DistanceField& edt,
                                              const SensorModelParams& params)
{
    return beam_end_log_likelihood(pose, frame, edt, params, BeamGeometry::from(params));
}

std::optional<double> associate_bbox_range(const TofFrame& frame, const Detection& detection,
                                           const CameraIntrinsics& intrinsics,
                                           const SensorModelParams& params)
{
    // Pixel extent of the ToF field of view, centered on the camera axis.
    const double half_u = intrinsics.fx * std::tan(0.5 * params.tof_fov_horizontal);
    const double half_v = intrinsics.fy * std::tan(0.5 * params.tof_fov_vertical);
    const double u0 = intrinsics.cx - half_u;
    const double v0 = intrinsics.cy - half_v;

    double sum = 0.0;
    int count = 0;
    for (int row = 0; row < kTofGridSize; ++row)
    {
        const double vc = v0 + (row + 0.5) / kTofGridSize * 2.0 * half_v;
        if (vc < detection.y_min || vc >= detection.y_max)
            continue;
        for (int col = 0; col < kTofGridSize; ++col)
        {
            const double uc = u0 + (col + 0.5) / kTofGridSize * 2.0 * half_u;
            if (uc < detection.x_min || uc >= detection.x_max)
                continue;
            const int idx = row * kTofGridSize + col;
            if (!frame.front_valid[idx] || frame.front_range[idx] > params.tof_valid_range)
                continue;
            sum += frame.front_range[idx];
            ++count;
        }
    }
    if (count == 0)
        return std::nullopt;
    return sum / count;
}

double semantic_log_likelihood(const Pose2D& pose, const Detection& detection,
                               const TofFrame& frame, const SemanticGridMap& map,
                               const CameraIntrinsics& intrinsics,
                               const SensorModelParams& params)
{
    if (detection.class_index < 0 ||
        detection.class_index >= static_cast<int>(map.class_table().size()))
        throw std::out_of_range("detection class not in map class table");

    const double u = 0.5 * (detection.x_min + detection.x_max);
    const double v = 0.5 * (detection.y_min + detection.y_max);
    const double bearing = pixel_to_bearing(intrinsics, u, v);

    // Trace bounded by the map extent; semantic hits are useful well beyond
    // the ToF validity range.
    const double trace_range = (map.width() + map.height()) * map.resolution();
    const TraceResult trace =
        trace_semantic(map, pose, bearing, detection.class_index, trace_range);

    if (trace.outcome != TraceOutcome::hit_class)
        return std::log(params.miss_penalty);

    const double log_peak = -std::log(std::sqrt(2.0 * kPi * params.sigma_s));
    const auto d_tof = associate_bbox_range(frame, detection, intrinsics, params);
    if (d_tof && *d_tof < params.tau_t)
    {
        const double residual = trace.distance - *d_tof;
        return log_peak - residual * residual / (2.0 * params.sigma_s * params.sigma_s);
    }
    // Visible but unranged: the detection confirms class visibility without
    // constraining distance.
    return log_peak;
}

} // namespace smcl
