#include "smcl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smcl/rng.hpp"

namespace smcl {

CameraIntrinsics default_camera()
{
    CameraIntrinsics cam;
    cam.image_width = 256;
    cam.image_height = 192;
    const double hfov = 65.0 * kPi / 180.0;
    cam.fx = 0.5 * cam.image_width / std::tan(0.5 * hfov);
    cam.fy = cam.fx;
    cam.cx = 0.5 * cam.image_width;
    cam.cy = 0.5 * cam.image_height;
    return cam;
}

void SimConfig::validate() const
{
    if (!(tof_rate > 0.0) || !(detection_rate > 0.0) || !(checkpoint_rate > 0.0))
        throw std::invalid_argument("simulator rates must be positive");
    if (tof_noise_std < 0.0 || bbox_center_noise_std < 0.0)
        throw std::invalid_argument("noise magnitudes must be non-negative");
    if (!(tof_max_range > 0.0))
        throw std::invalid_argument("tof_max_range must be positive");
    if (detect_prob < 0.0 || detect_prob > 1.0 || false_positive_rate < 0.0 ||
        false_positive_rate > 1.0)
        throw std::invalid_argument("probabilities must lie in [0, 1]");
    camera.validate();
}

namespace {

bool pose_in_free_space(const SemanticGridMap& map, const Pose2D& pose)
{
    const CellValue v = map.cell_at(pose.position());
    return v != kOutOfBounds && occupancy_of(v) == Occupancy::free_space;
}

// Piecewise-constant motion: a turn-in-place phase followed by a straight
// drive per waypoint segment.
struct MotionPhase
{
    double t_start;
    double duration;
    Pose2D start;
    double rate;  // rad/s while turning, m/s while driving
    bool turning;
};

Pose2D pose_in_phase(const MotionPhase& phase, double t)
{
    const double dt = std::clamp(t - phase.t_start, 0.0, phase.duration);
    if (phase.turning)
        return {phase.start.x, phase.start.y, wrap_angle(phase.start.theta + phase.rate * dt)};
    return {phase.start.x + std::cos(phase.start.theta) * phase.rate * dt,
            phase.start.y + std::sin(phase.start.theta) * phase.rate * dt, phase.start.theta};
}

} // namespace

std::vector<TimedPose> generate_trajectory(const SemanticGridMap& map,
                                           const std::vector<WorldPoint>& waypoints,
                                           double speed, double turn_rate, double sample_rate)
{
    if (waypoints.empty())
        throw std::invalid_argument("waypoint list is empty");
    if (!(speed > 0.0) || !(turn_rate > 0.0) || !(sample_rate > 0.0))
        throw std::invalid_argument("speed, turn_rate and sample_rate must be positive");

    for (const WorldPoint& w : waypoints)
    {
        const CellValue v = map.cell_at(w);
        if (v == kOutOfBounds || occupancy_of(v) != Occupancy::free_space)
            throw std::invalid_argument("waypoint not in free space");
    }

    if (waypoints.size() == 1)
        return {{0.0, Pose2D{waypoints[0].x, waypoints[0].y, 0.0}}};

    // Initial heading points at the first segment, so the tour starts with a
    // pure drive.
    double heading = std::atan2(waypoints[1].y - waypoints[0].y, waypoints[1].x - waypoints[0].x);

    std::vector<MotionPhase> phases;
    double t = 0.0;
    Pose2D cursor{waypoints[0].x, waypoints[0].y, heading};

    for (size_t i = 0; i + 1 < waypoints.size(); ++i)
    {
        const WorldPoint& a = waypoints[i];
        const WorldPoint& b = waypoints[i + 1];
        const double dist = std::hypot(b.x - a.x, b.y - a.y);
        if (dist < 1e-9)
            continue;

        const double target = std::atan2(b.y - a.y, b.x - a.x);
        const TraceResult clear = ray_cast_occupancy(map, a, target, dist);
        if (clear.outcome == TraceOutcome::blocked_by_wall)
            throw std::invalid_argument("waypoint segment crosses a wall");

        const double dtheta = wrap_angle(target - cursor.theta);
        if (std::abs(dtheta) > 1e-9)
        {
            MotionPhase turn{t, std::abs(dtheta) / turn_rate, cursor,
                             dtheta > 0 ? turn_rate : -turn_rate, true};
            t += turn.duration;
            cursor.theta = target;
            phases.push_back(turn);
        }
        MotionPhase drive{t, dist / speed, cursor, speed, false};
        t += drive.duration;
        cursor.x = b.x;
        cursor.y = b.y;
        phases.push_back(drive);
    }

    const double total = t;
    const double dt = 1.0 / sample_rate;
    const int samples = static_cast<int>(std::floor(total / dt + 1e-9)) + 1;

    std::vector<TimedPose> out;
    out.reserve(samples);
    size_t phase = 0;
    for (int k = 0; k < samples; ++k)
    {
        const double tk = k * dt;
        while (phase + 1 < phases.size() &&
               tk >= phases[phase].t_start + phases[phase].duration)
            ++phase;
        out.push_back({tk, pose_in_phase(phases[phase], tk)});
    }
    return out;
}

TofFrame synthesize_tof(const SemanticGridMap& map, const Pose2D& gt_pose,
                        const SimConfig& config, uint64_t frame_index, double timestamp)
{
    if (!pose_in_free_space(map, gt_pose))
        throw std::invalid_argument("ToF synthesis pose not in free space");

    TofFrame frame;
    frame.timestamp = timestamp;

    const double fov = 45.0 * kPi / 180.0;
    for (int sensor = 0; sensor < kTofSensorCount; ++sensor)
    {
        for (int col = 0; col < kTofGridSize; ++col)
        {
            const double bearing =
                gt_pose.theta + kSensorMountYaw[sensor] + tof_zone_bearing(col, fov);
            const TraceResult hit =
                ray_cast_occupancy(map, gt_pose.position(), bearing, config.tof_max_range);
            const bool in_range = hit.outcome == TraceOutcome::blocked_by_wall;

            if (sensor == 0)
            {
                // Front sensor keeps the full grid; rows share the column ray
                // in a 2D world, noise stays per-zone.
                for (int row = 0; row < kTofGridSize; ++row)
                {
                    const int idx = row * kTofGridSize + col;
                    if (!in_range)
                        continue;
                    RandomStream rs(config.rng_seed, rng_tag::tof_noise,
                                    frame_index * 256 + static_cast<uint64_t>(idx));
                    const double r = hit.distance + rs.next_normal() * config.tof_noise_std;
                    if (r > config.tof_max_range)
                        continue;
                    frame.front_range[idx] = static_cast<float>(std::max(r, 0.01));
                    frame.front_valid[idx] = true;
                }
            }
            else if (in_range)
            {
                const int zone = 64 + (sensor - 1) * kTofGridSize + col;
                RandomStream rs(config.rng_seed, rng_tag::tof_noise,
                                frame_index * 256 + static_cast<uint64_t>(zone));
                const double r = hit.distance + rs.next_normal() * config.tof_noise_std;
                if (r > config.tof_max_range)
                    continue;
                frame.side_range[sensor - 1][col] = static_cast<float>(std::max(r, 0.01));
                frame.side_valid[sensor - 1][col] = true;
            }
        }
    }
    return frame;
}

std::vector<Detection> synthesize_detections(const SemanticGridMap& map, const Pose2D& gt_pose,
                                             const CameraIntrinsics& intrinsics,
                                             const SimConfig& config, uint64_t frame_index)
{
    if (!pose_in_free_space(map, gt_pose))
        throw std::invalid_argument("detection synthesis pose not in free space");

    std::vector<Detection> out;
    const double half_fov = 0.5 * intrinsics.horizontal_fov();
    const double trace_range = (map.width() + map.height()) * map.resolution();
    const double res = map.resolution();

    for (size_t obj = 0; obj < map.annotations().size(); ++obj)
    {
        const ResolvedAnnotation& ann = map.annotations()[obj];
        const WorldPoint center = {
            map.origin().x + 0.5 * (ann.x_min + ann.x_max) * res,
            map.origin().y + 0.5 * (ann.y_min + ann.y_max) * res};

        const double dx = center.x - gt_pose.x;
        const double dy = center.y - gt_pose.y;
        const double dist = std::hypot(dx, dy);
        if (dist < 1e-6)
            continue;
        const double bearing = wrap_angle(std::atan2(dy, dx) - gt_pose.theta);
        if (std::abs(bearing) >= half_fov)
            continue;

        const TraceResult trace =
            trace_semantic(map, gt_pose, bearing, ann.class_index, trace_range);
        if (trace.outcome != TraceOutcome::hit_class)
            continue;

        RandomStream rs(config.rng_seed, rng_tag::detection,
                        frame_index * 4096 + static_cast<uint64_t>(obj));
        if (rs.next_uniform() >= config.detect_prob)
            continue;

        const double u_center = bearing_to_pixel_u(intrinsics, bearing) +
                                rs.next_normal() * config.bbox_center_noise_std;
        const double v_center =
            intrinsics.cy + rs.next_normal() * config.bbox_center_noise_std;

        // Apparent size shrinks with distance.
        const double extent = 0.5 * ((ann.x_max - ann.x_min) + (ann.y_max - ann.y_min)) * res;
        const double half_u = std::max(2.0, intrinsics.fx * 0.5 * extent / dist);
        const double half_v = std::max(2.0, 0.75 * half_u);

        Detection det;
        det.class_index = ann.class_index;
        det.x_min = std::clamp(u_center - half_u, 0.0, intrinsics.image_width - 2.0);
        det.x_max = std::clamp(u_center + half_u, det.x_min + 1.0,
                               static_cast<double>(intrinsics.image_width));
        det.y_min = std::clamp(v_center - half_v, 0.0, intrinsics.image_height - 2.0);
        det.y_max = std::clamp(v_center + half_v, det.y_min + 1.0,
                               static_cast<double>(intrinsics.image_height));
        det.confidence = 0.4 + 0.6 * rs.next_uniform();
        out.push_back(det);
    }

    if (!map.class_table().empty())
    {
        RandomStream fp(config.rng_seed, rng_tag::false_positive, frame_index);
        if (fp.next_uniform() < config.false_positive_rate)
        {
            Detection det;
            det.class_index = static_cast<int>(fp.next_index(map.class_table().size()));
            const double u = 8.0 + fp.next_uniform() * (intrinsics.image_width - 16.0);
            const double v = 8.0 + fp.next_uniform() * (intrinsics.image_height - 16.0);
            const double half = 5.0 + fp.next_uniform() * 25.0;
            det.x_min = std::clamp(u - half, 0.0, intrinsics.image_width - 2.0);
            det.x_max = std::clamp(u + half, det.x_min + 1.0,
                                   static_cast<double>(intrinsics.image_width));
            det.y_min = std::clamp(v - half, 0.0, intrinsics.image_height - 2.0);
            det.y_max = std::clamp(v + half, det.y_min + 1.0,
                                   static_cast<double>(intrinsics.image_height));
            det.confidence = 0.4 + 0.6 * fp.next_uniform();
            out.push_back(det);
        }
    }
    return out;
}

std::vector<OdometryDelta> trajectory_deltas(std::span<const TimedPose> trajectory)
{
    std::vector<OdometryDelta> out;
    if (trajectory.size() < 2)
        return out;
    out.reserve(trajectory.size() - 1);
    for (size_t k = 1; k < trajectory.size(); ++k)
    {
        const Pose2D& prev = trajectory[k - 1].pose;
        const Pose2D& cur = trajectory[k].pose;
        const double wx = cur.x - prev.x;
        const double wy = cur.y - prev.y;
        const double c = std::cos(prev.theta);
        const double s = std::sin(prev.theta);
        OdometryDelta d;
        d.dx = c * wx + s * wy;
        d.dy = -s * wx + c * wy;
        d.dtheta = wrap_angle(cur.theta - prev.theta);
        d.timestamp = trajectory[k].t;
        out.push_back(d);
    }
    return out;
}

std::vector<OdometryDelta> corrupt_odometry(std::span<const OdometryDelta> gt_deltas,
                                            const SimConfig& config)
{
    std::vector<OdometryDelta> out;
    out.reserve(gt_deltas.size());
    for (size_t i = 0; i < gt_deltas.size(); ++i)
    {
        const OdometryDelta& d = gt_deltas[i];
        RandomStream rs(config.rng_seed, rng_tag::odom_noise, i);
        OdometryDelta noisy = d;
        noisy.dx += rs.next_normal() * config.odom_noise_std[0] * std::abs(d.dx);
        noisy.dy += rs.next_normal() * config.odom_noise_std[1] * std::abs(d.dy);
        noisy.dtheta += rs.next_normal() * config.odom_noise_std[2] * std::abs(d.dtheta);
        out.push_back(noisy);
    }
    return out;
}

SequenceRecord generate_sequence(const SemanticGridMap& map,
                                 const std::vector<WorldPoint>& waypoints,
                                 const SimConfig& config, double speed, double turn_rate)
{
    config.validate();

    SequenceRecord rec;
    rec.ground_truth = generate_trajectory(map, waypoints, speed, turn_rate, config.tof_rate);
    rec.odometry = corrupt_odometry(trajectory_deltas(rec.ground_truth), config);

    long last_det_tick = -1;
    long last_cp_tick = -1;
    for (size_t k = 0; k < rec.ground_truth.size(); ++k)
    {
        const TimedPose& gt = rec.ground_truth[k];
        rec.tof.push_back(synthesize_tof(map, gt.pose, config, k, gt.t));

        const long det_tick = static_cast<long>(std::floor(gt.t * config.detection_rate + 1e-9));
        if (det_tick > last_det_tick || k == 0)
        {
            last_det_tick = det_tick;
            rec.detections.push_back(
                {gt.t, synthesize_detections(map, gt.pose, config.camera, config, k)});
        }

        const long cp_tick = static_cast<long>(std::floor(gt.t * config.checkpoint_rate + 1e-9));
        if (cp_tick > last_cp_tick || k == 0 || k + 1 == rec.ground_truth.size())
        {
            last_cp_tick = cp_tick;
            rec.checkpoints.push_back(gt);
        }
    }
    return rec;
}

} // namespace smcl
