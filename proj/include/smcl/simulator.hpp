#pragma once

#include <cstdint>
#include <vector>

#include "smcl/particle_filter.hpp"
#include "smcl/sensor_model.hpp"

namespace smcl {

// Camera matching the inference resolution used by the filter defaults:
// 256x192 pixels, 65 degree horizontal field of view, principal point at the
// image center.
CameraIntrinsics default_camera();

struct SimConfig
{
    double tof_rate = 15.0;       // Hz
    double detection_rate = 2.0;  // Hz
    double checkpoint_rate = 1.0; // Hz, sparse ground-truth fixes
    double tof_noise_std = 0.02;  // meters
    double tof_max_range = 3.0;   // meters
    std::array<double, 3> odom_noise_std = {0.05, 0.05, 0.02}; // per unit motion
    double detect_prob = 0.9;
    double false_positive_rate = 0.02; // per detection frame
    double bbox_center_noise_std = 3.0; // pixels
    uint64_t rng_seed = 1;
    CameraIntrinsics camera = default_camera();

    void validate() const; // throws std::invalid_argument
};

struct TimedPose
{
    double t = 0.0;
    Pose2D pose;
};

struct TimedDetections
{
    double t = 0.0;
    std::vector<Detection> detections;
};

struct SequenceRecord
{
    std::vector<TimedPose> ground_truth;   // full rate
    std::vector<TimedPose> checkpoints;    // sparse subset used for evaluation
    std::vector<OdometryDelta> odometry;
    std::vector<TofFrame> tof;
    std::vector<TimedDetections> detections;
};

// Piecewise turn-then-drive trajectory through the waypoints, sampled at
// sample_rate. The initial heading points at the first segment. Throws when
// a waypoint is not in free space or a segment crosses a wall.
std::vector<TimedPose> generate_trajectory(const SemanticGridMap& map,
                                           const std::vector<WorldPoint>& waypoints,
                                           double speed, double turn_rate,
                                           double sample_rate);

// Per-zone ray cast plus additive Gaussian noise; ranges beyond
// tof_max_range (or noised past it) are marked invalid. frame_index keys the
// noise streams. Throws when the pose is not in free space.
TofFrame synthesize_tof(const SemanticGridMap& map, const Pose2D& gt_pose,
                        const SimConfig& config, uint64_t frame_index,
                        double timestamp = 0.0);

// Emits a detection (probability detect_prob) for every annotated object
// whose center is inside the camera field of view and reachable by an
// unblocked semantic trace; bounding-box centers get Gaussian pixel noise,
// extents shrink with distance. False positives carry a random class and
// position.
std::vector<Detection> synthesize_detections(const SemanticGridMap& map,
                                             const Pose2D& gt_pose,
                                             const CameraIntrinsics& intrinsics,
                                             const SimConfig& config, uint64_t frame_index);

// Perturbs ground-truth deltas with zero-mean Gaussian noise scaled by the
// motion magnitude (zero motion stays exact).
std::vector<OdometryDelta> corrupt_odometry(std::span<const OdometryDelta> gt_deltas,
                                            const SimConfig& config);

// Body-frame deltas between consecutive trajectory samples.
std::vector<OdometryDelta> trajectory_deltas(std::span<const TimedPose> trajectory);

// Full synthetic recording along a waypoint tour. Deterministic per seed;
// every detection frame shares its timestamp with a ToF frame.
SequenceRecord generate_sequence(const SemanticGridMap& map,
                                 const std::vector<WorldPoint>& waypoints,
                                 const SimConfig& config, double speed, double turn_rate);

} // namespace smcl
