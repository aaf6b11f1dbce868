#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "smcl/simulator.hpp"

namespace smcl {

// Ground-truth sample; checkpoint marks the sparse subset evaluation uses.
struct GroundTruthEvent
{
    Pose2D pose;
    bool checkpoint = false;
};

struct DetectionEvent
{
    // Classes travel by name so a sequence stays readable without the map.
    struct Entry
    {
        std::string class_name;
        double x_min, y_min, x_max, y_max;
        double confidence;
    };
    std::vector<Entry> detections;
};

struct SequenceEvent
{
    double t = 0.0;
    std::variant<GroundTruthEvent, OdometryDelta, TofFrame, DetectionEvent> payload;
};

// Flattens a record into a single timestamp-ordered stream. Events sharing a
// timestamp keep the order gt, odom, tof, det.
std::vector<SequenceEvent> to_events(const SequenceRecord& record,
                                     const SemanticGridMap& map);

// Line-delimited JSON, one tagged object per event (schema in
// docs/file_formats.md). Bit-exact across runs for identical inputs.
void write_sequence(const std::filesystem::path& path,
                    std::span<const SequenceEvent> events,
                    const SimConfig& config);

std::vector<SequenceEvent> read_sequence(const std::filesystem::path& path);

// Convenience extraction of the checkpoint poses from an event stream.
std::vector<TimedPose> checkpoints_of(std::span<const SequenceEvent> events);

// Waypoint tour: {"speed": m/s, "turn_rate": rad/s, "waypoints": [[x, y]...]}.
struct WaypointFile
{
    double speed = 0.5;
    double turn_rate = 1.2;
    std::vector<WorldPoint> waypoints;
};

WaypointFile read_waypoints(const std::filesystem::path& path);

// Timestamped pose CSV ("t,x,y,theta"), used for estimate files.
void write_pose_csv(const std::filesystem::path& path, std::span<const TimedPose> poses);
std::vector<TimedPose> read_pose_csv(const std::filesystem::path& path);

// Particle snapshot CSV ("x,y,theta,weight").
void write_particles_csv(const std::filesystem::path& path, std::span<const Particle> particles);
std::vector<Particle> read_particles_csv(const std::filesystem::path& path);

} // namespace smcl
