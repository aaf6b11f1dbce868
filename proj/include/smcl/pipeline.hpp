#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "smcl/evaluation.hpp"
#include "smcl/sequence_io.hpp"

namespace smcl {

enum class FilterMode
{
    fusion,     // beam end model + semantic detections
    range_only, // ToF-only baseline
};

FilterMode parse_filter_mode(const std::string& name); // "fusion" | "range_only"

struct RunOptions
{
    FilterConfig filter;
    SensorModelParams sensor;
    FilterMode mode = FilterMode::fusion;
    int workers = 1;
    double detection_min_confidence = 0.2;
    CameraIntrinsics camera; // zeroed -> default_camera()
    std::vector<double> snapshot_times;
};

struct UpdateTiming
{
    int count = 0;
    double total_ms = 0.0;
    double max_ms = 0.0;

    void add(double ms)
    {
        ++count;
        total_ms += ms;
        if (ms > max_ms)
            max_ms = ms;
    }
    double mean_ms() const { return count ? total_ms / count : 0.0; }
};

struct PerfStats
{
    UpdateTiming motion;
    UpdateTiming beam_update;     // likelihoods + reweight + resample
    UpdateTiming semantic_update; // likelihoods + reweight + resample
};

struct ParticleSnapshot
{
    double t = 0.0;
    std::vector<Particle> particles;
};

struct RunOutput
{
    std::vector<TimedPose> estimates;
    std::vector<TimedPose> checkpoints;
    RunResult result;
    std::vector<ParticleSnapshot> snapshots;
    PerfStats perf;
    int degenerate_updates = 0;
};

// Replays an event stream in timestamp order: odometry drives motion
// updates; ToF frames and detection frames trigger gated measurement
// updates followed by a resample. Each measurement kind fires only after
// d_xy / d_theta of accumulated motion since its previous update.
// Deterministic for a fixed seed, independent of worker count.
RunOutput run_sequence(const SemanticGridMap& map, const DistanceField& edt,
                       std::span<const SequenceEvent> events, const RunOptions& options);

// Key-value config file ("key = value", '#' comments). Unknown keys throw.
struct ConfigFile
{
    std::map<std::string, std::string> values;

    static ConfigFile load(const std::filesystem::path& path);
    bool has(const std::string& key) const { return values.count(key) > 0; }
};

// Applies config keys onto the defaults (which match the filter's standard
// parameter set). Key list documented in docs/file_formats.md.
void apply_config(const ConfigFile& config, FilterConfig& filter, SensorModelParams& sensor,
                  SimConfig& sim);

} // namespace smcl
