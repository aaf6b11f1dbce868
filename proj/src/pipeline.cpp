#include "smcl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smcl {

FilterMode parse_filter_mode(const std::string& name)
{
    if (name == "fusion")
        return FilterMode::fusion;
    if (name == "range_only")
        return FilterMode::range_only;
    throw std::invalid_argument("unknown mode '" + name + "' (expected fusion or range_only)");
}

namespace {

double now_ms()
{
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Accumulated motion since the last accepted update of one measurement kind.
struct MotionGate
{
    double trans = 0.0;
    double rot = 0.0;

    void accumulate(const OdometryDelta& d)
    {
        trans += std::hypot(d.dx, d.dy);
        rot += std::abs(d.dtheta);
    }
    bool open(const FilterConfig& cfg) const { return trans > cfg.d_xy || rot > cfg.d_theta; }
    void reset() { trans = 0.0, rot = 0.0; }
};

} // namespace

RunOutput run_sequence(const SemanticGridMap& map, const DistanceField& edt,
                       std::span<const SequenceEvent> events, const RunOptions& options)
{
    options.filter.validate();
    options.sensor.validate();

    CameraIntrinsics camera = options.camera;
    if (camera.image_width == 0)
        camera = default_camera();
    camera.validate();

    RunOutput out;
    ParticleFilter filter(map, options.filter);
    filter.set_workers(options.workers);
    filter.init_uniform();

    const BeamGeometry beams = BeamGeometry::from(options.sensor);
    const int n = options.filter.n_particles;
    std::vector<double> log_lik(n);

    MotionGate tof_gate, det_gate;
    std::optional<TofFrame> last_tof;
    std::vector<double> pending_snapshots = options.snapshot_times;
    std::sort(pending_snapshots.begin(), pending_snapshots.end());
    size_t next_snapshot = 0;

    const auto log_estimate = [&](double t) { out.estimates.push_back({t, filter.estimate_pose()}); };

    for (const SequenceEvent& ev : events)
    {
        while (next_snapshot < pending_snapshots.size() &&
               ev.t >= pending_snapshots[next_snapshot])
        {
            out.snapshots.push_back({ev.t, filter.particles()});
            ++next_snapshot;
        }

        if (const auto* gt = std::get_if<GroundTruthEvent>(&ev.payload))
        {
            if (gt->checkpoint)
                out.checkpoints.push_back({ev.t, gt->pose});
            continue;
        }

        if (const auto* odom = std::get_if<OdometryDelta>(&ev.payload))
        {
            const double t0 = now_ms();
            filter.motion_update(*odom);
            out.perf.motion.add(now_ms() - t0);
            tof_gate.accumulate(*odom);
            det_gate.accumulate(*odom);
            log_estimate(ev.t);
            continue;
        }

        if (const auto* tof = std::get_if<TofFrame>(&ev.payload))
        {
            last_tof = *tof;
            if (!tof_gate.open(options.filter))
                continue;
            // Not enough valid beams: skip the frame without consuming the
            // gate.
            if (tof->count_valid_beams(options.sensor.tof_valid_range) <
                options.sensor.min_valid_beams)
                continue;

            const double t0 = now_ms();
            evaluate_parallel(
                n, options.workers,
                [&](int i) {
                    const auto l = beam_end_log_likelihood(filter.particles()[i].pose(), *tof,
                                                           edt, options.sensor, beams);
                    return *l; // beam count already checked frame-wide
                },
                log_lik);
            if (filter.measurement_update(log_lik) == UpdateStatus::degenerate)
                ++out.degenerate_updates;
            filter.resample();
            out.perf.beam_update.add(now_ms() - t0);

            tof_gate.reset();
            log_estimate(ev.t);
            continue;
        }

        if (const auto* det = std::get_if<DetectionEvent>(&ev.payload))
        {
            if (options.mode != FilterMode::fusion)
                continue;
            if (!det_gate.open(options.filter))
                continue;

            // Resolve classes; unknown names are schema violations.
            std::vector<Detection> usable;
            for (const auto& d : det->detections)
            {
                const int idx = map.class_index(d.class_name);
                if (idx < 0)
                    throw std::runtime_error("sequence detection class '" + d.class_name +
                                             "' not in map class table");
                if (d.confidence < options.detection_min_confidence)
                    continue;
                usable.push_back({idx, d.x_min, d.y_min, d.x_max, d.y_max, d.confidence});
            }
            if (usable.empty())
                continue;

            // Association needs the co-timestamped front grid; the generator
            // guarantees one, replay keeps the last seen frame.
            const TofFrame frame = last_tof.value_or(TofFrame{});

            const double t0 = now_ms();
            const double log_miss = std::log(options.sensor.miss_penalty);
            evaluate_parallel(
                n, options.workers,
                [&](int i) {
                    const Pose2D pose = filter.particles()[i].pose();
                    // particles that drifted off the map see nothing
                    if (map.cell_at(pose.position()) == kOutOfBounds)
                        return log_miss * static_cast<double>(usable.size());
                    double sum = 0.0;
                    for (const Detection& d : usable)
                        sum += semantic_log_likelihood(pose, d, frame, map, camera,
                                                       options.sensor);
                    return sum;
                },
                log_lik);
            if (filter.measurement_update(log_lik) == UpdateStatus::degenerate)
                ++out.degenerate_updates;
            filter.resample();
            out.perf.semantic_update.add(now_ms() - t0);

            det_gate.reset();
            log_estimate(ev.t);
            continue;
        }
    }

    if (!out.checkpoints.empty() && !out.estimates.empty())
        out.result = evaluate_run(out.estimates, out.checkpoints);
    return out;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path.string());

    ConfigFile cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty())
            continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": empty key");
        cfg.values[key] = value;
    }
    return cfg;
}

namespace {

double to_double(const std::string& key, const std::string& value)
{
    try
    {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    }
    catch (const std::exception&)
    {
        throw std::runtime_error("config key '" + key + "' has non-numeric value '" + value + "'");
    }
}

} // namespace

void apply_config(const ConfigFile& config, FilterConfig& filter, SensorModelParams& sensor,
                  SimConfig& sim)
{
    for (const auto& [key, value] : config.values)
    {
        if (key == "n_particles")
            filter.n_particles = static_cast<int>(to_double(key, value));
        else if (key == "sigma_odom_x")
            filter.sigma_odom[0] = to_double(key, value);
        else if (key == "sigma_odom_y")
            filter.sigma_odom[1] = to_double(key, value);
        else if (key == "sigma_odom_theta")
            filter.sigma_odom[2] = to_double(key, value);
        else if (key == "d_xy")
            filter.d_xy = to_double(key, value);
        else if (key == "d_theta")
            filter.d_theta = to_double(key, value);
        else if (key == "rng_seed")
            filter.rng_seed = static_cast<uint64_t>(to_double(key, value));
        else if (key == "noise_floor_xy")
        {
            filter.noise_floor[0] = to_double(key, value);
            filter.noise_floor[1] = filter.noise_floor[0];
        }
        else if (key == "noise_floor_theta")
            filter.noise_floor[2] = to_double(key, value);
        else if (key == "uniform_reinject_fraction")
            filter.uniform_reinject_fraction = to_double(key, value);
        else if (key == "sigma_g")
            sensor.sigma_g = to_double(key, value);
        else if (key == "sigma_s")
            sensor.sigma_s = to_double(key, value);
        else if (key == "tau_t")
            sensor.tau_t = to_double(key, value);
        else if (key == "r_max")
            sensor.r_max = to_double(key, value);
        else if (key == "tof_valid_range")
            sensor.tof_valid_range = to_double(key, value);
        else if (key == "min_valid_beams")
            sensor.min_valid_beams = static_cast<int>(to_double(key, value));
        else if (key == "miss_penalty")
            sensor.miss_penalty = to_double(key, value);
        else if (key == "tof_fov_deg")
        {
            sensor.tof_fov_horizontal = to_double(key, value) * kPi / 180.0;
            sensor.tof_fov_vertical = sensor.tof_fov_horizontal;
        }
        else if (key == "tof_rate")
            sim.tof_rate = to_double(key, value);
        else if (key == "detection_rate")
            sim.detection_rate = to_double(key, value);
        else if (key == "checkpoint_rate")
            sim.checkpoint_rate = to_double(key, value);
        else if (key == "tof_noise_std")
            sim.tof_noise_std = to_double(key, value);
        else if (key == "tof_max_range")
            sim.tof_max_range = to_double(key, value);
        else if (key == "odom_noise_std_xy")
        {
            sim.odom_noise_std[0] = to_double(key, value);
            sim.odom_noise_std[1] = sim.odom_noise_std[0];
        }
        else if (key == "odom_noise_std_theta")
            sim.odom_noise_std[2] = to_double(key, value);
        else if (key == "detect_prob")
            sim.detect_prob = to_double(key, value);
        else if (key == "false_positive_rate")
            sim.false_positive_rate = to_double(key, value);
        else if (key == "bbox_center_noise_std")
            sim.bbox_center_noise_std = to_double(key, value);
        else
            throw std::runtime_error("unknown config key '" + key + "'");
    }
}

} // namespace smcl
