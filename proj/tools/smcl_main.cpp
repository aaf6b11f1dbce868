// smcl - semantic Monte Carlo localization on floor plans.
//
// Subcommands:
//   generate   synthesize a sensor sequence along a waypoint tour
//   run        localize against a map over one or more sequences
//   eval       score estimate files against ground-truth checkpoints
//   render     draw maps, particle sets and trajectories to PNG

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smcl/pipeline.hpp"
#include "smcl/render.hpp"

namespace fs = std::filesystem;
using namespace smcl;

namespace {

struct CommonConfig
{
    std::string config_path;
    FilterConfig filter;
    SensorModelParams sensor;
    SimConfig sim;

    void load()
    {
        if (!config_path.empty())
            apply_config(ConfigFile::load(config_path), filter, sensor, sim);
    }
};

int cmd_generate(const std::string& map_path, const std::string& ann_path,
                 const std::string& waypoint_path, const std::string& output,
                 CommonConfig& cfg, uint64_t seed)
{
    cfg.load();
    cfg.sim.rng_seed = seed;

    const SemanticGridMap map = load_map(map_path, ann_path);
    const WaypointFile tour = read_waypoints(waypoint_path);

    const SequenceRecord rec =
        generate_sequence(map, tour.waypoints, cfg.sim, tour.speed, tour.turn_rate);
    const auto events = to_events(rec, map);
    write_sequence(output, events, cfg.sim);

    std::printf("wrote %s: %.1f s, %zu odom, %zu tof, %zu detection frames, %zu checkpoints\n",
                output.c_str(), rec.ground_truth.back().t, rec.odometry.size(), rec.tof.size(),
                rec.detections.size(), rec.checkpoints.size());
    return 0;
}

int cmd_run(const std::string& map_path, const std::string& ann_path,
            const std::vector<std::string>& sequences, const std::string& mode_name,
            const std::string& output_dir, CommonConfig& cfg, int workers,
            const std::vector<double>& snapshot_times, uint64_t seed, bool seed_set)
{
    cfg.load();
    if (seed_set)
        cfg.filter.rng_seed = seed;

    const SemanticGridMap map = load_map(map_path, ann_path);
    const DistanceField edt = compute_edt(map, cfg.sensor.r_max);

    RunOptions options;
    options.filter = cfg.filter;
    options.sensor = cfg.sensor;
    options.mode = parse_filter_mode(mode_name);
    options.workers = workers;
    options.snapshot_times = snapshot_times;
    options.camera = cfg.sim.camera;

    fs::create_directories(output_dir);

    std::vector<std::string> ids;
    std::vector<RunResult> results;
    for (const std::string& seq_path : sequences)
    {
        const auto events = read_sequence(seq_path);
        const RunOutput out = run_sequence(map, edt, events, options);

        const std::string stem = fs::path(seq_path).stem().string();
        const fs::path est_path = fs::path(output_dir) / (stem + "_estimates.csv");
        write_pose_csv(est_path, out.estimates);

        for (const auto& snap : out.snapshots)
        {
            char name[160];
            std::snprintf(name, sizeof(name), "%s_particles_t%.1f.csv", stem.c_str(), snap.t);
            write_particles_csv(fs::path(output_dir) / name, snap.particles);
        }

        ids.push_back(stem);
        results.push_back(out.result);

        std::printf("%s [%s]: ", stem.c_str(), mode_name.c_str());
        if (out.result.success)
            std::printf("converged at %.1f s, ATE %.3f m", *out.result.convergence_time,
                        *out.result.ate_after_convergence);
        else
            std::printf("did not converge");
        std::printf(" | updates: %d beam (avg %.2f ms), %d semantic (avg %.2f ms), %d motion\n",
                    out.perf.beam_update.count, out.perf.beam_update.mean_ms(),
                    out.perf.semantic_update.count, out.perf.semantic_update.mean_ms(),
                    out.perf.motion.count);
    }

    if (results.size() > 1)
    {
        const Summary s = aggregate(results);
        std::printf("summary: %d/%d converged", s.successes, s.runs);
        if (s.mean_ate)
            std::printf(", mean ATE %.3f m, mean convergence %.1f s", *s.mean_ate,
                        *s.mean_convergence_time);
        std::printf("\n");
    }
    write_results_csv(fs::path(output_dir) / "results.csv", ids, results);
    return 0;
}

int cmd_eval(const std::vector<std::string>& pairs, const std::string& output)
{
    std::vector<std::string> ids;
    std::vector<RunResult> results;
    for (const std::string& pair : pairs)
    {
        const size_t colon = pair.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("expected ESTIMATES:SEQUENCE, got '" + pair + "'");
        const std::string est_path = pair.substr(0, colon);
        const std::string seq_path = pair.substr(colon + 1);

        const auto estimates = read_pose_csv(est_path);
        const auto checkpoints = checkpoints_of(read_sequence(seq_path));
        results.push_back(evaluate_run(estimates, checkpoints));
        ids.push_back(fs::path(est_path).stem().string());

        const RunResult& r = results.back();
        if (r.success)
            std::printf("%s: success, convergence %.1f s, ATE %.3f m\n", ids.back().c_str(),
                        *r.convergence_time, *r.ate_after_convergence);
        else
            std::printf("%s: failure\n", ids.back().c_str());
    }

    const Summary s = aggregate(results);
    std::printf("summary: success rate %.0f%% (%d/%d)", 100.0 * s.success_rate, s.successes,
                s.runs);
    if (s.mean_ate)
        std::printf(", mean ATE %.3f m, mean convergence %.1f s", *s.mean_ate,
                    *s.mean_convergence_time);
    std::printf("\n");

    if (!output.empty())
        write_results_csv(output, ids, results);
    return 0;
}

int cmd_render(const std::string& map_path, const std::string& ann_path,
               const std::string& output, const std::string& particles_path,
               const std::string& trajectory_path, const std::string& sequence_path, int scale)
{
    const SemanticGridMap map = load_map(map_path, ann_path);

    RenderOptions options;
    options.scale = scale;
    RgbImage img = render_map(map, options);

    if (!particles_path.empty())
        draw_particles(img, map, read_particles_csv(particles_path), options);
    if (!trajectory_path.empty())
        draw_trajectory(img, map, read_pose_csv(trajectory_path), options);
    if (!sequence_path.empty())
        draw_ground_truth(img, map, checkpoints_of(read_sequence(sequence_path)), options);

    write_png(output, img);
    std::printf("wrote %s (%dx%d)\n", output.c_str(), img.width, img.height);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"semantic Monte Carlo localization on floor-plan maps"};
    app.require_subcommand(1);

    CommonConfig cfg;

    auto* gen = app.add_subcommand("generate", "synthesize a sensor sequence");
    std::string gen_map, gen_ann, gen_wps, gen_out;
    uint64_t gen_seed = 1;
    gen->add_option("--map", gen_map, "map image (PGM or PNG)")->required();
    gen->add_option("--annotations", gen_ann, "annotation JSON sidecar")->required();
    gen->add_option("--waypoints", gen_wps, "waypoint tour JSON")->required();
    gen->add_option("--output", gen_out, "output sequence file")->required();
    gen->add_option("--seed", gen_seed, "simulation seed");
    gen->add_option("--config", cfg.config_path, "key=value config file");

    auto* run = app.add_subcommand("run", "run the localization filter");
    std::string run_map, run_ann, run_mode = "fusion", run_out = "runs";
    std::vector<std::string> run_seqs;
    std::vector<double> run_snapshots;
    uint64_t run_seed = 0;
    int run_workers = 1;
    run->add_option("--map", run_map, "map image (PGM or PNG)")->required();
    run->add_option("--annotations", run_ann, "annotation JSON sidecar")->required();
    run->add_option("--sequence", run_seqs, "sequence file (repeatable)")->required();
    run->add_option("--mode", run_mode, "fusion or range_only");
    run->add_option("--output-dir", run_out, "estimate output directory");
    run->add_option("--config", cfg.config_path, "key=value config file");
    run->add_option("--workers", run_workers, "likelihood worker threads");
    run->add_option("--snapshot-time", run_snapshots, "particle snapshot time (repeatable)");
    auto* seed_opt = run->add_option("--seed", run_seed, "filter seed");

    auto* ev = app.add_subcommand("eval", "evaluate estimate files");
    std::vector<std::string> ev_pairs;
    std::string ev_out;
    ev->add_option("pairs", ev_pairs, "ESTIMATES.csv:SEQUENCE.ndjson")->required();
    ev->add_option("--output", ev_out, "results CSV path");

    auto* ren = app.add_subcommand("render", "render map overlays to PNG");
    std::string ren_map, ren_ann, ren_out, ren_particles, ren_traj, ren_seq;
    int ren_scale = 2;
    ren->add_option("--map", ren_map, "map image (PGM or PNG)")->required();
    ren->add_option("--annotations", ren_ann, "annotation JSON sidecar")->required();
    ren->add_option("--output", ren_out, "output PNG path")->required();
    ren->add_option("--particles", ren_particles, "particle snapshot CSV");
    ren->add_option("--trajectory", ren_traj, "pose CSV to draw as a time-colored path");
    ren->add_option("--sequence", ren_seq, "sequence file for ground-truth stars");
    ren->add_option("--scale", ren_scale, "pixels per map cell");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (gen->parsed())
            return cmd_generate(gen_map, gen_ann, gen_wps, gen_out, cfg, gen_seed);
        if (run->parsed())
            return cmd_run(run_map, run_ann, run_seqs, run_mode, run_out, cfg, run_workers,
                           run_snapshots, run_seed, seed_opt->count() > 0);
        if (ev->parsed())
            return cmd_eval(ev_pairs, ev_out);
        if (ren->parsed())
            return cmd_render(ren_map, ren_ann, ren_out, ren_particles, ren_traj, ren_seq,
                              ren_scale);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
