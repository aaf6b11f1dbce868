#include <doctest.h>

#include <cmath>
#include <fstream>

#include "smcl/pipeline.hpp"

using namespace smcl;

namespace {

const std::filesystem::path tmp_dir = SMCL_TEST_TMP_DIR;

// Small two-room world with semantics, cheap enough for pipeline tests.
SemanticGridMap small_world()
{
    SemanticGridMap map(160, 100, 0.05, {0.0, 0.0}, {"sofa", "door", "fridge"});
    for (int x = 0; x < 160; ++x)
    {
        map.set_occupancy(x, 0, Occupancy::occupied);
        map.set_occupancy(x, 99, Occupancy::occupied);
    }
    for (int y = 0; y < 100; ++y)
    {
        map.set_occupancy(0, y, Occupancy::occupied);
        map.set_occupancy(159, y, Occupancy::occupied);
    }
    // dividing wall with a doorway
    for (int y = 0; y < 100; ++y)
        if (y < 40 || y >= 60)
            map.set_occupancy(80, y, Occupancy::occupied);

    map.add_annotation({"sofa", 10, 80, 30, 95});
    map.add_annotation({"door", 78, 40, 83, 60});
    map.add_annotation({"fridge", 140, 10, 155, 30});
    return map;
}

SequenceRecord small_sequence(const SemanticGridMap& map, uint64_t seed)
{
    SimConfig cfg;
    cfg.rng_seed = seed;
    // through the doorway at x ~ 4.0, y in [2.0, 3.0]
    const std::vector<WorldPoint> wps = {{1.0, 1.5}, {3.0, 1.5}, {3.0, 2.5}, {6.5, 2.5}};
    return generate_sequence(map, wps, cfg, 0.5, 1.2);
}

} // namespace

TEST_CASE("sequence file round-trips and is byte-stable")
{
    const SemanticGridMap map = small_world();
    const SequenceRecord rec = small_sequence(map, 3);
    const auto events = to_events(rec, map);

    const auto p1 = tmp_dir / "seq_a.ndjson";
    const auto p2 = tmp_dir / "seq_b.ndjson";
    SimConfig cfg;
    cfg.rng_seed = 3;
    write_sequence(p1, events, cfg);
    write_sequence(p2, events, cfg);

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
    CHECK(!s1.empty());

    const auto back = read_sequence(p1);
    REQUIRE(back.size() == events.size());
    for (size_t i = 0; i < events.size(); ++i)
    {
        CHECK(back[i].t == events[i].t);
        CHECK(back[i].payload.index() == events[i].payload.index());
    }

    // spot-check one ToF frame payload survives exactly
    for (size_t i = 0; i < events.size(); ++i)
    {
        if (const auto* tof = std::get_if<TofFrame>(&events[i].payload))
        {
            const auto* rt = std::get_if<TofFrame>(&back[i].payload);
            REQUIRE(rt != nullptr);
            for (int z = 0; z < 64; ++z)
            {
                CHECK(rt->front_valid[z] == tof->front_valid[z]);
                if (tof->front_valid[z])
                    CHECK(rt->front_range[z] == tof->front_range[z]);
            }
            break;
        }
    }

    const auto cps = checkpoints_of(back);
    CHECK(cps.size() == rec.checkpoints.size());
}

TEST_CASE("events keep timestamp order with gt, odom, tof, det ties")
{
    const SemanticGridMap map = small_world();
    const auto events = to_events(small_sequence(map, 5), map);
    for (size_t i = 1; i < events.size(); ++i)
    {
        CHECK(events[i].t >= events[i - 1].t);
        if (events[i].t == events[i - 1].t)
            CHECK(events[i].payload.index() >= events[i - 1].payload.index());
    }
}

TEST_CASE("malformed sequence files are schema violations")
{
    const auto path = tmp_dir / "broken.ndjson";
    {
        std::ofstream out(path);
        out << R"({"t": 0.0, "type": "odom", "dx": 0.1})" << "\n"; // missing fields
    }
    CHECK_THROWS(read_sequence(path));
    {
        std::ofstream out(path);
        out << R"({"t": 0.0, "type": "warp", "x": 1})" << "\n";
    }
    CHECK_THROWS(read_sequence(path));
    {
        std::ofstream out(path);
        out << "not json at all\n";
    }
    CHECK_THROWS(read_sequence(path));
    CHECK_THROWS(read_sequence(tmp_dir / "does_not_exist.ndjson"));
}

TEST_CASE("pose and particle CSV round-trips")
{
    const auto pose_path = tmp_dir / "poses.csv";
    std::vector<TimedPose> poses = {{0.5, Pose2D{1.25, -2.5, 0.75}},
                                    {1.0, Pose2D{2.0, 3.0, -1.5}}};
    write_pose_csv(pose_path, poses);
    const auto back = read_pose_csv(pose_path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].t == doctest::Approx(0.5));
    CHECK(back[1].pose.y == doctest::Approx(3.0));

    const auto part_path = tmp_dir / "particles.csv";
    std::vector<Particle> particles = {{1.0f, 2.0f, 0.5f, 0.25f}, {-1.0f, 0.0f, -0.5f, 0.75f}};
    write_particles_csv(part_path, particles);
    const auto pb = read_particles_csv(part_path);
    REQUIRE(pb.size() == 2);
    CHECK(pb[1].weight == doctest::Approx(0.75f));
}

TEST_CASE("defaults carry the standard parameter set")
{
    const FilterConfig f;
    CHECK(f.n_particles == 4096);
    CHECK(f.sigma_odom[0] == 0.5);
    CHECK(f.sigma_odom[1] == 0.5);
    CHECK(f.sigma_odom[2] == 0.5);
    CHECK(f.d_xy == 0.05);
    CHECK(f.d_theta == 0.05);

    const SensorModelParams s;
    CHECK(s.sigma_g == 8.0);
    CHECK(s.sigma_s == 10.0);
    CHECK(s.tau_t == 2.5);
    CHECK(s.r_max == 2.0);
    CHECK(s.tof_valid_range == 3.0);
}

TEST_CASE("config files override defaults and reject unknown keys")
{
    const auto path = tmp_dir / "run.cfg";
    {
        std::ofstream out(path);
        out << "# demo config\n"
            << "n_particles = 1024\n"
            << "sigma_g = 4.0\n"
            << "detect_prob = 0.8\n"
            << "d_xy = 0.1   # gate\n";
    }
    const ConfigFile cfg = ConfigFile::load(path);
    FilterConfig f;
    SensorModelParams s;
    SimConfig sim;
    apply_config(cfg, f, s, sim);
    CHECK(f.n_particles == 1024);
    CHECK(f.d_xy == doctest::Approx(0.1));
    CHECK(s.sigma_g == doctest::Approx(4.0));
    CHECK(sim.detect_prob == doctest::Approx(0.8));

    {
        std::ofstream out(path);
        out << "not_a_key = 5\n";
    }
    FilterConfig f2;
    SensorModelParams s2;
    SimConfig sim2;
    CHECK_THROWS(apply_config(ConfigFile::load(path), f2, s2, sim2));

    {
        std::ofstream out(path);
        out << "n_particles fine\n";
    }
    CHECK_THROWS(ConfigFile::load(path));
}

TEST_CASE("run_sequence is deterministic across runs and worker counts")
{
    const SemanticGridMap map = small_world();
    const DistanceField edt = compute_edt(map, 2.0);
    const auto events = to_events(small_sequence(map, 11), map);

    RunOptions opt;
    opt.filter.n_particles = 512;
    opt.filter.rng_seed = 2;

    const RunOutput a = run_sequence(map, edt, events, opt);
    const RunOutput b = run_sequence(map, edt, events, opt);
    opt.workers = 2;
    const RunOutput c = run_sequence(map, edt, events, opt);

    REQUIRE(a.estimates.size() == b.estimates.size());
    REQUIRE(a.estimates.size() == c.estimates.size());
    for (size_t i = 0; i < a.estimates.size(); ++i)
    {
        CHECK(a.estimates[i].pose.x == b.estimates[i].pose.x);
        CHECK(a.estimates[i].pose.x == c.estimates[i].pose.x);
        CHECK(a.estimates[i].pose.theta == c.estimates[i].pose.theta);
    }
    CHECK(a.perf.beam_update.count == c.perf.beam_update.count);
}

TEST_CASE("measurement updates honor the motion gate")
{
    const SemanticGridMap map = small_world();
    const DistanceField edt = compute_edt(map, 2.0);

    // stationary stream: ToF frames with no odometry motion
    SimConfig cfg;
    std::vector<SequenceEvent> events;
    const Pose2D pose{1.0, 1.5, 0.0};
    for (int k = 0; k < 30; ++k)
    {
        const double t = k / 15.0;
        events.push_back({t, OdometryDelta{0.0, 0.0, 0.0, t}});
        events.push_back({t, synthesize_tof(map, pose, cfg, k, t)});
    }

    RunOptions opt;
    opt.filter.n_particles = 128;
    const RunOutput out = run_sequence(map, edt, events, opt);
    CHECK(out.perf.beam_update.count == 0);
    CHECK(out.perf.motion.count == 30);

    // moving stream passes the gate
    const auto moving = to_events(small_sequence(map, 13), map);
    const RunOutput out2 = run_sequence(map, edt, moving, opt);
    CHECK(out2.perf.beam_update.count > 0);
}

TEST_CASE("range_only mode never runs semantic updates")
{
    const SemanticGridMap map = small_world();
    const DistanceField edt = compute_edt(map, 2.0);
    const auto events = to_events(small_sequence(map, 17), map);

    RunOptions opt;
    opt.filter.n_particles = 256;
    opt.mode = FilterMode::range_only;
    const RunOutput out = run_sequence(map, edt, events, opt);
    CHECK(out.perf.semantic_update.count == 0);

    opt.mode = FilterMode::fusion;
    const RunOutput out2 = run_sequence(map, edt, events, opt);
    CHECK(out2.perf.semantic_update.count > 0);
}

TEST_CASE("unknown detection classes in a sequence are rejected")
{
    const SemanticGridMap map = small_world();
    const DistanceField edt = compute_edt(map, 2.0);

    std::vector<SequenceEvent> events;
    events.push_back({0.0, OdometryDelta{0.2, 0.0, 0.0, 0.0}});
    DetectionEvent det;
    det.detections.push_back({"martian", 10, 10, 50, 50, 0.9});
    events.push_back({0.1, det});

    RunOptions opt;
    opt.filter.n_particles = 64;
    CHECK_THROWS(run_sequence(map, edt, events, opt));
}

TEST_CASE("snapshots capture the particle set at requested times")
{
    const SemanticGridMap map = small_world();
    const DistanceField edt = compute_edt(map, 2.0);
    const auto events = to_events(small_sequence(map, 19), map);

    RunOptions opt;
    opt.filter.n_particles = 128;
    opt.snapshot_times = {2.0, 5.0};
    const RunOutput out = run_sequence(map, edt, events, opt);
    REQUIRE(out.snapshots.size() == 2);
    CHECK(out.snapshots[0].t >= 2.0);
    CHECK(out.snapshots[1].t >= 5.0);
    CHECK(out.snapshots[0].particles.size() == 128);
}

TEST_CASE("filter closes in on ground truth in a small world")
{
    const SemanticGridMap map = small_world();
    const DistanceField edt = compute_edt(map, 2.0);
    const SequenceRecord rec = small_sequence(map, 23);
    const auto events = to_events(rec, map);

    RunOptions opt;
    opt.filter.n_particles = 2048;
    opt.filter.rng_seed = 23;

    const RunOutput out = run_sequence(map, edt, events, opt);
    REQUIRE(!out.estimates.empty());
    REQUIRE(!out.checkpoints.empty());

    const Pose2D final_est = out.estimates.back().pose;
    const Pose2D final_gt = rec.ground_truth.back().pose;
    CHECK(std::hypot(final_est.x - final_gt.x, final_est.y - final_gt.y) < 1.0);
}

TEST_CASE("empty and malformed waypoint files are rejected")
{
    const auto path = tmp_dir / "wps.json";
    {
        std::ofstream out(path);
        out << R"({"speed": 0.5, "turn_rate": 1.2, "waypoints": []})";
    }
    CHECK_THROWS(read_waypoints(path));
    {
        std::ofstream out(path);
        out << "gibberish";
    }
    CHECK_THROWS(read_waypoints(path));
    CHECK_THROWS(read_waypoints(tmp_dir / "missing_wps.json"));

    {
        std::ofstream out(path);
        out << R"({"waypoints": [[1.0, 2.0], [3.0, 4.0]]})";
    }
    const WaypointFile wf = read_waypoints(path);
    REQUIRE(wf.waypoints.size() == 2);
    CHECK(wf.waypoints[1].x == doctest::Approx(3.0));
    CHECK(wf.speed == doctest::Approx(0.5)); // default
}

TEST_CASE("filter mode names parse")
{
    CHECK(parse_filter_mode("fusion") == FilterMode::fusion);
    CHECK(parse_filter_mode("range_only") == FilterMode::range_only);
    CHECK_THROWS(parse_filter_mode("hybrid"));
}
