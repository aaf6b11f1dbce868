#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "smcl/pipeline.hpp"
#include "smcl/render.hpp"

namespace py = pybind11;
using namespace smcl;

namespace {

std::string mode_name(FilterMode mode)
{
    return mode == FilterMode::fusion ? "fusion" : "range_only";
}

} // namespace

PYBIND11_MODULE(_smcl, m)
{
    m.doc() = "semantic Monte Carlo localization on floor-plan maps";

    // ---------------------------------------------------------------- map
    py::enum_<Occupancy>(m, "Occupancy")
        .value("FREE", Occupancy::free_space)
        .value("OCCUPIED", Occupancy::occupied)
        .value("UNKNOWN", Occupancy::unknown);

    py::class_<WorldPoint>(m, "WorldPoint")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &WorldPoint::x)
        .def_readwrite("y", &WorldPoint::y)
        .def("__repr__", [](const WorldPoint& p) {
            return "WorldPoint(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
        });

    py::class_<GridIndex>(m, "GridIndex")
        .def(py::init<int, int>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &GridIndex::x)
        .def_readwrite("y", &GridIndex::y);

    py::class_<SemanticAnnotation>(m, "SemanticAnnotation")
        .def(py::init([](const std::string& cls, int x0, int y0, int x1, int y1) {
                 return SemanticAnnotation{cls, x0, y0, x1, y1};
             }),
             py::arg("class_name"), py::arg("x_min"), py::arg("y_min"), py::arg("x_max"),
             py::arg("y_max"))
        .def_readwrite("class_name", &SemanticAnnotation::class_name);

    py::class_<SemanticGridMap>(m, "SemanticGridMap")
        .def(py::init<int, int, double, WorldPoint, std::vector<std::string>>(),
             py::arg("width"), py::arg("height"), py::arg("resolution"), py::arg("origin"),
             py::arg("class_table") = std::vector<std::string>{})
        .def_property_readonly("width", &SemanticGridMap::width)
        .def_property_readonly("height", &SemanticGridMap::height)
        .def_property_readonly("resolution", &SemanticGridMap::resolution)
        .def_property_readonly("class_table", &SemanticGridMap::class_table)
        .def("class_index", &SemanticGridMap::class_index)
        .def("at", &SemanticGridMap::at)
        .def("cell_at", &SemanticGridMap::cell_at)
        .def("occupancy_at",
             [](const SemanticGridMap& map, int cx, int cy) { return occupancy_of(map.at(cx, cy)); })
        .def("has_class_at",
             [](const SemanticGridMap& map, int cx, int cy, int cls) {
                 return has_class_bit(map.at(cx, cy), cls);
             })
        .def("set_occupancy", &SemanticGridMap::set_occupancy)
        .def("set_class_bit", &SemanticGridMap::set_class_bit)
        .def("add_annotation", &SemanticGridMap::add_annotation)
        .def("grid_of", &SemanticGridMap::grid_of)
        .def("world_of", &SemanticGridMap::world_of)
        .def("count_occupied", &SemanticGridMap::count_occupied);

    m.attr("OUT_OF_BOUNDS") = kOutOfBounds;
    m.attr("MAX_CLASSES") = kMaxClasses;

    py::class_<MapLoadOptions>(m, "MapLoadOptions")
        .def(py::init<>())
        .def_readwrite("occupied_below", &MapLoadOptions::occupied_below)
        .def_readwrite("free_above", &MapLoadOptions::free_above);

    m.def("load_map", &load_map, py::arg("image_path"), py::arg("annotation_path"),
          py::arg("options") = MapLoadOptions{});

    // ---------------------------------------------------------------- edt
    py::class_<DistanceField>(m, "DistanceField")
        .def_property_readonly("width", &DistanceField::width)
        .def_property_readonly("height", &DistanceField::height)
        .def_property_readonly("r_max", &DistanceField::r_max)
        .def("raw_at", &DistanceField::raw_at)
        .def("distance_at", &DistanceField::distance_at)
        .def("distance_at_world", &DistanceField::distance_at_world);

    m.def("compute_edt", &compute_edt, py::arg("map"), py::arg("r_max"));

    // ----------------------------------------------------------- geometry
    py::class_<Pose2D>(m, "Pose2D")
        .def(py::init<>())
        .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("theta"))
        .def_readwrite("x", &Pose2D::x)
        .def_readwrite("y", &Pose2D::y)
        .def_readwrite("theta", &Pose2D::theta)
        .def("__repr__", [](const Pose2D& p) {
            return "Pose2D(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                   std::to_string(p.theta) + ")";
        });

    py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
        .def(py::init<>())
        .def_readwrite("fx", &CameraIntrinsics::fx)
        .def_readwrite("fy", &CameraIntrinsics::fy)
        .def_readwrite("cx", &CameraIntrinsics::cx)
        .def_readwrite("cy", &CameraIntrinsics::cy)
        .def_readwrite("image_width", &CameraIntrinsics::image_width)
        .def_readwrite("image_height", &CameraIntrinsics::image_height)
        .def("validate", &CameraIntrinsics::validate);

    py::enum_<TraceOutcome>(m, "TraceOutcome")
        .value("HIT_CLASS", TraceOutcome::hit_class)
        .value("BLOCKED_BY_WALL", TraceOutcome::blocked_by_wall)
        .value("MAX_RANGE_REACHED", TraceOutcome::max_range_reached)
        .value("EXITED_MAP", TraceOutcome::exited_map);

    py::class_<TraceResult>(m, "TraceResult")
        .def_readonly("outcome", &TraceResult::outcome)
        .def_readonly("distance", &TraceResult::distance);

    m.def("wrap_angle", &wrap_angle);
    m.def("pixel_to_bearing", &pixel_to_bearing);
    m.def("bearing_to_pixel_u", &bearing_to_pixel_u);
    m.def("ray_cast_occupancy", &ray_cast_occupancy, py::arg("map"), py::arg("start"),
          py::arg("bearing"), py::arg("max_range"));
    m.def("trace_semantic", &trace_semantic, py::arg("map"), py::arg("pose"),
          py::arg("bearing_camera"), py::arg("class_index"), py::arg("max_range"));

    // ------------------------------------------------------- sensor model
    py::class_<TofFrame>(m, "TofFrame")
        .def(py::init<>())
        .def_readwrite("timestamp", &TofFrame::timestamp)
        .def("middle_row_beam", &TofFrame::middle_row_beam)
        .def("count_valid_beams", &TofFrame::count_valid_beams)
        .def("set_front_zone",
             [](TofFrame& f, int row, int col, float range, bool valid) {
                 f.front_range[row * 8 + col] = range;
                 f.front_valid[row * 8 + col] = valid;
             })
        .def("set_side_beam", [](TofFrame& f, int sensor, int col, float range, bool valid) {
            f.side_range[sensor][col] = range;
            f.side_valid[sensor][col] = valid;
        });

    py::class_<Detection>(m, "Detection")
        .def(py::init([](int cls, double x0, double y0, double x1, double y1, double conf) {
                 return Detection{cls, x0, y0, x1, y1, conf};
             }),
             py::arg("class_index"), py::arg("x_min"), py::arg("y_min"), py::arg("x_max"),
             py::arg("y_max"), py::arg("confidence"))
        .def_readwrite("class_index", &Detection::class_index)
        .def_readwrite("confidence", &Detection::confidence);

    py::class_<SensorModelParams>(m, "SensorModelParams")
        .def(py::init<>())
        .def_readwrite("sigma_g", &SensorModelParams::sigma_g)
        .def_readwrite("sigma_s", &SensorModelParams::sigma_s)
        .def_readwrite("tau_t", &SensorModelParams::tau_t)
        .def_readwrite("r_max", &SensorModelParams::r_max)
        .def_readwrite("tof_valid_range", &SensorModelParams::tof_valid_range)
        .def_readwrite("min_valid_beams", &SensorModelParams::min_valid_beams)
        .def_readwrite("miss_penalty", &SensorModelParams::miss_penalty);

    m.def("beam_end_log_likelihood",
          py::overload_cast<const Pose2D&, const TofFrame&, const DistanceField&,
                            const SensorModelParams&>(&beam_end_log_likelihood));
    m.def("associate_bbox_range", &associate_bbox_range);
    m.def("semantic_log_likelihood", &semantic_log_likelihood);

    // ------------------------------------------------------------- filter
    py::class_<Particle>(m, "Particle")
        .def(py::init<>())
        .def_readwrite("x", &Particle::x)
        .def_readwrite("y", &Particle::y)
        .def_readwrite("theta", &Particle::theta)
        .def_readwrite("weight", &Particle::weight);

    py::class_<FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("n_particles", &FilterConfig::n_particles)
        .def_readwrite("sigma_odom", &FilterConfig::sigma_odom)
        .def_readwrite("d_xy", &FilterConfig::d_xy)
        .def_readwrite("d_theta", &FilterConfig::d_theta)
        .def_readwrite("rng_seed", &FilterConfig::rng_seed)
        .def_readwrite("noise_floor", &FilterConfig::noise_floor)
        .def_readwrite("uniform_reinject_fraction", &FilterConfig::uniform_reinject_fraction);

    py::class_<OdometryDelta>(m, "OdometryDelta")
        .def(py::init([](double dx, double dy, double dtheta, double t) {
                 return OdometryDelta{dx, dy, dtheta, t};
             }),
             py::arg("dx"), py::arg("dy"), py::arg("dtheta"), py::arg("timestamp") = 0.0)
        .def_readwrite("dx", &OdometryDelta::dx)
        .def_readwrite("dy", &OdometryDelta::dy)
        .def_readwrite("dtheta", &OdometryDelta::dtheta)
        .def_readwrite("timestamp", &OdometryDelta::timestamp);

    py::enum_<UpdateStatus>(m, "UpdateStatus")
        .value("OK", UpdateStatus::ok)
        .value("DEGENERATE", UpdateStatus::degenerate);

    py::class_<ParticleFilter>(m, "ParticleFilter")
        .def(py::init<const SemanticGridMap&, const FilterConfig&>(), py::arg("map"),
             py::arg("config"), py::keep_alive<1, 2>())
        .def("init_uniform", &ParticleFilter::init_uniform)
        .def("motion_update", &ParticleFilter::motion_update)
        .def("measurement_update",
             [](ParticleFilter& pf, const std::vector<double>& log_lik) {
                 return pf.measurement_update(log_lik);
             })
        .def("resample", &ParticleFilter::resample)
        .def("estimate_pose", &ParticleFilter::estimate_pose)
        .def("set_workers", &ParticleFilter::set_workers)
        .def_property_readonly("particles",
                               [](const ParticleFilter& pf) { return pf.particles(); });

    // ---------------------------------------------------------- simulator
    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("tof_rate", &SimConfig::tof_rate)
        .def_readwrite("detection_rate", &SimConfig::detection_rate)
        .def_readwrite("checkpoint_rate", &SimConfig::checkpoint_rate)
        .def_readwrite("tof_noise_std", &SimConfig::tof_noise_std)
        .def_readwrite("tof_max_range", &SimConfig::tof_max_range)
        .def_readwrite("odom_noise_std", &SimConfig::odom_noise_std)
        .def_readwrite("detect_prob", &SimConfig::detect_prob)
        .def_readwrite("false_positive_rate", &SimConfig::false_positive_rate)
        .def_readwrite("bbox_center_noise_std", &SimConfig::bbox_center_noise_std)
        .def_readwrite("rng_seed", &SimConfig::rng_seed)
        .def_readwrite("camera", &SimConfig::camera);

    py::class_<TimedPose>(m, "TimedPose")
        .def_readonly("t", &TimedPose::t)
        .def_readonly("pose", &TimedPose::pose);

    py::class_<SequenceRecord>(m, "SequenceRecord")
        .def_readonly("ground_truth", &SequenceRecord::ground_truth)
        .def_readonly("checkpoints", &SequenceRecord::checkpoints)
        .def_readonly("odometry", &SequenceRecord::odometry);

    m.def("default_camera", &default_camera);
    m.def("generate_trajectory", &generate_trajectory, py::arg("map"), py::arg("waypoints"),
          py::arg("speed"), py::arg("turn_rate"), py::arg("sample_rate"));
    m.def("synthesize_tof", &synthesize_tof, py::arg("map"), py::arg("gt_pose"),
          py::arg("config"), py::arg("frame_index"), py::arg("timestamp") = 0.0);
    m.def("synthesize_detections", &synthesize_detections);
    m.def("generate_sequence", &generate_sequence, py::arg("map"), py::arg("waypoints"),
          py::arg("config"), py::arg("speed"), py::arg("turn_rate"));

    // ---------------------------------------------------------- sequences
    m.def(
        "write_sequence",
        [](const std::filesystem::path& path, const SequenceRecord& record,
           const SemanticGridMap& map, const SimConfig& config) {
            write_sequence(path, to_events(record, map), config);
        },
        py::arg("path"), py::arg("record"), py::arg("map"), py::arg("config"));

    // ------------------------------------------------------------ run/eval
    py::enum_<FilterMode>(m, "FilterMode")
        .value("FUSION", FilterMode::fusion)
        .value("RANGE_ONLY", FilterMode::range_only);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("success", &RunResult::success)
        .def_readonly("convergence_time", &RunResult::convergence_time)
        .def_readonly("ate_after_convergence", &RunResult::ate_after_convergence)
        .def_property_readonly("checkpoint_errors", [](const RunResult& r) {
            std::vector<std::pair<double, double>> out;
            for (const auto& e : r.errors)
                out.emplace_back(e.t, e.position_error);
            return out;
        });

    py::class_<Summary>(m, "Summary")
        .def_readonly("runs", &Summary::runs)
        .def_readonly("successes", &Summary::successes)
        .def_readonly("success_rate", &Summary::success_rate)
        .def_readonly("mean_ate", &Summary::mean_ate)
        .def_readonly("mean_convergence_time", &Summary::mean_convergence_time);

    py::class_<ParticleSnapshot>(m, "ParticleSnapshot")
        .def_readonly("t", &ParticleSnapshot::t)
        .def_readonly("particles", &ParticleSnapshot::particles);

    py::class_<RunOutput>(m, "RunOutput")
        .def_readonly("estimates", &RunOutput::estimates)
        .def_readonly("checkpoints", &RunOutput::checkpoints)
        .def_readonly("result", &RunOutput::result)
        .def_readonly("snapshots", &RunOutput::snapshots);

    m.def(
        "run_sequence_file",
        [](const SemanticGridMap& map, const std::filesystem::path& sequence_path,
           const std::string& mode, const FilterConfig& filter, const SensorModelParams& sensor,
           int workers, const std::vector<double>& snapshot_times) {
            const DistanceField edt = compute_edt(map, sensor.r_max);
            RunOptions options;
            options.filter = filter;
            options.sensor = sensor;
            options.mode = parse_filter_mode(mode);
            options.workers = workers;
            options.snapshot_times = snapshot_times;
            return run_sequence(map, edt, read_sequence(sequence_path), options);
        },
        py::arg("map"), py::arg("sequence_path"), py::arg("mode") = "fusion",
        py::arg("filter") = FilterConfig{}, py::arg("sensor") = SensorModelParams{},
        py::arg("workers") = 1, py::arg("snapshot_times") = std::vector<double>{});

    m.def(
        "run_record",
        [](const SemanticGridMap& map, const SequenceRecord& record, const std::string& mode,
           const FilterConfig& filter, const SensorModelParams& sensor, int workers) {
            const DistanceField edt = compute_edt(map, sensor.r_max);
            RunOptions options;
            options.filter = filter;
            options.sensor = sensor;
            options.mode = parse_filter_mode(mode);
            options.workers = workers;
            return run_sequence(map, edt, to_events(record, map), options);
        },
        py::arg("map"), py::arg("record"), py::arg("mode") = "fusion",
        py::arg("filter") = FilterConfig{}, py::arg("sensor") = SensorModelParams{},
        py::arg("workers") = 1);

    m.def(
        "evaluate_run",
        [](const std::vector<std::pair<double, std::vector<double>>>& estimates,
           const std::vector<std::pair<double, std::vector<double>>>& checkpoints) {
            const auto convert = [](const auto& rows) {
                std::vector<TimedPose> out;
                for (const auto& [t, pose] : rows)
                    out.push_back({t, Pose2D{pose.at(0), pose.at(1), pose.at(2)}});
                return out;
            };
            return evaluate_run(convert(estimates), convert(checkpoints));
        },
        py::arg("estimates"), py::arg("checkpoints"),
        "Rows are (t, [x, y, theta]) tuples.");

    m.def("aggregate",
          [](const std::vector<RunResult>& results) { return aggregate(results); });

    py::class_<ParticleCluster>(m, "ParticleCluster")
        .def_readonly("x", &ParticleCluster::x)
        .def_readonly("y", &ParticleCluster::y)
        .def_readonly("weight", &ParticleCluster::weight)
        .def_readonly("count", &ParticleCluster::count);

    m.def(
        "find_particle_clusters",
        [](const std::vector<Particle>& particles, double cell_size, double min_weight_fraction) {
            return find_particle_clusters(particles, cell_size, min_weight_fraction);
        },
        py::arg("particles"), py::arg("cell_size") = 0.5, py::arg("min_weight_fraction") = 0.05);
    m.def(
        "count_separated_clusters",
        [](const std::vector<ParticleCluster>& clusters, double min_separation) {
            return count_separated_clusters(clusters, min_separation);
        },
        py::arg("clusters"), py::arg("min_separation") = 3.0);

    // -------------------------------------------------------------- render
    m.def(
        "render_map_png",
        [](const SemanticGridMap& map, const std::filesystem::path& path, int scale) {
            RenderOptions options;
            options.scale = scale;
            write_png(path, render_map(map, options));
        },
        py::arg("map"), py::arg("path"), py::arg("scale") = 2);
}
