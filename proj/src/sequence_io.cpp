#include "smcl/sequence_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace smcl {

using nlohmann::json;

std::vector<SequenceEvent> to_events(const SequenceRecord& record, const SemanticGridMap& map)
{
    // Merge by timestamp; ties keep the order gt, odom, tof, det so a replay
    // sees ground truth and motion before the measurements of the same tick.
    struct Tagged
    {
        double t;
        int order;
        SequenceEvent event;
    };
    std::vector<Tagged> tagged;
    tagged.reserve(record.ground_truth.size() + record.odometry.size() + record.tof.size() +
                   record.detections.size());

    size_t cp = 0;
    for (const TimedPose& gt : record.ground_truth)
    {
        bool checkpoint = false;
        while (cp < record.checkpoints.size() && record.checkpoints[cp].t <= gt.t + 1e-12)
        {
            checkpoint = checkpoint || std::abs(record.checkpoints[cp].t - gt.t) < 1e-9;
            ++cp;
        }
        tagged.push_back({gt.t, 0, {gt.t, GroundTruthEvent{gt.pose, checkpoint}}});
    }
    for (const OdometryDelta& d : record.odometry)
        tagged.push_back({d.timestamp, 1, {d.timestamp, d}});
    for (const TofFrame& f : record.tof)
        tagged.push_back({f.timestamp, 2, {f.timestamp, f}});
    for (const TimedDetections& det : record.detections)
    {
        DetectionEvent ev;
        for (const Detection& d : det.detections)
        {
            ev.detections.push_back({map.class_table().at(d.class_index), d.x_min, d.y_min,
                                     d.x_max, d.y_max, d.confidence});
        }
        tagged.push_back({det.t, 3, {det.t, std::move(ev)}});
    }

    std::stable_sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
        if (a.t != b.t)
            return a.t < b.t;
        return a.order < b.order;
    });

    std::vector<SequenceEvent> out;
    out.reserve(tagged.size());
    for (auto& t : tagged)
        out.push_back(std::move(t.event));
    return out;
}

namespace {

json ranges_to_json(const float* ranges, const bool* valid, int n)
{
    json arr = json::array();
    for (int i = 0; i < n; ++i)
    {
        if (valid[i])
            arr.push_back(ranges[i]);
        else
            arr.push_back(nullptr);
    }
    return arr;
}

void ranges_from_json(const json& arr, float* ranges, bool* valid, int n)
{
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
        throw std::runtime_error("range array has wrong length");
    for (int i = 0; i < n; ++i)
    {
        if (arr[i].is_null())
        {
            valid[i] = false;
            ranges[i] = 0.0f;
        }
        else
        {
            valid[i] = true;
            ranges[i] = arr[i].get<float>();
        }
    }
}

} // namespace

void write_sequence(const std::filesystem::path& path, std::span<const SequenceEvent> events,
                    const SimConfig& config)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write sequence file: " + path.string());

    json header = {{"type", "header"},
                   {"version", 1},
                   {"seed", config.rng_seed},
                   {"tof_rate", config.tof_rate},
                   {"detection_rate", config.detection_rate},
                   {"checkpoint_rate", config.checkpoint_rate},
                   {"tof_noise_std", config.tof_noise_std},
                   {"tof_max_range", config.tof_max_range}};
    out << header.dump() << "\n";

    for (const SequenceEvent& ev : events)
    {
        json line;
        line["t"] = ev.t;
        if (const auto* gt = std::get_if<GroundTruthEvent>(&ev.payload))
        {
            line["type"] = "gt";
            line["x"] = gt->pose.x;
            line["y"] = gt->pose.y;
            line["theta"] = gt->pose.theta;
            line["checkpoint"] = gt->checkpoint;
        }
        else if (const auto* odom = std::get_if<OdometryDelta>(&ev.payload))
        {
            line["type"] = "odom";
            line["dx"] = odom->dx;
            line["dy"] = odom->dy;
            line["dtheta"] = odom->dtheta;
        }
        else if (const auto* tof = std::get_if<TofFrame>(&ev.payload))
        {
            line["type"] = "tof";
            line["front"] = ranges_to_json(tof->front_range.data(), tof->front_valid.data(), 64);
            json sides = json::array();
            for (int s = 0; s < 3; ++s)
                sides.push_back(
                    ranges_to_json(tof->side_range[s].data(), tof->side_valid[s].data(), 8));
            line["sides"] = sides;
        }
        else if (const auto* det = std::get_if<DetectionEvent>(&ev.payload))
        {
            line["type"] = "det";
            json dets = json::array();
            for (const auto& d : det->detections)
            {
                dets.push_back({{"class", d.class_name},
                                {"bbox", {d.x_min, d.y_min, d.x_max, d.y_max}},
                                {"conf", d.confidence}});
            }
            line["detections"] = dets;
        }
        out << line.dump() << "\n";
    }
}

std::vector<SequenceEvent> read_sequence(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open sequence file: " + path.string());

    std::vector<SequenceEvent> events;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try
        {
            j = json::parse(line);
        }
        catch (const json::exception& e)
        {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed JSON: " + e.what());
        }
        try
        {
            const std::string type = j.at("type").get<std::string>();
            if (type == "header")
                continue;

            SequenceEvent ev;
            ev.t = j.at("t").get<double>();
            if (type == "gt")
            {
                GroundTruthEvent gt;
                gt.pose = Pose2D(j.at("x").get<double>(), j.at("y").get<double>(),
                                 j.at("theta").get<double>());
                gt.checkpoint = j.value("checkpoint", false);
                ev.payload = gt;
            }
            else if (type == "odom")
            {
                OdometryDelta d;
                d.dx = j.at("dx").get<double>();
                d.dy = j.at("dy").get<double>();
                d.dtheta = j.at("dtheta").get<double>();
                d.timestamp = ev.t;
                ev.payload = d;
            }
            else if (type == "tof")
            {
                TofFrame f;
                f.timestamp = ev.t;
                ranges_from_json(j.at("front"), f.front_range.data(), f.front_valid.data(), 64);
                const json& sides = j.at("sides");
                if (!sides.is_array() || sides.size() != 3)
                    throw std::runtime_error("expected 3 side sensors");
                for (int s = 0; s < 3; ++s)
                    ranges_from_json(sides[s], f.side_range[s].data(), f.side_valid[s].data(), 8);
                ev.payload = f;
            }
            else if (type == "det")
            {
                DetectionEvent det;
                for (const json& d : j.at("detections"))
                {
                    const json& box = d.at("bbox");
                    det.detections.push_back({d.at("class").get<std::string>(),
                                              box.at(0).get<double>(), box.at(1).get<double>(),
                                              box.at(2).get<double>(), box.at(3).get<double>(),
                                              d.at("conf").get<double>()});
                }
                ev.payload = std::move(det);
            }
            else
            {
                throw std::runtime_error("unknown event type '" + type + "'");
            }
            events.push_back(std::move(ev));
        }
        catch (const json::exception& e)
        {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": schema violation: " + e.what());
        }
    }
    return events;
}

std::vector<TimedPose> checkpoints_of(std::span<const SequenceEvent> events)
{
    std::vector<TimedPose> out;
    for (const SequenceEvent& ev : events)
        if (const auto* gt = std::get_if<GroundTruthEvent>(&ev.payload); gt && gt->checkpoint)
            out.push_back({ev.t, gt->pose});
    return out;
}

WaypointFile read_waypoints(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open waypoint file: " + path.string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::exception& e)
    {
        throw std::runtime_error("malformed waypoint JSON in " + path.string() + ": " + e.what());
    }

    WaypointFile out;
    try
    {
        out.speed = j.value("speed", 0.5);
        out.turn_rate = j.value("turn_rate", 1.2);
        for (const auto& wp : j.at("waypoints"))
            out.waypoints.push_back({wp.at(0).get<double>(), wp.at(1).get<double>()});
    }
    catch (const json::exception& e)
    {
        throw std::runtime_error("waypoint schema violation in " + path.string() + ": " +
                                 e.what());
    }
    if (out.waypoints.empty())
        throw std::runtime_error("waypoint file has no waypoints: " + path.string());
    return out;
}

void write_pose_csv(const std::filesystem::path& path, std::span<const TimedPose> poses)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write pose file: " + path.string());
    out << "t,x,y,theta\n";
    char buf[160];
    for (const TimedPose& p : poses)
    {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", p.t, p.pose.x, p.pose.y,
                      p.pose.theta);
        out << buf;
    }
}

std::vector<TimedPose> read_pose_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open pose file: " + path.string());
    std::vector<TimedPose> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (first)
        {
            first = false;
            if (line.rfind("t,", 0) == 0)
                continue;
        }
        TimedPose p;
        double x, y, theta;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p.t, &x, &y, &theta) != 4)
            throw std::runtime_error("malformed pose CSV line in " + path.string());
        p.pose = Pose2D(x, y, theta);
        out.push_back(p);
    }
    return out;
}

void write_particles_csv(const std::filesystem::path& path, std::span<const Particle> particles)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write particle file: " + path.string());
    out << "x,y,theta,weight\n";
    char buf[160];
    for (const Particle& p : particles)
    {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", static_cast<double>(p.x),
                      static_cast<double>(p.y), static_cast<double>(p.theta),
                      static_cast<double>(p.weight));
        out << buf;
    }
}

std::vector<Particle> read_particles_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open particle file: " + path.string());
    std::vector<Particle> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (first)
        {
            first = false;
            if (line.rfind("x,", 0) == 0)
                continue;
        }
        double x, y, theta, w;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &y, &theta, &w) != 4)
            throw std::runtime_error("malformed particle CSV line in " + path.string());
        out.push_back({static_cast<float>(x), static_cast<float>(y), static_cast<float>(theta),
                       static_cast<float>(w)});
    }
    return out;
}

} // namespace smcl
