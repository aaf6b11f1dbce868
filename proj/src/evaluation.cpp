#include "smcl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace smcl {

RunResult evaluate_run(std::span<const TimedPose> estimates,
                       std::span<const TimedPose> checkpoints, const EvalOptions& options)
{
    if (checkpoints.empty())
        throw std::invalid_argument("no ground-truth checkpoints");
    if (estimates.empty())
        throw std::invalid_argument("no estimates");

    RunResult result;
    result.errors.reserve(checkpoints.size());

    // Estimates arrive time-ordered; march a cursor instead of searching.
    size_t cursor = 0;
    for (const TimedPose& cp : checkpoints)
    {
        while (cursor + 1 < estimates.size() &&
               std::abs(estimates[cursor + 1].t - cp.t) <= std::abs(estimates[cursor].t - cp.t))
            ++cursor;
        const TimedPose& est = estimates[cursor];
        if (std::abs(est.t - cp.t) > options.match_tolerance)
            throw std::invalid_argument("no estimate within match tolerance of checkpoint");

        CheckpointError e;
        e.t = cp.t;
        e.position_error = std::hypot(est.pose.x - cp.pose.x, est.pose.y - cp.pose.y);
        e.heading_error = std::abs(wrap_angle(est.pose.theta - cp.pose.theta));
        result.errors.push_back(e);
    }

    const size_t n = result.errors.size();
    size_t conv = n;
    if (options.policy == ConvergencePolicy::strict_remain)
    {
        // First checkpoint from which the error never rises above the
        // threshold again.
        for (size_t i = n; i-- > 0;)
        {
            if (result.errors[i].position_error < options.convergence_threshold)
                conv = i;
            else
                break;
        }
    }
    else
    {
        for (size_t i = 0; i < n; ++i)
        {
            if (result.errors[i].position_error < options.convergence_threshold)
            {
                conv = i;
                break;
            }
        }
    }

    if (conv < n)
    {
        result.success = true;
        result.convergence_time = result.errors[conv].t;
        double pos = 0.0, heading = 0.0;
        for (size_t i = conv; i < n; ++i)
        {
            pos += result.errors[i].position_error;
            heading += result.errors[i].heading_error;
        }
        result.ate_after_convergence = pos / static_cast<double>(n - conv);
        result.heading_error_after_convergence = heading / static_cast<double>(n - conv);
    }
    return result;
}

Summary aggregate(std::span<const RunResult> results)
{
    if (results.empty())
        throw std::invalid_argument("no runs to aggregate");

    Summary s;
    s.runs = static_cast<int>(results.size());
    double ate = 0.0, conv = 0.0;
    for (const RunResult& r : results)
    {
        if (!r.success)
            continue;
        ++s.successes;
        ate += *r.ate_after_convergence;
        conv += *r.convergence_time;
    }
    s.success_rate = static_cast<double>(s.successes) / s.runs;
    if (s.successes > 0)
    {
        s.mean_ate = ate / s.successes;
        s.mean_convergence_time = conv / s.successes;
    }
    return s;
}

void write_results_csv(const std::filesystem::path& path, std::span<const std::string> run_ids,
                       std::span<const RunResult> results)
{
    if (run_ids.size() != results.size())
        throw std::invalid_argument("run id / result count mismatch");

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write results CSV: " + path.string());

    out << "sequence,success,convergence_s,ate_m\n";
    char buf[160];
    for (size_t i = 0; i < results.size(); ++i)
    {
        const RunResult& r = results[i];
        if (r.success)
        {
            std::snprintf(buf, sizeof(buf), "%s,1,%.3f,%.4f\n", run_ids[i].c_str(),
                          *r.convergence_time, *r.ate_after_convergence);
        }
        else
        {
            std::snprintf(buf, sizeof(buf), "%s,0,,\n", run_ids[i].c_str());
        }
        out << buf;
    }

    const Summary s = aggregate(results);
    out << "summary," << s.successes << "/" << s.runs << ",";
    if (s.mean_convergence_time)
    {
        std::snprintf(buf, sizeof(buf), "%.3f,", *s.mean_convergence_time);
        out << buf;
    }
    else
        out << ",";
    if (s.mean_ate)
    {
        std::snprintf(buf, sizeof(buf), "%.4f", *s.mean_ate);
        out << buf;
    }
    out << "\n";
}

std::vector<ParticleCluster> find_particle_clusters(std::span<const Particle> particles,
                                                    double cell_size,
                                                    double min_weight_fraction)
{
    if (particles.empty())
        return {};

    double total = 0.0;
    for (const Particle& p : particles)
        total += p.weight;
    if (!(total > 0.0))
        return {};

    // Bin into coarse cells, then merge 8-connected bins with union-find.
    struct Bin
    {
        double w = 0.0, wx = 0.0, wy = 0.0;
        int count = 0;
        int root = -1;
    };
    std::map<std::pair<long, long>, Bin> bins;
    for (const Particle& p : particles)
    {
        const auto key = std::make_pair(static_cast<long>(std::floor(p.x / cell_size)),
                                        static_cast<long>(std::floor(p.y / cell_size)));
        Bin& b = bins[key];
        b.w += p.weight;
        b.wx += p.weight * p.x;
        b.wy += p.weight * p.y;
        b.count += 1;
    }

    std::vector<std::pair<long, long>> keys;
    keys.reserve(bins.size());
    int idx = 0;
    for (auto& [key, bin] : bins)
    {
        bin.root = idx++;
        keys.push_back(key);
    }

    std::vector<int> parent(bins.size());
    for (size_t i = 0; i < parent.size(); ++i)
        parent[i] = static_cast<int>(i);
    const std::function<int(int)> find = [&](int a) {
        while (parent[a] != a)
            a = parent[a] = parent[parent[a]];
        return a;
    };

    for (const auto& key : keys)
    {
        const int a = find(bins[key].root);
        for (long dy = -1; dy <= 1; ++dy)
            for (long dx = -1; dx <= 1; ++dx)
            {
                if (dx == 0 && dy == 0)
                    continue;
                const auto it = bins.find({key.first + dx, key.second + dy});
                if (it == bins.end())
                    continue;
                const int b = find(it->second.root);
                if (a != b)
                    parent[b] = a;
            }
    }

    std::map<int, ParticleCluster> merged;
    std::map<int, double> wx, wy;
    for (const auto& [key, bin] : bins)
    {
        const int root = find(bin.root);
        ParticleCluster& c = merged[root];
        c.weight += bin.w;
        c.count += bin.count;
        wx[root] += bin.wx;
        wy[root] += bin.wy;
    }

    std::vector<ParticleCluster> out;
    for (auto& [root, cluster] : merged)
    {
        if (cluster.weight / total < min_weight_fraction)
            continue;
        cluster.x = wx[root] / cluster.weight;
        cluster.y = wy[root] / cluster.weight;
        cluster.weight /= total;
        out.push_back(cluster);
    }
    std::sort(out.begin(), out.end(),
              [](const ParticleCluster& a, const ParticleCluster& b) { return a.weight > b.weight; });
    return out;
}

int count_separated_clusters(std::span<const ParticleCluster> clusters, double min_separation)
{
    // Greedy: keep a cluster when it is far from everything kept so far;
    // clusters arrive weight-sorted, so dominant modes win.
    std::vector<const ParticleCluster*> kept;
    for (const ParticleCluster& c : clusters)
    {
        bool far = true;
        for (const ParticleCluster* k : kept)
        {
            if (std::hypot(c.x - k->x, c.y - k->y) <= min_separation)
            {
                far = false;
                break;
            }
        }
        if (far)
            kept.push_back(&c);
    }
    return static_cast<int>(kept.size());
}

} // namespace smcl
