#include "smcl/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "smcl/rng.hpp"

namespace smcl {

void FilterConfig::validate() const
{
    if (n_particles <= 0)
        throw std::invalid_argument("n_particles must be positive");
    if (!(d_xy > 0.0) || !(d_theta > 0.0))
        throw std::invalid_argument("update gates must be positive");
    for (const double s : sigma_odom)
        if (s < 0.0)
            throw std::invalid_argument("sigma_odom must be non-negative");
    if (uniform_reinject_fraction < 0.0 || uniform_reinject_fraction >= 1.0)
        throw std::invalid_argument("uniform_reinject_fraction must lie in [0, 1)");
}

void evaluate_parallel(int n, int workers, const std::function<double(int)>& fn,
                       std::vector<double>& out)
{
    out.resize(n);
    if (workers <= 1 || n < 2 * workers)
    {
        for (int i = 0; i < n; ++i)
            out[i] = fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w)
    {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        threads.emplace_back([&, begin, end] {
            for (int i = begin; i < end; ++i)
                out[i] = fn(i);
        });
    }
    for (auto& t : threads)
        t.join();
}

ParticleFilter::ParticleFilter(const SemanticGridMap& map, const FilterConfig& config)
    : map_(&map), config_(config)
{
    config_.validate();
    free_cells_ = map.free_cells();
    particles_.resize(config_.n_particles);
}

void ParticleFilter::init_uniform()
{
    if (free_cells_.empty())
        throw std::runtime_error("cannot initialize: map has no free cell");

    const int n = config_.n_particles;
    const float w = 1.0f / static_cast<float>(n);
    const double res = map_->resolution();
    const WorldPoint org = map_->origin();

    for (int i = 0; i < n; ++i)
    {
        RandomStream rs(config_.rng_seed, rng_tag::init_uniform, static_cast<uint64_t>(i));
        const GridIndex cell = free_cells_[rs.next_index(free_cells_.size())];
        // Uniform inside the cell so positions are uniform over free area.
        const double x = org.x + (cell.x + rs.next_uniform()) * res;
        const double y = org.y + (cell.y + rs.next_uniform()) * res;
        const double theta = kPi - 2.0 * kPi * rs.next_uniform(); // (-pi, pi]
        particles_[i] = {static_cast<float>(x), static_cast<float>(y),
                         static_cast<float>(theta), w};
    }
}

void ParticleFilter::motion_update(const OdometryDelta& delta)
{
    const uint64_t step = motion_counter_++;
    const double sx = config_.sigma_odom[0] * std::abs(delta.dx) + config_.noise_floor[0];
    const double sy = config_.sigma_odom[1] * std::abs(delta.dy) + config_.noise_floor[1];
    const double st = config_.sigma_odom[2] * std::abs(delta.dtheta) + config_.noise_floor[2];

    const int n = static_cast<int>(particles_.size());
    const auto move_one = [&](int i) {
        RandomStream rs(config_.rng_seed, rng_tag::motion,
                        step * 0x10000000000ull + static_cast<uint64_t>(i));
        const double bdx = delta.dx + rs.next_normal() * sx;
        const double bdy = delta.dy + rs.next_normal() * sy;
        const double bdt = delta.dtheta + rs.next_normal() * st;

        Particle& p = particles_[i];
        const double c = std::cos(p.theta);
        const double s = std::sin(p.theta);
        p.x += static_cast<float>(c * bdx - s * bdy);
        p.y += static_cast<float>(s * bdx + c * bdy);
        p.theta = static_cast<float>(wrap_angle(p.theta + bdt));
    };

    if (workers_ <= 1)
    {
        for (int i = 0; i < n; ++i)
            move_one(i);
        return;
    }
    std::vector<std::thread> threads;
    const int chunk = (n + workers_ - 1) / workers_;
    for (int w = 0; w < workers_; ++w)
    {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        threads.emplace_back([&, begin, end] {
            for (int i = begin; i < end; ++i)
                move_one(i);
        });
    }
    for (auto& t : threads)
        t.join();
}

UpdateStatus ParticleFilter::measurement_update(std::span<const double> log_likelihoods)
{
    const size_t n = particles_.size();
    if (log_likelihoods.size() != n)
        throw std::invalid_argument("likelihood count does not match particle count");

    double max_log = -std::numeric_limits<double>::infinity();
    for (const double l : log_likelihoods)
        max_log = std::max(max_log, l);

    if (!std::isfinite(max_log))
    {
        // Every likelihood vanished; reset belief to uniform weights.
        const float w = 1.0f / static_cast<float>(n);
        for (auto& p : particles_)
            p.weight = w;
        return UpdateStatus::degenerate;
    }

    scratch_.resize(n);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i)
    {
        const double w = static_cast<double>(particles_[i].weight) *
                         std::exp(log_likelihoods[i] - max_log);
        scratch_[i] = w;
        sum += w;
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
    {
        const float w = 1.0f / static_cast<float>(n);
        for (auto& p : particles_)
            p.weight = w;
        return UpdateStatus::degenerate;
    }

    for (size_t i = 0; i < n; ++i)
        particles_[i].weight = static_cast<float>(scratch_[i] / sum);
    return UpdateStatus::ok;
}

void ParticleFilter::resample()
{
    const size_t n = particles_.size();
    RandomStream rs(config_.rng_seed, rng_tag::resample, resample_counter_++);
    const double offset = rs.next_uniform();

    std::vector<Particle> out;
    out.reserve(n);
    const float w = 1.0f / static_cast<float>(n);

    size_t i = 0;
    double cumulative = particles_[0].weight;
    for (size_t k = 0; k < n; ++k)
    {
        const double target = (k + offset) / static_cast<double>(n);
        while (cumulative < target && i + 1 < n)
        {
            ++i;
            cumulative += particles_[i].weight;
        }
        Particle p = particles_[i];
        p.weight = w;
        out.push_back(p);
    }

    const size_t reinject =
        static_cast<size_t>(config_.uniform_reinject_fraction * static_cast<double>(n));
    if (reinject > 0 && !free_cells_.empty())
    {
        const double res = map_->resolution();
        const WorldPoint org = map_->origin();
        RandomStream ri(config_.rng_seed, rng_tag::reinject, resample_counter_);
        for (size_t k = n - reinject; k < n; ++k)
        {
            const GridIndex cell = free_cells_[ri.next_index(free_cells_.size())];
            out[k].x = static_cast<float>(org.x + (cell.x + ri.next_uniform()) * res);
            out[k].y = static_cast<float>(org.y + (cell.y + ri.next_uniform()) * res);
            out[k].theta = static_cast<float>(kPi - 2.0 * kPi * ri.next_uniform());
            out[k].weight = w;
        }
    }

    particles_ = std::move(out);
}

Pose2D ParticleFilter::estimate_pose() const
{
    double sw = 0.0, sx = 0.0, sy = 0.0, ss = 0.0, sc = 0.0;
    for (const Particle& p : particles_)
    {
        const double w = p.weight;
        sw += w;
        sx += w * p.x;
        sy += w * p.y;
        ss += w * std::sin(static_cast<double>(p.theta));
        sc += w * std::cos(static_cast<double>(p.theta));
    }
    if (!(sw > 0.0) || !std::isfinite(sw))
        throw std::runtime_error("pose estimate undefined: zero total weight");
    return {sx / sw, sy / sw, std::atan2(ss, sc)};
}

} // namespace smcl
