#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "smcl/geometry.hpp"
#include "smcl/grid_map.hpp"

namespace smcl {

// One pose hypothesis; deliberately four floats.
struct Particle
{
    float x = 0.0f;
    float y = 0.0f;
    float theta = 0.0f;
    float weight = 0.0f;

    Pose2D pose() const { return {x, y, theta}; }
};

struct FilterConfig
{
    int n_particles = 4096;
    std::array<double, 3> sigma_odom = {0.5, 0.5, 0.5}; // (m, m, rad) per unit motion
    double d_xy = 0.05;    // meters, update gate
    double d_theta = 0.05; // radians, update gate
    uint64_t rng_seed = 1;

    // Additive noise floor so repeated zero-motion updates still dither.
    std::array<double, 3> noise_floor = {0.002, 0.002, 0.002};
    // Fraction of particles replaced by uniform draws at each resample;
    // recovery aid, disabled by default.
    double uniform_reinject_fraction = 0.0;

    void validate() const; // throws std::invalid_argument
};

struct OdometryDelta
{
    double dx = 0.0; // meters, body frame
    double dy = 0.0;
    double dtheta = 0.0; // radians
    double timestamp = 0.0;
};

enum class UpdateStatus
{
    ok,
    degenerate, // all likelihoods vanished; weights were reset to uniform
};

// The MCL belief and its update steps. Per-particle sampling uses
// counter-based streams keyed by (seed, step counter, particle index), so
// motion updates fan out over any worker count with bit-identical results.
class ParticleFilter
{
public:
    ParticleFilter(const SemanticGridMap& map, const FilterConfig& config);

    // Uniform over free cells, headings uniform over (-pi, pi], weights 1/n.
    // Throws std::runtime_error when the map has no free cell.
    void init_uniform();

    // Compose each pose with the body-frame delta, perturbed by zero-mean
    // Gaussian noise with std sigma_odom * |delta| + noise_floor.
    void motion_update(const OdometryDelta& delta);

    // Multiply weights by exp(log_likelihoods) and normalize. Size must
    // equal the particle count.
    UpdateStatus measurement_update(std::span<const double> log_likelihoods);

    // Systematic (low variance) resampling with a single random offset;
    // output weights uniform 1/n, count preserved.
    void resample();

    // Weighted mean position, circular weighted mean heading.
    // Throws std::runtime_error on vanishing total weight.
    Pose2D estimate_pose() const;

    const std::vector<Particle>& particles() const { return particles_; }
    std::vector<Particle>& mutable_particles() { return particles_; }
    const FilterConfig& config() const { return config_; }

    void set_workers(int workers) { workers_ = workers < 1 ? 1 : workers; }
    int workers() const { return workers_; }

private:
    const SemanticGridMap* map_;
    FilterConfig config_;
    std::vector<Particle> particles_;
    std::vector<GridIndex> free_cells_;
    std::vector<double> scratch_;
    uint64_t motion_counter_ = 0;
    uint64_t resample_counter_ = 0;
    int workers_ = 1;
};

// Evaluates fn(i) for i in [0, n) across the given worker count into out.
// Entries are independent, so results do not depend on the partitioning.
void evaluate_parallel(int n, int workers, const std::function<double(int)>& fn,
                       std::vector<double>& out);

} // namespace smcl
