#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smcl/particle_filter.hpp"
#include "smcl/simulator.hpp"

namespace smcl {

struct CheckpointError
{
    double t = 0.0;
    double position_error = 0.0; // meters
    double heading_error = 0.0;  // radians, absolute
};

struct RunResult
{
    std::vector<CheckpointError> errors;
    std::optional<double> convergence_time;       // seconds
    std::optional<double> ate_after_convergence;  // meters
    std::optional<double> heading_error_after_convergence; // radians, auxiliary
    bool success = false;
};

enum class ConvergencePolicy
{
    // Converged at the first checkpoint from which every later checkpoint
    // stays under the threshold.
    strict_remain,
    // First crossing only; sensitivity-analysis variant.
    first_crossing,
};

struct EvalOptions
{
    double convergence_threshold = 0.5; // meters
    double match_tolerance = 0.1;       // seconds, nearest-estimate matching
    ConvergencePolicy policy = ConvergencePolicy::strict_remain;
};

// Position error at every checkpoint (nearest estimate in time), convergence
// time, post-convergence ATE and success flag. Throws on empty inputs or
// when a checkpoint has no estimate within the match tolerance.
RunResult evaluate_run(std::span<const TimedPose> estimates,
                       std::span<const TimedPose> checkpoints,
                       const EvalOptions& options = {});

struct Summary
{
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    std::optional<double> mean_ate;              // over successful runs
    std::optional<double> mean_convergence_time; // over successful runs
};

// Failures count in the success-rate denominator but are excluded from the
// ATE / convergence means.
Summary aggregate(std::span<const RunResult> results);

// One row per run plus a summary row; empty fields for failed runs.
void write_results_csv(const std::filesystem::path& path,
                       std::span<const std::string> run_ids,
                       std::span<const RunResult> results);

// Spatial modes of a particle set: particles are binned into cells of
// cell_size, 8-connected components holding at least min_weight_fraction of
// the total weight become clusters.
struct ParticleCluster
{
    double x = 0.0; // weighted centroid
    double y = 0.0;
    double weight = 0.0; // fraction of total
    int count = 0;
};

std::vector<ParticleCluster> find_particle_clusters(std::span<const Particle> particles,
                                                    double cell_size = 0.5,
                                                    double min_weight_fraction = 0.05);

// Largest subset of clusters with pairwise centroid separation above
// min_separation; returns its size.
int count_separated_clusters(std::span<const ParticleCluster> clusters,
                             double min_separation = 3.0);

} // namespace smcl
