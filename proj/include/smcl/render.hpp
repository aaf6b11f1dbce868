#pragma once

#include <span>

#include "smcl/image_io.hpp"
#include "smcl/particle_filter.hpp"
#include "smcl/simulator.hpp"

namespace smcl {

struct RenderOptions
{
    int scale = 2;               // pixels per map cell
    bool draw_annotations = true;
    double annotation_alpha = 0.45;
};

// Map base layer: free/occupied/unknown shading plus class-colored
// annotation boxes.
RgbImage render_map(const SemanticGridMap& map, const RenderOptions& options = {});

// Overlays; all take map-frame world coordinates.
void draw_particles(RgbImage& image, const SemanticGridMap& map,
                    std::span<const Particle> particles, const RenderOptions& options = {});

// Trajectory colored by time, purple start to red end.
void draw_trajectory(RgbImage& image, const SemanticGridMap& map,
                     std::span<const TimedPose> trajectory, const RenderOptions& options = {});

// Star markers for sparse ground-truth fixes.
void draw_ground_truth(RgbImage& image, const SemanticGridMap& map,
                       std::span<const TimedPose> checkpoints, const RenderOptions& options = {});

// Color assigned to a class index in annotation overlays.
void class_color(int class_index, uint8_t& r, uint8_t& g, uint8_t& b);

} // namespace smcl
