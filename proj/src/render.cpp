#include "smcl/render.hpp"

#include <algorithm>
#include <cmath>

namespace smcl {

namespace {

// 10-entry palette, repeats beyond that.
constexpr uint8_t kPalette[][3] = {
    {230, 57, 70},   // red
    {46, 134, 171},  // blue
    {241, 143, 1},   // orange
    {106, 76, 147},  // purple
    {26, 150, 65},   // green
    {212, 80, 135},  // pink
    {0, 150, 136},   // teal
    {121, 85, 72},   // brown
    {63, 81, 181},   // indigo
    {175, 180, 43},  // olive
};

void fill_disc(RgbImage& img, double px, double py, double radius, uint8_t r, uint8_t g,
               uint8_t b)
{
    const int x0 = static_cast<int>(std::floor(px - radius));
    const int x1 = static_cast<int>(std::ceil(px + radius));
    const int y0 = static_cast<int>(std::floor(py - radius));
    const int y1 = static_cast<int>(std::ceil(py + radius));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if ((x - px) * (x - px) + (y - py) * (y - py) <= radius * radius)
                img.set(x, y, r, g, b);
}

// Rainbow along s in [0, 1]: purple start to red end.
void time_color(double s, uint8_t& r, uint8_t& g, uint8_t& b)
{
    const double hue = (1.0 - std::clamp(s, 0.0, 1.0)) * 280.0; // 280 purple .. 0 red
    const double x = 1.0 - std::abs(std::fmod(hue / 60.0, 2.0) - 1.0);
    double rr = 0, gg = 0, bb = 0;
    if (hue < 60)
        rr = 1, gg = x;
    else if (hue < 120)
        rr = x, gg = 1;
    else if (hue < 180)
        gg = 1, bb = x;
    else if (hue < 240)
        gg = x, bb = 1;
    else
        rr = x, bb = 1;
    r = static_cast<uint8_t>(rr * 255);
    g = static_cast<uint8_t>(gg * 255);
    b = static_cast<uint8_t>(bb * 255);
}

struct PixelMapper
{
    double inv_res;
    WorldPoint origin;
    int scale;

    void to_pixel(const WorldPoint& w, double& px, double& py) const
    {
        px = (w.x - origin.x) * inv_res * scale;
        py = (w.y - origin.y) * inv_res * scale;
    }
};

PixelMapper mapper_for(const SemanticGridMap& map, const RenderOptions& options)
{
    return {1.0 / map.resolution(), map.origin(), std::max(1, options.scale)};
}

} // namespace

void class_color(int class_index, uint8_t& r, uint8_t& g, uint8_t& b)
{
    const auto& c = kPalette[class_index % (sizeof(kPalette) / sizeof(kPalette[0]))];
    r = c[0];
    g = c[1];
    b = c[2];
}

RgbImage render_map(const SemanticGridMap& map, const RenderOptions& options)
{
    const int scale = std::max(1, options.scale);
    RgbImage img(map.width() * scale, map.height() * scale);

    for (int cy = 0; cy < map.height(); ++cy)
    {
        for (int cx = 0; cx < map.width(); ++cx)
        {
            uint8_t v = 245;
            switch (occupancy_of(map.at(cx, cy)))
            {
            case Occupancy::occupied: v = 40; break;
            case Occupancy::unknown: v = 200; break;
            case Occupancy::free_space: v = 245; break;
            }
            for (int sy = 0; sy < scale; ++sy)
                for (int sx = 0; sx < scale; ++sx)
                    img.set(cx * scale + sx, cy * scale + sy, v, v, v);
        }
    }

    if (options.draw_annotations)
    {
        for (const ResolvedAnnotation& ann : map.annotations())
        {
            uint8_t r, g, b;
            class_color(ann.class_index, r, g, b);
            for (int cy = ann.y_min; cy < ann.y_max; ++cy)
                for (int cx = ann.x_min; cx < ann.x_max; ++cx)
                    for (int sy = 0; sy < scale; ++sy)
                        for (int sx = 0; sx < scale; ++sx)
                            img.blend(cx * scale + sx, cy * scale + sy, r, g, b,
                                      options.annotation_alpha);
        }
    }
    return img;
}

void draw_particles(RgbImage& img, const SemanticGridMap& map,
                    std::span<const Particle> particles, const RenderOptions& options)
{
    const PixelMapper m = mapper_for(map, options);
    for (const Particle& p : particles)
    {
        double px, py;
        m.to_pixel({p.x, p.y}, px, py);
        fill_disc(img, px, py, 0.6 * m.scale, 20, 160, 40);
    }
}

void draw_trajectory(RgbImage& img, const SemanticGridMap& map,
                     std::span<const TimedPose> trajectory, const RenderOptions& options)
{
    if (trajectory.empty())
        return;
    const PixelMapper m = mapper_for(map, options);
    const double t0 = trajectory.front().t;
    const double t1 = trajectory.back().t;
    const double span = std::max(t1 - t0, 1e-9);
    for (const TimedPose& p : trajectory)
    {
        uint8_t r, g, b;
        time_color((p.t - t0) / span, r, g, b);
        double px, py;
        m.to_pixel(p.pose.position(), px, py);
        fill_disc(img, px, py, 0.8 * m.scale, r, g, b);
    }
}

void draw_ground_truth(RgbImage& img, const SemanticGridMap& map,
                       std::span<const TimedPose> checkpoints, const RenderOptions& options)
{
    const PixelMapper m = mapper_for(map, options);
    const int arm = 2 * m.scale;
    for (const TimedPose& p : checkpoints)
    {
        double px, py;
        m.to_pixel(p.pose.position(), px, py);
        const int x = static_cast<int>(std::lround(px));
        const int y = static_cast<int>(std::lround(py));
        // four-armed star
        for (int d = -arm; d <= arm; ++d)
        {
            img.set(x + d, y, 0, 0, 0);
            img.set(x, y + d, 0, 0, 0);
        }
        for (int d = -arm / 2; d <= arm / 2; ++d)
        {
            img.set(x + d, y + d, 0, 0, 0);
            img.set(x + d, y - d, 0, 0, 0);
        }
    }
}

} // namespace smcl
