#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "smcl/grid_map.hpp"

namespace smcl {

// Truncated, 8-bit quantized Euclidean distance transform over occupied
// cells. Stored value v decodes to distance d = (v / 255) * r_max meters;
// v == 0 exactly on occupied cells, v == 255 wherever the true distance is
// at least r_max.
class DistanceField
{
public:
    DistanceField(int width, int height, double resolution, WorldPoint origin,
                  double r_max, std::vector<uint8_t> values);

    int width() const { return width_; }
    int height() const { return height_; }
    double r_max() const { return r_max_; }
    double resolution() const { return resolution_; }
    WorldPoint origin() const { return origin_; }

    bool in_bounds(int cx, int cy) const
    {
        return cx >= 0 && cy >= 0 && cx < width_ && cy < height_;
    }

    uint8_t raw_at(int cx, int cy) const
    {
        return values_[static_cast<size_t>(cy) * width_ + cx];
    }

    double distance_at(int cx, int cy) const { return raw_at(cx, cy) * decode_step_; }

    // Decoded distance at a world point; nullopt outside the field.
    std::optional<double> distance_at_world(const WorldPoint& p) const
    {
        const int cx = static_cast<int>(std::floor((p.x - origin_.x) * inv_resolution_));
        const int cy = static_cast<int>(std::floor((p.y - origin_.y) * inv_resolution_));
        if (!in_bounds(cx, cy))
            return std::nullopt;
        return distance_at(cx, cy);
    }

    const std::vector<uint8_t>& values() const { return values_; }

private:
    int width_;
    int height_;
    double resolution_;
    double inv_resolution_;
    WorldPoint origin_;
    double r_max_;
    double decode_step_; // r_max / 255
    std::vector<uint8_t> values_;
};

// Exact two-pass squared Euclidean distance transform (Felzenszwalb and
// Huttenlocher), converted to meters, truncated at r_max and quantized to
// 8 bits. Throws std::invalid_argument when the map has no occupied cell.
DistanceField compute_edt(const SemanticGridMap& map, double r_max);

} // namespace smcl
