#pragma once

// Independent reference implementations used to check the production code.
// These deliberately share no code path with the library: the distance
// oracle is a nearest-neighbor scan, the ray oracle a fine-stepping sampler.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "smcl/geometry.hpp"
#include "smcl/grid_map.hpp"
#include "smcl/rng.hpp"

namespace oracles {

// Exact nearest-occupied-cell distances (cell units), found by scanning
// occupied cells grouped per row with |dy| pruning. O(k) per query in
// practice, but never a distance transform.
class BruteForceDistance
{
public:
    explicit BruteForceDistance(const smcl::SemanticGridMap& map)
        : width_(map.width()), height_(map.height()), rows_(map.height())
    {
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x)
                if (map.is_occupied(x, y))
                    rows_[y].push_back(x);
    }

    bool any_occupied() const
    {
        for (const auto& row : rows_)
            if (!row.empty())
                return true;
        return false;
    }

    // Euclidean distance in cell units from (x, y) to the closest occupied
    // cell center. Rows are visited in increasing |dy|, so the scan can stop
    // once dy^2 alone rules out any improvement.
    double distance_cells(int x, int y) const
    {
        double best_sq = std::numeric_limits<double>::infinity();
        for (int dy = 0; dy < height_; ++dy)
        {
            if (static_cast<double>(dy) * dy >= best_sq)
                break;
            bool in_bounds = false;
            if (y + dy < height_)
            {
                in_bounds = true;
                best_sq = std::min(best_sq, row_best(rows_[y + dy], x, dy));
            }
            if (dy > 0 && y - dy >= 0)
            {
                in_bounds = true;
                best_sq = std::min(best_sq, row_best(rows_[y - dy], x, dy));
            }
            if (!in_bounds)
                break;
        }
        return std::sqrt(best_sq);
    }

private:
    static double row_best(const std::vector<int>& xs, int x, int dy)
    {
        double best = std::numeric_limits<double>::infinity();
        // xs ascending; closest |x' - x| found around the insertion point.
        const auto it = std::lower_bound(xs.begin(), xs.end(), x);
        if (it != xs.end())
        {
            const double dx = *it - x;
            best = std::min(best, dx * dx + static_cast<double>(dy) * dy);
        }
        if (it != xs.begin())
        {
            const double dx = *(it - 1) - x;
            best = std::min(best, dx * dx + static_cast<double>(dy) * dy);
        }
        return best;
    }

    int width_;
    int height_;
    std::vector<std::vector<int>> rows_;
};

// Fine-stepping ray sampler: marches step-by-step and reports the distance
// of the first sample falling inside an occupied cell.
struct SampledRay
{
    bool hit = false;
    double distance = 0.0;
};

inline SampledRay sample_ray(const smcl::SemanticGridMap& map, const smcl::WorldPoint& start,
                             double bearing, double max_range, double step)
{
    const double dx = std::cos(bearing) * step;
    const double dy = std::sin(bearing) * step;
    double x = start.x;
    double y = start.y;
    const int n = static_cast<int>(std::ceil(max_range / step));
    for (int k = 0; k <= n; ++k)
    {
        const smcl::CellValue v = map.cell_at({x, y});
        if (v == smcl::kOutOfBounds)
            return {false, k * step};
        if (smcl::occupancy_of(v) == smcl::Occupancy::occupied)
            return {true, k * step};
        x += dx;
        y += dy;
    }
    return {false, max_range};
}

// Random floor-plan-like map: free interior, occupied border, a few wall
// rectangles and random unknown patches.
inline smcl::SemanticGridMap random_structured_map(uint64_t seed, int width, int height,
                                                   double resolution = 0.05)
{
    smcl::SemanticGridMap map(width, height, resolution, {0.0, 0.0});
    smcl::RandomStream rs(seed, 0xffee);

    for (int x = 0; x < width; ++x)
    {
        map.set_occupancy(x, 0, smcl::Occupancy::occupied);
        map.set_occupancy(x, height - 1, smcl::Occupancy::occupied);
    }
    for (int y = 0; y < height; ++y)
    {
        map.set_occupancy(0, y, smcl::Occupancy::occupied);
        map.set_occupancy(width - 1, y, smcl::Occupancy::occupied);
    }

    const int walls = 2 + static_cast<int>(rs.next_index(5));
    for (int w = 0; w < walls; ++w)
    {
        const bool horizontal = rs.next_uniform() < 0.5;
        const int x0 = 1 + static_cast<int>(rs.next_index(std::max(1, width - 4)));
        const int y0 = 1 + static_cast<int>(rs.next_index(std::max(1, height - 4)));
        const int len = 3 + static_cast<int>(rs.next_index(std::max(2, width / 2)));
        const int thick = 1 + static_cast<int>(rs.next_index(2));
        for (int d = 0; d < len; ++d)
            for (int s = 0; s < thick; ++s)
            {
                const int x = horizontal ? x0 + d : x0 + s;
                const int y = horizontal ? y0 + s : y0 + d;
                if (x > 0 && y > 0 && x < width - 1 && y < height - 1)
                    map.set_occupancy(x, y, smcl::Occupancy::occupied);
            }
    }
    return map;
}

// Salt-and-pepper map for the distance-transform property tests.
inline smcl::SemanticGridMap random_noise_map(uint64_t seed, int width, int height,
                                              double occupied_fraction,
                                              double resolution = 0.05)
{
    smcl::SemanticGridMap map(width, height, resolution, {0.0, 0.0});
    smcl::RandomStream rs(seed, 0xddcc);
    bool any = false;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (rs.next_uniform() < occupied_fraction)
            {
                map.set_occupancy(x, y, smcl::Occupancy::occupied);
                any = true;
            }
    if (!any)
        map.set_occupancy(width / 2, height / 2, smcl::Occupancy::occupied);
    return map;
}

} // namespace oracles
