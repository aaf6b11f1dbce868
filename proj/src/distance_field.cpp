#include "smcl/distance_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smcl {

namespace {

// Large finite stand-in for "no source": a true infinity would make the
// parabola intersection below evaluate inf - inf.
constexpr double kInf = 1e20;

// 1D squared-distance transform, lower envelope of parabolas
// (Felzenszwalb & Huttenlocher). f is the source row, d the output; v and z
// are scratch of size n and n + 1.
void edt_1d(const double* f, double* d, int* v, double* z, int n)
{
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q)
    {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k])
        {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q)
    {
        while (z[k + 1] < q)
            ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

DistanceField::DistanceField(int width, int height, double resolution, WorldPoint origin,
                             double r_max, std::vector<uint8_t> values)
    : width_(width),
      height_(height),
      resolution_(resolution),
      inv_resolution_(1.0 / resolution),
      origin_(origin),
      r_max_(r_max),
      decode_step_(r_max / 255.0),
      values_(std::move(values))
{
    if (width_ <= 0 || height_ <= 0 || !(resolution_ > 0.0) || !(r_max_ > 0.0))
        throw std::invalid_argument("invalid distance field geometry");
    if (values_.size() != static_cast<size_t>(width_) * height_)
        throw std::invalid_argument("distance field size mismatch");
}

DistanceField compute_edt(const SemanticGridMap& map, double r_max)
{
    if (!(r_max > 0.0))
        throw std::invalid_argument("r_max must be positive");

    const int w = map.width();
    const int h = map.height();
    const int n = std::max(w, h);

    std::vector<double> grid(static_cast<size_t>(w) * h);
    bool any_occupied = false;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
        {
            const bool occ = map.is_occupied(x, y);
            any_occupied |= occ;
            grid[static_cast<size_t>(y) * w + x] = occ ? 0.0 : kInf;
        }
    if (!any_occupied)
        throw std::invalid_argument("distance transform undefined: map has no occupied cell");

    std::vector<double> f(n), d(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    // Columns first, then rows; squared distances compose.
    for (int x = 0; x < w; ++x)
    {
        for (int y = 0; y < h; ++y)
            f[y] = grid[static_cast<size_t>(y) * w + x];
        edt_1d(f.data(), d.data(), v.data(), z.data(), h);
        for (int y = 0; y < h; ++y)
            grid[static_cast<size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y)
    {
        double* row = grid.data() + static_cast<size_t>(y) * w;
        edt_1d(row, d.data(), v.data(), z.data(), w);
        for (int x = 0; x < w; ++x)
            row[x] = d[x];
    }

    const double res = map.resolution();
    std::vector<uint8_t> values(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
    {
        if (grid[i] == 0.0)
        {
            values[i] = 0;
            continue;
        }
        const double meters = std::sqrt(grid[i]) * res;
        if (meters >= r_max)
        {
            values[i] = 255;
            continue;
        }
        const int q = static_cast<int>(std::lround(meters / r_max * 255.0));
        // Non-occupied cells never encode as 0: the zero code is reserved
        // for occupied cells.
        values[i] = static_cast<uint8_t>(std::clamp(q, 1, 255));
    }

    return DistanceField(w, h, res, map.origin(), r_max, std::move(values));
}

} // namespace smcl
