#pragma once

#include <array>
#include <optional>

#include "smcl/distance_field.hpp"
#include "smcl/geometry.hpp"

namespace smcl {

inline constexpr int kTofGridSize = 8;
inline constexpr int kTofSensorCount = 4;   // front, left, back, right
inline constexpr int kTofMiddleRow = 3;
inline constexpr int kMiddleRowBeams = 32;  // 8 beams x 4 sensors

// Mounting yaw of each sensor in the body frame.
inline constexpr std::array<double, kTofSensorCount> kSensorMountYaw = {
    0.0, kPi / 2.0, kPi, -kPi / 2.0};

// Bearing offset of a zone column inside the sensor field of view: 8 equally
// spaced bearings centered on the mounting yaw.
inline double tof_zone_bearing(int column, double fov)
{
    return ((column + 0.5) / kTofGridSize - 0.5) * fov;
}

// One multizone ToF frame: the front sensor keeps its full 8x8 grid (used
// for bounding-box range association), the other three sensors carry only
// the 8 middle-row beams.
struct TofFrame
{
    double timestamp = 0.0;

    std::array<float, 64> front_range{};  // row-major [row * 8 + col], meters
    std::array<bool, 64> front_valid{};

    std::array<std::array<float, 8>, 3> side_range{};  // left, back, right
    std::array<std::array<bool, 8>, 3> side_valid{};

    // Middle-row beam b in [0, 32): sensor b / 8, column b % 8.
    std::optional<float> middle_row_beam(int beam) const
    {
        const int sensor = beam / kTofGridSize;
        const int column = beam % kTofGridSize;
        if (sensor == 0)
        {
            const int idx = kTofMiddleRow * kTofGridSize + column;
            if (!front_valid[idx])
                return std::nullopt;
            return front_range[idx];
        }
        if (!side_valid[sensor - 1][column])
            return std::nullopt;
        return side_range[sensor - 1][column];
    }

    int count_valid_beams(double max_valid_range) const
    {
        int n = 0;
        for (int b = 0; b < kMiddleRowBeams; ++b)
        {
            const auto r = middle_row_beam(b);
            if (r && *r <= max_valid_range)
                ++n;
        }
        return n;
    }
};

struct Detection
{
    int class_index = 0;
    double x_min = 0.0; // pixels, xyxy
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    double confidence = 0.0;
};

struct SensorModelParams
{
    double sigma_g = 8.0;          // geometric model std
    double sigma_s = 10.0;         // semantic model std
    double tau_t = 2.5;            // association threshold, meters
    double r_max = 2.0;            // EDT truncation, meters
    double tof_valid_range = 3.0;  // hard validity cutoff, meters
    int min_valid_beams = 8;
    double miss_penalty = 0.1;
    double tof_fov_horizontal = 45.0 * kPi / 180.0;
    double tof_fov_vertical = 45.0 * kPi / 180.0;

    void validate() const; // throws std::invalid_argument
};

// Body-frame unit vectors of the 32 middle-row beams, precomputed once so the
// per-particle hot loop only rotates by the particle heading.
struct BeamGeometry
{
    std::array<double, kMiddleRowBeams> ux{};
    std::array<double, kMiddleRowBeams> uy{};

    static BeamGeometry from(const SensorModelParams& params);
};

// Log-likelihood of a ToF frame under the beam end model: the product over
// valid middle-row beams of a Gaussian (std sigma_g, normalization
// 1/sqrt(2*pi*sigma_g)) evaluated at the decoded EDT value of the beam
// endpoint. Endpoints outside the map use r_max. Beams whose measured range
// exceeds tof_valid_range are discarded; with fewer than min_valid_beams
// left, nullopt is returned and the caller skips the update.
std::optional<double> beam_end_log_likelihood(const Pose2D& pose, const TofFrame& frame,
                                              const DistanceField& edt,
                                              const SensorModelParams& params,
                                              const BeamGeometry& beams);

std::optional<double> beam_end_log_likelihood(const Pose2D& pose, const TofFrame& frame,
                                              const DistanceField& edt,
                                              const SensorModelParams& params);

// Mean valid front-grid range over the zones whose centers fall inside the
// bounding box. The box is mapped onto the 8x8 zone lattice by a linear map
// of pixel coordinates, assuming the ToF field of view is centered on and
// proportionally aligned with the camera field of view. nullopt when no
// valid zone is covered.
std::optional<double> associate_bbox_range(const TofFrame& frame, const Detection& detection,
                                           const CameraIntrinsics& intrinsics,
                                           const SensorModelParams& params);

// Log-likelihood of one detection: trace toward the bounding-box center; a
// blocked or exiting trace returns log(miss_penalty); a hit with an
// associated range below tau_t scores the Gaussian of (d_trace - d_tof) with
// std sigma_s; a hit without usable range returns the Gaussian peak constant
// (neutral: relative weights among such particles are unchanged).
// Throws std::out_of_range for a class index missing from the map.
double semantic_log_likelihood(const Pose2D& pose, const Detection& detection,
                               const TofFrame& frame, const SemanticGridMap& map,
                               const CameraIntrinsics& intrinsics,
                               const SensorModelParams& params);

} // namespace smcl
