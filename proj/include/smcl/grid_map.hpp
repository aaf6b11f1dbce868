#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smcl/image_io.hpp"

namespace smcl {

// One map cell packs occupancy and semantics into 16 bits:
// bits 0-1 hold the occupancy state, bits 2-15 hold one flag per semantic
// class (at most 14 classes). The pattern 3 in the occupancy bits is never
// stored and doubles as the out-of-bounds marker.
using CellValue = uint16_t;

enum class Occupancy : uint8_t
{
    free_space = 0,
    occupied = 1,
    unknown = 2,
};

inline constexpr int kMaxClasses = 14;
inline constexpr CellValue kOutOfBounds = 0x0003;

constexpr Occupancy occupancy_of(CellValue v) { return static_cast<Occupancy>(v & 0x3); }
constexpr uint16_t class_mask_of(CellValue v) { return static_cast<uint16_t>(v >> 2); }
constexpr bool has_class_bit(CellValue v, int class_index)
{
    return (v >> (2 + class_index)) & 0x1;
}
constexpr CellValue pack_cell(Occupancy occ, uint16_t class_mask)
{
    return static_cast<CellValue>((static_cast<CellValue>(occ) & 0x3) |
                                  (static_cast<CellValue>(class_mask) << 2));
}
constexpr CellValue with_class_bit(CellValue v, int class_index)
{
    return static_cast<CellValue>(v | (1u << (2 + class_index)));
}

struct GridIndex
{
    int x = 0;
    int y = 0;
    bool operator==(const GridIndex&) const = default;
};

struct WorldPoint
{
    double x = 0.0; // meters
    double y = 0.0;
};

// Axis-aligned box in cell coordinates, [x_min, x_max) x [y_min, y_max).
struct SemanticAnnotation
{
    std::string class_name;
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
};

// Annotation resolved against a class table, box clipped to map bounds.
struct ResolvedAnnotation
{
    int class_index = 0;
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
};

class SemanticGridMap
{
public:
    SemanticGridMap(int width, int height, double resolution, WorldPoint origin,
                    std::vector<std::string> class_table = {});

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    WorldPoint origin() const { return origin_; }

    const std::vector<std::string>& class_table() const { return class_table_; }
    // -1 when the name is not in the table.
    int class_index(std::string_view name) const;

    bool in_bounds(int cx, int cy) const
    {
        return cx >= 0 && cy >= 0 && cx < width_ && cy < height_;
    }

    CellValue at(int cx, int cy) const
    {
        return cells_[static_cast<size_t>(cy) * width_ + cx];
    }
    // Total over the plane: out-of-bounds queries return kOutOfBounds.
    CellValue cell_at(const WorldPoint& p) const;

    bool is_occupied(int cx, int cy) const { return occupancy_of(at(cx, cy)) == Occupancy::occupied; }
    bool is_free(int cx, int cy) const { return occupancy_of(at(cx, cy)) == Occupancy::free_space; }

    GridIndex grid_of(const WorldPoint& p) const;
    // Cell center, so grid_of(world_of(c)) == c for in-bounds cells.
    WorldPoint world_of(const GridIndex& c) const;

    void set(int cx, int cy, CellValue v);
    void set_occupancy(int cx, int cy, Occupancy occ);
    void set_class_bit(int cx, int cy, int class_index);

    std::span<const CellValue> cells() const { return cells_; }
    std::vector<GridIndex> free_cells() const;
    int count_occupied() const;

    const std::vector<ResolvedAnnotation>& annotations() const { return annotations_; }
    void add_annotation(const SemanticAnnotation& annotation);

private:
    int width_;
    int height_;
    double resolution_;
    WorldPoint origin_;
    std::vector<std::string> class_table_;
    std::vector<CellValue> cells_;
    std::vector<ResolvedAnnotation> annotations_;
};

// Grayscale-to-occupancy thresholds: pixel < occupied_below -> occupied,
// pixel > free_above -> free, anything between -> unknown.
struct MapLoadOptions
{
    uint8_t occupied_below = 50;
    uint8_t free_above = 200;
};

// Parsed annotation sidecar (see docs/file_formats.md for the schema).
struct MapAnnotations
{
    double resolution = 0.0;
    WorldPoint origin;
    std::vector<std::string> classes; // optional explicit ordering
    std::vector<SemanticAnnotation> objects;
};

MapAnnotations read_annotations(const std::filesystem::path& path);

SemanticGridMap build_map(const GrayImage& image, const MapAnnotations& annotations,
                          const MapLoadOptions& options = {});

SemanticGridMap load_map(const std::filesystem::path& image_path,
                         const std::filesystem::path& annotation_path,
                         const MapLoadOptions& options = {});

} // namespace smcl
