#include "smcl/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace smcl {

SemanticGridMap::SemanticGridMap(int width, int height, double resolution, WorldPoint origin,
                                 std::vector<std::string> class_table)
    : width_(width),
      height_(height),
      resolution_(resolution),
      origin_(origin),
      class_table_(std::move(class_table))
{
    if (width_ <= 0 || height_ <= 0)
        throw std::invalid_argument("map dimensions must be positive");
    if (!(resolution_ > 0.0))
        throw std::invalid_argument("map resolution must be positive");
    if (class_table_.size() > kMaxClasses)
        throw std::invalid_argument("class table exceeds 14 classes");
    cells_.assign(static_cast<size_t>(width_) * height_,
                  pack_cell(Occupancy::free_space, 0));
}

int SemanticGridMap::class_index(std::string_view name) const
{
    for (size_t i = 0; i < class_table_.size(); ++i)
        if (class_table_[i] == name)
            return static_cast<int>(i);
    return -1;
}

CellValue SemanticGridMap::cell_at(const WorldPoint& p) const
{
    const GridIndex c = grid_of(p);
    if (!in_bounds(c.x, c.y))
        return kOutOfBounds;
    return at(c.x, c.y);
}

GridIndex SemanticGridMap::grid_of(const WorldPoint& p) const
{
    return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
            static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
}

WorldPoint SemanticGridMap::world_of(const GridIndex& c) const
{
    return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
}

void SemanticGridMap::set(int cx, int cy, CellValue v)
{
    if ((v & 0x3) == 0x3)
        throw std::invalid_argument("occupancy pattern 3 is reserved");
    cells_[static_cast<size_t>(cy) * width_ + cx] = v;
}

void SemanticGridMap::set_occupancy(int cx, int cy, Occupancy occ)
{
    CellValue& v = cells_[static_cast<size_t>(cy) * width_ + cx];
    v = static_cast<CellValue>((v & ~0x3u) | static_cast<CellValue>(occ));
}

void SemanticGridMap::set_class_bit(int cx, int cy, int class_index)
{
    if (class_index < 0 || class_index >= static_cast<int>(class_table_.size()))
        throw std::out_of_range("class index outside class table");
    CellValue& v = cells_[static_cast<size_t>(cy) * width_ + cx];
    v = with_class_bit(v, class_index);
}

std::vector<GridIndex> SemanticGridMap::free_cells() const
{
    std::vector<GridIndex> out;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (is_free(x, y))
                out.push_back({x, y});
    return out;
}

int SemanticGridMap::count_occupied() const
{
    int n = 0;
    for (const CellValue v : cells_)
        if (occupancy_of(v) == Occupancy::occupied)
            ++n;
    return n;
}

void SemanticGridMap::add_annotation(const SemanticAnnotation& annotation)
{
    if (annotation.x_min >= annotation.x_max || annotation.y_min >= annotation.y_max)
        throw std::invalid_argument("annotation box is empty: " + annotation.class_name);

    int idx = class_index(annotation.class_name);
    if (idx < 0)
    {
        if (class_table_.size() >= kMaxClasses)
            throw std::invalid_argument("class table exceeds 14 classes");
        class_table_.push_back(annotation.class_name);
        idx = static_cast<int>(class_table_.size()) - 1;
    }

    const int x0 = std::max(annotation.x_min, 0);
    const int y0 = std::max(annotation.y_min, 0);
    const int x1 = std::min(annotation.x_max, width_);
    const int y1 = std::min(annotation.y_max, height_);
    if (x0 >= x1 || y0 >= y1)
        throw std::invalid_argument("annotation box outside map bounds: " + annotation.class_name);

    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            set_class_bit(x, y, idx);

    annotations_.push_back({idx, x0, y0, x1, y1});
}

MapAnnotations read_annotations(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open annotation file: " + path.string());

    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw std::runtime_error("malformed annotation JSON in " + path.string() + ": " + e.what());
    }

    MapAnnotations out;
    try
    {
        out.resolution = j.at("resolution").get<double>();
        const auto& origin = j.at("origin");
        out.origin = {origin.at(0).get<double>(), origin.at(1).get<double>()};
        if (j.contains("classes"))
            out.classes = j.at("classes").get<std::vector<std::string>>();
        for (const auto& obj : j.at("objects"))
        {
            SemanticAnnotation a;
            a.class_name = obj.at("class").get<std::string>();
            const auto& box = obj.at("box");
            a.x_min = box.at(0).get<int>();
            a.y_min = box.at(1).get<int>();
            a.x_max = box.at(2).get<int>();
            a.y_max = box.at(3).get<int>();
            out.objects.push_back(std::move(a));
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw std::runtime_error("annotation schema violation in " + path.string() + ": " +
                                 e.what());
    }
    if (!(out.resolution > 0.0))
        throw std::runtime_error("annotation resolution must be positive: " + path.string());
    return out;
}

SemanticGridMap build_map(const GrayImage& image, const MapAnnotations& annotations,
                          const MapLoadOptions& options)
{
    if (image.width <= 0 || image.height <= 0)
        throw std::invalid_argument("empty map image");
    if (annotations.classes.size() > kMaxClasses)
        throw std::invalid_argument("class table exceeds 14 classes");

    SemanticGridMap map(image.width, image.height, annotations.resolution, annotations.origin,
                        annotations.classes);

    for (int y = 0; y < image.height; ++y)
    {
        for (int x = 0; x < image.width; ++x)
        {
            const uint8_t px = image.at(x, y);
            Occupancy occ = Occupancy::unknown;
            if (px < options.occupied_below)
                occ = Occupancy::occupied;
            else if (px > options.free_above)
                occ = Occupancy::free_space;
            map.set_occupancy(x, y, occ);
        }
    }

    for (const auto& object : annotations.objects)
        map.add_annotation(object);

    return map;
}

SemanticGridMap load_map(const std::filesystem::path& image_path,
                         const std::filesystem::path& annotation_path,
                         const MapLoadOptions& options)
{
    return build_map(read_gray_image(image_path), read_annotations(annotation_path), options);
}

} // namespace smcl
