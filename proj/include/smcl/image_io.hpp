#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace smcl {

// Row-major, top-left origin.
struct GrayImage
{
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;

    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

struct RgbImage
{
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // 3 bytes per pixel

    RgbImage() = default;
    RgbImage(int w, int h, uint8_t r = 255, uint8_t g = 255, uint8_t b = 255);

    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
    void blend(int x, int y, uint8_t r, uint8_t g, uint8_t b, double alpha);
};

// Reads an 8-bit grayscale map image. Supported containers: PGM (P5/P2) and
// PNG (any color type, converted to 8-bit gray). Throws std::runtime_error on
// missing or malformed files.
GrayImage read_gray_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const GrayImage& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);

} // namespace smcl
