#include "smcl/image_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <png.h>

namespace smcl {

RgbImage::RgbImage(int w, int h, uint8_t r, uint8_t g, uint8_t b)
    : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3)
{
    for (size_t i = 0; i < pixels.size(); i += 3)
    {
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
}

void RgbImage::set(int x, int y, uint8_t r, uint8_t g, uint8_t b)
{
    if (x < 0 || y < 0 || x >= width || y >= height)
        return;
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
}

void RgbImage::blend(int x, int y, uint8_t r, uint8_t g, uint8_t b, double alpha)
{
    if (x < 0 || y < 0 || x >= width || y >= height)
        return;
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    pixels[i] = static_cast<uint8_t>(pixels[i] * (1.0 - alpha) + r * alpha);
    pixels[i + 1] = static_cast<uint8_t>(pixels[i + 1] * (1.0 - alpha) + g * alpha);
    pixels[i + 2] = static_cast<uint8_t>(pixels[i + 2] * (1.0 - alpha) + b * alpha);
}

namespace {

// Skips whitespace and '#' comment lines between PNM header tokens.
int next_pnm_token(std::istream& in)
{
    int c = in.get();
    while (c != EOF)
    {
        if (c == '#')
        {
            while (c != EOF && c != '\n')
                c = in.get();
        }
        else if (!std::isspace(c))
        {
            return c;
        }
        c = in.get();
    }
    return EOF;
}

long read_pnm_int(std::istream& in)
{
    const int first = next_pnm_token(in);
    if (first == EOF || !std::isdigit(first))
        throw std::runtime_error("malformed PGM header");
    long value = first - '0';
    int c = in.get();
    while (c != EOF && std::isdigit(c))
    {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

GrayImage read_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open image: " + path.string());

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2'))
        throw std::runtime_error("not a PGM file: " + path.string());
    const bool binary = magic[1] == '5';

    GrayImage img;
    img.width = static_cast<int>(read_pnm_int(in));
    img.height = static_cast<int>(read_pnm_int(in));
    const long maxval = read_pnm_int(in);
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error("unsupported PGM header in " + path.string());

    const size_t n = static_cast<size_t>(img.width) * img.height;
    img.pixels.resize(n);
    if (binary)
    {
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n)
            throw std::runtime_error("truncated PGM payload in " + path.string());
    }
    else
    {
        for (size_t i = 0; i < n; ++i)
        {
            const long v = read_pnm_int(in);
            if (v < 0 || v > maxval)
                throw std::runtime_error("PGM sample out of range in " + path.string());
            img.pixels[i] = static_cast<uint8_t>(v);
        }
    }
    return img;
}

GrayImage read_png_gray(const std::filesystem::path& path)
{
    FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp)
        throw std::runtime_error("cannot open image: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        if (png)
            png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("libpng init failed");
    }

    GrayImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("corrupt PNG: " + path.string());
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16)
        png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_COLOR)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (color_type & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.pixels.resize(static_cast<size_t>(img.width) * img.height);
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.pixels.data() + static_cast<size_t>(y) * img.width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

} // namespace

GrayImage read_gray_image(const std::filesystem::path& path)
{
    std::ifstream probe(path, std::ios::binary);
    if (!probe)
        throw std::runtime_error("cannot open image: " + path.string());
    char head[2] = {0, 0};
    probe.read(head, 2);
    probe.close();

    if (head[0] == 'P' && (head[1] == '5' || head[1] == '2'))
        return read_pgm(path);
    if (static_cast<unsigned char>(head[0]) == 0x89 && head[1] == 'P')
        return read_png_gray(path);
    throw std::runtime_error("unsupported image format (need 8-bit PGM or PNG): " + path.string());
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write image: " + path.string());
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
}

void write_png(const std::filesystem::path& path, const RgbImage& image)
{
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp)
        throw std::runtime_error("cannot write image: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        if (png)
            png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("PNG write failed: " + path.string());
    }

    png_init_io(png, fp);
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y)
        png_write_row(png, const_cast<png_bytep>(image.pixels.data() +
                                                 static_cast<size_t>(y) * image.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

} // namespace smcl
