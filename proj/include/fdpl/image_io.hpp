#pragma once

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <string>
#include <tuple>
#include <vector>

#include "fdpl/core.hpp"

namespace fdpl {

namespace detail {

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

}  // namespace detail

// Loads an 8-bit RGB or grayscale PNG, channels scaled to [0,1]; grayscale is
// replicated to three channels. Anything else is a descriptive error.
inline RgbImage load_image(const std::string& path) {
    detail::FileCloser file{std::fopen(path.c_str(), "rb")};
    if (!file.f) throw Error("cannot open: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, file.f) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw Error("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("libpng init failed");
    }

    std::vector<png_byte> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("PNG decode error: " + path);
    }

    png_init_io(png, file.f);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (bit_depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("unsupported bit depth " + std::to_string(bit_depth) + " (want 8): " + path);
    }
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("unsupported PNG color type " + std::to_string(color_type) +
                    " (want 8-bit RGB or grayscale): " + path);
    }

    const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    data.resize(static_cast<size_t>(w) * h * channels);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = &data[static_cast<size_t>(y) * w * channels];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    const size_t n = static_cast<size_t>(w) * h;
    for (size_t i = 0; i < n; ++i) {
        if (channels == 3) {
            img.pixels[3 * i + 0] = data[3 * i + 0] / 255.0;
            img.pixels[3 * i + 1] = data[3 * i + 1] / 255.0;
            img.pixels[3 * i + 2] = data[3 * i + 2] / 255.0;
        } else {
            double v = data[i] / 255.0;
            img.pixels[3 * i + 0] = v;
            img.pixels[3 * i + 1] = v;
            img.pixels[3 * i + 2] = v;
        }
    }
    return img;
}

namespace detail {

inline void write_png(const std::string& path, int width, int height, int channels,
                      const std::vector<png_byte>& data) {
    FileCloser file{std::fopen(path.c_str(), "wb")};
    if (!file.f) throw Error("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng init failed");
    }

    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("PNG encode error: " + path);
    }

    png_init_io(png, file.f);
    png_set_IHDR(png, info, width, height, 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(&data[static_cast<size_t>(y) * width * channels]);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline png_byte to_byte(double v) {
    return static_cast<png_byte>(std::lround(clamp01(v) * 255.0));
}

}  // namespace detail

// Writes an 8-bit grayscale PNG; samples clamped to [0,1], quantized by
// round(v * 255).
inline void save_image(const ImagePlane& plane, const std::string& path) {
    std::vector<png_byte> data(plane.size());
    for (size_t i = 0; i < plane.size(); ++i) data[i] = detail::to_byte(plane.samples[i]);
    detail::write_png(path, plane.width, plane.height, 1, data);
}

inline void save_rgb_image(const RgbImage& img, const std::string& path) {
    std::vector<png_byte> data(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) data[i] = detail::to_byte(img.pixels[i]);
    detail::write_png(path, img.width, img.height, 3, data);
}

// --- ITU-R BT.601 full-range (JPEG convention) color transform.

inline std::tuple<ImagePlane, ImagePlane, ImagePlane> rgb_to_ycbcr(const RgbImage& img) {
    ImagePlane y(img.width, img.height), cb(img.width, img.height), cr(img.width, img.height);
    const size_t n = static_cast<size_t>(img.width) * img.height;
    for (size_t i = 0; i < n; ++i) {
        double r = img.pixels[3 * i], g = img.pixels[3 * i + 1], b = img.pixels[3 * i + 2];
        double lum = 0.299 * r + 0.587 * g + 0.114 * b;
        y.samples[i] = lum;
        cb.samples[i] = 0.5 + (b - lum) / 1.772;
        cr.samples[i] = 0.5 + (r - lum) / 1.402;
    }
    return {std::move(y), std::move(cb), std::move(cr)};
}

inline RgbImage ycbcr_to_rgb(const ImagePlane& y, const ImagePlane& cb, const ImagePlane& cr) {
    require_same_dims(y, cb, "ycbcr_to_rgb");
    require_same_dims(y, cr, "ycbcr_to_rgb");
    RgbImage img(y.width, y.height);
    for (size_t i = 0; i < y.size(); ++i) {
        double lum = y.samples[i];
        double r = lum + 1.402 * (cr.samples[i] - 0.5);
        double b = lum + 1.772 * (cb.samples[i] - 0.5);
        double g = (lum - 0.299 * r - 0.114 * b) / 0.587;  // algebraic inverse of the forward sum
        img.pixels[3 * i + 0] = r;
        img.pixels[3 * i + 1] = g;
        img.pixels[3 * i + 2] = b;
    }
    return img;
}

inline ImagePlane load_luminance(const std::string& path) {
    auto [y, cb, cr] = rgb_to_ycbcr(load_image(path));
    (void)cb;
    (void)cr;
    return std::move(y);
}

}  // namespace fdpl
