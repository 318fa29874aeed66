#pragma once

#include "candleseg/error.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace candleseg {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Axis-aligned pixel rectangle: top-left corner plus extent.
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
};

std::string to_string(const Rect& rect);

/**
 * Row-major raster of a single pixel type.
 *
 * Pixel (x, y) lives at index y * width + x. Width and height are always
 * positive and the pixel count always equals width * height. Boolean rasters
 * store one byte per pixel (0 or 1) so that element references stay real
 * references.
 */
template <typename Pixel>
class Raster {
public:
    using value_type = Pixel;
    using storage_type = std::conditional_t<std::is_same_v<Pixel, bool>, std::uint8_t, Pixel>;

    Raster(int width, int height, Pixel fill = Pixel{})
        : width_(width), height_(height) {
        check_dims(width, height);
        pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                       static_cast<storage_type>(fill));
    }

    Raster(int width, int height, std::vector<storage_type> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        check_dims(width, height);
        if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw DimensionError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                                 std::to_string(width) + "x" + std::to_string(height));
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    storage_type& at(int x, int y) { return pixels_[index(x, y)]; }
    const storage_type& at(int x, int y) const { return pixels_[index(x, y)]; }

    /// Returns `outside` for coordinates beyond the image.
    Pixel get_or(int x, int y, Pixel outside) const {
        if (x < 0 || y < 0 || x >= width_ || y >= height_) {
            return outside;
        }
        return static_cast<Pixel>(pixels_[index(x, y)]);
    }

    std::span<storage_type> pixels() noexcept { return pixels_; }
    std::span<const storage_type> pixels() const noexcept { return pixels_; }

    bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static void check_dims(int width, int height) {
        if (width < 1 || height < 1) {
            throw DimensionError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                                 std::to_string(height));
        }
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<storage_type> pixels_;
};

using RasterImage = Raster<Rgb>;
using GrayImage = Raster<std::uint8_t>;
using BinaryMask = Raster<bool>;
using LabelMap = Raster<std::int32_t>;

/// Throws BoundsError unless `rect` has positive extent and lies inside a width x height image.
void check_rect(const Rect& rect, int width, int height);

template <typename Pixel>
Raster<Pixel> crop(const Raster<Pixel>& image, const Rect& rect) {
    check_rect(rect, image.width(), image.height());
    std::vector<typename Raster<Pixel>::storage_type> out;
    out.reserve(static_cast<std::size_t>(rect.w) * static_cast<std::size_t>(rect.h));
    for (int y = 0; y < rect.h; ++y) {
        for (int x = 0; x < rect.w; ++x) {
            out.push_back(image.at(rect.x0 + x, rect.y0 + y));
        }
    }
    return Raster<Pixel>(rect.w, rect.h, std::move(out));
}

/// Mask as a 0/255 grayscale image.
GrayImage mask_to_gray(const BinaryMask& mask);

/// Nonzero pixels become foreground.
BinaryMask gray_to_mask(const GrayImage& image);

RasterImage gray_to_rgb(const GrayImage& image);

}  // namespace candleseg
