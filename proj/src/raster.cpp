#include "candleseg/raster.hpp"

namespace candleseg {

std::string to_string(const Rect& rect) {
    return "rect(x0=" + std::to_string(rect.x0) + ", y0=" + std::to_string(rect.y0) + ", w=" +
           std::to_string(rect.w) + ", h=" + std::to_string(rect.h) + ")";
}

void check_rect(const Rect& rect, int width, int height) {
    const bool inside = rect.x0 >= 0 && rect.y0 >= 0 && rect.w > 0 && rect.h > 0 &&
                        static_cast<long long>(rect.x0) + rect.w <= width &&
                        static_cast<long long>(rect.y0) + rect.h <= height;
    if (!inside) {
        throw BoundsError(to_string(rect) + " does not fit inside image " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
}

GrayImage mask_to_gray(const BinaryMask& mask) {
    std::vector<std::uint8_t> out(mask.size());
    auto src = mask.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = src[i] ? 255 : 0;
    }
    return GrayImage(mask.width(), mask.height(), std::move(out));
}

BinaryMask gray_to_mask(const GrayImage& image) {
    std::vector<std::uint8_t> out(image.size());
    auto src = image.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = src[i] != 0 ? 1 : 0;
    }
    return BinaryMask(image.width(), image.height(), std::move(out));
}

RasterImage gray_to_rgb(const GrayImage& image) {
    std::vector<Rgb> out(image.size());
    auto src = image.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = Rgb{src[i], src[i], src[i]};
    }
    return RasterImage(image.width(), image.height(), std::move(out));
}

}  // namespace candleseg
