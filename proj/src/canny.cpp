#include "candleseg/canny.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace candleseg {

namespace {

int clamp_index(int v, int extent) { return std::clamp(v, 0, extent - 1); }

// (dx, dy) of the neighbour along each quantized gradient direction.
constexpr std::array<std::array<int, 2>, 4> kSectorStep = {{{1, 0}, {1, -1}, {0, 1}, {1, 1}}};

std::uint8_t quantize_direction(double gx, double gy) {
    // Image y grows downward; flip so angles follow the usual convention.
    double angle = std::atan2(-gy, gx) * 180.0 / std::numbers::pi;
    if (angle < 0.0) {
        angle += 180.0;
    }
    if (angle < 22.5 || angle >= 157.5) return 0;
    if (angle < 67.5) return 1;
    if (angle < 112.5) return 2;
    return 3;
}

template <typename Visit>
void for_each_neighbour8(int x, int y, int width, int height, Visit&& visit) {
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if ((dx != 0 || dy != 0) && nx >= 0 && ny >= 0 && nx < width && ny < height) {
                visit(nx, ny);
            }
        }
    }
}

}  // namespace

void CannyParams::validate() const {
    if (!(gaussian_sigma > 0.0)) {
        throw ConfigError("Canny sigma must be positive", "canny_sigma");
    }
    if (!(low_ratio > 0.0 && low_ratio < high_ratio && high_ratio < 1.0)) {
        throw ConfigError("Canny thresholds need 0 < low < high < 1", "canny_low");
    }
    if (min_edge_size < 0) {
        throw ConfigError("minimum edge size must be >= 0", "min_edge_size");
    }
}

std::vector<double> gaussian_kernel(double sigma) {
    const auto radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) {
        w /= sum;
    }
    return kernel;
}

std::vector<double> gaussian_blur(const GrayImage& image, double sigma) {
    const int width = image.width();
    const int height = image.height();
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);

    std::vector<double> horizontal(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * image.at(clamp_index(x + k, width), y);
            }
            horizontal[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
                acc;
        }
    }
    std::vector<double> out(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int sy = clamp_index(y + k, height);
                acc += kernel[static_cast<std::size_t>(k + radius)] *
                       horizontal[static_cast<std::size_t>(sy) * static_cast<std::size_t>(width) +
                                  static_cast<std::size_t>(x)];
            }
            out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = acc;
        }
    }
    return out;
}

GradientField sobel_gradients(const std::vector<double>& field, int width, int height) {
    GradientField g;
    g.width = width;
    g.height = height;
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    g.magnitude.assign(n, 0.0);
    g.sector.assign(n, 0);
    auto px = [&](int x, int y) {
        return field[static_cast<std::size_t>(clamp_index(y, height)) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(clamp_index(x, width))];
    };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
            g.magnitude[i] = std::hypot(gx, gy);
            g.sector[i] = quantize_direction(gx, gy);
            g.max_magnitude = std::max(g.max_magnitude, g.magnitude[i]);
        }
    }
    return g;
}

std::vector<double> non_maximum_suppression(const GradientField& field) {
    const int width = field.width;
    const int height = field.height;
    std::vector<double> out(field.magnitude.size(), 0.0);
    auto mag = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= width || y >= height) {
            return 0.0;
        }
        return field.magnitude[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                               static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
            const double m = field.magnitude[i];
            if (m <= 0.0) {
                continue;
            }
            const auto& step = kSectorStep[field.sector[i]];
            const double behind = mag(x - step[0], y - step[1]);
            const double ahead = mag(x + step[0], y + step[1]);
            if (m > behind && m >= ahead) {
                out[i] = m;
            }
        }
    }
    return out;
}

BinaryMask hysteresis(const std::vector<double>& magnitude, int width, int height, double low, double high) {
    BinaryMask out(width, height, false);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double m =
                magnitude[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
            if (m >= high && m > 0.0 && !out.at(x, y)) {
                out.at(x, y) = 1;
                stack.emplace_back(x, y);
                while (!stack.empty()) {
                    const auto [cx, cy] = stack.back();
                    stack.pop_back();
                    for_each_neighbour8(cx, cy, width, height, [&](int nx, int ny) {
                        const double nm = magnitude[static_cast<std::size_t>(ny) * static_cast<std::size_t>(width) +
                                                    static_cast<std::size_t>(nx)];
                        if (!out.at(nx, ny) && nm >= low && nm > 0.0) {
                            out.at(nx, ny) = 1;
                            stack.emplace_back(nx, ny);
                        }
                    });
                }
            }
        }
    }
    return out;
}

BinaryMask remove_small_components(const BinaryMask& mask, int min_size) {
    BinaryMask out = mask;
    if (min_size <= 1) {
        return out;
    }
    const int width = mask.width();
    const int height = mask.height();
    std::vector<std::uint8_t> visited(mask.size(), 0);
    std::vector<std::pair<int, int>> stack;
    std::vector<std::pair<int, int>> component;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
            if (!mask.at(x, y) || visited[i]) {
                continue;
            }
            component.clear();
            visited[i] = 1;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                component.emplace_back(cx, cy);
                for_each_neighbour8(cx, cy, width, height, [&](int nx, int ny) {
                    const std::size_t j =
                        static_cast<std::size_t>(ny) * static_cast<std::size_t>(width) + static_cast<std::size_t>(nx);
                    if (mask.at(nx, ny) && !visited[j]) {
                        visited[j] = 1;
                        stack.emplace_back(nx, ny);
                    }
                });
            }
            if (component.size() < static_cast<std::size_t>(min_size)) {
                for (const auto& [cx, cy] : component) {
                    out.at(cx, cy) = 0;
                }
            }
        }
    }
    return out;
}

BinaryMask canny(const GrayImage& image, const CannyParams& params) {
    params.validate();
    const GradientField field = sobel_gradients(gaussian_blur(image, params.gaussian_sigma), image.width(),
                                                image.height());
    const auto thin = non_maximum_suppression(field);
    const BinaryMask edges = hysteresis(thin, image.width(), image.height(), params.low_ratio * field.max_magnitude,
                                        params.high_ratio * field.max_magnitude);
    return remove_small_components(edges, params.min_edge_size);
}

}  // namespace candleseg
