#include "candleseg/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace candleseg {

namespace {

using Lut = std::array<std::uint8_t, kGrayLevels>;

/// Bilinear blend coordinates of one pixel along one axis.
struct AxisBlend {
    int lo = 0;
    int hi = 0;
    double weight_hi = 0.0;
};

std::vector<AxisBlend> axis_blends(const std::vector<std::pair<int, int>>& spans, int extent) {
    std::vector<double> centers;
    centers.reserve(spans.size());
    for (const auto& [start, end] : spans) {
        centers.push_back((start + end - 1) / 2.0);
    }
    std::vector<AxisBlend> out(static_cast<std::size_t>(extent));
    std::size_t i = 0;
    for (int p = 0; p < extent; ++p) {
        AxisBlend& blend = out[static_cast<std::size_t>(p)];
        if (p <= centers.front()) {
            blend = {0, 0, 0.0};
            continue;
        }
        if (p >= centers.back()) {
            const int last = static_cast<int>(centers.size()) - 1;
            blend = {last, last, 0.0};
            continue;
        }
        while (centers[i + 1] <= p) {
            ++i;
        }
        blend = {static_cast<int>(i), static_cast<int>(i + 1), (p - centers[i]) / (centers[i + 1] - centers[i])};
    }
    return out;
}

Lut tile_lut(const GrayImage& image, std::pair<int, int> xs, std::pair<int, int> ys, double limit) {
    std::array<double, kGrayLevels> bins{};
    for (int y = ys.first; y < ys.second; ++y) {
        for (int x = xs.first; x < xs.second; ++x) {
            bins[image.at(x, y)] += 1.0;
        }
    }
    // A single occupied level is left unclipped so it maps to 255, as in equalize.
    if (std::count_if(bins.begin(), bins.end(), [](double b) { return b > 0.0; }) > 1) {
        clip_histogram(bins, limit);
    }
    double total = 0.0;
    for (double b : bins) {
        total += b;
    }
    Lut lut{};
    double cdf = 0.0;
    for (int v = 0; v < kGrayLevels; ++v) {
        cdf += bins[static_cast<std::size_t>(v)];
        lut[static_cast<std::size_t>(v)] =
            static_cast<std::uint8_t>(std::clamp(std::round(255.0 * cdf / total), 0.0, 255.0));
    }
    return lut;
}

}  // namespace

void ClaheParams::validate() const {
    if (tiles_x < 1 || tiles_y < 1) {
        throw ConfigError("CLAHE tile grid must be at least 1x1", "clahe_tiles");
    }
    if (!(clip_alpha >= 0.0 && clip_alpha <= 100.0)) {
        throw ConfigError("CLAHE clip factor alpha must lie in [0, 100]", "clahe_alpha");
    }
    if (!(s_max >= 1.0)) {
        throw ConfigError("CLAHE s_max must be >= 1", "clahe_smax");
    }
}

Histogram histogram(const GrayImage& image) {
    Histogram h;
    for (std::uint8_t v : image.pixels()) {
        ++h.bins[v];
    }
    h.total = image.size();
    return h;
}

GrayImage equalize(const GrayImage& image) {
    const Histogram h = histogram(image);
    Lut lut{};
    std::uint64_t cdf = 0;
    for (int v = 0; v < kGrayLevels; ++v) {
        cdf += h.bins[static_cast<std::size_t>(v)];
        // round(255 * cdf / total), halves rounded up
        lut[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>((2 * 255 * cdf + h.total) / (2 * h.total));
    }
    std::vector<std::uint8_t> out(image.size());
    auto src = image.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = lut[src[i]];
    }
    return GrayImage(image.width(), image.height(), std::move(out));
}

double compute_clip_limit(std::size_t region_pixels, double clip_alpha, double s_max, int levels) {
    return static_cast<double>(region_pixels) / levels * (1.0 + clip_alpha / 100.0 * (s_max - 1.0));
}

double compute_clip_limit(const ClaheParams& params, std::size_t region_pixels) {
    return compute_clip_limit(region_pixels, params.clip_alpha, params.s_max);
}

void clip_histogram(std::array<double, kGrayLevels>& bins, double limit) {
    constexpr int kMaxRounds = 100000;
    for (int round = 0; round < kMaxRounds; ++round) {
        double excess = 0.0;
        for (double& b : bins) {
            if (b > limit) {
                excess += b - limit;
                b = limit;
            }
        }
        if (excess <= 0.0) {
            return;
        }
        const double share = excess / kGrayLevels;
        for (double& b : bins) {
            b += share;
        }
        if (excess < 1.0) {
            return;
        }
    }
}

std::vector<std::pair<int, int>> tile_spans(int extent, int tiles) {
    std::vector<std::pair<int, int>> spans;
    spans.reserve(static_cast<std::size_t>(tiles));
    for (int t = 0; t < tiles; ++t) {
        const auto start = static_cast<int>(static_cast<long long>(t) * extent / tiles);
        const auto end = static_cast<int>(static_cast<long long>(t + 1) * extent / tiles);
        spans.emplace_back(start, end);
    }
    return spans;
}

GrayImage clahe(const GrayImage& image, const ClaheParams& params) {
    params.validate();
    if (image.width() < params.tiles_x || image.height() < params.tiles_y) {
        throw ConfigError("image " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                              " is smaller than the " + std::to_string(params.tiles_x) + "x" +
                              std::to_string(params.tiles_y) + " CLAHE tile grid",
                          "clahe_tiles");
    }
    const auto xspans = tile_spans(image.width(), params.tiles_x);
    const auto yspans = tile_spans(image.height(), params.tiles_y);

    std::vector<Lut> luts;
    luts.reserve(xspans.size() * yspans.size());
    for (const auto& ys : yspans) {
        for (const auto& xs : xspans) {
            const auto pixels = static_cast<std::size_t>(xs.second - xs.first) *
                                static_cast<std::size_t>(ys.second - ys.first);
            luts.push_back(tile_lut(image, xs, ys, compute_clip_limit(params, pixels)));
        }
    }
    auto lut_at = [&](int tx, int ty) -> const Lut& {
        return luts[static_cast<std::size_t>(ty) * xspans.size() + static_cast<std::size_t>(tx)];
    };

    const auto xblend = axis_blends(xspans, image.width());
    const auto yblend = axis_blends(yspans, image.height());
    GrayImage out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        const AxisBlend& by = yblend[static_cast<std::size_t>(y)];
        for (int x = 0; x < image.width(); ++x) {
            const AxisBlend& bx = xblend[static_cast<std::size_t>(x)];
            const std::uint8_t v = image.at(x, y);
            const double top = (1.0 - bx.weight_hi) * lut_at(bx.lo, by.lo)[v] + bx.weight_hi * lut_at(bx.hi, by.lo)[v];
            const double bottom =
                (1.0 - bx.weight_hi) * lut_at(bx.lo, by.hi)[v] + bx.weight_hi * lut_at(bx.hi, by.hi)[v];
            const double blended = (1.0 - by.weight_hi) * top + by.weight_hi * bottom;
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(blended), 0.0, 255.0));
        }
    }
    return out;
}

}  // namespace candleseg
