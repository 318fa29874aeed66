#pragma once

#include "candleseg/raster.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace candleseg {

inline constexpr int kGrayLevels = 256;

struct Histogram {
    std::array<std::uint64_t, kGrayLevels> bins{};
    std::uint64_t total = 0;
};

struct ClaheParams {
    int tiles_x = 8;
    int tiles_y = 8;
    /// Clip factor in [0, 100]; 0 clips at the mean bin height.
    double clip_alpha = 40.0;
    /// Maximum slope; the clip limit grows linearly toward it with alpha.
    double s_max = 4.0;

    void validate() const;
};

Histogram histogram(const GrayImage& image);

/// Histogram equalization: v -> round(255 * CDF(v)).
GrayImage equalize(const GrayImage& image);

/// beta = (M / n) * (1 + alpha/100 * (s_max - 1)) for a region of M pixels and n gray levels.
double compute_clip_limit(std::size_t region_pixels, double clip_alpha, double s_max, int levels = kGrayLevels);
double compute_clip_limit(const ClaheParams& params, std::size_t region_pixels);

/**
 * Clips `bins` at `limit` and spreads the excess evenly over all bins,
 * repeating until less than one count of excess remains. On return no bin
 * exceeds limit + 1.
 */
void clip_histogram(std::array<double, kGrayLevels>& bins, double limit);

/// [start, end) pixel spans of `tiles` near-equal partitions of `extent`.
std::vector<std::pair<int, int>> tile_spans(int extent, int tiles);

/**
 * Contrast-limited adaptive histogram equalization.
 *
 * Each tile's histogram is clipped at its clip limit and turned into an
 * equalization table; pixels blend the tables of the up to four nearest tile
 * centers bilinearly, clamping to the outermost tiles at the borders. Throws
 * ConfigError when the image has fewer pixels than tiles along an axis.
 */
GrayImage clahe(const GrayImage& image, const ClaheParams& params = {});

}  // namespace candleseg
