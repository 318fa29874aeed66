#pragma once

#include "candleseg/raster.hpp"

#include <cstdint>
#include <vector>

namespace candleseg {

struct CannyParams {
    double gaussian_sigma = 1.4;
    /// Thresholds relative to the largest gradient magnitude.
    double low_ratio = 0.10;
    double high_ratio = 0.25;
    /// Edge components with fewer pixels are removed; 0 or 1 keeps everything.
    int min_edge_size = 4;

    void validate() const;
};

/// Intermediate rasters of the detector, row-major, width * height each.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> magnitude;
    /// Gradient direction quantized to 0 (horizontal), 1 (45), 2 (vertical), 3 (135 degrees).
    std::vector<std::uint8_t> sector;
    double max_magnitude = 0.0;
};

/// Normalized 1-D Gaussian with radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with edge-replicated borders.
std::vector<double> gaussian_blur(const GrayImage& image, double sigma);

/// Sobel gradients of a width x height field (edge-replicated borders).
GradientField sobel_gradients(const std::vector<double>& field, int width, int height);

/**
 * Keeps a pixel only if it beats its neighbour on one side of the gradient
 * direction strictly and ties-or-beats the other, so a symmetric ridge stays
 * one pixel wide.
 */
std::vector<double> non_maximum_suppression(const GradientField& field);

/// Pixels >= high seed edges; pixels >= low survive when 8-connected to a seed.
BinaryMask hysteresis(const std::vector<double>& magnitude, int width, int height, double low, double high);

/// Removes 8-connected foreground components smaller than min_size pixels.
BinaryMask remove_small_components(const BinaryMask& mask, int min_size);

/// Full detector: blur, Sobel, suppression, double threshold, hysteresis, cleanup.
BinaryMask canny(const GrayImage& image, const CannyParams& params = {});

}  // namespace candleseg
