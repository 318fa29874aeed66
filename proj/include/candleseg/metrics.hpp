#pragma once

#include "candleseg/raster.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace candleseg {

enum class MseScale { unit, byte };

std::string to_string(MseScale scale);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double exp_luminance = 1.0;
    double exp_contrast = 1.0;
    double exp_structure = 1.0;
    double dynamic_range = 255.0;
    double k1 = 0.01;
    double k2 = 0.03;

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
    double c3() const { return c2() / 2.0; }

    void validate() const;
};

/// Per-window components over all valid window positions, row-major.
struct SsimMaps {
    int width = 0;   ///< number of window positions along x
    int height = 0;  ///< number of window positions along y
    std::vector<double> luminance;
    std::vector<double> contrast;
    std::vector<double> structure;
    std::vector<double> ssim;
};

struct SsimResult {
    double mssim = 0.0;
    std::vector<double> map;
    int map_width = 0;
    int map_height = 0;
};

struct MetricsReport {
    double mse = 0.0;
    double mssim = 0.0;
    double ssim_min = 0.0;
    double ssim_max = 0.0;
    long long window_count = 0;
    SsimParams params;
    MseScale scale = MseScale::unit;
};

/// Mean squared difference. Unit scale divides gray levels by 255; masks are 0/1 (0/255 at byte scale).
double mse(const GrayImage& a, const GrayImage& b, MseScale scale = MseScale::unit);
double mse(const BinaryMask& a, const BinaryMask& b, MseScale scale = MseScale::unit);

/// Pairwise (cascade) summation; reproducible regardless of threading.
double pairwise_sum(std::span<const double> values);

/// Explicit stabilizers, for probing the limit behaviour of the components.
struct SsimStabilizers {
    double c1;
    double c2;
    double c3;
};

SsimMaps ssim_maps(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});
SsimMaps ssim_maps(const GrayImage& a, const GrayImage& b, const SsimParams& params, const SsimStabilizers& c);

/// Dense sliding-window SSIM with a Gaussian window; mssim is the mean of the map.
SsimResult ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});

MetricsReport evaluate(const GrayImage& a, const GrayImage& b, const SsimParams& params = {},
                       MseScale scale = MseScale::unit);
MetricsReport evaluate(const BinaryMask& a, const BinaryMask& b, const SsimParams& params = {},
                       MseScale scale = MseScale::unit);

nlohmann::ordered_json to_json(const MetricsReport& report);

}  // namespace candleseg
