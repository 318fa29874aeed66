#include "candleseg/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace candleseg {

namespace {

/// Valid-mode separable correlation with a symmetric kernel.
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height,
                                 const std::vector<double>& kernel) {
    const int size = static_cast<int>(kernel.size());
    const int out_w = width - size + 1;
    const int out_h = height - size + 1;
    std::vector<double> rows(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        const double* line = src.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < size; ++k) {
                acc += kernel[static_cast<std::size_t>(k)] * line[x + k];
            }
            rows[static_cast<std::size_t>(y) * static_cast<std::size_t>(out_w) + static_cast<std::size_t>(x)] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h));
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < size; ++k) {
                acc += kernel[static_cast<std::size_t>(k)] *
                       rows[static_cast<std::size_t>(y + k) * static_cast<std::size_t>(out_w) +
                            static_cast<std::size_t>(x)];
            }
            out[static_cast<std::size_t>(y) * static_cast<std::size_t>(out_w) + static_cast<std::size_t>(x)] = acc;
        }
    }
    return out;
}

std::vector<double> window_kernel(int window, double sigma) {
    std::vector<double> kernel(static_cast<std::size_t>(window));
    const int radius = window / 2;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = i - radius;
        kernel[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += kernel[static_cast<std::size_t>(i)];
    }
    for (double& w : kernel) {
        w /= sum;
    }
    return kernel;
}

double weighted(double value, double exponent) {
    if (exponent == 0.0) return 1.0;
    if (exponent == 1.0) return value;
    return std::pow(value, exponent);
}

}  // namespace

std::string to_string(MseScale scale) { return scale == MseScale::unit ? "unit" : "byte"; }

void SsimParams::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw ConfigError("SSIM window must be odd and >= 3", "ssim_window");
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("SSIM window sigma must be positive", "ssim_sigma");
    }
    if (!(exp_luminance >= 0.0 && exp_contrast >= 0.0 && exp_structure >= 0.0)) {
        throw ConfigError("SSIM exponents must be >= 0", "ssim_exponents");
    }
    if (!(dynamic_range > 0.0 && k1 > 0.0 && k2 > 0.0)) {
        throw ConfigError("SSIM stabilizers must be positive", "ssim_k1");
    }
}

double mse(const GrayImage& a, const GrayImage& b, MseScale scale) {
    if (!a.same_shape(b)) {
        throw DimensionError("mse operands differ in size");
    }
    const double unit = scale == MseScale::unit ? 1.0 / 255.0 : 1.0;
    std::vector<double> sq(a.size());
    auto pa = a.pixels();
    auto pb = b.pixels();
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double d = (static_cast<double>(pa[i]) - static_cast<double>(pb[i])) * unit;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(sq.size());
}

double mse(const BinaryMask& a, const BinaryMask& b, MseScale scale) {
    if (!a.same_shape(b)) {
        throw DimensionError("mse operands differ in size");
    }
    const double level = scale == MseScale::unit ? 1.0 : 255.0;
    std::size_t differing = 0;
    auto pa = a.pixels();
    auto pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        differing += pa[i] != pb[i] ? 1 : 0;
    }
    return static_cast<double>(differing) * level * level / static_cast<double>(pa.size());
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kLeaf = 64;
    if (values.size() <= kLeaf) {
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SsimMaps ssim_maps(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
    params.validate();
    return ssim_maps(a, b, params, SsimStabilizers{params.c1(), params.c2(), params.c3()});
}

SsimMaps ssim_maps(const GrayImage& a, const GrayImage& b, const SsimParams& params, const SsimStabilizers& c) {
    if (!a.same_shape(b)) {
        throw DimensionError("ssim operands differ in size");
    }
    if (a.width() < params.window || a.height() < params.window) {
        throw DimensionError("image " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                             " is smaller than the " + std::to_string(params.window) + "px SSIM window");
    }
    const std::size_t n = a.size();
    std::vector<double> fa(n), fb(n), faa(n), fbb(n), fab(n);
    auto pa = a.pixels();
    auto pb = b.pixels();
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = pa[i];
        fb[i] = pb[i];
        faa[i] = fa[i] * fa[i];
        fbb[i] = fb[i] * fb[i];
        fab[i] = fa[i] * fb[i];
    }
    const auto kernel = window_kernel(params.window, params.sigma);
    const int w = a.width();
    const int h = a.height();
    const auto mu_a = filter_valid(fa, w, h, kernel);
    const auto mu_b = filter_valid(fb, w, h, kernel);
    const auto e_aa = filter_valid(faa, w, h, kernel);
    const auto e_bb = filter_valid(fbb, w, h, kernel);
    const auto e_ab = filter_valid(fab, w, h, kernel);

    SsimMaps maps;
    maps.width = w - params.window + 1;
    maps.height = h - params.window + 1;
    const std::size_t m = mu_a.size();
    maps.luminance.resize(m);
    maps.contrast.resize(m);
    maps.structure.resize(m);
    maps.ssim.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double var_a = std::max(e_aa[i] - ma * ma, 0.0);
        const double var_b = std::max(e_bb[i] - mb * mb, 0.0);
        const double cov = e_ab[i] - ma * mb;
        const double sd_a = std::sqrt(var_a);
        const double sd_b = std::sqrt(var_b);
        const double l = (2.0 * ma * mb + c.c1) / (ma * ma + mb * mb + c.c1);
        const double con = (2.0 * sd_a * sd_b + c.c2) / (var_a + var_b + c.c2);
        const double s = (cov + c.c3) / (sd_a * sd_b + c.c3);
        maps.luminance[i] = l;
        maps.contrast[i] = con;
        maps.structure[i] = s;
        maps.ssim[i] = weighted(l, params.exp_luminance) * weighted(con, params.exp_contrast) *
                       weighted(s, params.exp_structure);
    }
    return maps;
}

SsimResult ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
    SsimMaps maps = ssim_maps(a, b, params);
    SsimResult result;
    result.mssim = pairwise_sum(maps.ssim) / static_cast<double>(maps.ssim.size());
    result.map = std::move(maps.ssim);
    result.map_width = maps.width;
    result.map_height = maps.height;
    return result;
}

MetricsReport evaluate(const GrayImage& a, const GrayImage& b, const SsimParams& params, MseScale scale) {
    MetricsReport report;
    report.mse = mse(a, b, scale);
    const SsimResult s = ssim(a, b, params);
    report.mssim = s.mssim;
    const auto [lo, hi] = std::minmax_element(s.map.begin(), s.map.end());
    report.ssim_min = *lo;
    report.ssim_max = *hi;
    report.window_count = static_cast<long long>(s.map.size());
    report.params = params;
    report.scale = scale;
    return report;
}

MetricsReport evaluate(const BinaryMask& a, const BinaryMask& b, const SsimParams& params, MseScale scale) {
    MetricsReport report = evaluate(mask_to_gray(a), mask_to_gray(b), params, scale);
    report.mse = mse(a, b, scale);
    return report;
}

nlohmann::ordered_json to_json(const MetricsReport& report) {
    const SsimParams& p = report.params;
    nlohmann::ordered_json params = {
        {"window", p.window},
        {"sigma", p.sigma},
        {"exponents", {{"luminance", p.exp_luminance}, {"contrast", p.exp_contrast}, {"structure", p.exp_structure}}},
        {"dynamic_range", p.dynamic_range},
        {"k1", p.k1},
        {"k2", p.k2},
        {"c1", p.c1()},
        {"c2", p.c2()},
        {"c3", p.c3()},
        {"mse_scale", to_string(report.scale)},
    };
    return nlohmann::ordered_json{
        {"mse", report.mse},
        {"mssim", report.mssim},
        {"ssim_min", report.ssim_min},
        {"ssim_max", report.ssim_max},
        {"window_count", report.window_count},
        {"params", params},
    };
}

}  // namespace candleseg
