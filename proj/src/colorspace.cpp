#include "candleseg/colorspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace candleseg {

namespace {

using Matrix3 = std::array<std::array<double, 3>, 3>;

// Linear sRGB -> CIEXYZ for a D65 white; rows sum to the D65 tristimulus values.
constexpr Matrix3 kRgbToXyz = {{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

constexpr Matrix3 invert(const Matrix3& m) {
    const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    return {{
        {c00 / det, (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det, (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det},
        {c01 / det, (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det, (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det},
        {c02 / det, (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det, (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det},
    }};
}

constexpr Matrix3 kXyzToRgb = invert(kRgbToXyz);

constexpr double kSigmaCubed = kLabSigma * kLabSigma * kLabSigma;
constexpr double kLinearSlope = 1.0 / (3.0 * kLabSigma * kLabSigma);
constexpr double kLinearOffset = 4.0 / 29.0;

std::uint8_t quantize_unit(double v) {
    const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(scaled);
}

}  // namespace

void WhitePoint::validate() const {
    if (!(x > 0.0 && y > 0.0 && z > 0.0)) {
        throw ConfigError("white point components must be strictly positive", "white_point");
    }
}

LabImage::LabImage(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) {
        throw DimensionError("Lab image dimensions must be positive");
    }
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    l.assign(n, 0.0F);
    a.assign(n, 0.0F);
    b.assign(n, 0.0F);
}

LabImage crop(const LabImage& image, const Rect& rect) {
    check_rect(rect, image.width, image.height);
    LabImage out(rect.w, rect.h);
    std::size_t o = 0;
    for (int y = 0; y < rect.h; ++y) {
        const std::size_t row = static_cast<std::size_t>(rect.y0 + y) * static_cast<std::size_t>(image.width);
        for (int x = 0; x < rect.w; ++x, ++o) {
            const std::size_t i = row + static_cast<std::size_t>(rect.x0 + x);
            out.l[o] = image.l[i];
            out.a[o] = image.a[i];
            out.b[o] = image.b[i];
        }
    }
    return out;
}

double g_forward(double t) {
    if (t < 0.0 || std::isnan(t)) {
        throw DomainError("g_forward requires t >= 0, got " + std::to_string(t));
    }
    if (t > kSigmaCubed) {
        return std::cbrt(t);
    }
    return t * kLinearSlope + kLinearOffset;
}

double g_inverse(double u) {
    if (u > kLabSigma) {
        return u * u * u;
    }
    return 3.0 * kLabSigma * kLabSigma * (u - kLinearOffset);
}

double srgb_to_linear(double v) {
    if (v <= 0.04045) {
        return v / 12.92;
    }
    return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    if (v <= 0.0031308) {
        return 12.92 * v;
    }
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

XyzTriple linear_rgb_to_xyz(double r, double g, double b) {
    const auto& m = kRgbToXyz;
    return {m[0][0] * r + m[0][1] * g + m[0][2] * b, m[1][0] * r + m[1][1] * g + m[1][2] * b,
            m[2][0] * r + m[2][1] * g + m[2][2] * b};
}

void xyz_to_linear_rgb(const XyzTriple& xyz, double& r, double& g, double& b) {
    const auto& m = kXyzToRgb;
    r = m[0][0] * xyz.x + m[0][1] * xyz.y + m[0][2] * xyz.z;
    g = m[1][0] * xyz.x + m[1][1] * xyz.y + m[1][2] * xyz.z;
    b = m[2][0] * xyz.x + m[2][1] * xyz.y + m[2][2] * xyz.z;
}

LabTriple xyz_to_lab(const XyzTriple& xyz, const WhitePoint& wp) {
    // Matrix rounding can leave black a hair below zero.
    const double fx = g_forward(std::max(xyz.x / wp.x, 0.0));
    const double fy = g_forward(std::max(xyz.y / wp.y, 0.0));
    const double fz = g_forward(std::max(xyz.z / wp.z, 0.0));
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

XyzTriple lab_to_xyz(const LabTriple& lab, const WhitePoint& wp) {
    const double fy = (lab.l + 16.0) / 116.0;
    return {wp.x * g_inverse(fy + lab.a / 500.0), wp.y * g_inverse(fy), wp.z * g_inverse(fy - lab.b / 200.0)};
}

LabTriple rgb_to_lab(const Rgb& rgb, const WhitePoint& wp) {
    const XyzTriple xyz =
        linear_rgb_to_xyz(srgb_to_linear(rgb.r / 255.0), srgb_to_linear(rgb.g / 255.0), srgb_to_linear(rgb.b / 255.0));
    return xyz_to_lab(xyz, wp);
}

Rgb lab_to_rgb(const LabTriple& lab, const WhitePoint& wp) {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    xyz_to_linear_rgb(lab_to_xyz(lab, wp), r, g, b);
    return {quantize_unit(linear_to_srgb(std::clamp(r, 0.0, 1.0))),
            quantize_unit(linear_to_srgb(std::clamp(g, 0.0, 1.0))),
            quantize_unit(linear_to_srgb(std::clamp(b, 0.0, 1.0)))};
}

LabImage rgb_to_lab(const RasterImage& image, const WhitePoint& wp) {
    wp.validate();
    LabImage out(image.width(), image.height());
    // 8-bit input has only 256 levels per channel; linearize once.
    std::array<double, 256> linear{};
    for (int v = 0; v < 256; ++v) {
        linear[static_cast<std::size_t>(v)] = srgb_to_linear(v / 255.0);
    }
    auto pixels = image.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const Rgb& p = pixels[i];
        const LabTriple lab = xyz_to_lab(linear_rgb_to_xyz(linear[p.r], linear[p.g], linear[p.b]), wp);
        out.l[i] = static_cast<float>(lab.l);
        out.a[i] = static_cast<float>(lab.a);
        out.b[i] = static_cast<float>(lab.b);
    }
    return out;
}

RasterImage lab_to_rgb(const LabImage& image, const WhitePoint& wp) {
    wp.validate();
    std::vector<Rgb> pixels(image.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = lab_to_rgb(image.at(i), wp);
    }
    return RasterImage(image.width, image.height, std::move(pixels));
}

std::uint8_t rgb_to_gray(const Rgb& rgb) {
    const double luma = 0.2989 * rgb.r + 0.587 * rgb.g + 0.1141 * rgb.b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
}

GrayImage rgb_to_gray(const RasterImage& image) {
    std::vector<std::uint8_t> out(image.size());
    auto pixels = image.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = rgb_to_gray(pixels[i]);
    }
    return GrayImage(image.width(), image.height(), std::move(out));
}

RasterImage lab_visualization(const LabImage& image) {
    auto to_byte = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    };
    std::vector<Rgb> pixels(image.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = {to_byte(image.l[i] * 2.55), to_byte(image.a[i] + 128.0), to_byte(image.b[i] + 128.0)};
    }
    return RasterImage(image.width, image.height, std::move(pixels));
}

}  // namespace candleseg
