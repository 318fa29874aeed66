#pragma once

#include "candleseg/raster.hpp"

#include <vector>

namespace candleseg {

/// Reference white tristimulus values (Y normalized to 1).
struct WhitePoint {
    double x = 0.95047;
    double y = 1.0;
    double z = 1.08883;

    /// Throws ConfigError unless all components are strictly positive.
    void validate() const;
};

inline constexpr WhitePoint kD65{0.95047, 1.0, 1.08883};

struct XyzTriple {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct LabTriple {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Planar CIELAB image: one float plane per component, row-major.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<float> l;
    std::vector<float> a;
    std::vector<float> b;

    LabImage(int w, int h);

    std::size_t size() const noexcept { return l.size(); }
    LabTriple at(std::size_t i) const { return {l[i], a[i], b[i]}; }
};

/// Crops all three planes.
LabImage crop(const LabImage& image, const Rect& rect);

// Breakpoint of the piecewise cube root: sigma = 6/29.
inline constexpr double kLabSigma = 6.0 / 29.0;

/// Piecewise cube root used by the XYZ to Lab transform. Throws DomainError for t < 0.
double g_forward(double t);

/// Functional inverse of g_forward. Inputs below 4/29 continue along the linear branch.
double g_inverse(double u);

/// sRGB transfer function and its inverse on [0, 1].
double srgb_to_linear(double v);
double linear_to_srgb(double v);

XyzTriple linear_rgb_to_xyz(double r, double g, double b);
/// Writes linear RGB (unclamped) for an XYZ triple.
void xyz_to_linear_rgb(const XyzTriple& xyz, double& r, double& g, double& b);

LabTriple xyz_to_lab(const XyzTriple& xyz, const WhitePoint& wp);
XyzTriple lab_to_xyz(const LabTriple& lab, const WhitePoint& wp);

LabTriple rgb_to_lab(const Rgb& rgb, const WhitePoint& wp = kD65);
Rgb lab_to_rgb(const LabTriple& lab, const WhitePoint& wp = kD65);

LabImage rgb_to_lab(const RasterImage& image, const WhitePoint& wp = kD65);
RasterImage lab_to_rgb(const LabImage& image, const WhitePoint& wp = kD65);

/// Weighted luma: round(0.2989 R + 0.587 G + 0.1141 B), clamped to [0, 255].
std::uint8_t rgb_to_gray(const Rgb& rgb);
GrayImage rgb_to_gray(const RasterImage& image);

/// Packs L into [0,255] (x 2.55) and a, b with a +128 offset, for viewing.
RasterImage lab_visualization(const LabImage& image);

}  // namespace candleseg
