#pragma once

#include "candleseg/raster.hpp"

#include <array>
#include <string>
#include <vector>

namespace candleseg {

struct Offset {
    int dx = 0;
    int dy = 0;

    friend bool operator==(const Offset&, const Offset&) = default;
    friend auto operator<=>(const Offset&, const Offset&) = default;
};

/**
 * Structuring element: a non-empty, sorted, duplicate-free offset set.
 *
 * Offsets use image coordinates (dy grows downward). Line elements measure
 * their angle counter-clockwise from the +x axis with y pointing up, so a
 * 45 degree line runs from lower-left to upper-right on screen.
 */
class Strel {
public:
    enum class Kind { line, square, custom };

    static Strel line(int length, double angle_degrees);
    static Strel square(int side);
    static Strel custom(std::vector<Offset> offsets);

    Kind kind() const noexcept { return kind_; }
    const std::vector<Offset>& offsets() const noexcept { return offsets_; }
    bool contains_origin() const;
    /// Textual form, e.g. "line:3:45".
    std::string describe() const;

private:
    Strel(Kind kind, std::vector<Offset> offsets, std::string description);

    Kind kind_;
    std::vector<Offset> offsets_;
    std::string description_;
};

/// Rasterized line through the origin with `length` pixels along its major axis.
inline Strel make_line_strel(int length, double angle_degrees) { return Strel::line(length, angle_degrees); }

/// Parses "line:<len>:<deg>", "square:<side>" ; throws ConfigError otherwise.
Strel parse_strel(const std::string& text);

/// Otsu threshold (largest between-class variance, lowest t on ties); -1 for constant images.
int otsu_threshold(const GrayImage& image);

/// Foreground where pixel > Otsu threshold; a constant image yields an empty mask.
BinaryMask binarize_otsu(const GrayImage& image);

/// Minkowski sum: out(p) iff mask(p - b) for some b in the element. Outside pixels are background.
BinaryMask dilate(const BinaryMask& mask, const Strel& strel);

/// 3x3 hit-or-miss template: 1 = must be foreground, 0 = must be background, -1 = don't care.
using HitMissTemplate = std::array<std::array<int, 3>, 3>;

/// Pixels where the template matches, out-of-image neighbours reading as background.
BinaryMask hit_or_miss(const BinaryMask& mask, const HitMissTemplate& tmpl);

/// The eight 45-degree rotations of the Golay L thickening element, in application order.
const std::array<HitMissTemplate, 8>& thickening_templates();

/// One sequential pass A <- A U hit_or_miss(A, B_i) over all eight templates.
BinaryMask thicken_once(const BinaryMask& mask);

/// Repeats thicken_once until nothing changes or max_iterations passes (negative = until stable).
BinaryMask thicken(const BinaryMask& mask, int max_iterations);

}  // namespace candleseg
