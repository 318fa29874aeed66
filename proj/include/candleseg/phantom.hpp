#pragma once

#include "candleseg/raster.hpp"
#include "candleseg/segmentation.hpp"

#include <cstdint>

namespace candleseg {

struct PhantomOptions {
    int width = 582;
    int height = 778;
    std::uint64_t seed = 7;
    /// Per-channel uniform noise in [-noise, +noise].
    int noise = 3;
};

/// Synthetic candled egg with ground-truth region masks.
struct EggPhantom {
    RasterImage image;
    BinaryMask background;
    BinaryMask egg;
    BinaryMask yolk;

    const BinaryMask& truth(Region region) const;
};

/**
 * Draws a dark backdrop with a smooth gradient, an elliptical bright shell,
 * a darker yolk disk and thin vessel curves inside the yolk. Vessels belong
 * to the yolk region. Deterministic for a given option set.
 */
EggPhantom make_egg_phantom(const PhantomOptions& opts = {});

/// Intersection over union; 1 when both masks are empty.
double intersection_over_union(const BinaryMask& a, const BinaryMask& b);

}  // namespace candleseg
