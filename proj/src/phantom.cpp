#include "candleseg/phantom.hpp"

#include "candleseg/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace candleseg {

namespace {

std::uint8_t channel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

const BinaryMask& EggPhantom::truth(Region region) const {
    switch (region) {
        case Region::background: return background;
        case Region::egg: return egg;
        case Region::yolk: return yolk;
    }
    return background;
}

EggPhantom make_egg_phantom(const PhantomOptions& opts) {
    if (opts.width < 16 || opts.height < 16) {
        throw ConfigError("phantom must be at least 16x16", "phantom");
    }
    if (opts.noise < 0 || opts.noise > 32) {
        throw ConfigError("phantom noise must lie in [0, 32]", "phantom");
    }
    const double w = opts.width;
    const double h = opts.height;
    const double cx = w / 2.0;
    const double cy = h / 2.0;
    const double ax = 0.42 * w;
    const double ay = 0.45 * h;
    const double yolk_x = 0.5 * w;
    const double yolk_y = 0.56 * h;
    const double yolk_r = 0.2 * std::min(w, h);
    const double vessel_half_width = std::max(1.0, 0.004 * std::min(w, h));

    constexpr int kVessels = 5;
    SplitMix64 rng(opts.seed);
    struct Vessel {
        double angle;
        double wiggle;
        double phase;
    };
    std::vector<Vessel> vessels;
    for (int v = 0; v < kVessels; ++v) {
        vessels.push_back({2.0 * std::numbers::pi * (v + 0.5 * rng.uniform()) / kVessels, 0.15 + 0.1 * rng.uniform(),
                           2.0 * std::numbers::pi * rng.uniform()});
    }

    // Vessel membership: distance from the point to a wavy ray leaving the yolk center.
    auto on_vessel = [&](double x, double y) {
        const double dx = x - yolk_x;
        const double dy = y - yolk_y;
        const double r = std::hypot(dx, dy);
        if (r < 0.15 * yolk_r || r > 0.9 * yolk_r) {
            return false;
        }
        for (const Vessel& v : vessels) {
            const double along = dx * std::cos(v.angle) + dy * std::sin(v.angle);
            if (along <= 0.0) {
                continue;
            }
            const double offset = -dx * std::sin(v.angle) + dy * std::cos(v.angle);
            const double centre = v.wiggle * yolk_r * 0.3 * std::sin(3.0 * along / yolk_r + v.phase);
            if (std::abs(offset - centre) <= vessel_half_width) {
                return true;
            }
        }
        return false;
    };

    RasterImage image(opts.width, opts.height);
    BinaryMask background(opts.width, opts.height, false);
    BinaryMask egg(opts.width, opts.height, false);
    BinaryMask yolk(opts.width, opts.height, false);
    const int span = 2 * opts.noise + 1;
    for (int y = 0; y < opts.height; ++y) {
        for (int x = 0; x < opts.width; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            const double ex = (px - cx) / ax;
            const double ey = (py - cy) / ay;
            const double shell = ex * ex + ey * ey;
            double r = 0.0;
            double g = 0.0;
            double b = 0.0;
            if (shell > 1.0) {
                background.at(x, y) = 1;
                r = 14.0 + 10.0 * px / w;
                g = 10.0 + 6.0 * py / h;
                b = 8.0 + 4.0 * (px + py) / (w + h);
            } else if (std::hypot(px - yolk_x, py - yolk_y) <= yolk_r) {
                yolk.at(x, y) = 1;
                if (on_vessel(px, py)) {
                    r = 150.0;
                    g = 58.0;
                    b = 34.0;
                } else {
                    r = 188.0;
                    g = 92.0;
                    b = 44.0;
                }
            } else {
                egg.at(x, y) = 1;
                const double falloff = 10.0 * shell;
                r = 238.0 - falloff;
                g = 178.0 - falloff;
                b = 104.0 - 0.5 * falloff;
            }
            if (opts.noise > 0) {
                r += static_cast<double>(rng.below(static_cast<std::uint64_t>(span))) - opts.noise;
                g += static_cast<double>(rng.below(static_cast<std::uint64_t>(span))) - opts.noise;
                b += static_cast<double>(rng.below(static_cast<std::uint64_t>(span))) - opts.noise;
            }
            image.at(x, y) = Rgb{channel(r), channel(g), channel(b)};
        }
    }
    return EggPhantom{std::move(image), std::move(background), std::move(egg), std::move(yolk)};
}

double intersection_over_union(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("IoU operands differ in size");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    auto pa = a.pixels();
    auto pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        inter += (pa[i] != 0 && pb[i] != 0) ? 1 : 0;
        uni += (pa[i] != 0 || pb[i] != 0) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace candleseg
