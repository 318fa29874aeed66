#include "candleseg/morphology.hpp"

#include "candleseg/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace candleseg {

namespace {

// Clockwise ring of the 3x3 neighbourhood as (row, col), starting top-left.
constexpr std::array<std::pair<int, int>, 8> kRing = {
    {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}, {1, 0}}};

HitMissTemplate rotate45(const HitMissTemplate& t) {
    HitMissTemplate out = t;
    for (std::size_t p = 0; p < kRing.size(); ++p) {
        const auto [r, c] = kRing[(p + 1) % kRing.size()];
        const auto [sr, sc] = kRing[p];
        out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            t[static_cast<std::size_t>(sr)][static_cast<std::size_t>(sc)];
    }
    return out;
}

std::array<HitMissTemplate, 8> build_thickening_templates() {
    // Golay L thinning element with foreground and background exchanged.
    std::array<HitMissTemplate, 8> out{};
    out[0] = {{{1, 1, 1}, {-1, 0, -1}, {0, 0, 0}}};
    for (std::size_t i = 1; i < out.size(); ++i) {
        out[i] = rotate45(out[i - 1]);
    }
    return out;
}

std::string format_angle(double degrees) {
    std::ostringstream os;
    os << degrees;
    return os.str();
}

}  // namespace

Strel::Strel(Kind kind, std::vector<Offset> offsets, std::string description)
    : kind_(kind), offsets_(std::move(offsets)), description_(std::move(description)) {
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
    if (offsets_.empty()) {
        throw ConfigError("structuring element must contain at least one offset", "strel");
    }
}

Strel Strel::line(int length, double angle_degrees) {
    if (length < 1) {
        throw ConfigError("line structuring element length must be >= 1", "strel");
    }
    const double theta = angle_degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const int lo = -((length - 1) / 2);
    std::vector<Offset> offsets;
    offsets.reserve(static_cast<std::size_t>(length));
    const bool x_major = std::abs(c) >= std::abs(s) - 1e-12;
    for (int t = lo; t < lo + length; ++t) {
        if (x_major) {
            const auto up = static_cast<int>(std::lround(t * s / c));
            offsets.push_back({t, -up});
        } else {
            const auto x = static_cast<int>(std::lround(t * c / s));
            offsets.push_back({x, -t});
        }
    }
    return Strel(Kind::line, std::move(offsets), "line:" + std::to_string(length) + ":" + format_angle(angle_degrees));
}

Strel Strel::square(int side) {
    if (side < 1) {
        throw ConfigError("square structuring element side must be >= 1", "strel");
    }
    const int lo = -((side - 1) / 2);
    std::vector<Offset> offsets;
    for (int dy = lo; dy < lo + side; ++dy) {
        for (int dx = lo; dx < lo + side; ++dx) {
            offsets.push_back({dx, dy});
        }
    }
    return Strel(Kind::square, std::move(offsets), "square:" + std::to_string(side));
}

Strel Strel::custom(std::vector<Offset> offsets) { return Strel(Kind::custom, std::move(offsets), "custom"); }

bool Strel::contains_origin() const { return std::binary_search(offsets_.begin(), offsets_.end(), Offset{0, 0}); }

std::string Strel::describe() const { return description_; }

Strel parse_strel(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) {
        parts.push_back(part);
    }
    try {
        if (parts.size() == 3 && parts[0] == "line") {
            std::size_t used_len = 0;
            std::size_t used_deg = 0;
            const int length = std::stoi(parts[1], &used_len);
            const double degrees = std::stod(parts[2], &used_deg);
            if (used_len == parts[1].size() && used_deg == parts[2].size()) {
                return Strel::line(length, degrees);
            }
        } else if (parts.size() == 2 && parts[0] == "square") {
            std::size_t used = 0;
            const int side = std::stoi(parts[1], &used);
            if (used == parts[1].size()) {
                return Strel::square(side);
            }
        }
    } catch (const std::logic_error&) {
        // fall through to the error below
    }
    throw ConfigError("invalid structuring element '" + text + "' (expected line:<len>:<deg> or square:<side>)",
                      "strel");
}

int otsu_threshold(const GrayImage& image) {
    const Histogram h = histogram(image);
    const auto n = static_cast<double>(h.total);
    double sum_all = 0.0;
    for (int v = 0; v < kGrayLevels; ++v) {
        sum_all += static_cast<double>(v) * static_cast<double>(h.bins[static_cast<std::size_t>(v)]);
    }
    double best = 0.0;
    int best_t = -1;
    double w0 = 0.0;
    double sum0 = 0.0;
    for (int t = 0; t < kGrayLevels - 1; ++t) {
        const auto count = static_cast<double>(h.bins[static_cast<std::size_t>(t)]);
        w0 += count;
        sum0 += t * count;
        const double w1 = n - w0;
        if (w0 == 0.0 || w1 == 0.0) {
            continue;
        }
        const double p0 = w0 / n;
        const double p1 = w1 / n;
        const double gap = sum0 / w0 - (sum_all - sum0) / w1;
        const double between = p0 * p1 * gap * gap;
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask binarize_otsu(const GrayImage& image) {
    const int t = otsu_threshold(image);
    std::vector<std::uint8_t> out(image.size(), 0);
    if (t >= 0) {
        auto src = image.pixels();
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = src[i] > t ? 1 : 0;
        }
    }
    return BinaryMask(image.width(), image.height(), std::move(out));
}

BinaryMask dilate(const BinaryMask& mask, const Strel& strel) {
    BinaryMask out(mask.width(), mask.height(), false);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) {
                continue;
            }
            for (const Offset& o : strel.offsets()) {
                const int tx = x + o.dx;
                const int ty = y + o.dy;
                if (tx >= 0 && ty >= 0 && tx < mask.width() && ty < mask.height()) {
                    out.at(tx, ty) = 1;
                }
            }
        }
    }
    return out;
}

BinaryMask hit_or_miss(const BinaryMask& mask, const HitMissTemplate& tmpl) {
    BinaryMask out(mask.width(), mask.height(), false);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            bool match = true;
            for (int r = 0; r < 3 && match; ++r) {
                for (int c = 0; c < 3 && match; ++c) {
                    const int want = tmpl[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                    if (want < 0) {
                        continue;
                    }
                    const bool have = mask.get_or(x + c - 1, y + r - 1, false);
                    match = have == (want == 1);
                }
            }
            out.at(x, y) = match ? 1 : 0;
        }
    }
    return out;
}

const std::array<HitMissTemplate, 8>& thickening_templates() {
    static const std::array<HitMissTemplate, 8> templates = build_thickening_templates();
    return templates;
}

BinaryMask thicken_once(const BinaryMask& mask) {
    BinaryMask current = mask;
    for (const HitMissTemplate& tmpl : thickening_templates()) {
        const BinaryMask hits = hit_or_miss(current, tmpl);
        auto dst = current.pixels();
        auto src = hits.pixels();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<std::uint8_t>(dst[i] | src[i]);
        }
    }
    return current;
}

BinaryMask thicken(const BinaryMask& mask, int max_iterations) {
    BinaryMask current = mask;
    for (int pass = 0; max_iterations < 0 || pass < max_iterations; ++pass) {
        BinaryMask next = thicken_once(current);
        if (next == current) {
            break;
        }
        current = std::move(next);
    }
    return current;
}

}  // namespace candleseg
