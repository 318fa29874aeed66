#include "candleseg/enhance.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace candleseg;
using candleseg::testing::random_gray;

namespace {

std::array<int, 256> reference_he_lut(const GrayImage& img, int x0, int x1, int y0, int y1) {
    std::array<long, 256> bins{};
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            ++bins[img.at(x, y)];
        }
    }
    const double total = static_cast<double>(x1 - x0) * (y1 - y0);
    std::array<int, 256> lut{};
    long cdf = 0;
    for (int v = 0; v < 256; ++v) {
        cdf += bins[static_cast<std::size_t>(v)];
        lut[static_cast<std::size_t>(v)] = static_cast<int>(std::floor(255.0 * cdf / total + 0.5));
    }
    return lut;
}

// Tiled equalization with bilinear blending between tile centers, no clipping.
GrayImage reference_tiled_he(const GrayImage& img, int tx, int ty) {
    auto bounds = [](int extent, int tiles) {
        std::vector<int> b;
        for (int t = 0; t <= tiles; ++t) {
            b.push_back(t * extent / tiles);
        }
        return b;
    };
    const auto bx = bounds(img.width(), tx);
    const auto by = bounds(img.height(), ty);
    std::vector<std::array<int, 256>> luts;
    for (int j = 0; j < ty; ++j) {
        for (int i = 0; i < tx; ++i) {
            luts.push_back(reference_he_lut(img, bx[i], bx[i + 1], by[j], by[j + 1]));
        }
    }
    auto locate = [](const std::vector<int>& b, int p, int& lo, int& hi, double& w) {
        const int tiles = static_cast<int>(b.size()) - 1;
        std::vector<double> c;
        for (int t = 0; t < tiles; ++t) {
            c.push_back((b[t] + b[t + 1] - 1) / 2.0);
        }
        lo = hi = 0;
        w = 0.0;
        if (p <= c.front()) {
            return;
        }
        if (p >= c.back()) {
            lo = hi = tiles - 1;
            return;
        }
        for (int t = 0; t + 1 < tiles; ++t) {
            if (c[t] <= p && p < c[t + 1]) {
                lo = t;
                hi = t + 1;
                w = (p - c[t]) / (c[t + 1] - c[t]);
                return;
            }
        }
    };
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        int ylo, yhi;
        double wy;
        locate(by, y, ylo, yhi, wy);
        for (int x = 0; x < img.width(); ++x) {
            int xlo, xhi;
            double wx;
            locate(bx, x, xlo, xhi, wx);
            const int v = img.at(x, y);
            auto L = [&](int i, int j) { return luts[static_cast<std::size_t>(j * tx + i)][static_cast<std::size_t>(v)]; };
            const double top = (1 - wx) * L(xlo, ylo) + wx * L(xhi, ylo);
            const double bottom = (1 - wx) * L(xlo, yhi) + wx * L(xhi, yhi);
            out.at(x, y) = static_cast<std::uint8_t>(std::lround((1 - wy) * top + wy * bottom));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("histogram") {
    const Histogram h = histogram(GrayImage(2, 2, 7));
    CHECK(h.bins[7] == 4);
    CHECK(h.total == 4);
    CHECK(std::count(h.bins.begin(), h.bins.end(), 0u) == 255);
    CHECK(histogram(GrayImage(1, 1)).total == 1);
    const Histogram two = histogram(GrayImage(4, 1, std::vector<std::uint8_t>{0, 0, 255, 255}));
    CHECK(two.bins[0] == 2);
    CHECK(two.bins[255] == 2);
}

TEST_CASE("equalize fixtures") {
    const GrayImage out = equalize(GrayImage(4, 1, std::vector<std::uint8_t>{0, 0, 0, 255}));
    CHECK(out == GrayImage(4, 1, std::vector<std::uint8_t>{191, 191, 191, 255}));
    CHECK(equalize(GrayImage(3, 3, 42)) == GrayImage(3, 3, 255));
}

TEST_CASE("equalize on a full ramp") {
    std::vector<std::uint8_t> ramp(256);
    for (int v = 0; v < 256; ++v) {
        ramp[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(v);
    }
    const GrayImage img(16, 16, ramp);
    const GrayImage out = equalize(img);
    const auto lut = reference_he_lut(img, 0, 16, 0, 16);
    for (int v = 0; v < 256; ++v) {
        const int got = out.pixels()[static_cast<std::size_t>(v)];
        REQUIRE(got == lut[static_cast<std::size_t>(v)]);
        REQUIRE(std::abs(got - v) <= 1);
    }
}

TEST_CASE("equalize matches the reference mapping and is monotone") {
    SplitMix64 rng(51);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = 1 + static_cast<int>(rng.below(24));
        const int h = 1 + static_cast<int>(rng.below(24));
        const int levels = 2 + static_cast<int>(rng.below(255));
        const GrayImage img = random_gray(rng, w, h, levels);
        const GrayImage out = equalize(img);
        REQUIRE(out.same_shape(img));
        const auto lut = reference_he_lut(img, 0, w, 0, h);
        std::array<int, 256> seen;
        seen.fill(-1);
        for (std::size_t i = 0; i < img.size(); ++i) {
            REQUIRE(out.pixels()[i] == lut[img.pixels()[i]]);
            seen[img.pixels()[i]] = out.pixels()[i];
        }
        int prev = -1;
        for (int s : seen) {
            if (s >= 0) {
                REQUIRE(s >= prev);
                prev = s;
            }
        }
    }
}

TEST_CASE("clip limit") {
    CHECK(compute_clip_limit(1000, 0.0, 4.0) == doctest::Approx(1000.0 / 256.0));
    CHECK(compute_clip_limit(4096, 100.0, 4.0) == 64.0);
    CHECK(compute_clip_limit(256, 50.0, 3.0) == 2.0);
    ClaheParams p;
    CHECK(compute_clip_limit(p, 4096) == doctest::Approx(16.0 * 2.2));
}

TEST_CASE("clipped bins never exceed the limit by more than one") {
    SplitMix64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 8 + static_cast<int>(rng.below(120));
        const int h = 8 + static_cast<int>(rng.below(120));
        const GrayImage tile = random_gray(rng, w, h, 1 + static_cast<int>(rng.below(40)));
        std::array<double, 256> bins{};
        for (std::uint8_t v : tile.pixels()) {
            bins[v] += 1.0;
        }
        const double beta = compute_clip_limit(tile.size(), rng.uniform() * 100.0, 1.0 + rng.uniform() * 5.0);
        clip_histogram(bins, beta);
        double total = 0.0;
        for (double b : bins) {
            REQUIRE(b <= beta + 1.0);
            total += b;
        }
        CHECK(total == doctest::Approx(static_cast<double>(tile.size())));
    }
}

TEST_CASE("tile spans partition the extent") {
    const auto spans = tile_spans(10, 3);
    REQUIRE(spans.size() == 3);
    CHECK(spans[0] == std::pair{0, 3});
    CHECK(spans[1] == std::pair{3, 6});
    CHECK(spans[2] == std::pair{6, 10});
}

TEST_CASE("CLAHE with one tile and no active clipping equals equalize") {
    SplitMix64 rng(71);
    ClaheParams p;
    p.tiles_x = p.tiles_y = 1;
    p.clip_alpha = 100.0;
    p.s_max = 256.0;
    for (int trial = 0; trial < 100; ++trial) {
        const GrayImage img = random_gray(rng, 1 + static_cast<int>(rng.below(40)),
                                          1 + static_cast<int>(rng.below(40)), 2 + static_cast<int>(rng.below(255)));
        REQUIRE(clahe(img, p) == equalize(img));
    }
}

TEST_CASE("CLAHE without clipping matches a tiled equalization reference") {
    SplitMix64 rng(81);
    ClaheParams p;
    p.clip_alpha = 100.0;
    p.s_max = 256.0;
    for (auto [tx, ty] : {std::pair{8, 8}, std::pair{3, 5}, std::pair{1, 4}}) {
        p.tiles_x = tx;
        p.tiles_y = ty;
        const GrayImage img = random_gray(rng, 64, 64);
        CHECK(clahe(img, p) == reference_tiled_he(img, tx, ty));
    }
}

TEST_CASE("CLAHE degenerate inputs and errors") {
    CHECK(clahe(GrayImage(16, 16, 3)) == GrayImage(16, 16, 255));
    const GrayImage once = clahe(GrayImage(16, 16, 3));
    CHECK(clahe(once) == once);
    CHECK(equalize(equalize(GrayImage(4, 4, 9))) == equalize(GrayImage(4, 4, 9)));
    CHECK_THROWS_AS(clahe(GrayImage(7, 16)), ConfigError);
    ClaheParams bad;
    bad.clip_alpha = 120.0;
    CHECK_THROWS_AS(clahe(GrayImage(16, 16), bad), ConfigError);
    bad = {};
    bad.s_max = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("CLAHE is deterministic") {
    SplitMix64 rng(91);
    const GrayImage img = random_gray(rng, 80, 60);
    CHECK(clahe(img) == clahe(img));
}
