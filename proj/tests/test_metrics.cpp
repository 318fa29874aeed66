#include "candleseg/metrics.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace candleseg;
using candleseg::testing::random_gray;
using candleseg::testing::random_mask;

namespace {

// Direct 2-D windowed statistics per window, no separable filtering.
std::vector<double> reference_ssim_map(const GrayImage& a, const GrayImage& b, int win, double sigma) {
    const int r = win / 2;
    std::vector<double> wts;
    double total = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            wts.push_back(v);
            total += v;
        }
    }
    for (double& v : wts) {
        v /= total;
    }
    const double c1 = (0.01 * 255) * (0.01 * 255);
    const double c2 = (0.03 * 255) * (0.03 * 255);
    std::vector<double> out;
    for (int y = 0; y + win <= a.height(); ++y) {
        for (int x = 0; x + win <= a.width(); ++x) {
            double ma = 0, mb = 0;
            std::size_t k = 0;
            for (int j = 0; j < win; ++j) {
                for (int i = 0; i < win; ++i, ++k) {
                    ma += wts[k] * a.at(x + i, y + j);
                    mb += wts[k] * b.at(x + i, y + j);
                }
            }
            double va = 0, vb = 0, cov = 0;
            k = 0;
            for (int j = 0; j < win; ++j) {
                for (int i = 0; i < win; ++i, ++k) {
                    const double da = a.at(x + i, y + j) - ma;
                    const double db = b.at(x + i, y + j) - mb;
                    va += wts[k] * da * da;
                    vb += wts[k] * db * db;
                    cov += wts[k] * da * db;
                }
            }
            // With C3 = C2 / 2 the product collapses to the familiar two-factor form.
            out.push_back((2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2)));
        }
    }
    return out;
}

GrayImage shifted(const GrayImage& img, int delta) {
    GrayImage out = img;
    for (auto& p : out.pixels()) {
        p = static_cast<std::uint8_t>(p + delta);
    }
    return out;
}

}  // namespace

TEST_CASE("mse fixtures") {
    SplitMix64 rng(201);
    const GrayImage x = random_gray(rng, 9, 9);
    CHECK(mse(x, x) == 0.0);

    const BinaryMask a(4, 1, std::vector<std::uint8_t>{1, 1, 0, 0});
    const BinaryMask b(4, 1, std::vector<std::uint8_t>{1, 0, 1, 0});
    CHECK(mse(a, b) == 0.5);
    CHECK(mse(a, b, MseScale::byte) == 0.5 * 255 * 255);

    const GrayImage p(2, 1, std::vector<std::uint8_t>{0, 255});
    const GrayImage q(2, 1, std::vector<std::uint8_t>{255, 255});
    CHECK(mse(p, q) == 0.5);
    CHECK(mse(p, q, MseScale::byte) == 0.5 * 255 * 255);

    CHECK_THROWS_AS(mse(GrayImage(2, 2), GrayImage(2, 3)), DimensionError);
    CHECK_THROWS_AS(mse(BinaryMask(2, 2), BinaryMask(3, 2)), DimensionError);
}

TEST_CASE("mse is symmetric and matches masks as 0/1 images") {
    SplitMix64 rng(203);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 1 + static_cast<int>(rng.below(30));
        const int h = 1 + static_cast<int>(rng.below(30));
        const GrayImage a = random_gray(rng, w, h);
        const GrayImage b = random_gray(rng, w, h);
        REQUIRE(std::abs(mse(a, b) - mse(b, a)) <= 1e-12);
        const BinaryMask ma = random_mask(rng, w, h);
        const BinaryMask mb = random_mask(rng, w, h);
        REQUIRE(mse(ma, mb) == doctest::Approx(mse(mask_to_gray(ma), mask_to_gray(mb))).epsilon(1e-12));
    }
}

TEST_CASE("stabilizer constants") {
    const SsimParams p;
    CHECK(p.c1() == doctest::Approx(6.5025).epsilon(1e-12));
    CHECK(p.c2() == doctest::Approx(58.5225).epsilon(1e-12));
    CHECK(p.c3() == doctest::Approx(29.26125).epsilon(1e-12));
}

TEST_CASE("ssim of an image with itself is one") {
    SplitMix64 rng(207);
    for (int trial = 0; trial < 100; ++trial) {
        const GrayImage x = random_gray(rng, 11 + static_cast<int>(rng.below(30)), 11 + static_cast<int>(rng.below(30)));
        REQUIRE(std::abs(ssim(x, x).mssim - 1.0) <= 1e-9);
    }
}

TEST_CASE("constant images 100 and 110") {
    const double c1 = 6.5025;
    const double expected = (2.0 * 100 * 110 + c1) / (100.0 * 100 + 110.0 * 110 + c1);
    CHECK(expected == doctest::Approx(22006.5025 / 22106.5025).epsilon(1e-15));
    CHECK(std::abs(expected - 0.99548) < 1e-4);
    const SsimResult r = ssim(GrayImage(16, 16, 100), GrayImage(16, 16, 110));
    CHECK(std::abs(r.mssim - expected) < 1e-9);
    CHECK(r.map_width == 6);
    CHECK(r.map_height == 6);
}

TEST_CASE("ssim map matches direct window evaluation") {
    SplitMix64 rng(211);
    for (int trial = 0; trial < 10; ++trial) {
        const int w = 11 + static_cast<int>(rng.below(12));
        const int h = 11 + static_cast<int>(rng.below(12));
        const GrayImage a = random_gray(rng, w, h);
        GrayImage b = a;
        for (auto& p : b.pixels()) {
            p = static_cast<std::uint8_t>(std::clamp(static_cast<int>(p) + static_cast<int>(rng.below(61)) - 30, 0, 255));
        }
        const SsimResult r = ssim(a, b);
        const auto oracle = reference_ssim_map(a, b, 11, 1.5);
        REQUIRE(r.map.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            REQUIRE(std::abs(r.map[i] - oracle[i]) < 1e-9);
        }
    }
}

TEST_CASE("ssim is symmetric and bounded") {
    SplitMix64 rng(213);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 11 + static_cast<int>(rng.below(20));
        const int h = 11 + static_cast<int>(rng.below(20));
        const GrayImage a = random_gray(rng, w, h);
        const GrayImage b = random_gray(rng, w, h);
        const double ab = ssim(a, b).mssim;
        REQUIRE(std::abs(ab - ssim(b, a).mssim) <= 1e-9);
        REQUIRE(ab >= -1.0);
        REQUIRE(ab <= 1.0);
    }
}

TEST_CASE("exponents select components") {
    SplitMix64 rng(217);
    const GrayImage a = random_gray(rng, 20, 20);
    const GrayImage b = random_gray(rng, 20, 20);
    const SsimMaps full = ssim_maps(a, b);
    for (std::size_t i = 0; i < full.ssim.size(); ++i) {
        REQUIRE(full.ssim[i] == doctest::Approx(full.luminance[i] * full.contrast[i] * full.structure[i]));
    }

    SsimParams p;
    p.exp_luminance = 0.0;
    const SsimMaps no_l = ssim_maps(a, b, p);
    for (std::size_t i = 0; i < no_l.ssim.size(); ++i) {
        REQUIRE(no_l.ssim[i] == doctest::Approx(full.contrast[i] * full.structure[i]));
    }
    p.exp_contrast = 0.0;
    p.exp_structure = 0.0;
    for (double v : ssim_maps(a, b, p).ssim) {
        REQUIRE(v == 1.0);
    }
}

TEST_CASE("shifting both images leaves contrast and structure unchanged") {
    SplitMix64 rng(219);
    const SsimStabilizers zero{0.0, 0.0, 0.0};
    for (int trial = 0; trial < 10; ++trial) {
        const GrayImage a = random_gray(rng, 24, 24, 200);
        const GrayImage b = random_gray(rng, 24, 24, 200);
        const SsimMaps base = ssim_maps(a, b, SsimParams{}, zero);
        const SsimMaps moved = ssim_maps(shifted(a, 50), shifted(b, 50), SsimParams{}, zero);
        for (std::size_t i = 0; i < base.ssim.size(); ++i) {
            REQUIRE(std::abs(base.contrast[i] - moved.contrast[i]) < 1e-9);
            REQUIRE(std::abs(base.structure[i] - moved.structure[i]) < 1e-9);
        }
    }
}

TEST_CASE("ssim errors") {
    CHECK_THROWS_AS(ssim(GrayImage(12, 12), GrayImage(12, 13)), DimensionError);
    CHECK_THROWS_AS(ssim(GrayImage(10, 12), GrayImage(10, 12)), DimensionError);
    SsimParams p;
    p.window = 4;
    CHECK_THROWS_AS(ssim(GrayImage(12, 12), GrayImage(12, 12), p), ConfigError);
}

TEST_CASE("pairwise summation") {
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-13));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("report json") {
    const MetricsReport r = evaluate(GrayImage(12, 12, 5), GrayImage(12, 12, 5));
    const auto j = to_json(r);
    CHECK(j["mse"].get<double>() == 0.0);
    CHECK(j["mssim"].get<double>() == doctest::Approx(1.0));
    CHECK(j["window_count"].get<long long>() == 4);
    CHECK(j["params"]["mse_scale"].get<std::string>() == "unit");
    CHECK(j.begin().key() == "mse");

    const MetricsReport m = evaluate(BinaryMask(12, 12, true), BinaryMask(12, 12, false));
    CHECK(m.mse == 1.0);
}
