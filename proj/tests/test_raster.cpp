#include "candleseg/image_io.hpp"
#include "candleseg/raster.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <png.h>

#include <fstream>

using namespace candleseg;
using candleseg::testing::TempDir;

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

IoErrorKind load_failure(const std::filesystem::path& path) {
    try {
        load_image(path);
    } catch (const IoError& e) {
        return e.kind();
    }
    FAIL("load_image did not throw");
    return IoErrorKind::io_failure;
}

}  // namespace

TEST_CASE("raster construction validates dimensions") {
    CHECK_THROWS_AS(GrayImage(0, 3), DimensionError);
    CHECK_THROWS_AS(GrayImage(2, 2, std::vector<std::uint8_t>{1, 2, 3}), DimensionError);
    GrayImage g(3, 2, std::vector<std::uint8_t>{0, 1, 2, 3, 4, 5});
    CHECK(g.at(2, 1) == 5);
    CHECK(g.get_or(3, 0, 99) == 99);
}

TEST_CASE("1x1 P6 file with a red pixel") {
    TempDir dir("p6");
    write_bytes(dir / "red.ppm", std::string("P6\n1 1\n255\n") + std::string("\xff\x00\x00", 3));
    const RasterImage img = load_image(dir / "red.ppm");
    CHECK(img.width() == 1);
    CHECK(img.height() == 1);
    CHECK(img.at(0, 0) == Rgb{255, 0, 0});
}

TEST_CASE("PNM header comments are skipped") {
    TempDir dir("pnmc");
    write_bytes(dir / "c.pgm", std::string("P5\n# note\n2 1\n# more\n255\n") + std::string("\x07\x09", 2));
    const GrayImage g = load_gray(dir / "c.pgm");
    CHECK(g.at(0, 0) == 7);
    CHECK(g.at(1, 0) == 9);
}

TEST_CASE("load errors are classified") {
    TempDir dir("loaderr");
    CHECK(load_failure(dir / "absent.png") == IoErrorKind::file_missing);

    write_bytes(dir / "text.png", "hello world");
    CHECK(load_failure(dir / "text.png") == IoErrorKind::unsupported_format);

    write_bytes(dir / "ascii.pbm", "P1\n1 1\n1\n");
    CHECK(load_failure(dir / "ascii.pbm") == IoErrorKind::unsupported_format);

    write_bytes(dir / "short.ppm", "P6\n4 4\n255\n\x01\x02");
    CHECK(load_failure(dir / "short.ppm") == IoErrorKind::corrupt_header);

    write_bytes(dir / "deep.pgm", "P5\n1 1\n65535\n\x00\x01");
    CHECK(load_failure(dir / "deep.pgm") == IoErrorKind::unsupported_format);

    write_bytes(dir / "bad.png", std::string("\x89PNG\r\n\x1a\n", 8) + "garbage");
    CHECK(load_failure(dir / "bad.png") == IoErrorKind::corrupt_header);
}

TEST_CASE("missing-file message names the kind and path") {
    try {
        load_image("/nonexistent/dir/x.png");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("file-missing") != std::string::npos);
        CHECK(msg.find("/nonexistent/dir/x.png") != std::string::npos);
    }
}

TEST_CASE("all-white 2x2 mask is written as a binary PGM") {
    TempDir dir("pgm");
    save_image(BinaryMask(2, 2, true), dir / "m.pgm");
    const auto bytes = candleseg::testing::file_bytes(dir / "m.pgm");
    const std::string expected = std::string("P5\n2 2\n255\n") + std::string(4, '\xff');
    CHECK(std::string(bytes.begin(), bytes.end()) == expected);
}

TEST_CASE("saving into a missing directory fails with io-failure") {
    TempDir dir("unwritable");
    try {
        save_image(GrayImage(2, 2), dir / "no" / "such" / "x.png");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::io_failure);
    }
    CHECK_THROWS_AS(save_image(RasterImage(1, 1), dir / "x.pgm"), IoError);
    CHECK_THROWS_AS(save_image(GrayImage(1, 1), dir / "x.bmp"), IoError);
}

TEST_CASE("save then load is the identity for every format") {
    TempDir dir("roundtrip");
    SplitMix64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + static_cast<int>(rng.below(17));
        const int h = 1 + static_cast<int>(rng.below(13));
        const RasterImage rgb = candleseg::testing::random_rgb(rng, w, h);
        const GrayImage gray = candleseg::testing::random_gray(rng, w, h);
        for (const char* ext : {".png", ".ppm", ".pnm"}) {
            const auto path = dir / ("rgb" + std::to_string(trial) + ext);
            save_image(rgb, path);
            CHECK(load_image(path) == rgb);
        }
        for (const char* ext : {".png", ".pgm", ".pnm"}) {
            const auto path = dir / ("gray" + std::to_string(trial) + ext);
            save_image(gray, path);
            CHECK(load_gray(path) == gray);
        }
    }
}

TEST_CASE("load then save reproduces the file bytes for PNM") {
    TempDir dir("pnmbytes");
    const std::string original = std::string("P6\n2 1\n255\n") + std::string("\x01\x02\x03\xfa\xfb\xfc", 6);
    write_bytes(dir / "a.ppm", original);
    save_image(load_image(dir / "a.ppm"), dir / "b.ppm");
    const auto bytes = candleseg::testing::file_bytes(dir / "b.ppm");
    CHECK(std::string(bytes.begin(), bytes.end()) == original);
}

TEST_CASE("alpha channel is discarded on load") {
    TempDir dir("rgba");
    const std::uint8_t rgba[] = {10, 20, 30, 0, 40, 50, 60, 255};
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = 2;
    image.height = 1;
    image.format = PNG_FORMAT_RGBA;
    const auto path = (dir / "a.png").string();
    REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, rgba, 0, nullptr) != 0);
    const RasterImage img = load_image(path);
    CHECK(img.at(0, 0) == Rgb{10, 20, 30});
    CHECK(img.at(1, 0) == Rgb{40, 50, 60});
}

TEST_CASE("load_gray rejects colored pixels") {
    TempDir dir("notgray");
    save_image(RasterImage(1, 1, Rgb{1, 2, 3}), dir / "c.png");
    CHECK_THROWS_AS(load_gray(dir / "c.png"), Error);
}

TEST_CASE("crop") {
    SplitMix64 rng(3);
    const RasterImage img = candleseg::testing::random_rgb(rng, 9, 7);

    SUBCASE("full rect is the identity") { CHECK(crop(img, Rect{0, 0, 9, 7}) == img); }

    SUBCASE("892x1191 cropped to 582x778") {
        const RasterImage big(892, 1191);
        const RasterImage out = crop(big, Rect{155, 206, 582, 778});
        CHECK(out.width() == 582);
        CHECK(out.height() == 778);
    }

    SUBCASE("rect past the right edge is rejected with both shapes in the message") {
        try {
            crop(img, Rect{5, 0, 5, 2});
            FAIL("expected BoundsError");
        } catch (const BoundsError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("9x7") != std::string::npos);
        }
        CHECK_THROWS_AS(crop(img, Rect{-1, 0, 2, 2}), BoundsError);
        CHECK_THROWS_AS(crop(img, Rect{0, 0, 0, 2}), BoundsError);
    }

    SUBCASE("nested crops compose") {
        for (int trial = 0; trial < 50; ++trial) {
            const int w1 = 1 + static_cast<int>(rng.below(9));
            const int h1 = 1 + static_cast<int>(rng.below(7));
            const Rect r1{static_cast<int>(rng.below(static_cast<std::uint64_t>(9 - w1 + 1))),
                          static_cast<int>(rng.below(static_cast<std::uint64_t>(7 - h1 + 1))), w1, h1};
            const int w2 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(w1)));
            const int h2 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(h1)));
            const Rect r2{static_cast<int>(rng.below(static_cast<std::uint64_t>(w1 - w2 + 1))),
                          static_cast<int>(rng.below(static_cast<std::uint64_t>(h1 - h2 + 1))), w2, h2};
            const Rect composed{r1.x0 + r2.x0, r1.y0 + r2.y0, w2, h2};
            CHECK(crop(crop(img, r1), r2) == crop(img, composed));
        }
    }
}

TEST_CASE("mask and gray conversions") {
    const BinaryMask m(2, 1, std::vector<std::uint8_t>{0, 1});
    const GrayImage g = mask_to_gray(m);
    CHECK(g.at(0, 0) == 0);
    CHECK(g.at(1, 0) == 255);
    CHECK(gray_to_mask(GrayImage(2, 1, std::vector<std::uint8_t>{0, 3})) == m);
    CHECK(gray_to_rgb(g).at(1, 0) == Rgb{255, 255, 255});
}
