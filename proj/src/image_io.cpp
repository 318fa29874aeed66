#include "candleseg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

namespace candleseg {

namespace {

namespace fs = std::filesystem;

/// Decoded file contents: 1 or 3 interleaved 8-bit channels.
struct Decoded {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> bytes;
};

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw IoError(IoErrorKind::file_missing, path, "no such file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(IoErrorKind::file_missing, path, "cannot open for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Decoded decode_png(const std::vector<std::uint8_t>& data, const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&image, data.data(), data.size()) == 0) {
        throw IoError(IoErrorKind::corrupt_header, path, image.message);
    }
    if ((image.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
        png_image_free(&image);
        throw IoError(IoErrorKind::unsupported_format, path, "only 8-bit PNG is supported");
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    // Read with alpha when present so that color values come through untouched
    // instead of being composited; alpha is stripped below.
    const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB) : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);

    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
        throw IoError(IoErrorKind::corrupt_header, path, image.message);
    }

    Decoded out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.channels = color ? 3 : 1;
    if (!alpha) {
        out.bytes = std::move(buffer);
        return out;
    }
    const std::size_t src_stride = static_cast<std::size_t>(out.channels) + 1;
    const std::size_t count = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
    out.bytes.resize(count * static_cast<std::size_t>(out.channels));
    for (std::size_t i = 0; i < count; ++i) {
        std::copy_n(buffer.begin() + static_cast<std::ptrdiff_t>(i * src_stride), out.channels,
                    out.bytes.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(out.channels)));
    }
    return out;
}

class PnmHeaderReader {
public:
    PnmHeaderReader(const std::vector<std::uint8_t>& data, const fs::path& path) : data_(data), path_(path) {}

    long next_number() {
        skip_space_and_comments();
        long value = 0;
        int digits = 0;
        while (pos_ < data_.size() && std::isdigit(data_[pos_]) != 0) {
            value = value * 10 + (data_[pos_] - '0');
            if (value > 1'000'000'000L) {
                throw IoError(IoErrorKind::corrupt_header, path_, "header value too large");
            }
            ++pos_;
            ++digits;
        }
        if (digits == 0) {
            throw IoError(IoErrorKind::corrupt_header, path_, "expected a number in PNM header");
        }
        return value;
    }

    /// Consumes the single whitespace byte that terminates the header.
    std::size_t data_offset() {
        if (pos_ >= data_.size() || std::isspace(data_[pos_]) == 0) {
            throw IoError(IoErrorKind::corrupt_header, path_, "missing whitespace after maxval");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < data_.size()) {
            if (std::isspace(data_[pos_]) != 0) {
                ++pos_;
            } else if (data_[pos_] == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& data_;
    const fs::path& path_;
    std::size_t pos_ = 2;
};

Decoded decode_pnm(const std::vector<std::uint8_t>& data, const fs::path& path) {
    const int channels = data[1] == '6' ? 3 : 1;
    PnmHeaderReader reader(data, path);
    const long width = reader.next_number();
    const long height = reader.next_number();
    const long maxval = reader.next_number();
    if (width < 1 || height < 1) {
        throw IoError(IoErrorKind::corrupt_header, path, "non-positive dimensions");
    }
    if (maxval != 255) {
        throw IoError(IoErrorKind::unsupported_format, path, "maxval " + std::to_string(maxval) + " (only 255)");
    }
    const std::size_t offset = reader.data_offset();
    const std::size_t expected =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(channels);
    if (data.size() < offset + expected) {
        throw IoError(IoErrorKind::corrupt_header, path,
                      "pixel data truncated: expected " + std::to_string(expected) + " bytes");
    }
    Decoded out;
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.channels = channels;
    out.bytes.assign(data.begin() + static_cast<std::ptrdiff_t>(offset),
                     data.begin() + static_cast<std::ptrdiff_t>(offset + expected));
    return out;
}

Decoded decode(const fs::path& path) {
    const auto data = read_file(path);
    if (data.size() >= kPngSignature.size() && std::equal(kPngSignature.begin(), kPngSignature.end(), data.begin())) {
        return decode_png(data, path);
    }
    if (data.size() >= 2 && data[0] == 'P' && (data[1] == '5' || data[1] == '6')) {
        return decode_pnm(data, path);
    }
    if (data.size() >= 2 && data[0] == 'P' && data[1] >= '1' && data[1] <= '4') {
        throw IoError(IoErrorKind::unsupported_format, path, "only binary P5/P6 PNM is supported");
    }
    throw IoError(IoErrorKind::unsupported_format, path, "not a PNG or PNM file");
}

enum class Container { png, ppm, pgm, pnm };

Container container_for(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return Container::png;
    if (ext == ".ppm") return Container::ppm;
    if (ext == ".pgm") return Container::pgm;
    if (ext == ".pnm") return Container::pnm;
    throw IoError(IoErrorKind::unsupported_format, path, "unknown output extension '" + ext + "'");
}

void check_parent(const fs::path& path) {
    const fs::path parent = path.parent_path();
    std::error_code ec;
    if (!parent.empty() && !fs::is_directory(parent, ec)) {
        throw IoError(IoErrorKind::io_failure, path, "parent directory does not exist");
    }
}

void write_bytes(const fs::path& path, const std::string& header, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::io_failure, path, std::strerror(errno));
    }
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
        throw IoError(IoErrorKind::io_failure, path, "write failed");
    }
}

void write_png(const fs::path& path, int width, int height, int channels, std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.flags = PNG_IMAGE_FLAG_FAST;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr) == 0) {
        throw IoError(IoErrorKind::io_failure, path, image.message);
    }
}

std::string pnm_header(char magic, int width, int height) {
    return std::string("P") + magic + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
}

std::vector<std::uint8_t> interleave(const RasterImage& image) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(image.size() * 3);
    for (const Rgb& p : image.pixels()) {
        bytes.push_back(p.r);
        bytes.push_back(p.g);
        bytes.push_back(p.b);
    }
    return bytes;
}

}  // namespace

RasterImage load_image(const fs::path& path) {
    const Decoded d = decode(path);
    std::vector<Rgb> pixels(static_cast<std::size_t>(d.width) * static_cast<std::size_t>(d.height));
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (d.channels == 3) {
            pixels[i] = Rgb{d.bytes[3 * i], d.bytes[3 * i + 1], d.bytes[3 * i + 2]};
        } else {
            pixels[i] = Rgb{d.bytes[i], d.bytes[i], d.bytes[i]};
        }
    }
    return RasterImage(d.width, d.height, std::move(pixels));
}

GrayImage load_gray(const fs::path& path) {
    Decoded d = decode(path);
    if (d.channels == 1) {
        return GrayImage(d.width, d.height, std::move(d.bytes));
    }
    std::vector<std::uint8_t> gray(d.bytes.size() / 3);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const std::uint8_t r = d.bytes[3 * i];
        if (d.bytes[3 * i + 1] != r || d.bytes[3 * i + 2] != r) {
            throw IoError(IoErrorKind::unsupported_format, path, "expected a grayscale image");
        }
        gray[i] = r;
    }
    return GrayImage(d.width, d.height, std::move(gray));
}

void save_image(const RasterImage& image, const fs::path& path) {
    const Container c = container_for(path);
    if (c == Container::pgm) {
        throw IoError(IoErrorKind::unsupported_format, path, "cannot store a color image as PGM");
    }
    check_parent(path);
    const auto bytes = interleave(image);
    if (c == Container::png) {
        write_png(path, image.width(), image.height(), 3, bytes);
    } else {
        write_bytes(path, pnm_header('6', image.width(), image.height()), bytes);
    }
}

void save_image(const GrayImage& image, const fs::path& path) {
    const Container c = container_for(path);
    if (c == Container::ppm) {
        save_image(gray_to_rgb(image), path);
        return;
    }
    check_parent(path);
    if (c == Container::png) {
        write_png(path, image.width(), image.height(), 1, image.pixels());
    } else {
        write_bytes(path, pnm_header('5', image.width(), image.height()), image.pixels());
    }
}

void save_image(const BinaryMask& mask, const fs::path& path) { save_image(mask_to_gray(mask), path); }

}  // namespace candleseg
