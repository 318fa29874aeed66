#pragma once

#include "candleseg/raster.hpp"

#include <filesystem>

namespace candleseg {

/**
 * Reads an 8-bit PNG or a binary PNM (P5/P6, maxval 255).
 *
 * The format is detected from the file signature, not the extension.
 * Grayscale files are replicated across the three channels and any alpha
 * channel is discarded. Failures raise IoError with kind file_missing,
 * unsupported_format or corrupt_header.
 */
RasterImage load_image(const std::filesystem::path& path);

/// Like load_image, but requires every pixel to have equal channels.
GrayImage load_gray(const std::filesystem::path& path);

/// Writes PNG (.png) or PNM (.ppm/.pgm/.pnm) depending on the extension.
void save_image(const RasterImage& image, const std::filesystem::path& path);
void save_image(const GrayImage& image, const std::filesystem::path& path);
/// Masks are written as 0/255 grayscale.
void save_image(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace candleseg
