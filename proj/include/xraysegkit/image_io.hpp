#ifndef XRAYSEGKIT_IMAGE_IO_HPP_
#define XRAYSEGKIT_IMAGE_IO_HPP_

#include <xraysegkit/image.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xraysegkit {

enum class ImageFormat { Png, Pgm };

struct ImageSize {
    int width = 0;
    int height = 0;
};

/// Decode a PNG (8-bit gray or RGB, alpha ignored) or binary PGM (P5,
/// maxval 255). Color input is reduced with round(0.299R + 0.587G + 0.114B).
GrayImage load_image(const std::filesystem::path& path);
GrayImage decode_image(std::span<const std::uint8_t> bytes);

/// Reads only enough of the file to report its dimensions.
ImageSize probe_image(const std::filesystem::path& path);

void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format);
void save_image(const BinaryMask& mask, const std::filesystem::path& path, ImageFormat format);

/// Picks the format from the extension; anything other than .pgm is PNG.
ImageFormat format_for_path(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

/// Interleaved 8-bit RGB, row-major, three bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;
};

std::vector<std::uint8_t> encode_png(const RgbImage& img);
void save_png(const RgbImage& img, const std::filesystem::path& path);

/// Gray image with the mask blended in red at the given opacity.
RgbImage tint_overlay(const GrayImage& img, const BinaryMask& mask, double opacity = 0.5);

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_IMAGE_IO_HPP_
