#include <xraysegkit/image_io.hpp>

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace xraysegkit {

namespace {

constexpr const char* kCorrupt = "unsupported or corrupt image";

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw IoError("directory does not exist: " + parent.string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

bool is_png(std::span<const std::uint8_t> bytes)
{
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_pgm(std::span<const std::uint8_t> bytes)
{
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

// Minimal P5 header reader. Returns the offset of the first raster byte.
struct PgmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

PgmHeader parse_pgm_header(std::span<const std::uint8_t> bytes)
{
    std::size_t pos = 2;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> int {
        skip_space();
        long value = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > (1L << 30)) {
                throw IoError(kCorrupt);
            }
            ++pos;
            ++digits;
        }
        if (digits == 0) {
            throw IoError(kCorrupt);
        }
        return static_cast<int>(value);
    };

    PgmHeader h;
    h.width = read_int();
    h.height = read_int();
    h.maxval = read_int();
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw IoError(kCorrupt);
    }
    h.data_offset = pos + 1;
    if (h.width <= 0 || h.height <= 0) {
        throw IoError("image has zero dimension");
    }
    if (h.maxval != 255) {
        throw IoError("unsupported PGM maxval " + std::to_string(h.maxval));
    }
    return h;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes)
{
    const PgmHeader h = parse_pgm_header(bytes);
    const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    if (bytes.size() - h.data_offset < n) {
        throw IoError(kCorrupt);
    }
    GrayImage img(h.height, h.width);
    std::memcpy(img.data(), bytes.data() + h.data_offset, n);
    return img;
}

struct PngReader {
    png_image image{};
    PngReader() { image.version = PNG_IMAGE_VERSION; }
    ~PngReader() { png_image_free(&image); }
    PngReader(const PngReader&) = delete;
    PngReader& operator=(const PngReader&) = delete;
};

GrayImage decode_png(std::span<const std::uint8_t> bytes)
{
    PngReader reader;
    png_image& image = reader.image;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw IoError(kCorrupt);
    }
    if (image.width == 0 || image.height == 0) {
        throw IoError("image has zero dimension");
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        throw IoError("unsupported PNG bit depth (16-bit)");
    }
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    if (image.format & PNG_FORMAT_FLAG_COLOR) {
        image.format = PNG_FORMAT_RGB;
        std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
        if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
            throw IoError(kCorrupt);
        }
        GrayImage img(h, w);
        for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
            img.data()[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
        }
        return img;
    }
    image.format = PNG_FORMAT_GRAY;
    GrayImage img(h, w);
    if (!png_image_finish_read(&image, nullptr, img.data(), 0, nullptr)) {
        throw IoError(kCorrupt);
    }
    return img;
}

std::vector<std::uint8_t> write_png_memory(png_image& image, const void* pixels)
{
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, pixels, 0, nullptr)) {
        throw IoError(std::string("PNG encode failed: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        throw IoError(std::string("PNG encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    return to_intensity(0.299 * r + 0.587 * g + 0.114 * b);
}

GrayImage decode_image(std::span<const std::uint8_t> bytes)
{
    if (is_png(bytes)) {
        return decode_png(bytes);
    }
    if (is_pgm(bytes)) {
        return decode_pgm(bytes);
    }
    throw IoError(kCorrupt);
}

GrayImage load_image(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    return decode_image(bytes);
}

ImageSize probe_image(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> head(64);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    if (is_png(head)) {
        // IHDR is always the first chunk: width and height are big-endian at 16..23.
        if (head.size() < 24 || std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
            throw IoError(kCorrupt);
        }
        auto be32 = [&](std::size_t at) {
            return (std::uint32_t(head[at]) << 24) | (std::uint32_t(head[at + 1]) << 16) |
                   (std::uint32_t(head[at + 2]) << 8) | std::uint32_t(head[at + 3]);
        };
        const std::uint32_t w = be32(16);
        const std::uint32_t h = be32(20);
        if (w == 0 || h == 0 || w > (1u << 30) || h > (1u << 30)) {
            throw IoError(kCorrupt);
        }
        return {static_cast<int>(w), static_cast<int>(h)};
    }
    if (is_pgm(head)) {
        const PgmHeader h = parse_pgm_header(head);
        return {h.width, h.height};
    }
    throw IoError(kCorrupt);
}

ImageFormat format_for_path(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" ? ImageFormat::Pgm : ImageFormat::Png;
}

std::vector<std::uint8_t> encode_png(const GrayImage& img)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.cols());
    image.height = static_cast<png_uint_32>(img.rows());
    image.format = PNG_FORMAT_GRAY;
    return write_png_memory(image, img.data());
}

std::vector<std::uint8_t> encode_png(const RgbImage& img)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;
    return write_png_memory(image, img.data.data());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img)
{
    const std::string header =
        "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data(), img.data() + img.size());
    return out;
}

void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format)
{
    write_file(path, format == ImageFormat::Png ? encode_png(img) : encode_pgm(img));
}

void save_image(const BinaryMask& mask, const std::filesystem::path& path, ImageFormat format)
{
    save_image(mask_to_gray(mask), path, format);
}

void save_png(const RgbImage& img, const std::filesystem::path& path)
{
    write_file(path, encode_png(img));
}

RgbImage tint_overlay(const GrayImage& img, const BinaryMask& mask, double opacity)
{
    if (img.rows() != mask.rows() || img.cols() != mask.cols()) {
        throw InvalidArgument("overlay: image and mask dimensions differ");
    }
    RgbImage out{width(img), height(img), std::vector<std::uint8_t>(img.size() * 3)};
    for (Eigen::Index i = 0; i < img.size(); ++i) {
        const double v = img.data()[i];
        double r = v, g = v, b = v;
        if (mask.data()[i]) {
            r = (1.0 - opacity) * v + opacity * 255.0;
            g = (1.0 - opacity) * v;
            b = (1.0 - opacity) * v;
        }
        out.data[3 * i] = to_intensity(r);
        out.data[3 * i + 1] = to_intensity(g);
        out.data[3 * i + 2] = to_intensity(b);
    }
    return out;
}

}  // namespace xraysegkit
