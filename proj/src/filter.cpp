#include <xraysegkit/filter.hpp>

#include <array>

namespace xraysegkit {

Kernel gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gaussian_kernel: sigma must be positive");
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int side = 2 * radius + 1;
    Kernel k(side, side);
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            const double dy = i - radius;
            const double dx = j - radius;
            k(i, j) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
    return k / k.sum();
}

GrayImage gamma_correct(const GrayImage& img, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("gamma_correct: gamma must be positive");
    }
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) {
        lut[v] = to_intensity(255.0 * std::pow(v / 255.0, gamma));
    }
    return img.unaryExpr([&](std::uint8_t v) { return lut[v]; });
}

GrayImage unsharp_sharpen(const GrayImage& img, double sigma, double amount)
{
    if (!(amount >= 0.0) || !std::isfinite(amount)) {
        throw InvalidArgument("unsharp_sharpen: amount must be non-negative");
    }
    const Kernel k = gaussian_kernel(sigma);
    if (k.rows() > img.rows() || k.cols() > img.cols()) {
        throw InvalidArgument("unsharp_sharpen: sigma too large for image");
    }
    const FloatImage in = img.cast<double>();
    const FloatImage blurred = convolve2d(img, k);
    return to_gray(in + amount * (in - blurred));
}

}  // namespace xraysegkit
