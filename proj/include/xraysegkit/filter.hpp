#ifndef XRAYSEGKIT_FILTER_HPP_
#define XRAYSEGKIT_FILTER_HPP_

#include <xraysegkit/image.hpp>

namespace xraysegkit {

/// Row/column offset of the kernel anchor: centre for odd sides, first
/// tap for even sides (Roberts).
inline int kernel_anchor(Eigen::Index side) { return side % 2 == 1 ? static_cast<int>(side / 2) : 0; }

/**
 * 2-D correlation (the kernel is not flipped). out(y, x) is the sum over
 * taps k(i, j) * in(y + i - ay, x + j - ax) with (ay, ax) the anchor.
 * Samples outside the image follow `border`.
 */
template <typename Scalar>
FloatImage convolve2d(const Image<Scalar>& img, const Kernel& k, BorderPolicy border = BorderPolicy::Replicate)
{
    if (k.size() == 0) {
        throw InvalidArgument("convolve2d: empty kernel");
    }
    if (k.rows() > img.rows() || k.cols() > img.cols()) {
        throw InvalidArgument("convolve2d: kernel larger than image");
    }
    const int h = height(img);
    const int w = width(img);
    const int ay = kernel_anchor(k.rows());
    const int ax = kernel_anchor(k.cols());
    FloatImage out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k.rows(); ++i) {
                int sy = y + i - ay;
                const bool row_out = sy < 0 || sy >= h;
                if (row_out && border == BorderPolicy::ZeroPad) {
                    continue;
                }
                sy = std::clamp(sy, 0, h - 1);
                for (int j = 0; j < k.cols(); ++j) {
                    int sx = x + j - ax;
                    if (sx < 0 || sx >= w) {
                        if (border == BorderPolicy::ZeroPad) {
                            continue;
                        }
                        sx = std::clamp(sx, 0, w - 1);
                    }
                    acc += k(i, j) * static_cast<double>(img(sy, sx));
                }
            }
            out(y, x) = acc;
        }
    }
    return out;
}

/// Normalized square Gaussian with side 2*ceil(3*sigma) + 1.
Kernel gaussian_kernel(double sigma);

template <typename Scalar>
FloatImage gaussian_blur(const Image<Scalar>& img, double sigma, BorderPolicy border = BorderPolicy::Replicate)
{
    return convolve2d(img, gaussian_kernel(sigma), border);
}

/// out = round(255 * (in / 255)^gamma).
GrayImage gamma_correct(const GrayImage& img, double gamma);

/// out = clamp(round(in + amount * (in - blur(in, sigma)))).
GrayImage unsharp_sharpen(const GrayImage& img, double sigma, double amount);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_FILTER_HPP_
