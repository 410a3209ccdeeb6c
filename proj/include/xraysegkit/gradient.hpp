#ifndef XRAYSEGKIT_GRADIENT_HPP_
#define XRAYSEGKIT_GRADIENT_HPP_

#include <xraysegkit/filter.hpp>
#include <xraysegkit/image.hpp>

#include <utility>

namespace xraysegkit {

enum class GradientKind { Sobel, Prewitt, Roberts };

struct GradientField {
    FloatImage gx;
    FloatImage gy;
    FloatImage magnitude;
};

/// The horizontal and vertical kernels of each operator, as correlation
/// kernels (Roberts is 2x2 anchored at the top-left tap).
std::pair<Kernel, Kernel> gradient_kernels(GradientKind kind);

template <typename Scalar>
GradientField gradient_operator(const Image<Scalar>& img, GradientKind kind,
                                BorderPolicy border = BorderPolicy::Replicate)
{
    auto [kx, ky] = gradient_kernels(kind);
    if (img.rows() < kx.rows() || img.cols() < kx.cols()) {
        throw InvalidArgument("gradient_operator: image smaller than kernel");
    }
    GradientField field;
    field.gx = convolve2d(img, kx, border);
    field.gy = convolve2d(img, ky, border);
    field.magnitude = (field.gx.square() + field.gy.square()).sqrt();
    return field;
}

struct CannyParams {
    double sigma = 1.4;
    double t_low = 20.0;
    double t_high = 60.0;
};

/// Every stage of the detector, kept for inspection and tests.
struct CannyStages {
    GradientField gradient;  ///< Sobel on the smoothed image
    BinaryMask suppressed;   ///< non-maximum suppression survivors
    BinaryMask edges;        ///< after hysteresis
};

/**
 * Gaussian smoothing, Sobel gradient, 4-direction non-maximum
 * suppression and 8-connected hysteresis.
 *
 * NMS keeps p iff mag(p) > mag(p - d) and mag(p) >= mag(p + d), where d is
 * the quantized gradient direction. The one-pixel image frame never
 * survives suppression.
 */
CannyStages canny_stages(const GrayImage& img, const CannyParams& params);
BinaryMask canny(const GrayImage& img, const CannyParams& params);

/// Direction bin 0..3 for 0, 45, 90, 135 degrees (y axis pointing down).
int quantize_direction(double gx, double gy);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_GRADIENT_HPP_
