#ifndef XRAYSEGKIT_IMAGE_HPP_
#define XRAYSEGKIT_IMAGE_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xraysegkit {

/// Dense row-major raster. Rows index y, columns index x.
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit intensity image, the input to every segmentation routine.
using GrayImage = Image<std::uint8_t>;
/// Real-valued image for gradients and smoothed intermediates.
using FloatImage = Image<double>;
/// Foreground/background raster produced by segmentation.
using BinaryMask = Image<bool>;
/// Correlation kernel, row-major coefficients.
using Kernel = Image<double>;

enum class BorderPolicy { Replicate, ZeroPad };

/// Raised when an operation's precondition on its arguments does not hold.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for unreadable, unwritable or malformed files.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Round half away from zero. Used everywhere a real value becomes an
/// intensity so that ports agree bit for bit.
inline double round_half_away(double v) { return std::round(v); }

inline std::uint8_t to_intensity(double v)
{
    return static_cast<std::uint8_t>(std::clamp(round_half_away(v), 0.0, 255.0));
}

template <typename Scalar>
inline int width(const Image<Scalar>& img) { return static_cast<int>(img.cols()); }

template <typename Scalar>
inline int height(const Image<Scalar>& img) { return static_cast<int>(img.rows()); }

template <typename Scalar>
inline bool in_bounds(const Image<Scalar>& img, int x, int y)
{
    return x >= 0 && y >= 0 && x < img.cols() && y < img.rows();
}

/// Masks are exported as {0, 255}.
inline GrayImage mask_to_gray(const BinaryMask& mask)
{
    return mask.select(GrayImage::Constant(mask.rows(), mask.cols(), 255),
                       GrayImage::Zero(mask.rows(), mask.cols()));
}

/// Clamp and round a real image for display.
inline GrayImage to_gray(const FloatImage& img)
{
    return img.unaryExpr([](double v) { return to_intensity(v); });
}

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_IMAGE_HPP_
