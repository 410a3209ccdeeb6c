// Reference implementations used to check the library. They favour the
// most literal formulation over speed and share no code with src/.
#ifndef XRAYSEGKIT_TESTS_ORACLES_HPP_
#define XRAYSEGKIT_TESTS_ORACLES_HPP_

#include <xraysegkit/image.hpp>
#include <xraysegkit/labels.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

using xraysegkit::BinaryMask;
using xraysegkit::GrayImage;

using IntMatrix = std::vector<std::vector<long long>>;

/// Operator matrices, rows top to bottom.
IntMatrix sobel_x();
IntMatrix sobel_y();
IntMatrix prewitt_x();
IntMatrix prewitt_y();
IntMatrix roberts_x();
IntMatrix roberts_y();

/// Correlation with anchor at the centre (odd) or top-left (even) and
/// replicated (or zero) borders, in exact integer arithmetic.
IntMatrix correlate(const GrayImage& img, const IntMatrix& kernel, bool zero_pad = false);

/// Exhaustive Otsu: every t in 0..255 scored exactly, lowest maximizer.
/// Returns -1 for images with a single intensity.
int otsu(const GrayImage& img);

/// Depth-first flood fill of |I(p) - I(seed)| <= tau.
BinaryMask flood_fill(const GrayImage& img, int sx, int sy, int tau, int connectivity);

/// Number of connected components of the foreground.
int count_components(const BinaryMask& mask, int connectivity);

/// Even-odd point-in-polygon at every pixel centre; vertices in pixels.
BinaryMask raster_pixels(const std::vector<std::array<double, 2>>& poly, int width, int height);
/// Same with normalized vertices.
BinaryMask raster_normalized(const xraysegkit::Polygon& poly, int width, int height);

double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// Direct (non-incremental) snake energy with the squared gradient
/// magnitude sampled at the nearest pixel.
double snake_energy(const xraysegkit::FloatImage& magnitude, const std::vector<std::array<double, 2>>& pts,
                    double alpha, double beta, double gamma_ext);

/// Brute-force detection evaluator.
struct Prediction {
    int cls = 0;
    double conf = 0.0;
    std::array<double, 4> box{};           // normalized x0 y0 x1 y1
    std::vector<std::array<double, 2>> poly;  // normalized; empty = box only
};

struct GroundTruth {
    int cls = 0;
    std::vector<std::array<double, 2>> poly;  // normalized
};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<GroundTruth> gts;
    std::vector<Prediction> preds;
};

struct Values {
    double p = 0.0, r = 0.0, map50 = 0.0, map50_95 = 0.0;
};

struct Row {
    std::size_t images = 0, instances = 0;
    Values box, mask;
};

struct Report {
    std::vector<Row> rows;  // "all" first, then every class
    double box_conf = 0.0, mask_conf = 0.0;
};

struct Curves {
    // [series][k]; series = classes then "all"; k over 1000 thresholds.
    std::vector<std::vector<double>> precision, recall, f1;
    // Precision-recall points per series after keeping the best precision
    // per distinct recall, ordered by recall.
    std::vector<std::vector<std::array<double, 2>>> pr;
};

struct Evaluation {
    Report report;
    Curves box_curves, mask_curves;
};

Evaluation evaluate(const std::vector<Image>& images, int num_classes);

/// (C+1) x (C+1), rows = true class, last = background.
std::vector<std::vector<long long>> confusion(const std::vector<Image>& images, int num_classes, double conf,
                                              double iou);

/// 101-point interpolated AP over per-rank PR points; `tp` in ranked order.
double ap101(const std::vector<bool>& tp, std::size_t num_gt);

}  // namespace oracle

#endif  // XRAYSEGKIT_TESTS_ORACLES_HPP_
