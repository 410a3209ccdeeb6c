#ifndef XRAYSEGKIT_PIPELINE_HPP_
#define XRAYSEGKIT_PIPELINE_HPP_

#include <xraysegkit/gradient.hpp>
#include <xraysegkit/segment.hpp>
#include <xraysegkit/snake.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xraysegkit {

enum class SegmentMethod { Fixed, Otsu, RegionGrow, Sobel, Prewitt, Roberts, Canny, Snake };

std::vector<std::string> segment_method_names();
SegmentMethod parse_segment_method(const std::string& name);

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
};

/// Every knob of a segmentation run. The defaults for the fixed threshold
/// and region growing are the hand X-ray demo values (t = 177; seed
/// (640, 790), tau = 60).
struct SegmentParams {
    SegmentMethod method = SegmentMethod::Fixed;

    // Enhancement applied before segmentation.
    std::optional<double> gamma;
    double sharpen_amount = 0.0;
    double sharpen_sigma = 1.0;

    int threshold = 177;

    Seed seed{640, 790};
    int tau = 60;
    GrowMode grow_mode = GrowMode::SeedReference;
    Connectivity connectivity = Connectivity::Four;

    BorderPolicy border = BorderPolicy::Replicate;
    /// Binarize gradient magnitude at this level; without it the clamped
    /// magnitude is written.
    std::optional<double> edge_threshold;

    CannyParams canny;

    SnakeParams snake;
    double snake_sigma = 1.0;  ///< pre-smoothing of the external field
    int snake_points = 12;
    std::optional<Circle> snake_init;  ///< default: centred, 0.45 * min side

    std::optional<MorphOp> morph;
    int morph_size = 3;
};

/// One documented parameter: the CLI flag is `--<name>` and the preview
/// query key is `<name>`.
struct ParamSpec {
    std::string name;
    std::string default_value;
    std::string help;
};

const std::vector<ParamSpec>& segment_param_specs();

/// Builds parameters from string key/values (CLI flags or query string).
/// Unknown keys and out-of-range values throw InvalidArgument.
SegmentParams parse_segment_params(const std::map<std::string, std::string>& values);

/// Checks ranges that do not depend on the image.
void validate(const SegmentParams& params);

struct SegmentOutput {
    GrayImage image;                ///< what gets written (masks as 0/255)
    std::optional<BinaryMask> mask; ///< present for binary outputs
    std::optional<int> threshold;   ///< chosen Otsu threshold
    std::optional<SnakeResult> snake;
};

/// Enhancement, segmentation and optional morphology. Image-dependent
/// preconditions (seed bounds, kernel size) throw InvalidArgument.
SegmentOutput run_segment(const GrayImage& img, const SegmentParams& params);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_PIPELINE_HPP_
