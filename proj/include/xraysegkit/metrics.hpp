#ifndef XRAYSEGKIT_METRICS_HPP_
#define XRAYSEGKIT_METRICS_HPP_

#include <xraysegkit/labels.hpp>
#include <xraysegkit/raster.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace xraysegkit {

enum class MatchKind { Box, Mask };

/// IoU thresholds 0.50, 0.55, ..., 0.95.
inline constexpr int kNumIouThresholds = 10;
std::array<double, kNumIouThresholds> iou_thresholds();

/// Number of evenly spaced confidence thresholds in [0, 1] swept by the curves.
inline constexpr int kCurvePoints = 1000;
double curve_threshold(int k);

double iou_box(const BoundingBox& a, const BoundingBox& b);

/// |a & b| / |a | b|, 0 when both are empty.
double iou_mask(const BinaryMask& a, const BinaryMask& b);

using IouMatrix = Eigen::MatrixXd;  ///< rows = predictions, cols = ground truths

struct PredictionRecord {
    int class_id = 0;
    double confidence = 0.0;
    bool matched = false;
    double iou = 0.0;
    int gt_index = -1;
};

struct GroundTruthRecord {
    int class_id = 0;
    bool matched = false;
};

struct MatchResult {
    std::vector<PredictionRecord> predictions;  ///< input order
    std::vector<GroundTruthRecord> ground_truths;

    std::size_t true_positives() const;
    std::size_t false_positives() const { return predictions.size() - true_positives(); }
    std::size_t false_negatives() const { return ground_truths.size() - true_positives(); }
};

/**
 * Greedy matching. Predictions are taken by descending confidence (ties
 * by input order); each claims the unmatched ground truth with the highest
 * IoU >= threshold (ties by lowest index). Returns, per prediction, the
 * matched ground-truth index or -1.
 */
std::vector<int> greedy_match(const std::vector<double>& confidence, const IouMatrix& iou, double threshold);

/// Pairwise IoU between predictions and ground truths of one image.
IouMatrix iou_matrix(const std::vector<Detection>& preds, const std::vector<PolygonAnnotation>& gts,
                     MatchKind kind, int width, int height);

/// Single-image, single-class matching. Throws InvalidArgument on mixed classes.
MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<PolygonAnnotation>& gts,
                             double iou_threshold, MatchKind kind, int width, int height);

struct ScoredMatch {
    double confidence = 0.0;
    bool true_positive = false;
};

/**
 * 101-point interpolated AP: sweep the predictions by descending
 * confidence (stable), take the precision envelope
 * p(r) = max over r' >= r, and average it at recall 0.00, 0.01, ..., 1.00.
 * Zero when total_gt is zero.
 */
double average_precision(std::vector<ScoredMatch> matches, std::size_t total_gt);

/// Ground truth and predictions of one image.
struct EvalImage {
    std::string stem;
    int width = 0;
    int height = 0;
    std::vector<PolygonAnnotation> ground_truth;
    std::vector<Detection> predictions;
};

/// Matching outcome of one prediction at every IoU threshold.
struct ScoredPrediction {
    double confidence = 0.0;
    std::array<bool, kNumIouThresholds> tp{};
};

struct ClassRecords {
    std::size_t num_gt = 0;
    std::size_t num_images = 0;  ///< images with at least one instance
    std::vector<ScoredPrediction> predictions;  ///< descending confidence, stable
};

/// Per-class matches for both box and mask IoU over a whole dataset.
struct Evaluation {
    int num_classes = 0;
    std::size_t num_images = 0;
    std::vector<ClassRecords> box;
    std::vector<ClassRecords> mask;

    const std::vector<ClassRecords>& of(MatchKind kind) const { return kind == MatchKind::Box ? box : mask; }
};

/// Per-image matching may run on `jobs` threads; the reduction is in
/// image order so the result does not depend on it.
Evaluation evaluate(const std::vector<EvalImage>& images, int num_classes, unsigned jobs = 1);

struct MetricValues {
    double precision = 0.0;
    double recall = 0.0;
    double map50 = 0.0;
    double map50_95 = 0.0;
};

struct ReportRow {
    std::string name;
    std::size_t images = 0;
    std::size_t instances = 0;
    MetricValues box;
    MetricValues mask;
};

/// rows[0] is "all", then one row per class in index order.
struct MetricsReport {
    std::vector<ReportRow> rows;
    double box_confidence = 0.0;   ///< F1-maximizing threshold used for Box P/R
    double mask_confidence = 0.0;  ///< same for Mask P/R
};

/**
 * mAP50 = AP at IoU 0.5, mAP50-95 = mean AP over the ten thresholds. P and
 * R are read at the confidence maximizing the mean-F1 curve (first
 * maximum), with precision 0 when nothing is retained. "all" is the
 * unweighted mean over classes that have ground truth. A dataset without
 * images yields no rows.
 */
MetricsReport map_summary(const Evaluation& eval, const std::vector<std::string>& class_names);

enum class CurveKind { F1Confidence, PrecisionConfidence, RecallConfidence, PrecisionRecall };

struct CurveSample {
    double x = 0.0;
    double y = 0.0;
};

struct Series {
    std::string name;  ///< class name or "all"
    std::vector<CurveSample> samples;
};

struct CurveSeries {
    CurveKind kind = CurveKind::F1Confidence;
    std::vector<Series> series;  ///< classes in index order, then "all"
};

std::string curve_name(CurveKind kind);

/**
 * Sweep of kCurvePoints confidence thresholds (retain conf >= t) at IoU
 * 0.5. Precision is 1 when nothing is retained, recall is 0 for a class
 * without ground truth, F1 = 2PR / (P + R) or 0. "all" averages the
 * classes with ground truth. The precision-recall series takes the sweep
 * points, keeps the highest precision per distinct recall and orders them
 * by recall. Without images every curve is empty.
 */
std::vector<CurveSeries> confidence_curves(const Evaluation& eval, MatchKind kind,
                                           const std::vector<std::string>& class_names);

/// Rows are true classes, columns predicted classes, the last row and
/// column are background.
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    double conf_threshold = 0.0;
    double iou_threshold = 0.0;
};

/// Class-agnostic greedy matching per image on the retained predictions.
/// No images gives an empty (0 x 0) matrix.
ConfusionMatrix confusion_matrix(const std::vector<EvalImage>& images, int num_classes, double conf_threshold,
                                 double iou_threshold, MatchKind kind = MatchKind::Box);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_METRICS_HPP_
