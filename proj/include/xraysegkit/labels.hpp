#ifndef XRAYSEGKIT_LABELS_HPP_
#define XRAYSEGKIT_LABELS_HPP_

#include <xraysegkit/image.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xraysegkit {

using Vertex = Eigen::Vector2d;
using Polygon = std::vector<Vertex>;

/// One instance of a YOLO segmentation label: class index and a
/// normalized polygon with at least three vertices.
struct PolygonAnnotation {
    int class_id = 0;
    Polygon vertices;
};

struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double area() const { return std::max(0.0, x_max - x_min) * std::max(0.0, y_max - y_min); }
};

/// A model prediction. Box-only predictions have no polygon.
struct Detection {
    int class_id = 0;
    double confidence = 0.0;
    BoundingBox box;
    std::optional<Polygon> mask_polygon;
};

/// Parse failure carrying the 1-based line it happened on.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + ", line " + std::to_string(line)), line_(line)
    {
    }
    int line() const { return line_; }

  private:
    int line_;
};

/// `class_id x1 y1 x2 y2 ...` per non-empty line.
std::vector<PolygonAnnotation> parse_label_file(std::string_view text, int num_classes);

/// One line per annotation, coordinates with six decimals, each line
/// terminated by '\n'.
std::string serialize_label_file(const std::vector<PolygonAnnotation>& annotations);

/// `class_id conf x1 y1 ...` for polygons, `class_id conf x0 y0 x1 y1 #box`
/// for box-only predictions.
std::vector<Detection> parse_prediction_file(std::string_view text, int num_classes);
std::string serialize_prediction_file(const std::vector<Detection>& detections);

BoundingBox polygon_bbox(const Polygon& poly);

/// Throws InvalidArgument naming the first violated invariant.
void validate_annotation(const PolygonAnnotation& annotation, int num_classes);

/// Detection with box = bbox of the polygon.
Detection detection_from_polygon(int class_id, double confidence, Polygon polygon);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_LABELS_HPP_
