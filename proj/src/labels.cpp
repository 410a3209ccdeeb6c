#include <xraysegkit/labels.hpp>

#include <fmt/format.h>

#include <charconv>
#include <cmath>

namespace xraysegkit {

namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        if (pos > start) {
            tokens.push_back(line.substr(start, pos - start));
        }
    }
    return tokens;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn fn)
{
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        ++line_no;
        const auto tokens = split_ws(text.substr(pos, end - pos));
        if (!tokens.empty()) {
            fn(tokens, line_no);
        }
        if (end == text.size()) {
            break;
        }
        pos = end + 1;
    }
}

int parse_class(std::string_view token, int num_classes, int line)
{
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("non-numeric class id '" + std::string(token) + "'", line);
    }
    if (value < 0) {
        throw ParseError("negative class id", line);
    }
    if (value >= num_classes) {
        throw ParseError(fmt::format("class id {} out of range (num classes {})", value, num_classes), line);
    }
    return value;
}

double parse_real(std::string_view token, int line)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw ParseError("non-numeric token '" + std::string(token) + "'", line);
    }
    return value;
}

double parse_unit(std::string_view token, int line, const char* what)
{
    const double v = parse_real(token, line);
    if (v < 0.0 || v > 1.0) {
        throw ParseError(fmt::format("{} {} outside [0,1]", what, token), line);
    }
    return v;
}

Polygon parse_vertices(const std::vector<std::string_view>& tokens, std::size_t first, int line)
{
    const std::size_t count = tokens.size() - first;
    if (count % 2 != 0 || count < 6) {
        throw ParseError("odd/insufficient coordinates", line);
    }
    Polygon poly;
    poly.reserve(count / 2);
    for (std::size_t i = first; i < tokens.size(); i += 2) {
        poly.emplace_back(parse_unit(tokens[i], line, "coordinate"), parse_unit(tokens[i + 1], line, "coordinate"));
    }
    return poly;
}

void append_coords(std::string& out, const Polygon& poly)
{
    for (const auto& v : poly) {
        out += fmt::format(" {:.6f} {:.6f}", v.x(), v.y());
    }
}

}  // namespace

std::vector<PolygonAnnotation> parse_label_file(std::string_view text, int num_classes)
{
    std::vector<PolygonAnnotation> out;
    for_each_line(text, [&](const std::vector<std::string_view>& tokens, int line) {
        PolygonAnnotation a;
        a.class_id = parse_class(tokens[0], num_classes, line);
        a.vertices = parse_vertices(tokens, 1, line);
        out.push_back(std::move(a));
    });
    return out;
}

std::string serialize_label_file(const std::vector<PolygonAnnotation>& annotations)
{
    std::string out;
    for (const auto& a : annotations) {
        out += std::to_string(a.class_id);
        append_coords(out, a.vertices);
        out += '\n';
    }
    return out;
}

std::vector<Detection> parse_prediction_file(std::string_view text, int num_classes)
{
    std::vector<Detection> out;
    for_each_line(text, [&](std::vector<std::string_view> tokens, int line) {
        const bool box_only = tokens.back() == "#box";
        if (box_only) {
            tokens.pop_back();
        }
        if (tokens.size() < 2) {
            throw ParseError("missing confidence", line);
        }
        const int cls = parse_class(tokens[0], num_classes, line);
        const double conf = parse_unit(tokens[1], line, "confidence");
        if (box_only) {
            if (tokens.size() != 6) {
                throw ParseError("box prediction needs exactly 4 coordinates", line);
            }
            Detection d;
            d.class_id = cls;
            d.confidence = conf;
            d.box = {parse_unit(tokens[2], line, "coordinate"), parse_unit(tokens[3], line, "coordinate"),
                     parse_unit(tokens[4], line, "coordinate"), parse_unit(tokens[5], line, "coordinate")};
            if (d.box.x_min > d.box.x_max || d.box.y_min > d.box.y_max) {
                throw ParseError("box min exceeds max", line);
            }
            out.push_back(d);
        } else {
            out.push_back(detection_from_polygon(cls, conf, parse_vertices(tokens, 2, line)));
        }
    });
    return out;
}

std::string serialize_prediction_file(const std::vector<Detection>& detections)
{
    std::string out;
    for (const auto& d : detections) {
        out += fmt::format("{} {:.6f}", d.class_id, d.confidence);
        if (d.mask_polygon) {
            append_coords(out, *d.mask_polygon);
        } else {
            out += fmt::format(" {:.6f} {:.6f} {:.6f} {:.6f} #box", d.box.x_min, d.box.y_min, d.box.x_max,
                               d.box.y_max);
        }
        out += '\n';
    }
    return out;
}

BoundingBox polygon_bbox(const Polygon& poly)
{
    if (poly.empty()) {
        return {};
    }
    BoundingBox b{poly[0].x(), poly[0].y(), poly[0].x(), poly[0].y()};
    for (const auto& v : poly) {
        b.x_min = std::min(b.x_min, v.x());
        b.y_min = std::min(b.y_min, v.y());
        b.x_max = std::max(b.x_max, v.x());
        b.y_max = std::max(b.y_max, v.y());
    }
    return b;
}

void validate_annotation(const PolygonAnnotation& annotation, int num_classes)
{
    if (annotation.class_id < 0 || annotation.class_id >= num_classes) {
        throw InvalidArgument(fmt::format("class id {} out of range", annotation.class_id));
    }
    if (annotation.vertices.size() < 3) {
        throw InvalidArgument("fewer than 3 vertices");
    }
    for (const auto& v : annotation.vertices) {
        if (!(v.x() >= 0.0 && v.x() <= 1.0 && v.y() >= 0.0 && v.y() <= 1.0)) {
            throw InvalidArgument("vertex outside [0,1]");
        }
    }
}

Detection detection_from_polygon(int class_id, double confidence, Polygon polygon)
{
    Detection d;
    d.class_id = class_id;
    d.confidence = confidence;
    d.box = polygon_bbox(polygon);
    d.mask_polygon = std::move(polygon);
    return d;
}

}  // namespace xraysegkit
