#include <xraysegkit/raster.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace xraysegkit {

namespace {

// Fills the part of the even-odd raster that falls in the window
// [x0, x0 + out.cols()) x [y0, y0 + out.rows()).
void fill_window(const Polygon& poly, int x0, int y0, BinaryMask& out)
{
    out.setConstant(false);
    const std::size_t n = poly.size();
    if (n < 3) {
        return;
    }
    const int x_end = x0 + static_cast<int>(out.cols());
    std::vector<double> xs;
    for (int j = y0; j < y0 + out.rows(); ++j) {
        const double yc = j + 0.5;
        xs.clear();
        for (std::size_t e = 0; e < n; ++e) {
            // Canonical endpoint order keeps the crossing bit-identical under
            // reversal and rotation of the vertex list.
            Vertex a = poly[e];
            Vertex b = poly[(e + 1) % n];
            if (b.y() < a.y() || (b.y() == a.y() && b.x() < a.x())) {
                std::swap(a, b);
            }
            if (!(a.y() <= yc && yc < b.y())) {
                continue;
            }
            xs.push_back(a.x() + (yc - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            // Pixel i is inside iff xs[k] <= i + 0.5 < xs[k + 1].
            const int first = std::max(x0, static_cast<int>(std::ceil(xs[k] - 0.5)));
            const int last = std::min(x_end, static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
            for (int i = first; i < last; ++i) {
                out(j - y0, i - x0) = true;
            }
        }
    }
}

}  // namespace

BinaryMask rasterize_pixel_polygon(const Polygon& poly, int width, int height)
{
    if (width < 1 || height < 1) {
        throw InvalidArgument("rasterize: dimensions must be positive");
    }
    BinaryMask mask(height, width);
    fill_window(poly, 0, 0, mask);
    return mask;
}

MaskPatch rasterize_patch(const Polygon& poly, int width, int height)
{
    MaskPatch patch;
    if (poly.size() < 3) {
        return patch;
    }
    const BoundingBox b = polygon_bbox(poly);
    const auto clip = [](double v, int hi) { return std::clamp(static_cast<int>(v), 0, hi); };
    const int x0 = clip(std::floor(b.x_min), width);
    const int y0 = clip(std::floor(b.y_min), height);
    const int x1 = clip(std::ceil(b.x_max), width);
    const int y1 = clip(std::ceil(b.y_max), height);
    patch.x0 = x0;
    patch.y0 = y0;
    patch.mask.resize(y1 - y0, x1 - x0);
    fill_window(poly, x0, y0, patch.mask);
    patch.count = patch.mask.count();
    return patch;
}

MaskPatch rasterize_patch_normalized(const Polygon& normalized, int width, int height)
{
    return rasterize_patch(denormalize(normalized, width, height), width, height);
}

Polygon denormalize(const Polygon& normalized, int width, int height)
{
    Polygon px;
    px.reserve(normalized.size());
    for (const auto& v : normalized) {
        px.emplace_back(v.x() * width, v.y() * height);
    }
    return px;
}

double iou_patch(const MaskPatch& a, const MaskPatch& b)
{
    const Eigen::Index uni_base = a.count + b.count;
    if (uni_base == 0) {
        return 0.0;
    }
    const int x0 = std::max(a.x0, b.x0);
    const int y0 = std::max(a.y0, b.y0);
    const int x1 = std::min(a.x0 + static_cast<int>(a.mask.cols()), b.x0 + static_cast<int>(b.mask.cols()));
    const int y1 = std::min(a.y0 + static_cast<int>(a.mask.rows()), b.y0 + static_cast<int>(b.mask.rows()));
    Eigen::Index inter = 0;
    if (x1 > x0 && y1 > y0) {
        inter = (a.mask.block(y0 - a.y0, x0 - a.x0, y1 - y0, x1 - x0) &&
                 b.mask.block(y0 - b.y0, x0 - b.x0, y1 - y0, x1 - x0))
                    .count();
    }
    return static_cast<double>(inter) / static_cast<double>(uni_base - inter);
}

BinaryMask rasterize_polygon(const Polygon& normalized, int width, int height)
{
    return rasterize_pixel_polygon(denormalize(normalized, width, height), width, height);
}

BinaryMask rasterize_polygon(const PolygonAnnotation& annotation, int width, int height)
{
    return rasterize_polygon(annotation.vertices, width, height);
}

BinaryMask rasterize_class(const std::vector<PolygonAnnotation>& annotations, int class_id, int width, int height)
{
    BinaryMask out = BinaryMask::Constant(height, width, false);
    for (const auto& a : annotations) {
        if (a.class_id == class_id) {
            out = out || rasterize_polygon(a, width, height);
        }
    }
    return out;
}

Image<int> label_components(const BinaryMask& mask, int& count)
{
    const int h = height(mask);
    const int w = width(mask);
    Image<int> labels = Image<int>::Zero(h, w);
    count = 0;
    std::vector<std::array<int, 2>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask(y, x) || labels(y, x) != 0) {
                continue;
            }
            const int id = ++count;
            labels(y, x) = id;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const auto [px, py] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int qx = px + dx;
                        const int qy = py + dy;
                        if (in_bounds(mask, qx, qy) && mask(qy, qx) && labels(qy, qx) == 0) {
                            labels(qy, qx) = id;
                            stack.push_back({qx, qy});
                        }
                    }
                }
            }
        }
    }
    return labels;
}

namespace {

struct Step {
    int dx;
    int dy;
    bool operator==(const Step&) const = default;
};

Step turn_left(Step d) { return {d.dy, -d.dx}; }
Step turn_right(Step d) { return {-d.dy, d.dx}; }

// Follows the pixel-edge boundary with the component on the left. At a
// corner shared by two diagonal pixels both stay inside (8-connectivity).
Polygon trace_outer(const Image<int>& labels, int id, int x0, int y0)
{
    const auto inside = [&](int x, int y) { return in_bounds(labels, x, y) && labels(y, x) == id; };
    // Pixel occupying the quadrant (a, b) around corner (vx, vy).
    const auto quadrant = [&](int vx, int vy, int a, int b) {
        return inside(vx + (a < 0 ? -1 : 0), vy + (b < 0 ? -1 : 0));
    };

    const Step start_dir{-1, 0};
    const int sx = x0 + 1;
    const int sy = y0;
    Polygon corners;
    Step d = start_dir;
    int vx = sx + d.dx;
    int vy = sy + d.dy;
    for (;;) {
        const Step l = turn_left(d);
        const Step r = turn_right(d);
        Step next;
        if (quadrant(vx, vy, d.dx + r.dx, d.dy + r.dy)) {
            next = r;
        } else if (quadrant(vx, vy, d.dx + l.dx, d.dy + l.dy)) {
            next = d;
        } else {
            next = l;
        }
        const bool corner = !(next == d);
        if (vx == sx && vy == sy && next == start_dir) {
            if (corner) {
                corners.emplace_back(vx, vy);
            }
            break;
        }
        if (corner) {
            corners.emplace_back(vx, vy);
        }
        d = next;
        vx += d.dx;
        vy += d.dy;
    }
    return corners;
}

}  // namespace

std::vector<Polygon> trace_pixel_polygons(const BinaryMask& mask, int min_area)
{
    int count = 0;
    const Image<int> labels = label_components(mask, count);
    std::vector<int> area(static_cast<std::size_t>(count) + 1, 0);
    std::vector<std::array<int, 2>> first(static_cast<std::size_t>(count) + 1, {-1, -1});
    for (int y = 0; y < labels.rows(); ++y) {
        for (int x = 0; x < labels.cols(); ++x) {
            const int id = labels(y, x);
            if (id == 0) {
                continue;
            }
            if (area[id]++ == 0) {
                first[id] = {x, y};
            }
        }
    }
    std::vector<Polygon> out;
    for (int id = 1; id <= count; ++id) {
        if (area[id] >= min_area) {
            out.push_back(trace_outer(labels, id, first[id][0], first[id][1]));
        }
    }
    return out;
}

std::vector<Polygon> mask_to_polygons(const BinaryMask& mask, int min_area)
{
    auto polys = trace_pixel_polygons(mask, min_area);
    const double w = static_cast<double>(mask.cols());
    const double h = static_cast<double>(mask.rows());
    for (auto& poly : polys) {
        for (auto& v : poly) {
            v = Vertex(v.x() / w, v.y() / h);
        }
    }
    return polys;
}

double signed_area(const Polygon& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vertex& a = poly[i];
        const Vertex& b = poly[(i + 1) % poly.size()];
        s += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * s;
}

}  // namespace xraysegkit
