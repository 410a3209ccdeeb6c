#ifndef XRAYSEGKIT_RASTER_HPP_
#define XRAYSEGKIT_RASTER_HPP_

#include <xraysegkit/labels.hpp>

#include <vector>

namespace xraysegkit {

/// Even-odd scanline fill sampled at pixel centres (i + 0.5, j + 0.5).
/// Vertices are in pixel units.
BinaryMask rasterize_pixel_polygon(const Polygon& poly, int width, int height);

Polygon denormalize(const Polygon& normalized, int width, int height);

/// The even-odd raster restricted to the polygon's clipped pixel bounding
/// box. Pixels match rasterize_pixel_polygon exactly.
struct MaskPatch {
    int x0 = 0;
    int y0 = 0;
    BinaryMask mask;
    Eigen::Index count = 0;
};

MaskPatch rasterize_patch(const Polygon& poly, int width, int height);
MaskPatch rasterize_patch_normalized(const Polygon& normalized, int width, int height);

/// Mask IoU of two patches of the same image; 0 when both are empty.
double iou_patch(const MaskPatch& a, const MaskPatch& b);

/// Same fill for a normalized polygon: vertices are scaled by (width, height).
BinaryMask rasterize_polygon(const Polygon& normalized, int width, int height);
BinaryMask rasterize_polygon(const PolygonAnnotation& annotation, int width, int height);

/// Union of the rasterized annotations of one class.
BinaryMask rasterize_class(const std::vector<PolygonAnnotation>& annotations, int class_id, int width, int height);

/// Labels of the 8-connected components, numbered from 1 in order of the
/// first pixel met in a row-major scan. Zero is background.
Image<int> label_components(const BinaryMask& mask, int& count);

/**
 * Outer boundary of every 8-connected component with at least `min_area`
 * pixels, in discovery order. The polygon follows pixel edges (its
 * vertices are pixel corners) so re-rasterizing it at pixel centres gives
 * back the component with its holes filled. Vertices run counter-clockwise
 * as seen on screen; collinear corners are dropped.
 */
std::vector<Polygon> trace_pixel_polygons(const BinaryMask& mask, int min_area = 1);

/// trace_pixel_polygons normalized by the mask dimensions.
std::vector<Polygon> mask_to_polygons(const BinaryMask& mask, int min_area = 1);

/// Signed shoelace area in the given coordinates (negative for counter-clockwise
/// on screen, where y points down).
double signed_area(const Polygon& poly);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_RASTER_HPP_
