#ifndef XRAYSEGKIT_SEGMENT_HPP_
#define XRAYSEGKIT_SEGMENT_HPP_

#include <xraysegkit/image.hpp>

#include <array>
#include <cstdint>

namespace xraysegkit {

/// Foreground iff intensity > t.
BinaryMask threshold_fixed(const GrayImage& img, int t);

struct OtsuResult {
    int threshold = 0;
    BinaryMask mask;
};

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const GrayImage& img);

/// Threshold maximizing w0 * w1 * (mu0 - mu1)^2 where class 0 is
/// intensities <= t. The lowest maximizer wins.
int otsu_threshold(const Histogram& hist);

/// Throws InvalidArgument("degenerate histogram") on a constant image.
OtsuResult threshold_otsu(const GrayImage& img);

struct Seed {
    int x = 0;
    int y = 0;
};

enum class GrowMode { SeedReference, RunningMean };
enum class Connectivity { Four = 4, Eight = 8 };

/**
 * Breadth-first region growing from `seed`.
 *
 * SeedReference admits a neighbour p iff |I(p) - I(seed)| <= tau, which
 * yields the connected component of the tolerance band around the seed.
 *
 * RunningMean follows the FIFO order strictly: when a pixel is dequeued
 * its neighbours (in a fixed order) are tested against the exact mean of
 * the region at that moment and admitted pixels update the mean
 * immediately. A rejected pixel can still be admitted later through
 * another neighbour. The test is done in integer arithmetic:
 * |I(p) * n - sum| <= tau * n.
 */
BinaryMask region_grow(const GrayImage& img, Seed seed, int tau, GrowMode mode = GrowMode::SeedReference,
                       Connectivity connectivity = Connectivity::Four);

enum class MorphOp { Erode, Dilate, Open, Close };

/// Square structuring element of odd side >= 3. Pixels outside the image
/// count as background, so erosion eats the image border.
BinaryMask morph(const BinaryMask& mask, MorphOp op, int size = 3);
BinaryMask erode(const BinaryMask& mask, int size);
BinaryMask dilate(const BinaryMask& mask, int size);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_SEGMENT_HPP_
