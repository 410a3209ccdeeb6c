#include <xraysegkit/segment.hpp>

#include <deque>
#include <vector>

namespace xraysegkit {

BinaryMask threshold_fixed(const GrayImage& img, int t)
{
    return img.cast<int>() > t;
}

Histogram histogram(const GrayImage& img)
{
    Histogram hist{};
    for (Eigen::Index i = 0; i < img.size(); ++i) {
        ++hist[img.data()[i]];
    }
    return hist;
}

int otsu_threshold(const Histogram& hist)
{
    double total = 0.0;
    double total_sum = 0.0;
    int distinct = 0;
    for (int v = 0; v < 256; ++v) {
        total += static_cast<double>(hist[v]);
        total_sum += static_cast<double>(hist[v]) * v;
        distinct += hist[v] > 0 ? 1 : 0;
    }
    if (distinct < 2) {
        throw InvalidArgument("degenerate histogram");
    }
    double n0 = 0.0;
    double s0 = 0.0;
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += static_cast<double>(hist[t]);
        s0 += static_cast<double>(hist[t]) * t;
        const double n1 = total - n0;
        if (n0 == 0.0 || n1 == 0.0) {
            continue;
        }
        const double w0 = n0 / total;
        const double w1 = n1 / total;
        const double mu0 = s0 / n0;
        const double mu1 = (total_sum - s0) / n1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

OtsuResult threshold_otsu(const GrayImage& img)
{
    const int t = otsu_threshold(histogram(img));
    return {t, threshold_fixed(img, t)};
}

namespace {

struct Offset {
    int dx;
    int dy;
};

constexpr std::array<Offset, 4> kFour{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
constexpr std::array<Offset, 8> kEight{{{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

template <typename Admit>
BinaryMask grow(const GrayImage& img, Seed seed, Connectivity connectivity, Admit admit)
{
    const int w = width(img);
    const int h = height(img);
    BinaryMask region = BinaryMask::Constant(h, w, false);
    std::deque<Seed> queue;
    region(seed.y, seed.x) = true;
    queue.push_back(seed);
    const auto visit = [&](const auto& offsets) {
        while (!queue.empty()) {
            const Seed p = queue.front();
            queue.pop_front();
            for (const Offset& o : offsets) {
                const int x = p.x + o.dx;
                const int y = p.y + o.dy;
                if (x < 0 || y < 0 || x >= w || y >= h || region(y, x)) {
                    continue;
                }
                if (admit(img(y, x))) {
                    region(y, x) = true;
                    queue.push_back({x, y});
                }
            }
        }
    };
    if (connectivity == Connectivity::Four) {
        visit(kFour);
    } else {
        visit(kEight);
    }
    return region;
}

}  // namespace

BinaryMask region_grow(const GrayImage& img, Seed seed, int tau, GrowMode mode, Connectivity connectivity)
{
    if (!in_bounds(img, seed.x, seed.y)) {
        throw InvalidArgument("region_grow: seed out of bounds");
    }
    if (tau < 0) {
        throw InvalidArgument("region_grow: tau must be non-negative");
    }
    const std::int64_t reference = img(seed.y, seed.x);
    if (mode == GrowMode::SeedReference) {
        return grow(img, seed, connectivity, [&](std::uint8_t v) {
            const std::int64_t d = static_cast<std::int64_t>(v) - reference;
            return (d < 0 ? -d : d) <= tau;
        });
    }
    std::int64_t sum = reference;
    std::int64_t count = 1;
    return grow(img, seed, connectivity, [&](std::uint8_t v) {
        const std::int64_t d = static_cast<std::int64_t>(v) * count - sum;
        if ((d < 0 ? -d : d) > static_cast<std::int64_t>(tau) * count) {
            return false;
        }
        sum += v;
        ++count;
        return true;
    });
}

namespace {

// One separable pass of a square min (erode) or max (dilate) filter with
// out-of-image samples read as background.
BinaryMask sweep(const BinaryMask& in, int radius, bool horizontal, bool erode_pass)
{
    const int h = height(in);
    const int w = width(in);
    BinaryMask out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool result = erode_pass;
            for (int k = -radius; k <= radius; ++k) {
                const int sx = horizontal ? x + k : x;
                const int sy = horizontal ? y : y + k;
                const bool v = in_bounds(in, sx, sy) && in(sy, sx);
                if (erode_pass && !v) {
                    result = false;
                    break;
                }
                if (!erode_pass && v) {
                    result = true;
                    break;
                }
            }
            out(y, x) = result;
        }
    }
    return out;
}

void check_size(int size)
{
    if (size < 3 || size % 2 == 0) {
        throw InvalidArgument("morph: structuring element must be odd and >= 3");
    }
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int size)
{
    check_size(size);
    return sweep(sweep(mask, size / 2, true, true), size / 2, false, true);
}

BinaryMask dilate(const BinaryMask& mask, int size)
{
    check_size(size);
    return sweep(sweep(mask, size / 2, true, false), size / 2, false, false);
}

BinaryMask morph(const BinaryMask& mask, MorphOp op, int size)
{
    switch (op) {
    case MorphOp::Erode:
        return erode(mask, size);
    case MorphOp::Dilate:
        return dilate(mask, size);
    case MorphOp::Open:
        return dilate(erode(mask, size), size);
    case MorphOp::Close:
        return erode(dilate(mask, size), size);
    }
    throw InvalidArgument("morph: unknown operation");
}

}  // namespace xraysegkit
