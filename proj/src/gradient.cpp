#include <xraysegkit/gradient.hpp>

#include <array>
#include <numbers>
#include <vector>

namespace xraysegkit {

std::pair<Kernel, Kernel> gradient_kernels(GradientKind kind)
{
    switch (kind) {
    case GradientKind::Sobel: {
        Kernel gx(3, 3), gy(3, 3);
        gx << -1, 0, 1, -2, 0, 2, -1, 0, 1;
        gy << -1, -2, -1, 0, 0, 0, 1, 2, 1;
        return {gx, gy};
    }
    case GradientKind::Prewitt: {
        Kernel gx(3, 3), gy(3, 3);
        gx << -1, 0, 1, -1, 0, 1, -1, 0, 1;
        gy << -1, -1, -1, 0, 0, 0, 1, 1, 1;
        return {gx, gy};
    }
    case GradientKind::Roberts: {
        Kernel gx(2, 2), gy(2, 2);
        gx << 1, 0, 0, -1;
        gy << 0, 1, -1, 0;
        return {gx, gy};
    }
    }
    throw InvalidArgument("unknown gradient operator");
}

int quantize_direction(double gx, double gy)
{
    double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
    if (deg < 0.0) {
        deg += 180.0;
    }
    if (deg >= 180.0) {
        deg -= 180.0;
    }
    if (deg < 22.5 || deg >= 157.5) {
        return 0;
    }
    if (deg < 67.5) {
        return 1;
    }
    if (deg < 112.5) {
        return 2;
    }
    return 3;
}

CannyStages canny_stages(const GrayImage& img, const CannyParams& params)
{
    if (!(params.t_low >= 0.0) || !(params.t_high >= params.t_low)) {
        throw InvalidArgument("canny: thresholds must satisfy 0 <= t_low <= t_high");
    }
    const FloatImage smoothed = gaussian_blur(img, params.sigma);
    CannyStages stages;
    stages.gradient = gradient_operator(smoothed, GradientKind::Sobel);
    const FloatImage& mag = stages.gradient.magnitude;
    const int h = height(img);
    const int w = width(img);

    static constexpr std::array<std::array<int, 2>, 4> kStep{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}}};
    stages.suppressed = BinaryMask::Constant(h, w, false);
    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            const double m = mag(y, x);
            if (m <= 0.0) {
                continue;
            }
            const auto [dx, dy] = kStep[quantize_direction(stages.gradient.gx(y, x), stages.gradient.gy(y, x))];
            const double forward = mag(y + dy, x + dx);
            const double backward = mag(y - dy, x - dx);
            stages.suppressed(y, x) = m >= forward && m > backward;
        }
    }

    stages.edges = BinaryMask::Constant(h, w, false);
    std::vector<std::array<int, 2>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (stages.suppressed(y, x) && mag(y, x) >= params.t_high && !stages.edges(y, x)) {
                stages.edges(y, x) = true;
                stack.push_back({x, y});
            }
        }
    }
    while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = px + dx;
                const int y = py + dy;
                if (!in_bounds(img, x, y) || stages.edges(y, x) || !stages.suppressed(y, x)) {
                    continue;
                }
                if (mag(y, x) >= params.t_low) {
                    stages.edges(y, x) = true;
                    stack.push_back({x, y});
                }
            }
        }
    }
    return stages;
}

BinaryMask canny(const GrayImage& img, const CannyParams& params)
{
    return canny_stages(img, params).edges;
}

}  // namespace xraysegkit
