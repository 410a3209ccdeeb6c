#include <xraysegkit/snake.hpp>

#include <numbers>

namespace xraysegkit {

namespace {

double sample(const FloatImage& strength, const Point2d& p)
{
    const int x = std::clamp(static_cast<int>(round_half_away(p.x())), 0, width(strength) - 1);
    const int y = std::clamp(static_cast<int>(round_half_away(p.y())), 0, height(strength) - 1);
    return strength(y, x);
}

bool inside(const FloatImage& strength, const Point2d& p)
{
    return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= width(strength) - 1 && p.y() <= height(strength) - 1;
}

}  // namespace

Contour circle_contour(double cx, double cy, double radius, int num_points)
{
    Contour c;
    c.points.reserve(static_cast<std::size_t>(num_points));
    for (int i = 0; i < num_points; ++i) {
        // Decreasing screen angle is counter-clockwise with y pointing down.
        const double a = -2.0 * std::numbers::pi * i / num_points;
        c.points.emplace_back(cx + radius * std::cos(a), cy + radius * std::sin(a));
    }
    return c;
}

FloatImage edge_strength(const GradientField& field)
{
    return field.magnitude.square();
}

void validate(const SnakeParams& params)
{
    if (params.alpha < 0.0 || params.beta < 0.0 || params.gamma_ext < 0.0) {
        throw InvalidArgument("snake: weights must be non-negative");
    }
    if (params.alpha == 0.0 && params.beta == 0.0 && params.gamma_ext == 0.0) {
        throw InvalidArgument("snake: at least one of alpha, beta, gamma_ext must be positive");
    }
    if (params.search_radius < 1) {
        throw InvalidArgument("snake: search radius must be >= 1");
    }
    if (params.max_iters < 1) {
        throw InvalidArgument("snake: max_iters must be >= 1");
    }
    if (!(params.move_epsilon >= 0.0 && params.move_epsilon <= 1.0)) {
        throw InvalidArgument("snake: move_epsilon must be in [0, 1]");
    }
}

double snake_energy(const FloatImage& strength, const Contour& contour, const SnakeParams& params)
{
    const auto& p = contour.points;
    const std::size_t n = p.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2d& prev = p[(i + n - 1) % n];
        const Point2d& next = p[(i + 1) % n];
        e += params.alpha * (p[i] - prev).squaredNorm();
        e += params.beta * (prev - 2.0 * p[i] + next).squaredNorm();
        e -= params.gamma_ext * sample(strength, p[i]);
    }
    return e;
}

SnakeResult snake_evolve(const GradientField& field, const Contour& init, const SnakeParams& params)
{
    validate(params);
    if (field.magnitude.size() == 0) {
        throw InvalidArgument("snake: empty gradient field");
    }
    if (!init.closed) {
        throw InvalidArgument("snake: contour must be closed");
    }
    if (init.points.size() < 3) {
        throw InvalidArgument("snake: contour needs at least 3 points");
    }
    const FloatImage strength = edge_strength(field);
    for (const auto& q : init.points) {
        if (!inside(strength, q)) {
            throw InvalidArgument("snake: contour point outside the image");
        }
    }

    SnakeResult result;
    result.contour = init;
    auto& p = result.contour.points;
    const std::size_t n = p.size();
    const auto at = [&](std::size_t i, std::ptrdiff_t off) -> const Point2d& {
        return p[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i + n) + off) % n];
    };

    // All terms of the total energy that involve point i placed at q.
    const auto local_energy = [&](std::size_t i, const Point2d& q) {
        const Point2d& prev2 = at(i, -2);
        const Point2d& prev = at(i, -1);
        const Point2d& next = at(i, 1);
        const Point2d& next2 = at(i, 2);
        double e = params.alpha * ((q - prev).squaredNorm() + (next - q).squaredNorm());
        e += params.beta * ((prev2 - 2.0 * prev + q).squaredNorm() + (prev - 2.0 * q + next).squaredNorm() +
                            (q - 2.0 * next + next2).squaredNorm());
        e -= params.gamma_ext * sample(strength, q);
        return e;
    };

    const int r = params.search_radius;
    result.energy.push_back(snake_energy(strength, result.contour, params));
    while (result.iterations < params.max_iters) {
        std::size_t moved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2d current = p[i];
            double best = local_energy(i, current);
            Point2d best_pos = current;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (dx == 0 && dy == 0) {
                        continue;
                    }
                    const Point2d q = current + Point2d(dx, dy);
                    if (!inside(strength, q)) {
                        continue;
                    }
                    const double e = local_energy(i, q);
                    if (e < best) {
                        best = e;
                        best_pos = q;
                    }
                }
            }
            if (best_pos != current) {
                p[i] = best_pos;
                ++moved;
            }
        }
        ++result.iterations;
        result.energy.push_back(snake_energy(strength, result.contour, params));
        if (static_cast<double>(moved) < params.move_epsilon * static_cast<double>(n) || moved == 0) {
            break;
        }
    }
    return result;
}

}  // namespace xraysegkit
