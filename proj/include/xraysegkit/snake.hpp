#ifndef XRAYSEGKIT_SNAKE_HPP_
#define XRAYSEGKIT_SNAKE_HPP_

#include <xraysegkit/gradient.hpp>

#include <vector>

namespace xraysegkit {

using Point2d = Eigen::Vector2d;

struct Contour {
    std::vector<Point2d> points;  ///< (x, y) in pixel coordinates
    bool closed = true;
};

struct SnakeParams {
    double alpha = 0.05;      ///< elasticity
    double beta = 0.1;        ///< rigidity
    double gamma_ext = 1.0;   ///< weight of the squared gradient magnitude
    int search_radius = 1;    ///< window half-size in pixels
    int max_iters = 500;
    double move_epsilon = 0.01;  ///< stop when fewer than this fraction of points move
};

struct SnakeResult {
    Contour contour;
    int iterations = 0;
    std::vector<double> energy;  ///< energy[0] initial, energy[k] after iteration k
};

/// Regular polygon approximating a circle, counter-clockwise on screen.
Contour circle_contour(double cx, double cy, double radius, int num_points);

/// Squared gradient magnitude, the edge strength the snake is drawn to.
FloatImage edge_strength(const GradientField& field);

/**
 * Total snake energy:
 *   sum_i alpha |p_i - p_{i-1}|^2 + beta |p_{i-1} - 2 p_i + p_{i+1}|^2
 *         - gamma_ext * strength(p_i)
 * with strength sampled at the nearest pixel.
 */
double snake_energy(const FloatImage& strength, const Contour& contour, const SnakeParams& params);

/**
 * Greedy active contour. Each iteration visits the points in order and
 * moves each one to the position of its (2r+1)^2 integer-offset window
 * that minimizes the total energy, i.e. every term that depends on that
 * point. Ties keep the point in place, then prefer the first offset in
 * row-major order. The total energy therefore never increases.
 */
SnakeResult snake_evolve(const GradientField& field, const Contour& init, const SnakeParams& params);

void validate(const SnakeParams& params);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_SNAKE_HPP_
