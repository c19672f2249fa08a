// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>

namespace oracle {

// Exhaustive search of the 3-asset simplex on a grid of spacing 1/steps.
inline Eigen::Vector3d simplex_grid_argmax(const Eigen::Vector3d& mu, const Eigen::Matrix3d& sigma, double gamma,
                                           double kappa, const Eigen::Vector3d& w_prev, int steps = 1000)
{
    Eigen::Vector3d best_w = w_prev;
    double best = -1e300;
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            const Eigen::Vector3d w(static_cast<double>(i) / steps, static_cast<double>(j) / steps,
                                    static_cast<double>(steps - i - j) / steps);
            const double v = w.dot(mu) - 0.5 * gamma * w.dot(sigma * w) - kappa * (w - w_prev).squaredNorm();
            if (v > best) {
                best = v;
                best_w = w;
            }
        }
    }
    return best_w;
}

struct IiInstance {
    Eigen::Vector3d mu;
    Eigen::Matrix3d sigma;
    double gamma;
    double kappa;
    Eigen::Vector3d w_prev;
};

inline IiInstance random_ii_instance(unsigned seed, double kappa)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    IiInstance in;
    for (int k = 0; k < 3; ++k) in.mu(k) = 0.15 * u(gen);
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = 0.3 * (u(gen) - 0.5);
    in.sigma = a * a.transpose() + 0.01 * Eigen::Matrix3d::Identity();
    in.gamma = 2.0 + 8.0 * u(gen);
    in.kappa = kappa;
    Eigen::Vector3d p(u(gen) + 0.1, u(gen) + 0.1, u(gen) + 0.1);
    in.w_prev = p / p.sum();
    return in;
}

inline double trapezoid(auto&& f, double lo, double hi, std::size_t steps)
{
    const double dx = (hi - lo) / static_cast<double>(steps);
    double acc = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i < steps; ++i) acc += f(lo + dx * static_cast<double>(i));
    return acc * dx;
}

}  // namespace oracle
