#include "sysrisk/entropy_net.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sysrisk::entropy {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
const double kInvSqrt4Pi = 1.0 / std::sqrt(4.0 * std::numbers::pi);

double sample_sd(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double silverman(std::span<const double> xs)
{
    return 1.06 * sample_sd(xs) * std::pow(static_cast<double>(xs.size()), -0.2);
}

}  // namespace

void KdeParams::validate() const
{
    if (mode == BandwidthMode::fixed) require(std::isfinite(fixed_h) && fixed_h > 0.0, "fixed_h must be positive");
    if (mode == BandwidthMode::cross_validation) {
        require(!cv_grid.empty(), "cv_grid must be nonempty in cross_validation mode");
        for (double h : cv_grid) require(std::isfinite(h) && h > 0.0, "cv_grid entries must be positive");
    }
}

double kde_density(std::span<const double> samples, double x, double h)
{
    require(!samples.empty(), "kde_density: empty sample");
    require(std::isfinite(h) && h > 0.0, "kde_density: bandwidth must be positive");
    double acc = 0.0;
    for (double xk : samples) {
        const double u = (x - xk) / h;
        acc += std::exp(-0.5 * u * u);
    }
    return kInvSqrt2Pi * acc / (static_cast<double>(samples.size()) * h);
}

double lscv_score(std::span<const double> samples, double h)
{
    require(samples.size() >= 2, "lscv_score: need at least 2 samples");
    require(h > 0.0, "lscv_score: bandwidth must be positive");
    const double n = static_cast<double>(samples.size());
    double squared = 0.0;  // sum over all i, j of phi_{sqrt2}
    double loo = 0.0;      // sum over i != j of phi
    for (std::size_t i = 0; i < samples.size(); ++i) {
        squared += kInvSqrt4Pi;
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double u = (samples[i] - samples[j]) / h;
            squared += 2.0 * kInvSqrt4Pi * std::exp(-0.25 * u * u);
            loo += 2.0 * kInvSqrt2Pi * std::exp(-0.5 * u * u);
        }
    }
    return squared / (n * n * h) - 2.0 * loo / (n * (n - 1.0) * h);
}

Bandwidth select_bandwidth(std::span<const double> samples, const KdeParams& params)
{
    params.validate();
    require(!samples.empty(), "select_bandwidth: empty sample");
    if (params.mode == BandwidthMode::cross_validation) {
        require(samples.size() >= 5, "select_bandwidth: cross-validation needs at least 5 samples");
    }
    if (params.mode == BandwidthMode::fixed) return {params.fixed_h, false};
    if (sample_sd(samples) <= 0.0) return {kBandwidthFloor, true};

    if (params.mode == BandwidthMode::silverman) {
        const double h = silverman(samples);
        return h < kBandwidthFloor ? Bandwidth{kBandwidthFloor, true} : Bandwidth{h, false};
    }
    double best_h = params.cv_grid.front();
    double best = std::numeric_limits<double>::infinity();
    for (double h : params.cv_grid) {
        const double score = lscv_score(samples, h);
        if (score < best) {
            best = score;
            best_h = h;
        }
    }
    return {best_h, false};
}

std::vector<double> relative_cv_grid(std::span<const double> samples, std::size_t count, double lo, double hi)
{
    require(count >= 1 && lo > 0.0 && hi >= lo, "relative_cv_grid: invalid range");
    const double base = std::max(silverman(samples), kBandwidthFloor);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = base * lo * std::pow(hi / lo, f);
    }
    return grid;
}

}  // namespace sysrisk::entropy
