/*
 * entropy_net.hpp
 *
 * Gaussian kernel density estimation, pairwise transfer entropy and the
 * quantile-thresholded directed networks built from it.
 *
 * Transfer entropy from x to y with history length k is estimated as the
 * sample mean over t of
 *
 *     log [ p(y_{t+1} | y_t^(k), x_t^(k)) / p(y_{t+1} | y_t^(k)) ]
 *
 * with each conditional written as a ratio of joint densities estimated by
 * product Gaussian kernels. The kernel normalising constants cancel in that
 * ratio, so only the unnormalised kernel sums are formed.
 */
#pragma once

#include "sysrisk/market_data.hpp"
#include "sysrisk/wavelet.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sysrisk::entropy {

enum class BandwidthMode { cross_validation, silverman, fixed };

struct KdeParams {
    BandwidthMode mode = BandwidthMode::silverman;
    double fixed_h = 0.1;
    /// Absolute bandwidths searched in cross_validation mode.
    std::vector<double> cv_grid;

    void validate() const;
};

inline constexpr double kBandwidthFloor = 1e-6;

/// (1 / (n h)) * sum_k phi((x - x_k) / h) with the standard normal phi.
double kde_density(std::span<const double> samples, double x, double h);

struct Bandwidth {
    double h = kBandwidthFloor;
    bool floored = false;  ///< samples had zero spread
};

/// Least-squares cross-validation criterion
///   int f_h^2 - (2/n) sum_i f_{h,-i}(x_i)
/// evaluated in closed form for the Gaussian kernel.
double lscv_score(std::span<const double> samples, double h);

Bandwidth select_bandwidth(std::span<const double> samples, const KdeParams& params);

/// Log-spaced grid of `count` bandwidths spanning [lo, hi] times the
/// Silverman bandwidth of `samples`.
std::vector<double> relative_cv_grid(std::span<const double> samples, std::size_t count = 25, double lo = 0.2,
                                     double hi = 3.0);

enum class TeEstimator { kde, binned };

struct TeParams {
    KdeParams kde;
    std::size_t history_length = 1;
    double quantile = 0.85;
    /// Shuffle surrogates per pair; 0 disables significance filtering.
    std::size_t n_surrogates = 0;
    double surrogate_alpha = 0.05;
    std::uint64_t surrogate_seed = 0;
    TeEstimator estimator = TeEstimator::kde;
    /// Equal-width bins per variable for the binned estimator.
    std::size_t n_bins = 8;

    void validate() const;
};

struct TeEstimate {
    double value = 0.0;  ///< clamped at zero
    double raw = 0.0;    ///< plug-in value before clamping
    bool clamped = false;
    bool degenerate = false;  ///< source or target had zero spread
};

TeEstimate transfer_entropy(std::span<const double> source, std::span<const double> target,
                            const TeParams& params);

struct TeMatrix {
    Eigen::MatrixXd te;  ///< te(i, j) = TE from asset i to asset j
    std::size_t clamp_events = 0;
    std::size_t degenerate_pairs = 0;
    std::size_t rejected_by_surrogates = 0;
};

/// Columns of `series` (T x N) are the asset signals.
TeMatrix te_matrix(const Eigen::MatrixXd& series, const TeParams& params);
TeMatrix te_matrix(const wavelet::ScaleDecomposition& decomposition, std::size_t scale_index,
                   const TeParams& params);
TeMatrix te_matrix(const market::ReturnPanel& panel, const TeParams& params);

struct NetworkStats {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    double density = 0.0;
    double transitivity = 0.0;
    /// 2 * edges / nodes (in- plus out-degree per node).
    double avg_degree = 0.0;
};

using Adjacency = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct TENetwork {
    double scale = 0.0;
    Eigen::MatrixXd te;
    Adjacency adjacency;
    double threshold = 0.0;
    NetworkStats stats;
};

/// Linear-interpolation (type 7) sample quantile.
double quantile_type7(std::vector<double> values, double q);

/// Edge i->j iff te(i, j) exceeds the q-quantile of the strictly positive
/// off-diagonal entries.
TENetwork threshold_adjacency(const Eigen::MatrixXd& te, double quantile, double scale = 0.0);

NetworkStats network_stats(const Adjacency& adjacency);

/// Column names used for the network statistics table.
const std::vector<std::string>& network_stats_columns();

void write_edge_list(const std::filesystem::path& path, const TENetwork& network,
                     const std::vector<std::string>& symbols);

}  // namespace sysrisk::entropy
