/*
 * market_data.hpp
 *
 * Return/price/liquidity panels, the sector-block synthetic generator and the
 * CSV layout used by every command-line stage.
 *
 * All matrices in a ReturnPanel are T x N (periods x assets).
 */
#pragma once

#include "sysrisk/common.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sysrisk::market {

enum class Sector { technology, banking, other };

std::string to_string(Sector sector);
Sector sector_from_string(const std::string& name);

struct AssetMeta {
    std::string symbol;
    Sector sector = Sector::other;

    bool operator==(const AssetMeta&) const = default;
};

inline constexpr double kBasePrice = 100.0;
inline constexpr double kDefaultVolumeMedian = 1.0e6;
inline constexpr double kDefaultVolumeLogSd = 0.5;
inline constexpr double kDefaultSpreadFraction = 0.0005;
inline constexpr double kDefaultDepth = 1.0e4;

struct ReturnPanel {
    Eigen::MatrixXd returns;  ///< simple per-period returns
    Eigen::MatrixXd prices;   ///< strictly positive
    Eigen::MatrixXd volumes;  ///< shares traded per period
    Eigen::MatrixXd spreads;  ///< quoted spread, currency units
    Eigen::MatrixXd depths;   ///< book depth, shares
    std::vector<AssetMeta> assets;
    std::string period_label = "1period";
    /// Which series were filled by default processes rather than observed.
    std::vector<std::string> flags;

    [[nodiscard]] Eigen::Index periods() const { return returns.rows(); }
    [[nodiscard]] Eigen::Index n_assets() const { return returns.cols(); }

    /// Checks shapes, T >= 2, N >= 1, positive prices and unique symbols.
    void validate() const;
    [[nodiscard]] bool has_flag(const std::string& flag) const;
};

/// Fill volumes/spreads/depths with the deterministic defaults used for loaded
/// panels (median volume, 0.05% spread, constant depth).
void fill_default_liquidity(ReturnPanel& panel);

/// Rebuild prices multiplicatively from returns starting at kBasePrice.
Eigen::MatrixXd prices_from_returns(const Eigen::MatrixXd& returns, double base = kBasePrice);

struct SyntheticSpec {
    std::size_t n_assets = 8;
    std::size_t n_periods = 150;
    /// Empty means the default 8-asset universe (5 technology, 3 banking),
    /// repeated cyclically for other sizes.
    std::vector<Sector> sector_map;
    std::vector<std::string> symbols;
    double intra_tech_corr = 0.6;
    double intra_bank_corr = 0.7;
    double cross_corr = 0.4;
    double per_period_vol = 0.017;
    double drift = 0.0;
    std::uint64_t seed = 42;

    void validate() const;
    [[nodiscard]] std::vector<AssetMeta> assets() const;
};

struct TargetCorrelation {
    Eigen::MatrixXd matrix;
    bool projected = false;  ///< true when the raw block matrix was not PSD
};

TargetCorrelation build_target_correlation(const SyntheticSpec& spec);

/// Nearest-PSD correlation by eigenvalue clipping at zero followed by
/// diagonal renormalisation.
Eigen::MatrixXd project_to_correlation(const Eigen::MatrixXd& matrix);

/// Factor F with F * F^T == corr, valid for singular PSD matrices.
Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& corr);

ReturnPanel generate_synthetic(const SyntheticSpec& spec);

/// Pearson correlation of the columns of a T x N matrix. Columns with zero
/// variance yield NaN rows/columns.
Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& series);

enum class CsvLayout { returns, prices };

/// Reads a panel. With CsvLayout::returns, sidecar files written by
/// export_panel_csv (<stem>.prices.csv, .volumes.csv, .spreads.csv,
/// .depths.csv, .assets.csv) are picked up when present.
ReturnPanel load_panel_csv(const std::filesystem::path& path, CsvLayout layout);

/// Writes returns to `path` plus the sidecar series; returns the list of files
/// written (main file first).
std::vector<std::filesystem::path> export_panel_csv(const ReturnPanel& panel,
                                                    const std::filesystem::path& path);

/// Matrix CSV in the panel layout: a header of column names and a leading
/// label column named `index_name` ("t" for time series, "source" for
/// asset-by-asset matrices). Empty `row_labels` means 0-based row numbers.
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                      const Eigen::MatrixXd& values, const std::vector<std::string>& row_labels = {},
                      const std::string& index_name = "t");

/// Reads a numeric CSV; a leading "t" or "source" column is skipped.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* columns = nullptr);

}  // namespace sysrisk::market
