#include "sysrisk/market_data.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sysrisk::market {

namespace {

const std::vector<std::string> kDefaultSymbols = {"AAPL", "GOOGL", "MSFT", "TSLA",
                                                  "AMZN", "JPM",   "BAC",  "GS"};
const std::vector<Sector> kDefaultSectors = {Sector::technology, Sector::technology,
                                             Sector::technology, Sector::technology,
                                             Sector::technology, Sector::banking,
                                             Sector::banking,    Sector::banking};

}  // namespace

std::string to_string(Sector sector)
{
    switch (sector) {
    case Sector::technology: return "technology";
    case Sector::banking: return "banking";
    case Sector::other: return "other";
    }
    return "other";
}

Sector sector_from_string(const std::string& name)
{
    if (name == "technology" || name == "tech") return Sector::technology;
    if (name == "banking" || name == "bank") return Sector::banking;
    if (name == "other") return Sector::other;
    throw ValidationError("unknown sector '" + name + "'");
}

void ReturnPanel::validate() const
{
    const auto t = returns.rows();
    const auto n = returns.cols();
    require(t >= 2, "panel needs at least 2 periods, got " + std::to_string(t));
    require(n >= 1, "panel needs at least 1 asset");
    for (const auto* m : {&prices, &volumes, &spreads, &depths}) {
        require(m->rows() == t && m->cols() == n, "panel series have inconsistent dimensions");
    }
    require(static_cast<Eigen::Index>(assets.size()) == n, "asset metadata count does not match columns");
    require((prices.array() > 0.0).all(), "prices must be strictly positive");
    require((volumes.array() >= 0.0).all(), "volumes must be nonnegative");
    require((spreads.array() >= 0.0).all(), "spreads must be nonnegative");
    require((depths.array() > 0.0).all(), "depths must be strictly positive");
    std::set<std::string> seen;
    for (const auto& a : assets) {
        require(!a.symbol.empty(), "empty asset symbol");
        require(seen.insert(a.symbol).second, "duplicate asset symbol '" + a.symbol + "'");
    }
}

bool ReturnPanel::has_flag(const std::string& flag) const
{
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void fill_default_liquidity(ReturnPanel& panel)
{
    const auto t = panel.returns.rows();
    const auto n = panel.returns.cols();
    if (panel.volumes.rows() != t || panel.volumes.cols() != n) {
        panel.volumes = Eigen::MatrixXd::Constant(t, n, kDefaultVolumeMedian);
        panel.flags.emplace_back("volumes:default");
    }
    if (panel.spreads.rows() != t || panel.spreads.cols() != n) {
        panel.spreads = kDefaultSpreadFraction * panel.prices;
        panel.flags.emplace_back("spreads:default");
    }
    if (panel.depths.rows() != t || panel.depths.cols() != n) {
        panel.depths = Eigen::MatrixXd::Constant(t, n, kDefaultDepth);
        panel.flags.emplace_back("depths:default");
    }
}

Eigen::MatrixXd prices_from_returns(const Eigen::MatrixXd& returns, double base)
{
    Eigen::MatrixXd prices(returns.rows(), returns.cols());
    for (Eigen::Index j = 0; j < returns.cols(); ++j) {
        double p = base;
        for (Eigen::Index t = 0; t < returns.rows(); ++t) {
            p *= 1.0 + returns(t, j);
            prices(t, j) = p;
        }
    }
    return prices;
}

void SyntheticSpec::validate() const
{
    require(n_assets >= 1, "n_assets must be >= 1");
    require(n_periods >= 2, "n_periods must be >= 2");
    for (double c : {intra_tech_corr, intra_bank_corr, cross_corr}) {
        require(std::isfinite(c) && c >= -1.0 && c <= 1.0, "correlations must lie in [-1, 1]");
    }
    require(std::isfinite(per_period_vol) && per_period_vol > 0.0, "per_period_vol must be positive");
    require(std::isfinite(drift), "drift must be finite");
    require(sector_map.empty() || sector_map.size() == n_assets, "sector_map size must equal n_assets");
    require(symbols.empty() || symbols.size() == n_assets, "symbols size must equal n_assets");
}

std::vector<AssetMeta> SyntheticSpec::assets() const
{
    std::vector<AssetMeta> out(n_assets);
    for (std::size_t i = 0; i < n_assets; ++i) {
        if (!symbols.empty()) {
            out[i].symbol = symbols[i];
        } else if (n_assets <= kDefaultSymbols.size()) {
            out[i].symbol = kDefaultSymbols[i];
        } else {
            out[i].symbol = "A" + std::to_string(i);
        }
        out[i].sector = sector_map.empty() ? kDefaultSectors[i % kDefaultSectors.size()] : sector_map[i];
    }
    return out;
}

Eigen::MatrixXd project_to_correlation(const Eigen::MatrixXd& matrix)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
    Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd clipped = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::VectorXd d = clipped.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd out = d.asDiagonal() * clipped * d.asDiagonal();
    out = (0.5 * (out + out.transpose())).eval();
    out.diagonal().setOnes();
    return out;
}

TargetCorrelation build_target_correlation(const SyntheticSpec& spec)
{
    spec.validate();
    const auto assets = spec.assets();
    const auto n = static_cast<Eigen::Index>(assets.size());
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Sector a = assets[i].sector;
            const Sector b = assets[j].sector;
            double c = spec.cross_corr;
            if (a == b && a == Sector::technology) c = spec.intra_tech_corr;
            if (a == b && a == Sector::banking) c = spec.intra_bank_corr;
            corr(i, j) = corr(j, i) = c;
        }
    }
    TargetCorrelation out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
        out.matrix = project_to_correlation(corr);
        out.projected = true;
    } else {
        out.matrix = corr;
    }
    return out;
}

Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& corr)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

ReturnPanel generate_synthetic(const SyntheticSpec& spec)
{
    const TargetCorrelation target = build_target_correlation(spec);
    const Eigen::MatrixXd factor = correlation_factor(target.matrix);
    const auto n = static_cast<Eigen::Index>(spec.n_assets);
    const auto t = static_cast<Eigen::Index>(spec.n_periods);

    Rng root(spec.seed);
    Rng shocks = root.substream("returns");
    Rng volume_rng = root.substream("volumes");

    ReturnPanel panel;
    panel.assets = spec.assets();
    panel.returns.resize(t, n);
    Eigen::VectorXd z(n);
    for (Eigen::Index row = 0; row < t; ++row) {
        for (Eigen::Index i = 0; i < n; ++i) z(i) = shocks.normal();
        panel.returns.row(row) = (spec.drift + spec.per_period_vol * (factor * z).array()).matrix().transpose();
    }
    panel.prices = prices_from_returns(panel.returns);

    panel.volumes.resize(t, n);
    const double log_median = std::log(kDefaultVolumeMedian);
    for (Eigen::Index row = 0; row < t; ++row) {
        for (Eigen::Index i = 0; i < n; ++i) {
            panel.volumes(row, i) = std::exp(log_median + kDefaultVolumeLogSd * volume_rng.normal());
        }
    }
    panel.spreads = kDefaultSpreadFraction * panel.prices;
    panel.depths = Eigen::MatrixXd::Constant(t, n, kDefaultDepth);
    if (target.projected) panel.flags.emplace_back("correlation:projected");
    return panel;
}

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& series)
{
    const Eigen::MatrixXd centered = series.rowwise() - series.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered;
    const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    Eigen::MatrixXd corr(cov.rows(), cov.cols());
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < cov.cols(); ++j) {
            const double denom = sd(i) * sd(j);
            corr(i, j) = denom > 0.0 ? std::clamp(cov(i, j) / denom, -1.0, 1.0)
                                     : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return corr;
}

}  // namespace sysrisk::market
