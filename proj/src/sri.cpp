#include "sysrisk/sri.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

namespace sysrisk::sri {

namespace {

constexpr RiskComponent kAllComponents[] = {RiskComponent::network,       RiskComponent::correlation,
                                            RiskComponent::volatility,    RiskComponent::concentration,
                                            RiskComponent::liquidity,     RiskComponent::contagion};

double column_sd(const Eigen::MatrixXd& m, Eigen::Index col)
{
    const auto n = m.rows();
    if (n < 2) return 0.0;
    if (m.col(col).maxCoeff() == m.col(col).minCoeff()) return 0.0;
    const double mean = m.col(col).mean();
    return std::sqrt((m.col(col).array() - mean).square().sum() / static_cast<double>(n - 1));
}

double mean_offdiagonal(const Eigen::MatrixXd& corr)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < corr.rows(); ++i)
        for (Eigen::Index j = 0; j < corr.cols(); ++j)
            if (i != j && std::isfinite(corr(i, j))) {
                sum += corr(i, j);
                ++count;
            }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

std::string to_string(RiskComponent c)
{
    switch (c) {
    case RiskComponent::network: return "network";
    case RiskComponent::correlation: return "correlation";
    case RiskComponent::volatility: return "volatility";
    case RiskComponent::concentration: return "concentration";
    case RiskComponent::liquidity: return "liquidity";
    case RiskComponent::contagion: return "contagion";
    }
    return "?";
}

std::string display_name(RiskComponent c)
{
    switch (c) {
    case RiskComponent::network: return "Network Risk";
    case RiskComponent::correlation: return "Correlation Risk";
    case RiskComponent::volatility: return "Volatility Risk";
    case RiskComponent::concentration: return "Concentration Risk";
    case RiskComponent::liquidity: return "Liquidity Risk";
    case RiskComponent::contagion: return "Contagion Risk";
    }
    return "?";
}

RiskComponent component_from_string(const std::string& name)
{
    for (RiskComponent c : kAllComponents)
        if (to_string(c) == name) return c;
    throw ValidationError("unknown risk component '" + name + "'");
}

void RiskComponents::set(RiskComponent kind, double value, std::string variant)
{
    for (auto& e : entries) {
        if (e.kind == kind) {
            e.value = value;
            e.variant = std::move(variant);
            return;
        }
    }
    entries.push_back({kind, value, std::move(variant)});
}

std::optional<double> RiskComponents::get(RiskComponent kind) const
{
    for (const auto& e : entries)
        if (e.kind == kind) return e.value;
    return std::nullopt;
}

void RiskComponents::validate() const
{
    std::set<RiskComponent> seen;
    for (const auto& e : entries) {
        require(seen.insert(e.kind).second, "duplicate risk component " + to_string(e.kind));
        require(std::isfinite(e.value), "risk component " + to_string(e.kind) + " is not finite");
        require(e.value >= 0.0, "risk component " + to_string(e.kind) + " is negative");
        switch (e.kind) {
        case RiskComponent::network:
        case RiskComponent::correlation:
            require(e.value <= 1.0, "risk component " + to_string(e.kind) + " exceeds 1");
            break;
        case RiskComponent::concentration:
            // the HHI sum ranges over (0, 2]; the compat variant over [0, 1).
            require(e.value <= 2.0, "concentration risk exceeds 2");
            break;
        default: break;
        }
    }
}

std::optional<double> SriWeights::get(RiskComponent kind) const
{
    for (const auto& [k, w] : entries)
        if (k == kind) return w;
    return std::nullopt;
}

void SriWeights::validate() const
{
    require(!entries.empty(), "no SRI weights");
    std::set<RiskComponent> seen;
    double sum = 0.0;
    for (const auto& [k, w] : entries) {
        require(seen.insert(k).second, "duplicate weight for " + to_string(k));
        require(std::isfinite(w) && w >= 0.0, "SRI weights must be nonnegative");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "SRI weights must sum to 1");
}

SriWeights SriWeights::equal(std::span<const RiskComponent> kinds)
{
    require(!kinds.empty(), "no components to weight");
    SriWeights w;
    for (RiskComponent k : kinds) w.entries.emplace_back(k, 1.0 / static_cast<double>(kinds.size()));
    return w;
}

std::string to_string(SriMode mode) { return mode == SriMode::methodology ? "methodology" : "empirical_compat"; }

SriMode sri_mode_from_string(const std::string& name)
{
    if (name == "methodology") return SriMode::methodology;
    if (name == "empirical_compat") return SriMode::empirical_compat;
    throw ValidationError("unknown SRI mode '" + name + "'");
}

std::vector<RiskComponent> mode_components(SriMode mode)
{
    if (mode == SriMode::empirical_compat) {
        return {RiskComponent::network, RiskComponent::correlation, RiskComponent::volatility,
                RiskComponent::concentration};
    }
    return {RiskComponent::network, RiskComponent::concentration, RiskComponent::volatility, RiskComponent::liquidity,
            RiskComponent::contagion};
}

SriWeights default_weights(SriMode mode)
{
    if (mode == SriMode::empirical_compat) {
        return {{{RiskComponent::network, 0.30},
                 {RiskComponent::correlation, 0.30},
                 {RiskComponent::volatility, 0.30},
                 {RiskComponent::concentration, 0.10}}};
    }
    const auto kinds = mode_components(mode);
    return SriWeights::equal(kinds);
}

RiskReport aggregate_sri(const RiskComponents& components, const SriWeights& weights)
{
    components.validate();
    weights.validate();
    require(components.entries.size() == weights.entries.size(), "component and weight sets differ in size");
    RiskReport report;
    report.flags = components.flags;
    for (const auto& c : components.entries) {
        const auto w = weights.get(c.kind);
        require(w.has_value(), "no weight for component " + to_string(c.kind));
        ReportRow row{c.kind, c.value, *w, *w * c.value, 0.0, c.variant};
        report.total_raw += row.contribution;
        report.rows.push_back(row);
    }
    for (auto& row : report.rows) {
        row.percentage = report.total_raw > 0.0 ? 100.0 * row.contribution / report.total_raw : 0.0;
    }
    report.total = std::clamp(report.total_raw, 0.0, 1.0);
    report.clamped = report.total != report.total_raw;
    if (report.clamped) report.flags.emplace_back("total clamped to [0, 1]");
    return report;
}

double network_risk(std::span<const entropy::TENetwork> networks, NetworkRiskMode mode)
{
    require(!networks.empty(), "network_risk: need at least one network");
    double acc = 0.0;
    for (const auto& net : networks) {
        const double density = net.stats.density;
        if (mode == NetworkRiskMode::density_proxy) {
            acc += density;
            continue;
        }
        const auto n = net.adjacency.rows();
        if (n == 0) continue;
        double inv = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double degree = net.adjacency.row(i).sum() + net.adjacency.col(i).sum();
            inv += 1.0 / (degree + 1.0);
        }
        acc += density * (1.0 - inv / static_cast<double>(n));
    }
    return acc / static_cast<double>(networks.size());
}

CorrelationRisk correlation_risk(const market::ReturnPanel& panel)
{
    require(panel.periods() >= 3, "correlation_risk: need at least 3 periods");
    require(panel.n_assets() >= 2, "correlation_risk: need at least 2 assets");
    CorrelationRisk out;
    const Eigen::MatrixXd corr = market::sample_correlation(panel.returns);
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        if (!std::isfinite(corr(i, i))) out.excluded_assets.push_back(panel.assets[static_cast<std::size_t>(i)].symbol);
    }
    out.value = std::clamp(mean_offdiagonal(corr), 0.0, 1.0);
    return out;
}

VolatilityRisk volatility_risk(const market::ReturnPanel& panel, VolatilityMode mode)
{
    const auto n = panel.n_assets();
    VolatilityRisk out;
    auto realized = [&] {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += column_sd(panel.returns, i);
        return n > 0 ? acc / static_cast<double>(n) : 0.0;
    };
    if (mode == VolatilityMode::realized) {
        out.value = realized();
        return out;
    }
    require(panel.periods() >= 30, "volatility_risk: GARCH mode needs at least 30 periods");
    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> col(panel.returns.col(i).data(), panel.returns.col(i).data() + panel.periods());
        bool ok = column_sd(panel.returns, i) > 0.0;
        if (ok) {
            const GarchFit fit = fit_garch(col);
            ok = fit.converged && std::isfinite(fit.variance.back()) && fit.variance.back() > 0.0;
            if (ok) h(i) = fit.variance.back();
        }
        if (!ok) {
            out.value = realized();
            out.fell_back = true;
            return out;
        }
    }
    const Eigen::MatrixXd corr = market::sample_correlation(panel.returns);
    const double rho_avg = std::max(mean_offdiagonal(corr), 0.0);
    double cross = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && std::isfinite(corr(i, j))) cross += corr(i, j) * std::sqrt(h(i) * h(j));
    cross /= static_cast<double>(n);
    out.value = std::sqrt(h.mean()) + rho_avg * std::sqrt(std::max(cross, 0.0));
    out.used = VolatilityMode::garch;
    return out;
}

double concentration_risk(std::span<const double> volumes, std::span<const double> wealth, ConcentrationMode mode)
{
    require(!volumes.empty(), "concentration_risk: no assets");
    if (mode == ConcentrationMode::one_minus_inv_n) return 1.0 - 1.0 / static_cast<double>(volumes.size());
    auto hhi = [](std::span<const double> xs, const char* what) {
        double total = 0.0;
        for (double x : xs) {
            require(x >= 0.0, std::string("concentration_risk: negative ") + what);
            total += x;
        }
        require(total > 0.0, std::string("concentration_risk: zero total ") + what);
        double acc = 0.0;
        for (double x : xs) acc += (x / total) * (x / total);
        return acc;
    };
    double value = hhi(volumes, "volume");
    if (!wealth.empty()) value += hhi(wealth, "wealth");
    return value;
}

LiquidityRisk liquidity_risk(const market::ReturnPanel& panel, const LiquidityWeights& w)
{
    require(w.spread >= 0.0 && w.depth >= 0.0 && w.impact >= 0.0, "liquidity weights must be nonnegative");
    require(std::abs(w.spread + w.depth + w.impact - 1.0) <= 1e-9, "liquidity weights must sum to 1");
    require(panel.periods() >= 2, "liquidity_risk: need at least 2 periods");
    require((panel.depths.array() > 0.0).all(), "liquidity_risk: depths must be positive");
    LiquidityRisk out;
    double across = 0.0;
    for (Eigen::Index i = 0; i < panel.n_assets(); ++i) {
        double acc = 0.0;
        std::size_t used = 0;
        for (Eigen::Index t = 1; t < panel.periods(); ++t) {
            const double q = panel.volumes(t, i);
            if (q == 0.0) {
                ++out.skipped_ticks;
                continue;
            }
            const double dp = panel.prices(t, i) - panel.prices(t - 1, i);
            acc += w.spread * panel.spreads(t, i) / panel.prices(t, i) + w.depth / panel.depths(t, i) +
                   w.impact * std::sqrt(std::abs(dp / q));
            ++used;
        }
        across += used > 0 ? acc / static_cast<double>(used) : 0.0;
    }
    out.value = across / static_cast<double>(panel.n_assets());
    return out;
}

double contagion_risk(const entropy::TENetwork& network, std::span<const double> vols, const Eigen::MatrixXd& corr)
{
    const auto n = network.adjacency.rows();
    require(network.te.rows() == n && network.te.cols() == n, "contagion_risk: TE/adjacency size mismatch");
    require(static_cast<Eigen::Index>(vols.size()) == n, "contagion_risk: volatility count mismatch");
    require(corr.rows() == n && corr.cols() == n, "contagion_risk: correlation size mismatch");
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || network.adjacency(i, j) == 0) continue;
            const double rho = std::isfinite(corr(i, j)) ? corr(i, j) : 0.0;
            acc += network.te(i, j) * vols[static_cast<std::size_t>(j)] * rho;
        }
        best = std::max(best, acc);
    }
    return best;
}

PcaWeights pca_weights(const Eigen::MatrixXd& history, std::span<const RiskComponent> kinds, bool standardize)
{
    const auto k = history.rows();
    const auto t = history.cols();
    require(static_cast<Eigen::Index>(kinds.size()) == k, "pca_weights: one component kind per history row");
    require(k >= 1 && t >= k + 2, "pca_weights: need T >= K + 2 observations");
    PcaWeights out;
    Eigen::MatrixXd centered = history.colwise() - history.rowwise().mean();
    const Eigen::VectorXd sd = (centered.rowwise().squaredNorm() / static_cast<double>(t - 1)).cwiseSqrt();
    const auto fallback = [&] {
        out.weights = SriWeights::equal(kinds);
        out.fallback = true;
        out.loadings = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
        return out;
    };
    if ((sd.array() <= 0.0).any() || !sd.allFinite()) return fallback();
    if (standardize) centered = sd.cwiseInverse().asDiagonal() * centered;
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(t - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) return fallback();
    const auto& values = eig.eigenvalues();  // ascending
    const double top = values(k - 1);
    if (!(top > 0.0) || (k >= 2 && top - values(k - 2) <= 1e-12 * top)) return fallback();
    out.loadings = eig.eigenvectors().col(k - 1).cwiseAbs();
    out.loadings /= out.loadings.sum();
    for (Eigen::Index i = 0; i < k; ++i) out.weights.entries.emplace_back(kinds[static_cast<std::size_t>(i)], out.loadings(i));
    return out;
}

RiskComponents compute_components(const market::ReturnPanel& panel, std::span<const entropy::TENetwork> networks,
                                  std::span<const double> wealth, const ComponentOptions& options)
{
    panel.validate();
    require(!networks.empty(), "compute_components: no networks");
    RiskComponents out;
    const auto n = panel.n_assets();
    std::vector<double> mean_volume(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) mean_volume[static_cast<std::size_t>(i)] = panel.volumes.col(i).mean();

    if (options.mode == SriMode::empirical_compat) {
        out.set(RiskComponent::network, network_risk(networks, NetworkRiskMode::density_proxy), "density_proxy");
        const CorrelationRisk corr = correlation_risk(panel);
        out.set(RiskComponent::correlation, corr.value, "mean_pairwise");
        for (const auto& s : corr.excluded_assets) out.flags.push_back("correlation: excluded zero-variance " + s);
        out.set(RiskComponent::volatility, volatility_risk(panel, VolatilityMode::realized).value, "realized");
        out.set(RiskComponent::concentration,
                concentration_risk(mean_volume, {}, ConcentrationMode::one_minus_inv_n), "one_minus_inv_n");
        return out;
    }

    out.set(RiskComponent::network, network_risk(networks, NetworkRiskMode::degree_adjusted), "degree_adjusted");
    out.set(RiskComponent::concentration, concentration_risk(mean_volume, wealth, ConcentrationMode::hhi),
            wealth.empty() ? "hhi_volume_only" : "hhi");
    if (wealth.empty()) out.flags.emplace_back("concentration: no agent wealth, volume term only");
    const VolatilityMode vol_mode = panel.periods() >= 30 ? VolatilityMode::garch : VolatilityMode::realized;
    const VolatilityRisk vol = volatility_risk(panel, vol_mode);
    out.set(RiskComponent::volatility, vol.value, vol.used == VolatilityMode::garch ? "garch" : "realized");
    if (vol.fell_back) out.flags.emplace_back("volatility: GARCH fit failed, realized fallback");
    const LiquidityRisk liq = liquidity_risk(panel, options.liquidity);
    out.set(RiskComponent::liquidity, liq.value, "spread_depth_impact");
    if (liq.skipped_ticks > 0) {
        out.flags.push_back("liquidity: skipped " + std::to_string(liq.skipped_ticks) + " zero-volume ticks");
    }
    std::vector<double> vols(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) vols[static_cast<std::size_t>(i)] = column_sd(panel.returns, i);
    const Eigen::MatrixXd corr = market::sample_correlation(panel.returns);
    double contagion = 0.0;
    for (const auto& net : networks) contagion = std::max(contagion, contagion_risk(net, vols, corr));
    out.set(RiskComponent::contagion, contagion, "te_weighted_max_over_scales");
    return out;
}

}  // namespace sysrisk::sri
