/*
 * sri.hpp
 *
 * Systemic Risk Index: the individual risk components, GARCH(1,1) volatility,
 * component weighting and the decomposed aggregate report.
 *
 * Two component sets are supported:
 *   methodology       network (degree-adjusted density), concentration (HHI),
 *                     volatility (GARCH), liquidity, contagion; equal weights
 *   empirical_compat  network density, mean pairwise correlation, realized
 *                     volatility, 1 - 1/N concentration; weights .3/.3/.3/.1
 */
#pragma once

#include "sysrisk/entropy_net.hpp"
#include "sysrisk/market_data.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sysrisk::sri {

enum class RiskComponent { network, correlation, volatility, concentration, liquidity, contagion };

/// Short identifier ("network") and table label ("Network Risk").
std::string to_string(RiskComponent c);
std::string display_name(RiskComponent c);
RiskComponent component_from_string(const std::string& name);

struct ComponentValue {
    RiskComponent kind;
    double value = 0.0;
    std::string variant;  ///< which definition produced the value
};

struct RiskComponents {
    std::vector<ComponentValue> entries;
    std::vector<std::string> flags;

    void set(RiskComponent kind, double value, std::string variant);
    [[nodiscard]] std::optional<double> get(RiskComponent kind) const;
    /// All finite; bounded components inside their ranges.
    void validate() const;
};

struct SriWeights {
    std::vector<std::pair<RiskComponent, double>> entries;

    [[nodiscard]] std::optional<double> get(RiskComponent kind) const;
    void validate() const;
    static SriWeights equal(std::span<const RiskComponent> kinds);
};

enum class SriMode { methodology, empirical_compat };

std::string to_string(SriMode mode);
SriMode sri_mode_from_string(const std::string& name);

/// Component order used by each mode.
std::vector<RiskComponent> mode_components(SriMode mode);
SriWeights default_weights(SriMode mode);

struct ReportRow {
    RiskComponent kind;
    double value = 0.0;
    double weight = 0.0;
    double contribution = 0.0;
    double percentage = 0.0;
    std::string variant;
};

struct RiskReport {
    std::vector<ReportRow> rows;
    double total_raw = 0.0;  ///< sum of contributions
    double total = 0.0;      ///< clamped to [0, 1]
    bool clamped = false;
    std::vector<std::string> flags;
};

RiskReport aggregate_sri(const RiskComponents& components, const SriWeights& weights);

// ---------------------------------------------------------------------------
// Components

enum class NetworkRiskMode { degree_adjusted, density_proxy };

/// Scale average of density * (1 - mean_i 1/(d_i + 1)) with d_i the total
/// degree (degree_adjusted), or the scale-average density (density_proxy).
double network_risk(std::span<const entropy::TENetwork> networks, NetworkRiskMode mode);

struct CorrelationRisk {
    double value = 0.0;
    std::vector<std::string> excluded_assets;  ///< zero-variance columns
};

/// Mean off-diagonal sample correlation of returns, clamped to [0, 1].
CorrelationRisk correlation_risk(const market::ReturnPanel& panel);

struct GarchParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

struct GarchFit {
    GarchParams params;
    double log_likelihood = 0.0;
    std::vector<double> variance;  ///< conditional variance per observation
    bool converged = false;
    std::size_t iterations = 0;
};

inline constexpr double kGarchMaxPersistence = 0.999;

/// h_0 = sample variance; h_t = omega + alpha e_{t-1}^2 + beta h_{t-1} on
/// demeaned returns.
std::vector<double> garch_variance(std::span<const double> returns, const GarchParams& params);

/// Gaussian maximum likelihood under omega > 0, alpha, beta >= 0,
/// alpha + beta <= 0.999.
GarchFit fit_garch(std::span<const double> returns);

std::vector<double> simulate_garch(const GarchParams& params, std::size_t length, Rng& rng);

enum class VolatilityMode { garch, realized };

struct VolatilityRisk {
    double value = 0.0;
    VolatilityMode used = VolatilityMode::realized;
    bool fell_back = false;  ///< GARCH failed, realized used instead
};

VolatilityRisk volatility_risk(const market::ReturnPanel& panel, VolatilityMode mode);

enum class ConcentrationMode { hhi, one_minus_inv_n };

/// hhi: HHI of volume shares plus HHI of wealth shares. An empty `wealth`
/// drops the agent term.
double concentration_risk(std::span<const double> volumes, std::span<const double> wealth, ConcentrationMode mode);

struct LiquidityWeights {
    double spread = 0.4;
    double depth = 0.3;
    double impact = 0.3;
};

struct LiquidityRisk {
    double value = 0.0;
    std::size_t skipped_ticks = 0;  ///< zero-volume observations
};

/// Cross-asset mean over t >= 1 of
///   w1 spread/P + w2 / depth + w3 sqrt(|dP / Q|).
LiquidityRisk liquidity_risk(const market::ReturnPanel& panel, const LiquidityWeights& weights = {});

/// max_i sum_{j: A_ij = 1} TE_ij sigma_j rho_ij, floored at 0.
double contagion_risk(const entropy::TENetwork& network, std::span<const double> vols, const Eigen::MatrixXd& corr);

struct PcaWeights {
    SriWeights weights;
    bool fallback = false;
    Eigen::VectorXd loadings;
};

/// First principal component of the K x T component history, absolute
/// loadings normalised to one. `standardize = false` uses the raw covariance.
PcaWeights pca_weights(const Eigen::MatrixXd& history, std::span<const RiskComponent> kinds, bool standardize = true);

// ---------------------------------------------------------------------------
// Pipeline helpers

struct ComponentOptions {
    SriMode mode = SriMode::empirical_compat;
    LiquidityWeights liquidity;
};

/// Computes the component set of `options.mode` from a panel and its per-scale
/// networks. `wealth` is optional per-agent wealth for the HHI term.
RiskComponents compute_components(const market::ReturnPanel& panel, std::span<const entropy::TENetwork> networks,
                                  std::span<const double> wealth, const ComponentOptions& options);

std::string report_json(const RiskReport& report, SriMode mode);
void write_report_json(const std::filesystem::path& path, const RiskReport& report, SriMode mode);
/// Columns Component, Value, Weight, Contribution, Percentage plus a total row.
void write_report_csv(const std::filesystem::path& path, const RiskReport& report);

}  // namespace sysrisk::sri
