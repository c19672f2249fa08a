/*
 * config.hpp
 *
 * Scenario files: one JSON document with the blocks
 *   seed, assets, agents, policy, engine, estimator, sri
 * Every key is optional; missing keys take the built-in defaults printed by
 * `sysrisk config --dump`. Unknown keys are rejected.
 */
#pragma once

#include "sysrisk/entropy_net.hpp"
#include "sysrisk/sim_engine.hpp"
#include "sysrisk/sri.hpp"
#include "sysrisk/wavelet.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>

namespace sysrisk::config {

inline constexpr int kConfigVersion = 1;

struct AnalysisConfig {
    wavelet::WaveletParams wavelet;
    entropy::TeParams te;
};

struct SriConfig {
    sri::SriMode mode = sri::SriMode::empirical_compat;
    std::optional<sri::SriWeights> weights;  ///< empty: mode defaults
    sri::LiquidityWeights liquidity;
};

struct Scenario {
    std::uint64_t seed = 42;
    sim::SimConfig sim;
    AnalysisConfig analysis;
    SriConfig sri;

    /// Sets the scenario seed and the generator seed derived from it.
    void set_seed(std::uint64_t value);
    /// Throws ConfigError naming the offending key.
    void validate() const;
};

nlohmann::ordered_json to_json(const Scenario& scenario);
nlohmann::ordered_json to_json(const sim::SimConfig& config);
nlohmann::ordered_json to_json(const sim::PolicyConfig& policy);

/// Throws ConfigError naming the offending key.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// The embedded default scenario, pretty-printed.
std::string default_config_dump();

/// Parses "0.3,0.3,0.3,0.1" style lists. Throws ConfigError naming `key`.
std::vector<double> parse_number_list(const std::string& text, const std::string& key);

/// Parses "THRESHOLD:TICKS".
sim::CircuitBreaker parse_breaker(const std::string& text);

}  // namespace sysrisk::config
