/*
 * sim_engine.hpp
 *
 * Discrete-time market simulation. Each tick runs a fixed phase sequence:
 *
 *   1  snapshot           agents see the state left by the previous tick
 *   2  routing            last tick's outbox is delivered over the comm graph
 *   3  quoting            market makers set spreads and depth
 *   4  orders             HFT every tick, II every `horizon` ticks
 *   5  position limits    orders clipped so |inventory| <= limit
 *   6  clearing           dlogP = impact * flow / depth + drift + sigma * eps
 *   7  circuit breaker    phases 4-6 are skipped while a halt is active
 *   8  regulator          monitor SRI, intensity rule, reg utility
 *   9  trust/performance  comm-graph weights updated
 *  10  record             panel row, agent snapshots, tick summary
 *
 * Exogenous innovations are drawn for the whole run up front from their own
 * substream, so policy overrides never change them.
 */
#pragma once

#include "sysrisk/agents.hpp"
#include "sysrisk/market_data.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace sysrisk::sim {

struct CircuitBreaker {
    double threshold = 0.0;      ///< absolute per-tick return trigger; 0 disables
    std::size_t halt_ticks = 0;

    [[nodiscard]] bool enabled() const { return threshold > 0.0; }
    bool operator==(const CircuitBreaker&) const = default;
};

struct PolicyConfig {
    double comm_tax = 0.0;
    double position_limit = std::numeric_limits<double>::infinity();
    CircuitBreaker breaker;

    void validate() const;
    bool operator==(const PolicyConfig&) const = default;
};

/// Parameters of the reduced-form market and the agent decision rules.
struct EngineParams {
    double impact = 0.1;              ///< lambda_impact
    double initial_cash = 1.0e5;
    double comm_alpha = 0.9;          ///< persistence in the weight update
    double initial_comm_weight = 0.5;
    double trust_decay = 0.9;         ///< EW factor of the sign-hit rate
    std::size_t performance_window = 20;

    double hft_order_size = 100.0;    ///< shares at full signal
    double hft_noise = 0.5;

    double mm_absorption = 0.5;       ///< share of net taker flow absorbed by MMs
    double mm_gamma_scale = 0.05;     ///< gamma = risk aversion * scale
    double mm_delta = 0.01;
    double mm_eta = 0.001;
    std::size_t mm_flow_window = 20;

    std::size_t ii_window = 30;
    double ii_shrinkage = 0.2;        ///< weight on the diagonal target
    double ii_gamma_scale = 100.0;    ///< gamma = risk aversion * scale
    double ii_kappa = 0.01;
    double ii_notional = 5.0e4;

    std::size_t reg_window = 20;
    double reg_trigger = 0.5;
    double reg_raise = 0.1;
    double reg_decay = 0.05;
    double reg_alpha = 1.0;
    double reg_beta = 0.5;

    double base_depth = market::kDefaultDepth;
    double base_volume = market::kDefaultVolumeMedian;
    double volume_log_sd = market::kDefaultVolumeLogSd;

    void validate() const;
};

struct SimConfig {
    market::SyntheticSpec assets;  ///< universe, correlation blocks, sigma, T
    agents::AgentPopulationSpec population;
    PolicyConfig policy;
    EngineParams engine;

    void validate() const;
};

struct MarketState {
    std::uint64_t tick = 0;
    Eigen::VectorXd prices;
    Eigen::VectorXd spreads;
    Eigen::VectorXd depths;
    Eigen::VectorXd volumes;
    Eigen::VectorXd realized_vol;
    Eigen::VectorXd order_flow;
    Eigen::VectorXd last_return;  ///< simple return of the previous tick

    void validate() const;
};

struct PolicyEvent {
    std::uint64_t tick = 0;
    std::string kind;    ///< "halt", "intensity"
    std::string policy;  ///< agents::to_string(Policy)
    double value = 0.0;
};

struct TickSummary {
    std::uint64_t tick = 0;
    bool halted = false;
    std::size_t fills = 0;
    double trade_cash = 0.0;  ///< sum of agents' cash changes from fills
    std::size_t delivered = 0;
    double tax = 0.0;         ///< taxes paid this tick
    double monitor_sri = 0.0;
    double reg_utility = 0.0;
    std::map<agents::Policy, double> intensities;
};

struct AgentSnapshot {
    std::uint64_t tick = 0;
    std::size_t id = 0;
    double cash = 0.0;
    double wealth = 0.0;
    Eigen::VectorXd inventory;
};

/// Mutable simulation state carried between ticks.
struct SimState {
    MarketState market;
    std::vector<agents::AgentState> agents;
    agents::CommGraph graph;
    std::vector<agents::Message> outbox;  ///< routed next tick
    std::map<agents::Policy, double> intensities;
    std::size_t halt_remaining = 0;
    /// Delivered-message count per tax rate; the sink balance is their
    /// rate-weighted sum.
    std::map<double, std::size_t> tax_sink;
    std::vector<Eigen::VectorXd> log_returns;  ///< one vector per cleared tick
    std::vector<Eigen::VectorXd> taker_flow;   ///< net taker flow per tick
    std::vector<double> monitor_history;
    std::vector<double> trust_hits;
    std::vector<double> last_signal;
    std::vector<std::vector<double>> pnl;      ///< per agent, per tick
    std::vector<Rng> agent_rngs;
};

struct TickOutput {
    TickSummary summary;
    std::vector<agents::Message> messages;
    std::vector<PolicyEvent> events;
};

/// Everything the engine needs that does not change during a run.
struct StepContext {
    const SimConfig* config = nullptr;
    Eigen::MatrixXd exogenous;  ///< T x N correlated standard normals
    Eigen::MatrixXd background_volume;
};

StepContext make_context(const SimConfig& config, std::uint64_t seed);
SimState initial_state(const SimConfig& config, std::uint64_t seed);

/// Advances the state by one tick.
TickOutput step(SimState& state, const StepContext& context);

/// Correlated innovations used by the clearing phase, T x N.
Eigen::MatrixXd exogenous_shocks(const SimConfig& config, std::uint64_t seed);

struct SimulationRecord {
    SimConfig config;
    std::uint64_t seed = 0;
    market::ReturnPanel panel;
    std::vector<AgentSnapshot> snapshots;
    std::vector<agents::AgentKind> agent_kinds;
    std::vector<agents::Message> messages;
    std::vector<PolicyEvent> events;
    std::vector<TickSummary> ticks;
    Eigen::MatrixXd exogenous;
    std::string exogenous_hash;  ///< SHA-256 of the innovation matrix
    std::map<double, std::size_t> tax_sink;
    double initial_cash_total = 0.0;
    double final_cash_total = 0.0;
    std::vector<double> final_wealth;

    [[nodiscard]] double tax_sink_balance() const;
    [[nodiscard]] std::size_t delivered_messages() const;
};

SimulationRecord run_simulation(const SimConfig& config, std::uint64_t seed);

/// Re-runs `baseline` with the same seed and the given policy block.
SimulationRecord apply_policy_scenario(const SimulationRecord& baseline, const PolicyConfig& overrides);

/// Writes manifest.json, panel.csv (plus sidecars), agents.csv, ticks.csv,
/// messages.log and policy_events.csv; returns the files written.
std::vector<std::filesystem::path> write_record(const SimulationRecord& record, const std::filesystem::path& dir);

}  // namespace sysrisk::sim
