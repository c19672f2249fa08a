/*
 * agents.hpp
 *
 * Behavioural models for the four agent kinds and the message layer that
 * connects them.
 *
 *   HFT  inventory-penalised execution utility
 *   MM   spread = gamma*sigma + delta*|I| + eta*Lambda
 *   II   turnover-penalised mean-variance allocation on the simplex
 *   REG  -alpha*SRI - beta*sum_p C_p(pi_p)
 *
 * Communication weights evolve as W' = a*W + (1 - a)*f(trust, performance)
 * with f the arithmetic mean.
 */
#pragma once

#include "sysrisk/common.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sysrisk::agents {

enum class AgentKind { HFT, MM, II, REG };

std::string to_string(AgentKind kind);

struct AgentState {
    std::size_t id = 0;
    AgentKind kind = AgentKind::HFT;
    Eigen::VectorXd weights;    ///< portfolio shares
    double cash = 0.0;
    double risk_aversion = 0.5; ///< gamma in [0, 1]
    std::size_t horizon = 1;    ///< periods between decisions
    Eigen::VectorXd inventory;  ///< shares held per asset
    std::vector<double> pnl_history;

    /// Cash plus marked inventory.
    [[nodiscard]] double wealth(const Eigen::VectorXd& prices) const;
};

struct RiskAversionRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct AgentPopulationSpec {
    std::array<std::size_t, 4> counts{3, 2, 3, 2};  ///< HFT, MM, II, REG
    std::array<RiskAversionRange, 4> risk_aversion{
        RiskAversionRange{0.7, 0.9}, RiskAversionRange{0.5, 0.6}, RiskAversionRange{0.3, 0.5},
        RiskAversionRange{0.1, 0.1}};
    /// Decision interval per kind, aligned with the default wavelet scales.
    std::array<std::size_t, 4> horizons{1, 5, 15, 60};

    [[nodiscard]] std::size_t count(AgentKind kind) const { return counts[static_cast<std::size_t>(kind)]; }
    [[nodiscard]] const RiskAversionRange& range(AgentKind kind) const
    {
        return risk_aversion[static_cast<std::size_t>(kind)];
    }
    [[nodiscard]] std::size_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
    void validate() const;
};

/// Agents in id order (HFT first, then MM, II, REG), gamma drawn uniformly
/// within each kind's range.
std::vector<AgentState> make_population(const AgentPopulationSpec& spec, std::size_t n_assets, double initial_cash,
                                        Rng& rng);

// ---------------------------------------------------------------------------
// Communication layer

struct CommGraph {
    Eigen::MatrixXd weights;      ///< W(i, j): channel strength from i to j
    Eigen::MatrixXd trust;        ///< in [0, 1]
    Eigen::MatrixXd performance;  ///< in [0, 1]
    double alpha = 0.9;

    static CommGraph uniform(std::size_t agents, double weight = 0.5, double alpha = 0.9);
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
    void validate() const;
};

double combine_trust_performance(double trust, double performance);

/// One application of the persistence update for the (i, j) channel; writes the
/// new weight into the graph and returns it.
double update_comm_weight(CommGraph& graph, std::size_t i, std::size_t j);

/// Updates every off-diagonal channel.
void update_all_weights(CommGraph& graph);

enum class MessageKind { quote, order_intent, risk_alert, policy_signal };

std::string to_string(MessageKind kind);

struct Message {
    std::size_t sender = 0;
    std::size_t receiver = 0;
    std::uint64_t tick = 0;
    MessageKind kind = MessageKind::order_intent;
    std::size_t asset = 0;
    double value = 0.0;  ///< signed signal, quote or policy intensity
    bool delivered = false;
};

inline constexpr double kDeliveryThreshold = 0.05;

struct RoutingResult {
    std::vector<Message> messages;  ///< every input message, sorted, delivered flag set
    std::size_t delivered = 0;
    std::size_t dropped_weak_link = 0;
    std::size_t dropped_unaffordable = 0;
    double tax_collected = 0.0;
};

/// Delivers message i->j iff W(i, j) > w_min and the sender can pay `tax`.
/// Processing order is (sender, tick, receiver); `cash[sender]` is debited
/// per delivery.
RoutingResult route_messages(const CommGraph& graph, std::vector<Message> outbox, double tax,
                             std::span<double> cash, double w_min = kDeliveryThreshold);

// ---------------------------------------------------------------------------
// Behavioural models

enum class Side { buy, sell };

struct Fill {
    std::size_t asset = 0;
    Side side = Side::buy;
    double qty = 0.0;
    double bid = 0.0;
    double ask = 0.0;
};

/// sum_k [(bid - c) Q_buy - (ask + c) Q_sell] - lambda * sum_k I_k^2, with the
/// bid/ask sides exactly as written in the model (buys valued at the bid).
double hft_utility(std::span<const Fill> fills, std::span<const double> trans_cost,
                   const Eigen::VectorXd& inventory, double inventory_penalty);

double mm_spread(double sigma, double inventory_dev, double adverse, double gamma, double delta, double eta);

/// |sum of signed flow| / sum |flow| over the trailing window; 0 without flow.
double adverse_selection(std::span<const double> order_flow, std::size_t window);

struct IiResult {
    Eigen::VectorXd weights;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct IiSolverOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 10000;
};

double ii_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, double gamma,
                    double kappa, const Eigen::VectorXd& w_prev);

/// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Maximises w'mu - (gamma/2) w'Sigma w - kappa ||w - w_prev||^2 over the
/// simplex by projected gradient ascent with step 1/L.
IiResult ii_optimize(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, double gamma, double kappa,
                     const Eigen::VectorXd& w_prev, const IiSolverOptions& options = {});

enum class Policy { comm_tax, position_limit, circuit_breaker };

std::string to_string(Policy policy);

using PolicyCost = std::function<double(double)>;

/// -alpha * sri - beta * sum_p C_p(pi_p); policies without an entry in
/// `costs` use C(pi) = pi^2.
double reg_utility(double sri, const std::map<Policy, double>& intensities, double alpha, double beta,
                   const std::map<Policy, PolicyCost>& costs = {});

}  // namespace sysrisk::agents
