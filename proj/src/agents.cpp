#include "sysrisk/agents.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace sysrisk::agents {

std::string to_string(AgentKind kind)
{
    switch (kind) {
    case AgentKind::HFT: return "HFT";
    case AgentKind::MM: return "MM";
    case AgentKind::II: return "II";
    case AgentKind::REG: return "REG";
    }
    return "?";
}

std::string to_string(MessageKind kind)
{
    switch (kind) {
    case MessageKind::quote: return "quote";
    case MessageKind::order_intent: return "order_intent";
    case MessageKind::risk_alert: return "risk_alert";
    case MessageKind::policy_signal: return "policy_signal";
    }
    return "?";
}

std::string to_string(Policy policy)
{
    switch (policy) {
    case Policy::comm_tax: return "comm_tax";
    case Policy::position_limit: return "position_limit";
    case Policy::circuit_breaker: return "circuit_breaker";
    }
    return "?";
}

double AgentState::wealth(const Eigen::VectorXd& prices) const
{
    return cash + (inventory.size() == prices.size() ? inventory.dot(prices) : 0.0);
}

void AgentPopulationSpec::validate() const
{
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& r = risk_aversion[k];
        require(r.lo >= 0.0 && r.hi <= 1.0 && r.lo <= r.hi, "risk aversion ranges must satisfy 0 <= lo <= hi <= 1");
        require(horizons[k] >= 1, "agent horizons must be >= 1");
    }
}

std::vector<AgentState> make_population(const AgentPopulationSpec& spec, std::size_t n_assets, double initial_cash,
                                        Rng& rng)
{
    spec.validate();
    std::vector<AgentState> agents;
    agents.reserve(spec.total());
    for (AgentKind kind : {AgentKind::HFT, AgentKind::MM, AgentKind::II, AgentKind::REG}) {
        const auto& range = spec.range(kind);
        for (std::size_t c = 0; c < spec.count(kind); ++c) {
            AgentState a;
            a.id = agents.size();
            a.kind = kind;
            a.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_assets), 1.0 / static_cast<double>(n_assets));
            a.cash = initial_cash;
            a.risk_aversion = range.hi > range.lo ? rng.uniform(range.lo, range.hi) : range.lo;
            a.horizon = spec.horizons[static_cast<std::size_t>(kind)];
            a.inventory = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_assets));
            agents.push_back(std::move(a));
        }
    }
    return agents;
}

CommGraph CommGraph::uniform(std::size_t agents, double weight, double alpha)
{
    const auto n = static_cast<Eigen::Index>(agents);
    CommGraph g;
    g.weights = Eigen::MatrixXd::Constant(n, n, weight);
    g.weights.diagonal().setZero();
    g.trust = Eigen::MatrixXd::Constant(n, n, 0.5);
    g.trust.diagonal().setZero();
    g.performance = Eigen::MatrixXd::Constant(n, n, 0.5);
    g.performance.diagonal().setZero();
    g.alpha = alpha;
    return g;
}

void CommGraph::validate() const
{
    const auto n = weights.rows();
    require(weights.cols() == n && trust.rows() == n && trust.cols() == n && performance.rows() == n &&
                performance.cols() == n,
            "communication graph matrices must be square and equally sized");
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require((weights.array() >= 0.0).all(), "communication weights must be nonnegative");
    require(weights.diagonal().isZero(0.0), "communication weights must have a zero diagonal");
    require((trust.array() >= 0.0).all() && (trust.array() <= 1.0).all(), "trust must lie in [0, 1]");
    require((performance.array() >= 0.0).all() && (performance.array() <= 1.0).all(),
            "performance must lie in [0, 1]");
}

double combine_trust_performance(double trust, double performance) { return 0.5 * trust + 0.5 * performance; }

double update_comm_weight(CommGraph& graph, std::size_t i, std::size_t j)
{
    require(i != j, "update_comm_weight: self channel");
    require(i < graph.size() && j < graph.size(), "update_comm_weight: agent id out of range");
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    const double target = combine_trust_performance(graph.trust(r, c), graph.performance(r, c));
    const double w = graph.alpha * graph.weights(r, c) + (1.0 - graph.alpha) * target;
    graph.weights(r, c) = std::max(w, 0.0);
    return graph.weights(r, c);
}

void update_all_weights(CommGraph& graph)
{
    for (std::size_t i = 0; i < graph.size(); ++i)
        for (std::size_t j = 0; j < graph.size(); ++j)
            if (i != j) update_comm_weight(graph, i, j);
}

RoutingResult route_messages(const CommGraph& graph, std::vector<Message> outbox, double tax, std::span<double> cash,
                             double w_min)
{
    require(tax >= 0.0, "route_messages: tax must be nonnegative");
    std::stable_sort(outbox.begin(), outbox.end(), [](const Message& a, const Message& b) {
        if (a.sender != b.sender) return a.sender < b.sender;
        if (a.tick != b.tick) return a.tick < b.tick;
        return a.receiver < b.receiver;
    });
    RoutingResult result;
    for (auto& m : outbox) {
        require(m.sender != m.receiver, "route_messages: sender equals receiver");
        require(m.sender < graph.size() && m.receiver < graph.size(), "route_messages: agent id out of range");
        m.delivered = false;
        const double w = graph.weights(static_cast<Eigen::Index>(m.sender), static_cast<Eigen::Index>(m.receiver));
        if (!(w > w_min)) {
            ++result.dropped_weak_link;
            continue;
        }
        if (tax > 0.0) {
            require(m.sender < cash.size(), "route_messages: no cash account for sender");
            if (cash[m.sender] < tax) {
                ++result.dropped_unaffordable;
                continue;
            }
            cash[m.sender] -= tax;
        }
        m.delivered = true;
        ++result.delivered;
    }
    result.tax_collected = tax * static_cast<double>(result.delivered);
    result.messages = std::move(outbox);
    return result;
}

double hft_utility(std::span<const Fill> fills, std::span<const double> trans_cost, const Eigen::VectorXd& inventory,
                   double inventory_penalty)
{
    double value = 0.0;
    for (const auto& f : fills) {
        require(f.qty >= 0.0, "hft_utility: fill quantities must be nonnegative");
        require(f.asset < trans_cost.size(), "hft_utility: no transaction cost for asset");
        const double c = trans_cost[f.asset];
        value += f.side == Side::buy ? (f.bid - c) * f.qty : -(f.ask + c) * f.qty;
    }
    return value - inventory_penalty * inventory.squaredNorm();
}

double mm_spread(double sigma, double inventory_dev, double adverse, double gamma, double delta, double eta)
{
    require(sigma >= 0.0 && adverse >= 0.0, "mm_spread: sigma and adverse selection must be nonnegative");
    require(gamma >= 0.0 && delta >= 0.0 && eta >= 0.0, "mm_spread: coefficients must be nonnegative");
    return gamma * sigma + delta * std::abs(inventory_dev) + eta * adverse;
}

double adverse_selection(std::span<const double> order_flow, std::size_t window)
{
    require(window >= 1, "adverse_selection: window must be >= 1");
    const std::size_t start = order_flow.size() > window ? order_flow.size() - window : 0;
    double net = 0.0;
    double gross = 0.0;
    for (std::size_t t = start; t < order_flow.size(); ++t) {
        net += order_flow[t];
        gross += std::abs(order_flow[t]);
    }
    return gross > 0.0 ? std::abs(net) / gross : 0.0;
}

double ii_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, double gamma,
                    double kappa, const Eigen::VectorXd& w_prev)
{
    return w.dot(mu) - 0.5 * gamma * w.dot(sigma * w) - kappa * (w - w_prev).squaredNorm();
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v)
{
    const auto n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumsum += u[static_cast<std::size_t>(k)];
        const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

IiResult ii_optimize(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, double gamma, double kappa,
                     const Eigen::VectorXd& w_prev, const IiSolverOptions& options)
{
    const auto n = mu.size();
    require(n >= 1, "ii_optimize: empty universe");
    require(sigma.rows() == n && sigma.cols() == n && w_prev.size() == n, "ii_optimize: dimension mismatch");
    require(gamma > 0.0 && kappa >= 0.0, "ii_optimize: gamma must be positive and kappa nonnegative");
    require(std::abs(w_prev.sum() - 1.0) <= 1e-9 && w_prev.minCoeff() >= -1e-12, "ii_optimize: w_prev not on the simplex");
    require((sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, sigma.cwiseAbs().maxCoeff()),
            "ii_optimize: covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    require(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, std::abs(lmax)),
            "ii_optimize: covariance is not positive semi-definite");

    const double lipschitz = std::max(gamma * std::max(lmax, 0.0) + 2.0 * kappa, 1e-12);
    const double step = 1.0 / lipschitz;

    IiResult result;
    Eigen::VectorXd w = project_to_simplex(w_prev);
    double best = ii_objective(w, mu, sigma, gamma, kappa, w_prev);
    for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
        const Eigen::VectorXd grad = mu - gamma * (sigma * w) - 2.0 * kappa * (w - w_prev);
        const Eigen::VectorXd next = project_to_simplex(w + step * grad);
        const double delta = (next - w).cwiseAbs().maxCoeff();
        const double value = ii_objective(next, mu, sigma, gamma, kappa, w_prev);
        if (value + 1e-15 * std::max(1.0, std::abs(best)) < best) {
            result.converged = true;  // rounding floor reached
            break;
        }
        w = next;
        best = std::max(best, value);
        if (delta < options.tolerance) {
            result.converged = true;
            ++result.iterations;
            break;
        }
    }
    w = w.cwiseMax(0.0);
    w /= w.sum();
    result.weights = w;
    result.objective = ii_objective(w, mu, sigma, gamma, kappa, w_prev);
    return result;
}

double reg_utility(double sri, const std::map<Policy, double>& intensities, double alpha, double beta,
                   const std::map<Policy, PolicyCost>& costs)
{
    require(alpha >= 0.0 && beta >= 0.0, "reg_utility: alpha and beta must be nonnegative");
    double cost = 0.0;
    for (const auto& [policy, pi] : intensities) {
        require(pi >= 0.0, "reg_utility: policy intensities must be nonnegative");
        const auto it = costs.find(policy);
        cost += it != costs.end() ? it->second(pi) : pi * pi;
    }
    return -alpha * sri - beta * cost;
}

}  // namespace sysrisk::agents
