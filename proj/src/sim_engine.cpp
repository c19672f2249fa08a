#include "sysrisk/sim_engine.hpp"

#include "sysrisk/digest.hpp"

#include <algorithm>
#include <cmath>

namespace sysrisk::sim {

using agents::AgentKind;
using agents::Message;
using agents::MessageKind;
using agents::Policy;

namespace {

constexpr Policy kPolicies[] = {Policy::comm_tax, Policy::position_limit, Policy::circuit_breaker};

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Rows [end - window, end) of a list of per-tick vectors as a matrix.
Eigen::MatrixXd trailing(const std::vector<Eigen::VectorXd>& rows, std::size_t window, Eigen::Index n)
{
    const std::size_t count = std::min(window, rows.size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(count), n);
    for (std::size_t r = 0; r < count; ++r) m.row(static_cast<Eigen::Index>(r)) = rows[rows.size() - count + r];
    return m;
}

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& x)
{
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    return c.transpose() * c / static_cast<double>(std::max<Eigen::Index>(x.rows() - 1, 1));
}

double clip_to_limit(double inventory, double order, double limit)
{
    return std::clamp(inventory + order, -limit, limit);
}

std::vector<std::size_t> ids_of(const std::vector<agents::AgentState>& agents, AgentKind kind)
{
    std::vector<std::size_t> out;
    for (const auto& a : agents)
        if (a.kind == kind) out.push_back(a.id);
    return out;
}

/// Cheap in-loop risk monitor: weight-graph density, trailing mean
/// correlation, realized volatility and 1 - 1/N, weighted .3/.3/.3/.1.
double monitor_sri(const SimState& s, const EngineParams& p)
{
    const auto n_assets = s.market.prices.size();
    const auto n_agents = s.graph.weights.rows();
    double density = 0.0;
    if (n_agents > 1) {
        const auto strong = (s.graph.weights.array() > agents::kDeliveryThreshold).count();
        density = static_cast<double>(strong) / static_cast<double>(n_agents * (n_agents - 1));
    }
    double corr = 0.0;
    if (s.log_returns.size() >= 3 && n_assets >= 2) {
        const Eigen::MatrixXd c = market::sample_correlation(trailing(s.log_returns, p.reg_window, n_assets));
        double sum = 0.0;
        std::size_t count = 0;
        for (Eigen::Index i = 0; i < n_assets; ++i)
            for (Eigen::Index j = 0; j < n_assets; ++j)
                if (i != j && std::isfinite(c(i, j))) {
                    sum += c(i, j);
                    ++count;
                }
        corr = count > 0 ? std::clamp(sum / static_cast<double>(count), 0.0, 1.0) : 0.0;
    }
    const double vol = n_assets > 0 ? s.market.realized_vol.mean() : 0.0;
    const double conc = n_assets > 0 ? 1.0 - 1.0 / static_cast<double>(n_assets) : 0.0;
    return 0.3 * density + 0.3 * corr + 0.3 * vol + 0.1 * conc;
}

}  // namespace

void PolicyConfig::validate() const
{
    if (!(comm_tax >= 0.0) || !std::isfinite(comm_tax)) throw ConfigError("policy.comm_tax must be a finite value >= 0");
    if (!(position_limit >= 0.0)) throw ConfigError("policy.position_limit must be >= 0");
    if (!(breaker.threshold >= 0.0) || !std::isfinite(breaker.threshold)) {
        throw ConfigError("policy.circuit_breaker.threshold must be a finite value >= 0");
    }
    if (breaker.enabled() && breaker.halt_ticks < 1) {
        throw ConfigError("policy.circuit_breaker.halt_ticks must be >= 1 when the breaker is enabled");
    }
}

void EngineParams::validate() const
{
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("engine.") + key + " must be > 0");
    };
    auto nonneg = [](double v, const char* key) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string("engine.") + key + " must be >= 0");
    };
    auto unit = [](double v, const char* key) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("engine.") + key + " must lie in [0, 1]");
    };
    nonneg(impact, "impact");
    nonneg(initial_cash, "initial_cash");
    unit(comm_alpha, "comm_alpha");
    nonneg(initial_comm_weight, "initial_comm_weight");
    unit(trust_decay, "trust_decay");
    if (performance_window < 1) throw ConfigError("engine.performance_window must be >= 1");
    nonneg(hft_order_size, "hft_order_size");
    nonneg(hft_noise, "hft_noise");
    unit(mm_absorption, "mm_absorption");
    nonneg(mm_gamma_scale, "mm_gamma_scale");
    nonneg(mm_delta, "mm_delta");
    nonneg(mm_eta, "mm_eta");
    if (mm_flow_window < 1) throw ConfigError("engine.mm_flow_window must be >= 1");
    if (ii_window < 2) throw ConfigError("engine.ii_window must be >= 2");
    unit(ii_shrinkage, "ii_shrinkage");
    positive(ii_gamma_scale, "ii_gamma_scale");
    nonneg(ii_kappa, "ii_kappa");
    nonneg(ii_notional, "ii_notional");
    if (reg_window < 1) throw ConfigError("engine.reg_window must be >= 1");
    nonneg(reg_trigger, "reg_trigger");
    unit(reg_raise, "reg_raise");
    unit(reg_decay, "reg_decay");
    nonneg(reg_alpha, "reg_alpha");
    nonneg(reg_beta, "reg_beta");
    positive(base_depth, "base_depth");
    nonneg(base_volume, "base_volume");
    nonneg(volume_log_sd, "volume_log_sd");
}

void SimConfig::validate() const
{
    try {
        assets.validate();
        population.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    policy.validate();
    engine.validate();
}

void MarketState::validate() const
{
    const auto n = prices.size();
    require(spreads.size() == n && depths.size() == n && volumes.size() == n && realized_vol.size() == n &&
                order_flow.size() == n && last_return.size() == n,
            "market state vectors differ in length");
    require((prices.array() > 0.0).all(), "market prices must be positive");
    require((spreads.array() >= 0.0).all() && (depths.array() >= 0.0).all(), "spreads and depths must be >= 0");
}

Eigen::MatrixXd exogenous_shocks(const SimConfig& config, std::uint64_t seed)
{
    const auto n = static_cast<Eigen::Index>(config.assets.n_assets);
    const auto t = static_cast<Eigen::Index>(config.assets.n_periods);
    const Eigen::MatrixXd factor = market::correlation_factor(market::build_target_correlation(config.assets).matrix);
    Rng rng = Rng(seed).substream("exogenous");
    Eigen::MatrixXd z(t, n);
    for (Eigen::Index r = 0; r < t; ++r)
        for (Eigen::Index c = 0; c < n; ++c) z(r, c) = rng.normal();
    return z * factor.transpose();
}

StepContext make_context(const SimConfig& config, std::uint64_t seed)
{
    config.validate();
    StepContext ctx;
    ctx.config = &config;
    ctx.exogenous = exogenous_shocks(config, seed);
    const auto n = static_cast<Eigen::Index>(config.assets.n_assets);
    const auto t = static_cast<Eigen::Index>(config.assets.n_periods);
    Rng vol_rng = Rng(seed).substream("volume");
    ctx.background_volume.resize(t, n);
    const double log_median = config.engine.base_volume > 0.0 ? std::log(config.engine.base_volume) : 0.0;
    for (Eigen::Index r = 0; r < t; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double draw = std::exp(log_median + config.engine.volume_log_sd * vol_rng.normal());
            ctx.background_volume(r, c) = config.engine.base_volume > 0.0 ? draw : 0.0;
        }
    return ctx;
}

SimState initial_state(const SimConfig& config, std::uint64_t seed)
{
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.assets.n_assets);
    SimState s;
    Rng pop_rng = Rng(seed).substream("population");
    s.agents = agents::make_population(config.population, config.assets.n_assets, config.engine.initial_cash, pop_rng);
    s.graph = agents::CommGraph::uniform(s.agents.size(), config.engine.initial_comm_weight, config.engine.comm_alpha);
    auto& m = s.market;
    m.prices = Eigen::VectorXd::Constant(n, market::kBasePrice);
    m.spreads = m.prices * market::kDefaultSpreadFraction;
    m.depths = Eigen::VectorXd::Constant(n, config.engine.base_depth);
    m.volumes = Eigen::VectorXd::Zero(n);
    m.realized_vol = Eigen::VectorXd::Constant(n, config.assets.per_period_vol);
    m.order_flow = Eigen::VectorXd::Zero(n);
    m.last_return = Eigen::VectorXd::Zero(n);
    for (Policy p : kPolicies) s.intensities[p] = 0.0;
    s.trust_hits.assign(s.agents.size(), 0.5);
    s.last_signal.assign(s.agents.size(), 0.0);
    s.pnl.assign(s.agents.size(), {});
    const Rng root(seed);
    for (std::size_t a = 0; a < s.agents.size(); ++a) s.agent_rngs.push_back(root.substream("agent:" + std::to_string(a)));
    return s;
}

TickOutput step(SimState& s, const StepContext& ctx)
{
    require(ctx.config != nullptr, "step: missing configuration");
    const SimConfig& cfg = *ctx.config;
    const EngineParams& p = cfg.engine;
    const PolicyConfig& policy = cfg.policy;
    auto& m = s.market;
    const auto n = m.prices.size();
    const auto n_agents = s.agents.size();
    m.validate();
    require(static_cast<std::size_t>(n) == cfg.assets.n_assets, "step: asset count differs from configuration");
    require(s.graph.size() == n_agents, "step: comm graph size differs from agent count");
    require(s.agent_rngs.size() == n_agents, "step: one random stream per agent required");
    for (const auto& a : s.agents) {
        require(a.inventory.size() == n && a.weights.size() == n, "step: agent vectors differ from asset count");
    }
    const std::uint64_t tick = m.tick + 1;
    require(tick <= static_cast<std::uint64_t>(ctx.exogenous.rows()), "step: run is past the configured horizon");
    const auto row = static_cast<Eigen::Index>(tick - 1);

    TickOutput out;
    out.summary.tick = tick;
    auto& rngs = s.agent_rngs;

    // (1) snapshot
    const Eigen::VectorXd prices0 = m.prices;
    std::vector<double> wealth0(n_agents);
    for (std::size_t a = 0; a < n_agents; ++a) wealth0[a] = s.agents[a].wealth(prices0);
    const auto mms = ids_of(s.agents, AgentKind::MM);
    const auto regs = ids_of(s.agents, AgentKind::REG);

    // (2) routing
    {
        std::vector<double> cash(n_agents);
        for (std::size_t a = 0; a < n_agents; ++a) cash[a] = s.agents[a].cash;
        auto routed = agents::route_messages(s.graph, std::move(s.outbox), policy.comm_tax, cash);
        s.outbox.clear();
        for (std::size_t a = 0; a < n_agents; ++a) s.agents[a].cash = cash[a];
        if (routed.delivered > 0) s.tax_sink[policy.comm_tax] += routed.delivered;
        out.summary.delivered = routed.delivered;
        out.summary.tax = policy.comm_tax * static_cast<double>(routed.delivered);
        out.messages = std::move(routed.messages);
    }
    Eigen::VectorXd intents = Eigen::VectorXd::Zero(n);
    for (const auto& msg : out.messages) {
        if (msg.delivered && msg.kind == MessageKind::order_intent && msg.asset < static_cast<std::size_t>(n)) {
            intents(static_cast<Eigen::Index>(msg.asset)) += msg.value;
        }
    }

    // (3) quoting
    Eigen::VectorXd adverse = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        std::vector<double> flow;
        for (const auto& f : s.taker_flow) flow.push_back(f(k));
        flow.push_back(intents(k));
        adverse(k) = agents::adverse_selection(flow, p.mm_flow_window);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        double frac = market::kDefaultSpreadFraction;
        if (!mms.empty()) {
            double add = 0.0;
            for (std::size_t id : mms) {
                const auto& mm = s.agents[id];
                add += agents::mm_spread(m.realized_vol(k), mm.inventory(k) / p.base_depth, adverse(k),
                                         mm.risk_aversion * p.mm_gamma_scale, p.mm_delta, p.mm_eta);
            }
            frac += add / static_cast<double>(mms.size());
        }
        m.spreads(k) = m.prices(k) * frac;
        m.depths(k) = p.base_depth * std::max(0.1, 1.0 - adverse(k));
    }
    for (std::size_t id : mms) {
        if (tick % s.agents[id].horizon != 0) continue;
        for (const auto& a : s.agents) {
            if (a.kind != AgentKind::HFT && a.kind != AgentKind::II) continue;
            for (Eigen::Index k = 0; k < n; ++k) {
                s.outbox.push_back({id, a.id, tick, MessageKind::quote, static_cast<std::size_t>(k),
                                    m.spreads(k) / m.prices(k), false});
            }
        }
    }

    // (7) an active halt skips phases 4-6
    const bool halted = s.halt_remaining > 0;
    out.summary.halted = halted;
    Eigen::MatrixXd fills = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_agents), n);
    Eigen::VectorXd dlog = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd taker_net = Eigen::VectorXd::Zero(n);
    if (halted) {
        --s.halt_remaining;
    } else {
        // (4) orders
        Eigen::MatrixXd orders = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_agents), n);
        for (auto& a : s.agents) {
            const auto r = static_cast<Eigen::Index>(a.id);
            if (a.kind == AgentKind::HFT && tick % a.horizon == 0) {
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double z = m.last_return(k) / std::max(m.realized_vol(k), 1e-12) +
                                     p.hft_noise * rngs[a.id].normal();
                    orders(r, k) = p.hft_order_size * std::tanh(z) - 0.5 * a.risk_aversion * a.inventory(k);
                }
            } else if (a.kind == AgentKind::II && tick % a.horizon == 0 && s.log_returns.size() >= 5) {
                const Eigen::MatrixXd window = trailing(s.log_returns, p.ii_window, n);
                const Eigen::VectorXd mu = window.colwise().mean().transpose();
                const Eigen::MatrixXd cov = sample_cov(window);
                Eigen::MatrixXd shrunk = (1.0 - p.ii_shrinkage) * cov;
                shrunk.diagonal() += p.ii_shrinkage * cov.diagonal();
                shrunk = 0.5 * (shrunk + shrunk.transpose());
                const auto res = agents::ii_optimize(mu, shrunk, a.risk_aversion * p.ii_gamma_scale, p.ii_kappa,
                                                     a.weights);
                a.weights = res.weights;
                for (Eigen::Index k = 0; k < n; ++k) orders(r, k) = a.weights(k) * p.ii_notional / m.prices(k) - a.inventory(k);
            }
            if (orders.row(r).cwiseAbs().maxCoeff() > 0.0) {
                Eigen::Index k_max = 0;
                orders.row(r).cwiseAbs().maxCoeff(&k_max);
                for (std::size_t id : mms) {
                    s.outbox.push_back({a.id, id, tick, MessageKind::order_intent, static_cast<std::size_t>(k_max),
                                        orders(r, k_max), false});
                }
            }
        }

        // (5) position limits
        double limit = policy.position_limit;
        if (std::isfinite(limit)) limit *= 1.0 - 0.5 * s.intensities[Policy::position_limit];
        for (auto& a : s.agents) {
            if (a.kind != AgentKind::HFT && a.kind != AgentKind::II) continue;
            const auto r = static_cast<Eigen::Index>(a.id);
            for (Eigen::Index k = 0; k < n; ++k) {
                const double next = clip_to_limit(a.inventory(k), orders(r, k), limit);
                fills(r, k) = next - a.inventory(k);
                taker_net(k) += fills(r, k);
            }
        }
        for (std::size_t id : mms) {
            auto& a = s.agents[id];
            const auto r = static_cast<Eigen::Index>(id);
            for (Eigen::Index k = 0; k < n; ++k) {
                const double want = -p.mm_absorption * taker_net(k) / static_cast<double>(mms.size());
                const double next = clip_to_limit(a.inventory(k), want, limit);
                fills(r, k) = next - a.inventory(k);
            }
        }

        // (6) clearing at the pre-impact mid plus half spread
        for (auto& a : s.agents) {
            const auto r = static_cast<Eigen::Index>(a.id);
            const double side = a.kind == AgentKind::MM ? -1.0 : 1.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                const double q = fills(r, k);
                if (q == 0.0) continue;
                const double cash_change = -q * m.prices(k) - side * std::abs(q) * 0.5 * m.spreads(k);
                a.cash += cash_change;
                out.summary.trade_cash += cash_change;
                a.inventory(k) += q;
                ++out.summary.fills;
            }
        }
        const Eigen::VectorXd net = fills.colwise().sum().transpose();
        for (Eigen::Index k = 0; k < n; ++k) {
            dlog(k) = p.impact * net(k) / m.depths(k) + cfg.assets.drift + cfg.assets.per_period_vol * ctx.exogenous(row, k);
            m.prices(k) *= std::exp(dlog(k));
        }
        m.order_flow = net;
        m.volumes = ctx.background_volume.row(row).transpose() + fills.cwiseAbs().colwise().sum().transpose();
    }
    if (halted) {
        m.order_flow.setZero();
        m.volumes.setZero();
    }
    m.last_return = dlog.array().exp() - 1.0;
    s.log_returns.push_back(dlog);
    s.taker_flow.push_back(taker_net);
    if (s.log_returns.size() >= 2) {
        const Eigen::MatrixXd w = trailing(s.log_returns, 20, n);
        m.realized_vol = sample_cov(w).diagonal().cwiseSqrt();
    }

    if (policy.breaker.enabled() && !halted) {
        const double threshold = policy.breaker.threshold * (1.0 - 0.5 * s.intensities[Policy::circuit_breaker]);
        if (m.last_return.cwiseAbs().maxCoeff() > threshold) {
            s.halt_remaining = policy.breaker.halt_ticks;
            out.events.push_back({tick, "halt", agents::to_string(Policy::circuit_breaker),
                                  static_cast<double>(policy.breaker.halt_ticks)});
        }
    }

    // (8) regulator
    if (!regs.empty()) {
        s.monitor_history.push_back(monitor_sri(s, p));
        const std::size_t count = std::min(p.reg_window, s.monitor_history.size());
        double rolling = 0.0;
        for (std::size_t i = s.monitor_history.size() - count; i < s.monitor_history.size(); ++i) {
            rolling += s.monitor_history[i];
        }
        rolling /= static_cast<double>(count);
        out.summary.monitor_sri = rolling;
        for (Policy pol : kPolicies) {
            double& pi = s.intensities[pol];
            const double next = rolling > p.reg_trigger ? std::min(pi + p.reg_raise, 1.0) : std::max(pi - p.reg_decay, 0.0);
            if (next != pi) out.events.push_back({tick, "intensity", agents::to_string(pol), next});
            pi = next;
        }
        out.summary.reg_utility = agents::reg_utility(rolling, s.intensities, p.reg_alpha, p.reg_beta);
        for (std::size_t id : regs) {
            if (tick % s.agents[id].horizon != 0) continue;
            for (const auto& a : s.agents) {
                if (a.id == id) continue;
                if (rolling > p.reg_trigger) {
                    s.outbox.push_back({id, a.id, tick, MessageKind::risk_alert, 0, rolling, false});
                }
                s.outbox.push_back(
                    {id, a.id, tick, MessageKind::policy_signal, 0, s.intensities[Policy::position_limit], false});
            }
        }
    }
    out.summary.intensities = s.intensities;

    // (9) trust and performance
    const double market_move = n > 0 ? dlog.mean() : 0.0;
    for (std::size_t a = 0; a < n_agents; ++a) {
        if (!halted && s.last_signal[a] != 0.0 && market_move != 0.0) {
            const double hit = sign(s.last_signal[a]) == sign(market_move) ? 1.0 : 0.0;
            s.trust_hits[a] = p.trust_decay * s.trust_hits[a] + (1.0 - p.trust_decay) * hit;
        }
        s.last_signal[a] = fills.row(static_cast<Eigen::Index>(a)).dot(prices0);
        s.pnl[a].push_back(s.agents[a].wealth(m.prices) - wealth0[a]);
    }
    std::vector<double> recent(n_agents, 0.0);
    for (std::size_t a = 0; a < n_agents; ++a) {
        const auto& h = s.pnl[a];
        const std::size_t count = std::min(p.performance_window, h.size());
        for (std::size_t i = h.size() - count; i < h.size(); ++i) recent[a] += h[i];
    }
    double lo = 0.0, hi = 0.0;
    if (n_agents > 0) {
        lo = *std::min_element(recent.begin(), recent.end());
        hi = *std::max_element(recent.begin(), recent.end());
    }
    for (std::size_t i = 0; i < n_agents; ++i) {
        const double perf = hi > lo ? (recent[i] - lo) / (hi - lo) : 0.5;
        for (std::size_t j = 0; j < n_agents; ++j) {
            if (i == j) continue;
            s.graph.trust(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.trust_hits[i];
            s.graph.performance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = perf;
        }
    }
    agents::update_all_weights(s.graph);

    m.tick = tick;
    return out;
}

double SimulationRecord::tax_sink_balance() const
{
    double total = 0.0;
    for (const auto& [rate, count] : tax_sink) total += rate * static_cast<double>(count);
    return total;
}

std::size_t SimulationRecord::delivered_messages() const
{
    std::size_t total = 0;
    for (const auto& [rate, count] : tax_sink) total += count;
    return total;
}

SimulationRecord run_simulation(const SimConfig& config, std::uint64_t seed)
{
    SimulationRecord rec;
    rec.config = config;
    rec.seed = seed;
    const StepContext ctx = make_context(rec.config, seed);
    SimState s = initial_state(rec.config, seed);

    const auto n = static_cast<Eigen::Index>(config.assets.n_assets);
    const auto t = static_cast<Eigen::Index>(config.assets.n_periods);
    auto& panel = rec.panel;
    panel.returns.resize(t, n);
    panel.prices.resize(t, n);
    panel.volumes.resize(t, n);
    panel.spreads.resize(t, n);
    panel.depths.resize(t, n);
    panel.assets = config.assets.assets();
    panel.period_label = "1tick";
    panel.flags.emplace_back("simulated");

    for (const auto& a : s.agents) {
        rec.agent_kinds.push_back(a.kind);
        rec.initial_cash_total += a.cash;
    }
    for (Eigen::Index r = 0; r < t; ++r) {
        TickOutput o = step(s, ctx);
        panel.returns.row(r) = s.market.last_return;
        panel.prices.row(r) = s.market.prices;
        panel.volumes.row(r) = s.market.volumes;
        panel.spreads.row(r) = s.market.spreads;
        panel.depths.row(r) = s.market.depths;
        for (const auto& a : s.agents) {
            rec.snapshots.push_back({o.summary.tick, a.id, a.cash, a.wealth(s.market.prices), a.inventory});
        }
        rec.messages.insert(rec.messages.end(), o.messages.begin(), o.messages.end());
        rec.events.insert(rec.events.end(), o.events.begin(), o.events.end());
        rec.ticks.push_back(std::move(o.summary));
    }
    for (const auto& a : s.agents) {
        rec.final_cash_total += a.cash;
        rec.final_wealth.push_back(a.wealth(s.market.prices));
    }
    rec.tax_sink = s.tax_sink;
    rec.exogenous = ctx.exogenous;
    std::string bytes;
    for (Eigen::Index r = 0; r < rec.exogenous.rows(); ++r)
        for (Eigen::Index c = 0; c < rec.exogenous.cols(); ++c) {
            bytes += format_double(rec.exogenous(r, c));
            bytes += c + 1 < rec.exogenous.cols() ? ',' : '\n';
        }
    rec.exogenous_hash = sha256_hex(bytes);
    return rec;
}

SimulationRecord apply_policy_scenario(const SimulationRecord& baseline, const PolicyConfig& overrides)
{
    SimConfig config = baseline.config;
    config.policy = overrides;
    return run_simulation(config, baseline.seed);
}

}  // namespace sysrisk::sim
