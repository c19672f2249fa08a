#include "sysrisk/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace sysrisk::config {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kKindNames[] = {"HFT", "MM", "II", "REG"};

/// Typed access to one JSON object with key-path error messages and
/// rejection of unknown keys.
class Block {
public:
    Block(const json* node, std::string path) : node_(node), path_(std::move(path))
    {
        if (node_ != nullptr && !node_->is_object()) throw ConfigError(where() + ": expected an object");
    }

    [[nodiscard]] std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key)
    {
        known_.insert(key);
        if (node_ == nullptr) return nullptr;
        const auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(key_path(key) + ": expected a number");
            out = v->get<double>();
        }
    }

    template <class Count>
    void count(const std::string& key, Count& out)
    {
        if (const json* v = find(key)) out = static_cast<Count>(as_count(*v, key_path(key)));
    }

    void text(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(key_path(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }

    std::optional<std::vector<double>> numbers(const std::string& key)
    {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_array()) throw ConfigError(key_path(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : *v) {
            if (!x.is_number()) throw ConfigError(key_path(key) + ": expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::optional<std::vector<std::string>> strings(const std::string& key)
    {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_array()) throw ConfigError(key_path(key) + ": expected an array of strings");
        std::vector<std::string> out;
        for (const auto& x : *v) {
            if (!x.is_string()) throw ConfigError(key_path(key) + ": expected an array of strings");
            out.push_back(x.get<std::string>());
        }
        return out;
    }

    Block child(const std::string& key) { return Block(find(key), key_path(key)); }

    void finish() const
    {
        if (node_ == nullptr) return;
        for (const auto& item : node_->items()) {
            if (!known_.count(item.key())) throw ConfigError(key_path(item.key()) + ": unknown key");
        }
    }

    static std::uint64_t as_count(const json& v, const std::string& where)
    {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError(where + ": expected a nonnegative integer");
    }

private:
    [[nodiscard]] std::string where() const { return path_.empty() ? "config" : path_; }

    const json* node_;
    std::string path_;
    std::set<std::string> known_;
};

template <class Fn>
auto rethrow_as_config(const std::string& prefix, Fn&& fn)
{
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(prefix + ": " + e.what());
    }
}

std::string boundary_name(wavelet::Boundary b) { return b == wavelet::Boundary::reflect ? "reflect" : "zero_pad"; }

std::string bandwidth_name(entropy::BandwidthMode m)
{
    switch (m) {
    case entropy::BandwidthMode::cross_validation: return "cross_validation";
    case entropy::BandwidthMode::silverman: return "silverman";
    case entropy::BandwidthMode::fixed: return "fixed";
    }
    return "?";
}

void read_assets(Block b, market::SyntheticSpec& a)
{
    b.count("n_assets", a.n_assets);
    b.count("n_periods", a.n_periods);
    if (auto symbols = b.strings("symbols")) a.symbols = *symbols;
    if (auto sectors = b.strings("sectors")) {
        a.sector_map.clear();
        for (const auto& s : *sectors) {
            a.sector_map.push_back(
                rethrow_as_config(b.key_path("sectors"), [&] { return market::sector_from_string(s); }));
        }
    }
    b.number("intra_tech_corr", a.intra_tech_corr);
    b.number("intra_bank_corr", a.intra_bank_corr);
    b.number("cross_corr", a.cross_corr);
    b.number("per_period_vol", a.per_period_vol);
    b.number("drift", a.drift);
    b.finish();
}

void read_agents(Block b, agents::AgentPopulationSpec& p)
{
    Block counts = b.child("counts");
    Block ranges = b.child("risk_aversion");
    Block horizons = b.child("horizons");
    for (std::size_t k = 0; k < 4; ++k) {
        counts.count(kKindNames[k], p.counts[k]);
        horizons.count(kKindNames[k], p.horizons[k]);
        if (auto r = ranges.numbers(kKindNames[k])) {
            if (r->size() != 2) throw ConfigError(ranges.key_path(kKindNames[k]) + ": expected [lo, hi]");
            p.risk_aversion[k] = {(*r)[0], (*r)[1]};
        }
    }
    counts.finish();
    ranges.finish();
    horizons.finish();
    b.finish();
}

void read_policy(Block b, sim::PolicyConfig& p)
{
    b.number("comm_tax", p.comm_tax);
    if (const json* v = b.find("position_limit")) {
        if (v->is_null()) {
            p.position_limit = std::numeric_limits<double>::infinity();
        } else if (v->is_number()) {
            p.position_limit = v->get<double>();
        } else {
            throw ConfigError(b.key_path("position_limit") + ": expected a number or null");
        }
    }
    Block cb = b.child("circuit_breaker");
    cb.number("threshold", p.breaker.threshold);
    cb.count("halt_ticks", p.breaker.halt_ticks);
    cb.finish();
    b.finish();
}

void read_engine(Block b, sim::EngineParams& e)
{
    b.number("impact", e.impact);
    b.number("initial_cash", e.initial_cash);
    b.number("comm_alpha", e.comm_alpha);
    b.number("initial_comm_weight", e.initial_comm_weight);
    b.number("trust_decay", e.trust_decay);
    b.count("performance_window", e.performance_window);
    b.number("hft_order_size", e.hft_order_size);
    b.number("hft_noise", e.hft_noise);
    b.number("mm_absorption", e.mm_absorption);
    b.number("mm_gamma_scale", e.mm_gamma_scale);
    b.number("mm_delta", e.mm_delta);
    b.number("mm_eta", e.mm_eta);
    b.count("mm_flow_window", e.mm_flow_window);
    b.count("ii_window", e.ii_window);
    b.number("ii_shrinkage", e.ii_shrinkage);
    b.number("ii_gamma_scale", e.ii_gamma_scale);
    b.number("ii_kappa", e.ii_kappa);
    b.number("ii_notional", e.ii_notional);
    b.count("reg_window", e.reg_window);
    b.number("reg_trigger", e.reg_trigger);
    b.number("reg_raise", e.reg_raise);
    b.number("reg_decay", e.reg_decay);
    b.number("reg_alpha", e.reg_alpha);
    b.number("reg_beta", e.reg_beta);
    b.number("base_depth", e.base_depth);
    b.number("base_volume", e.base_volume);
    b.number("volume_log_sd", e.volume_log_sd);
    b.finish();
}

void read_estimator(Block b, AnalysisConfig& a)
{
    b.number("omega0", a.wavelet.omega0);
    if (auto scales = b.numbers("scales")) a.wavelet.scales = *scales;
    std::string boundary = boundary_name(a.wavelet.boundary);
    b.text("boundary", boundary);
    if (boundary == "reflect") {
        a.wavelet.boundary = wavelet::Boundary::reflect;
    } else if (boundary == "zero_pad") {
        a.wavelet.boundary = wavelet::Boundary::zero_pad;
    } else {
        throw ConfigError(b.key_path("boundary") + ": expected reflect or zero_pad");
    }
    b.count("history_length", a.te.history_length);
    b.number("quantile", a.te.quantile);
    std::string bandwidth = bandwidth_name(a.te.kde.mode);
    b.text("bandwidth", bandwidth);
    if (bandwidth == "silverman") {
        a.te.kde.mode = entropy::BandwidthMode::silverman;
    } else if (bandwidth == "cross_validation") {
        a.te.kde.mode = entropy::BandwidthMode::cross_validation;
    } else if (bandwidth == "fixed") {
        a.te.kde.mode = entropy::BandwidthMode::fixed;
    } else {
        throw ConfigError(b.key_path("bandwidth") + ": expected silverman, cross_validation or fixed");
    }
    b.number("fixed_bandwidth", a.te.kde.fixed_h);
    if (auto grid = b.numbers("cv_grid")) a.te.kde.cv_grid = *grid;
    std::string estimator = a.te.estimator == entropy::TeEstimator::kde ? "kde" : "binned";
    b.text("estimator", estimator);
    if (estimator == "kde") {
        a.te.estimator = entropy::TeEstimator::kde;
    } else if (estimator == "binned") {
        a.te.estimator = entropy::TeEstimator::binned;
    } else {
        throw ConfigError(b.key_path("estimator") + ": expected kde or binned");
    }
    b.count("bins", a.te.n_bins);
    b.count("surrogates", a.te.n_surrogates);
    b.number("surrogate_alpha", a.te.surrogate_alpha);
    b.finish();
}

void read_sri(Block b, SriConfig& s)
{
    std::string mode = sri::to_string(s.mode);
    b.text("mode", mode);
    s.mode = rethrow_as_config(b.key_path("mode"), [&] { return sri::sri_mode_from_string(mode); });
    if (const json* w = b.find("weights")) {
        if (w->is_null()) {
            s.weights.reset();
        } else {
            if (!w->is_object()) throw ConfigError(b.key_path("weights") + ": expected an object or null");
            sri::SriWeights weights;
            for (const auto& item : w->items()) {
                const auto kind = rethrow_as_config(b.key_path("weights"),
                                                    [&] { return sri::component_from_string(item.key()); });
                if (!item.value().is_number()) {
                    throw ConfigError(b.key_path("weights") + "." + item.key() + ": expected a number");
                }
                weights.entries.emplace_back(kind, item.value().get<double>());
            }
            s.weights = weights;
        }
    }
    if (auto lw = b.numbers("liquidity_weights")) {
        if (lw->size() != 3) throw ConfigError(b.key_path("liquidity_weights") + ": expected three numbers");
        s.liquidity = {(*lw)[0], (*lw)[1], (*lw)[2]};
    }
    b.finish();
}

ordered_json double_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

void Scenario::set_seed(std::uint64_t value)
{
    seed = value;
    sim.assets.seed = value;
    analysis.te.surrogate_seed = value;
}

void Scenario::validate() const
{
    sim.validate();
    rethrow_as_config("estimator", [&] {
        analysis.wavelet.validate();
        analysis.te.validate();
        return 0;
    });
    rethrow_as_config("sri", [&] {
        const auto& l = sri.liquidity;
        require(l.spread >= 0.0 && l.depth >= 0.0 && l.impact >= 0.0 &&
                    std::abs(l.spread + l.depth + l.impact - 1.0) <= 1e-9,
                "liquidity_weights must be nonnegative and sum to 1");
        if (sri.weights) {
            sri.weights->validate();
            const auto kinds = sri::mode_components(sri.mode);
            require(sri.weights->entries.size() == kinds.size(), "weights do not match the components of the mode");
            for (auto k : kinds) require(sri.weights->get(k).has_value(), "no weight for " + sri::to_string(k));
        }
        return 0;
    });
}

ordered_json to_json(const sim::PolicyConfig& p)
{
    return {{"comm_tax", p.comm_tax},
            {"position_limit", double_or_null(p.position_limit)},
            {"circuit_breaker", {{"threshold", p.breaker.threshold}, {"halt_ticks", p.breaker.halt_ticks}}}};
}

ordered_json to_json(const sim::SimConfig& c)
{
    ordered_json out;
    const auto& a = c.assets;
    std::vector<std::string> sectors;
    std::vector<std::string> symbols;
    for (const auto& meta : a.assets()) {
        symbols.push_back(meta.symbol);
        sectors.push_back(market::to_string(meta.sector));
    }
    out["assets"] = {{"n_assets", a.n_assets},         {"n_periods", a.n_periods},
                     {"symbols", symbols},             {"sectors", sectors},
                     {"intra_tech_corr", a.intra_tech_corr}, {"intra_bank_corr", a.intra_bank_corr},
                     {"cross_corr", a.cross_corr},     {"per_period_vol", a.per_period_vol},
                     {"drift", a.drift}};
    ordered_json counts, ranges, horizons;
    for (std::size_t k = 0; k < 4; ++k) {
        counts[kKindNames[k]] = c.population.counts[k];
        ranges[kKindNames[k]] = {c.population.risk_aversion[k].lo, c.population.risk_aversion[k].hi};
        horizons[kKindNames[k]] = c.population.horizons[k];
    }
    out["agents"] = {{"counts", counts}, {"risk_aversion", ranges}, {"horizons", horizons}};
    out["policy"] = to_json(c.policy);
    const auto& e = c.engine;
    out["engine"] = {{"impact", e.impact},
                     {"initial_cash", e.initial_cash},
                     {"comm_alpha", e.comm_alpha},
                     {"initial_comm_weight", e.initial_comm_weight},
                     {"trust_decay", e.trust_decay},
                     {"performance_window", e.performance_window},
                     {"hft_order_size", e.hft_order_size},
                     {"hft_noise", e.hft_noise},
                     {"mm_absorption", e.mm_absorption},
                     {"mm_gamma_scale", e.mm_gamma_scale},
                     {"mm_delta", e.mm_delta},
                     {"mm_eta", e.mm_eta},
                     {"mm_flow_window", e.mm_flow_window},
                     {"ii_window", e.ii_window},
                     {"ii_shrinkage", e.ii_shrinkage},
                     {"ii_gamma_scale", e.ii_gamma_scale},
                     {"ii_kappa", e.ii_kappa},
                     {"ii_notional", e.ii_notional},
                     {"reg_window", e.reg_window},
                     {"reg_trigger", e.reg_trigger},
                     {"reg_raise", e.reg_raise},
                     {"reg_decay", e.reg_decay},
                     {"reg_alpha", e.reg_alpha},
                     {"reg_beta", e.reg_beta},
                     {"base_depth", e.base_depth},
                     {"base_volume", e.base_volume},
                     {"volume_log_sd", e.volume_log_sd}};
    return out;
}

ordered_json to_json(const Scenario& s)
{
    ordered_json out;
    out["version"] = kConfigVersion;
    out["seed"] = s.seed;
    const ordered_json sim_blocks = to_json(s.sim);
    for (const auto& item : sim_blocks.items()) out[item.key()] = item.value();
    const auto& w = s.analysis.wavelet;
    const auto& te = s.analysis.te;
    out["estimator"] = {{"omega0", w.omega0},
                        {"scales", w.scales},
                        {"boundary", boundary_name(w.boundary)},
                        {"history_length", te.history_length},
                        {"quantile", te.quantile},
                        {"bandwidth", bandwidth_name(te.kde.mode)},
                        {"fixed_bandwidth", te.kde.fixed_h},
                        {"cv_grid", te.kde.cv_grid},
                        {"estimator", te.estimator == entropy::TeEstimator::kde ? "kde" : "binned"},
                        {"bins", te.n_bins},
                        {"surrogates", te.n_surrogates},
                        {"surrogate_alpha", te.surrogate_alpha}};
    ordered_json weights = nullptr;
    if (s.sri.weights) {
        weights = ordered_json::object();
        for (const auto& [k, v] : s.sri.weights->entries) weights[sri::to_string(k)] = v;
    }
    out["sri"] = {{"mode", sri::to_string(s.sri.mode)},
                  {"weights", weights},
                  {"liquidity_weights", {s.sri.liquidity.spread, s.sri.liquidity.depth, s.sri.liquidity.impact}}};
    return out;
}

Scenario scenario_from_json(const json& doc)
{
    Scenario s;
    Block root(&doc, "");
    if (const json* v = root.find("version")) {
        if (!v->is_number_integer() || v->get<int>() != kConfigVersion) {
            throw ConfigError("version: unsupported config version");
        }
    }
    std::uint64_t seed = s.seed;
    if (const json* v = root.find("seed")) seed = Block::as_count(*v, "seed");
    read_assets(root.child("assets"), s.sim.assets);
    read_agents(root.child("agents"), s.sim.population);
    read_policy(root.child("policy"), s.sim.policy);
    read_engine(root.child("engine"), s.sim.engine);
    read_estimator(root.child("estimator"), s.analysis);
    read_sri(root.child("sri"), s.sri);
    root.finish();
    s.set_seed(seed);
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
    }
    return scenario_from_json(doc);
}

std::string default_config_dump()
{
    Scenario s;
    s.set_seed(s.seed);
    return to_json(s).dump(2);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const char* first = item.data();
        const char* last = item.data() + item.size();
        while (first < last && *first == ' ') ++first;
        while (last > first && last[-1] == ' ') --last;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || first == last) {
            throw ConfigError(key + ": '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

sim::CircuitBreaker parse_breaker(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("--breaker: expected THRESHOLD:TICKS");
    const auto threshold = parse_number_list(text.substr(0, colon), "--breaker");
    const auto ticks = parse_number_list(text.substr(colon + 1), "--breaker");
    if (threshold.size() != 1 || ticks.size() != 1 || ticks[0] < 0 || std::floor(ticks[0]) != ticks[0]) {
        throw ConfigError("--breaker: expected THRESHOLD:TICKS");
    }
    return {threshold[0], static_cast<std::size_t>(ticks[0])};
}

}  // namespace sysrisk::config
