#include "sysrisk/cli.hpp"

#include "sysrisk/config.hpp"
#include "sysrisk/digest.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef SYSRISK_VERSION
#define SYSRISK_VERSION "0.0.0"
#endif

namespace sysrisk::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::optional<std::string> scales;
    std::optional<double> quantile;
    std::optional<std::string> mode;
    std::optional<double> comm_tax;
    std::optional<double> position_limit;
    std::optional<std::string> breaker;
    std::optional<std::string> components;
    std::optional<std::string> weights;
    std::string input;
    std::string analysis;
    std::string sri_dir;
    std::string layout = "returns";
    bool dump = false;
};

/// Collects outputs and warnings; written last, via rename, so a manifest
/// only exists once every file it names does.
class RunManifest {
public:
    RunManifest(std::string command, fs::path out) : command_(std::move(command)), out_(std::move(out))
    {
        start_ = std::chrono::steady_clock::now();
    }

    void prepare_out_dir()
    {
        if (!fs::exists(out_)) {
            fs::create_directories(out_);
            warn("output directory " + out_.string() + " did not exist and was created");
        }
    }

    void warn(const std::string& message)
    {
        spdlog::warn("{}", message);
        warnings_.push_back(message);
    }

    void output(const fs::path& path) { outputs_.push_back(path); }
    void outputs(const std::vector<fs::path>& paths) { outputs_.insert(outputs_.end(), paths.begin(), paths.end()); }
    void input(const fs::path& path) { inputs_.push_back(path); }
    ordered_json& extra() { return extra_; }

    void write(const config::Scenario& scenario)
    {
        ordered_json m;
        m["command"] = command_;
        m["tool_version"] = SYSRISK_VERSION;
        m["seed"] = scenario.seed;
        m["config"] = config::to_json(scenario);
        auto& in = m["inputs"] = ordered_json::array();
        for (const auto& p : inputs_) in.push_back(p.string());
        auto& out = m["outputs"] = ordered_json::array();
        std::string combined;
        for (const auto& p : outputs_) {
            const std::string digest = sha256_file(p);
            combined += p.filename().string() + ":" + digest + "\n";
            out.push_back({{"path", p.string()}, {"sha256", digest}});
        }
        m["content_hash"] = sha256_hex(combined);
        for (const auto& item : extra_.items()) m[item.key()] = item.value();
        m["warnings"] = warnings_;
        m["duration_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const fs::path tmp = out_ / "run_manifest.json.tmp";
        {
            std::ofstream f(tmp, std::ios::binary);
            if (!f) throw Error("cannot write " + tmp.string());
            f << m.dump(2) << '\n';
        }
        fs::rename(tmp, out_ / "run_manifest.json");
    }

private:
    std::string command_;
    fs::path out_;
    std::chrono::steady_clock::time_point start_;
    std::vector<fs::path> inputs_;
    std::vector<fs::path> outputs_;
    std::vector<std::string> warnings_;
    ordered_json extra_ = ordered_json::object();
};

void configure_logging()
{
    auto logger = spdlog::stderr_color_st("sysrisk");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SYSRISK_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("SYSRISK_LOG='{}' not recognised; using warn", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

config::Scenario load(const Options& o)
{
    config::Scenario s = o.config_path.empty() ? config::Scenario{} : config::load_scenario(o.config_path);
    s.set_seed(o.seed.value_or(s.seed));
    if (o.scales) s.analysis.wavelet.scales = config::parse_number_list(*o.scales, "--scales");
    if (o.quantile) s.analysis.te.quantile = *o.quantile;
    if (o.mode) {
        try {
            s.sri.mode = sri::sri_mode_from_string(*o.mode);
        } catch (const ValidationError& e) {
            throw ConfigError(std::string("--mode: ") + e.what());
        }
        if (s.sri.weights && !o.weights) s.sri.weights.reset();
    }
    if (o.comm_tax) s.sim.policy.comm_tax = *o.comm_tax;
    if (o.position_limit) s.sim.policy.position_limit = *o.position_limit;
    if (o.breaker) s.sim.policy.breaker = config::parse_breaker(*o.breaker);
    if (o.weights) {
        const auto values = config::parse_number_list(*o.weights, "--weights");
        const auto kinds = sri::mode_components(s.sri.mode);
        if (values.size() != kinds.size()) {
            throw ConfigError("--weights: mode " + sri::to_string(s.sri.mode) + " has " +
                              std::to_string(kinds.size()) + " components, got " + std::to_string(values.size()));
        }
        sri::SriWeights w;
        for (std::size_t i = 0; i < kinds.size(); ++i) w.entries.emplace_back(kinds[i], values[i]);
        s.sri.weights = w;
    }
    s.validate();
    return s;
}

ordered_json overrides_json(const Options& o)
{
    ordered_json j = ordered_json::object();
    if (o.seed) j["seed"] = *o.seed;
    if (o.scales) j["scales"] = *o.scales;
    if (o.quantile) j["quantile"] = *o.quantile;
    if (o.mode) j["mode"] = *o.mode;
    if (o.comm_tax) j["comm_tax"] = *o.comm_tax;
    if (o.position_limit) j["position_limit"] = *o.position_limit;
    if (o.breaker) j["breaker"] = *o.breaker;
    if (o.components) j["components"] = *o.components;
    if (o.weights) j["weights"] = *o.weights;
    return j;
}

market::CsvLayout parse_layout(const std::string& name)
{
    if (name == "returns") return market::CsvLayout::returns;
    if (name == "prices") return market::CsvLayout::prices;
    throw ConfigError("--layout: expected returns or prices");
}

/// A panel CSV, or a directory holding panel.csv (generate/simulate output).
fs::path resolve_panel(const std::string& input)
{
    if (input.empty()) throw ConfigError("--input: a panel file or record directory is required");
    fs::path p(input);
    if (fs::is_directory(p)) p /= "panel.csv";
    if (!fs::exists(p)) throw ParseError("input panel " + p.string() + " does not exist");
    return p;
}

std::string scale_label(double scale) { return format_double(scale); }

std::vector<std::string> symbols_of(const market::ReturnPanel& panel)
{
    std::vector<std::string> out;
    for (const auto& a : panel.assets) out.push_back(a.symbol);
    return out;
}

Eigen::MatrixXd adjacency_to_double(const entropy::Adjacency& a) { return a.cast<double>(); }

std::vector<entropy::TENetwork> build_networks(const market::ReturnPanel& panel, const config::Scenario& s,
                                               RunManifest& manifest, wavelet::ScaleDecomposition* keep = nullptr)
{
    wavelet::ScaleDecomposition dec = wavelet::decompose_panel(panel, s.analysis.wavelet);
    for (const auto& w : dec.warnings) manifest.warn(w);
    std::vector<entropy::TENetwork> networks;
    for (std::size_t k = 0; k < dec.n_scales(); ++k) {
        const double scale = dec.params.scales[k];
        spdlog::info("transfer entropy at scale {}", scale);
        const entropy::TeMatrix te = entropy::te_matrix(dec, k, s.analysis.te);
        if (te.degenerate_pairs > 0) {
            manifest.warn("scale " + scale_label(scale) + ": " + std::to_string(te.degenerate_pairs) +
                          " pairs with a zero-spread series");
        }
        if (te.clamp_events > 0) {
            spdlog::info("scale {}: {} negative estimates clamped to 0", scale, te.clamp_events);
        }
        networks.push_back(entropy::threshold_adjacency(te.te, s.analysis.te.quantile, scale));
    }
    if (keep != nullptr) *keep = std::move(dec);
    return networks;
}

std::vector<entropy::TENetwork> load_networks(const fs::path& dir)
{
    std::ifstream in(dir / "analysis.json");
    if (!in) throw ParseError("analysis directory " + dir.string() + " has no analysis.json");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError("analysis.json: " + std::string(e.what()));
    }
    std::vector<entropy::TENetwork> out;
    for (const auto& entry : doc.at("scales")) {
        entropy::TENetwork net;
        net.scale = entry.at("scale").get<double>();
        net.threshold = entry.at("threshold").get<double>();
        const std::string label = scale_label(net.scale);
        net.te = market::read_matrix_csv(dir / ("te_s" + label + ".csv"));
        net.adjacency = market::read_matrix_csv(dir / ("adjacency_s" + label + ".csv")).cast<int>();
        net.stats = entropy::network_stats(net.adjacency);
        out.push_back(std::move(net));
    }
    if (out.empty()) throw ParseError("analysis.json lists no scales");
    return out;
}

/// Final-tick wealth per agent from a simulation record, if present.
std::vector<double> record_wealth(const std::string& input)
{
    const fs::path path = fs::path(input) / "agents.csv";
    if (input.empty() || !fs::is_directory(input) || !fs::exists(path)) return {};
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<std::uint64_t, double>> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string tick, agent, kind, cash, wealth;
        std::getline(ss, tick, ',');
        std::getline(ss, agent, ',');
        std::getline(ss, kind, ',');
        std::getline(ss, cash, ',');
        std::getline(ss, wealth, ',');
        try {
            rows.emplace_back(std::stoull(tick), std::stod(wealth));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": malformed row '" + line + "'");
        }
    }
    if (rows.empty()) return {};
    const std::uint64_t last = rows.back().first;
    std::vector<double> out;
    for (const auto& [t, w] : rows)
        if (t == last) out.push_back(std::max(w, 0.0));
    return out;
}

int cmd_config(const Options& o)
{
    if (!o.dump) throw ConfigError("config: nothing to do (use --dump)");
    if (o.config_path.empty() && !o.seed) {
        std::cout << config::default_config_dump() << '\n';
    } else {
        std::cout << config::to_json(load(o)).dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_generate(const Options& o)
{
    const config::Scenario s = load(o);
    RunManifest manifest("generate", o.out);
    manifest.prepare_out_dir();
    if (!o.config_path.empty()) manifest.input(o.config_path);
    const market::ReturnPanel panel = market::generate_synthetic(s.sim.assets);
    manifest.outputs(market::export_panel_csv(panel, fs::path(o.out) / "panel.csv"));
    manifest.extra()["overrides"] = overrides_json(o);
    manifest.extra()["shape"] = {panel.periods(), panel.n_assets()};
    manifest.write(s);
    spdlog::info("wrote {}x{} panel to {}", panel.periods(), panel.n_assets(), o.out);
    return kExitOk;
}

int cmd_simulate(const Options& o)
{
    const config::Scenario s = load(o);
    RunManifest manifest("simulate", o.out);
    manifest.prepare_out_dir();
    if (!o.config_path.empty()) manifest.input(o.config_path);
    const sim::SimulationRecord rec = sim::run_simulation(s.sim, s.seed);
    manifest.outputs(sim::write_record(rec, o.out));
    manifest.extra()["overrides"] = overrides_json(o);
    manifest.extra()["policy"] = config::to_json(s.sim.policy);
    manifest.extra()["exogenous_hash"] = rec.exogenous_hash;
    manifest.extra()["delivered_messages"] = rec.delivered_messages();
    manifest.extra()["tax_sink_balance"] = rec.tax_sink_balance();
    manifest.write(s);
    return kExitOk;
}

int cmd_analyze(const Options& o)
{
    const config::Scenario s = load(o);
    const fs::path panel_path = resolve_panel(o.input);
    const market::ReturnPanel panel = market::load_panel_csv(panel_path, parse_layout(o.layout));
    RunManifest manifest("analyze", o.out);
    manifest.prepare_out_dir();
    manifest.input(panel_path);
    for (const auto& f : panel.flags) manifest.warn("panel: " + f);
    const fs::path out(o.out);
    const auto symbols = symbols_of(panel);

    wavelet::ScaleDecomposition dec;
    const auto networks = build_networks(panel, s, manifest, &dec);
    manifest.outputs(wavelet::export_real_bands(dec, symbols, out));

    const auto& names = entropy::network_stats_columns();
    Eigen::MatrixXd stats(static_cast<Eigen::Index>(networks.size()), static_cast<Eigen::Index>(names.size()));
    std::vector<std::string> stat_rows;
    ordered_json scales = ordered_json::array();
    for (std::size_t k = 0; k < networks.size(); ++k) {
        const auto& net = networks[k];
        const std::string label = scale_label(net.scale);
        const fs::path te_path = out / ("te_s" + label + ".csv");
        const fs::path adj_path = out / ("adjacency_s" + label + ".csv");
        const fs::path edge_path = out / ("edges_s" + label + ".csv");
        market::write_matrix_csv(te_path, symbols, net.te, symbols, "source");
        market::write_matrix_csv(adj_path, symbols, adjacency_to_double(net.adjacency), symbols, "source");
        entropy::write_edge_list(edge_path, net, symbols);
        manifest.outputs({te_path, adj_path, edge_path});
        const auto r = static_cast<Eigen::Index>(k);
        stats(r, 0) = net.stats.density;
        stats(r, 1) = net.stats.transitivity;
        stats(r, 2) = net.stats.avg_degree;
        stats(r, 3) = static_cast<double>(net.stats.n_edges);
        stats(r, 4) = static_cast<double>(net.stats.n_nodes);
        stat_rows.push_back(label);
        scales.push_back({{"scale", net.scale}, {"threshold", net.threshold}, {"edges", net.stats.n_edges}});
    }
    const fs::path stats_path = out / "network_stats.csv";
    market::write_matrix_csv(stats_path, names, stats, stat_rows, "scale");
    manifest.output(stats_path);

    const fs::path corr_path = out / "correlation.csv";
    Eigen::MatrixXd corr = market::sample_correlation(panel.returns);
    for (Eigen::Index i = 0; i < corr.rows(); ++i)
        for (Eigen::Index j = 0; j < corr.cols(); ++j)
            if (!std::isfinite(corr(i, j))) corr(i, j) = i == j ? 1.0 : 0.0;
    market::write_matrix_csv(corr_path, symbols, corr, symbols, "source");
    manifest.output(corr_path);

    const fs::path summary = out / "analysis.json";
    {
        ordered_json j;
        j["panel"] = panel_path.string();
        j["quantile"] = s.analysis.te.quantile;
        j["scales"] = scales;
        std::ofstream f(summary, std::ios::binary);
        f << j.dump(2) << '\n';
    }
    manifest.output(summary);
    manifest.extra()["overrides"] = overrides_json(o);
    manifest.write(s);
    return kExitOk;
}

int cmd_sri(const Options& o)
{
    const config::Scenario s = load(o);
    RunManifest manifest("sri", o.out);
    manifest.prepare_out_dir();
    const auto kinds = sri::mode_components(s.sri.mode);
    const sri::SriWeights weights = s.sri.weights.value_or(sri::default_weights(s.sri.mode));

    sri::RiskComponents components;
    if (o.components) {
        const auto values = config::parse_number_list(*o.components, "--components");
        if (values.size() != kinds.size()) {
            throw ConfigError("--components: mode " + sri::to_string(s.sri.mode) + " has " +
                              std::to_string(kinds.size()) + " components, got " + std::to_string(values.size()));
        }
        for (std::size_t i = 0; i < kinds.size(); ++i) components.set(kinds[i], values[i], "injected");
    } else {
        const fs::path panel_path = resolve_panel(o.input);
        manifest.input(panel_path);
        const market::ReturnPanel panel = market::load_panel_csv(panel_path, parse_layout(o.layout));
        std::vector<entropy::TENetwork> networks;
        if (!o.analysis.empty()) {
            manifest.input(o.analysis);
            networks = load_networks(o.analysis);
        } else {
            networks = build_networks(panel, s, manifest);
        }
        const std::vector<double> wealth = record_wealth(o.input);
        components = sri::compute_components(panel, networks, wealth, {s.sri.mode, s.sri.liquidity});
    }
    for (const auto& f : components.flags) manifest.warn(f);
    const sri::RiskReport report = sri::aggregate_sri(components, weights);
    const fs::path json_path = fs::path(o.out) / "sri.json";
    const fs::path csv_path = fs::path(o.out) / "sri.csv";
    sri::write_report_json(json_path, report, s.sri.mode);
    sri::write_report_csv(csv_path, report);
    manifest.outputs({json_path, csv_path});
    manifest.extra()["overrides"] = overrides_json(o);
    manifest.extra()["sri"] = report.total;
    manifest.write(s);
    std::cout << std::fixed << std::setprecision(3) << "SRI " << report.total << '\n';
    return kExitOk;
}

/// Per-scale network metrics and the SRI decomposition at 3-decimal
/// precision plus a JSON summary, from prior analyze and sri outputs.
int cmd_report(const Options& o)
{
    const config::Scenario s = load(o);
    if (o.analysis.empty() || o.sri_dir.empty()) throw ConfigError("report: --analysis and --sri are required");
    RunManifest manifest("report", o.out);
    manifest.prepare_out_dir();
    manifest.input(o.analysis);
    manifest.input(o.sri_dir);
    const auto networks = load_networks(o.analysis);

    const fs::path t1 = fs::path(o.out) / "network_summary.csv";
    {
        std::ofstream f(t1, std::ios::binary);
        f << "Metric";
        for (const auto& n : networks) f << ",Scale " << scale_label(n.scale);
        f << '\n' << std::fixed;
        const auto& names = entropy::network_stats_columns();
        for (std::size_t m = 0; m < 3; ++m) {
            f << names[m];
            for (const auto& n : networks) {
                const double v = m == 0 ? n.stats.density : (m == 1 ? n.stats.transitivity : n.stats.avg_degree);
                f << ',' << std::setprecision(3) << v;
            }
            f << '\n';
        }
        f << names[3];
        for (const auto& n : networks) f << ',' << n.stats.n_edges;
        f << '\n' << names[4];
        for (const auto& n : networks) f << ',' << n.stats.n_nodes;
        f << '\n';
    }
    std::ifstream in(fs::path(o.sri_dir) / "sri.json");
    if (!in) throw ParseError("sri directory " + o.sri_dir + " has no sri.json");
    json report;
    try {
        in >> report;
    } catch (const json::parse_error& e) {
        throw ParseError("sri.json: " + std::string(e.what()));
    }
    const fs::path t2 = fs::path(o.out) / "risk_decomposition.csv";
    {
        std::ofstream f(t2, std::ios::binary);
        f << "Component,Value,Weight,Contribution,Percentage\n" << std::fixed;
        for (const auto& row : report.at("components")) {
            f << row.at("label").get<std::string>() << ',' << std::setprecision(3) << row.at("value").get<double>()
              << ',' << std::setprecision(2) << row.at("weight").get<double>() << ',' << std::setprecision(3)
              << row.at("contribution").get<double>() << ',' << std::setprecision(1)
              << row.at("percentage").get<double>() << "%\n";
        }
        f << "Total SRI," << std::setprecision(3) << report.at("sri").get<double>() << ",1.00,"
          << report.at("sri").get<double>() << ",100.0%\n";
    }
    const fs::path summary = fs::path(o.out) / "summary.json";
    {
        ordered_json j;
        j["sri"] = report.at("sri");
        j["mode"] = report.at("mode");
        auto& nets = j["networks"] = ordered_json::array();
        for (const auto& n : networks) {
            nets.push_back({{"scale", n.scale},
                            {"density", n.stats.density},
                            {"transitivity", n.stats.transitivity},
                            {"avg_degree", n.stats.avg_degree},
                            {"edges", n.stats.n_edges}});
        }
        std::ofstream f(summary, std::ios::binary);
        f << j.dump(2) << '\n';
    }
    manifest.outputs({t1, t2, summary});
    manifest.write(s);
    return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitConfig;
    if (dynamic_cast<const CLI::Error*>(&e) != nullptr) return kExitConfig;
    if (dynamic_cast<const NumericalError*>(&e) != nullptr) return kExitNumerical;
    if (dynamic_cast<const ParseError*>(&e) != nullptr) return kExitInput;
    if (dynamic_cast<const ValidationError*>(&e) != nullptr) return kExitInput;
    if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return kExitInput;
    return kExitOther;
}

int run(int argc, const char* const* argv)
{
    configure_logging();
    CLI::App app{"Multi-scale systemic risk laboratory", "sysrisk"};
    app.set_version_flag("--version", SYSRISK_VERSION);
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--out", o.out, "Output directory");
    };
    auto analysis_flags = [&](CLI::App* sub) {
        sub->add_option("--input,-i", o.input, "Panel CSV or record directory");
        sub->add_option("--layout", o.layout, "Panel CSV layout: returns or prices");
        sub->add_option("--scales", o.scales, "Comma-separated wavelet scales");
        sub->add_option("--quantile", o.quantile, "Edge threshold quantile");
    };

    CLI::App* generate = app.add_subcommand("generate", "Write a synthetic panel");
    common(generate);
    CLI::App* simulate = app.add_subcommand("simulate", "Run the agent simulation");
    common(simulate);
    simulate->add_option("--comm-tax", o.comm_tax, "Tax per delivered message");
    simulate->add_option("--position-limit", o.position_limit, "Max |inventory| per agent and asset");
    simulate->add_option("--breaker", o.breaker, "Circuit breaker THRESHOLD:TICKS");
    CLI::App* analyze = app.add_subcommand("analyze", "Wavelet and transfer-entropy networks");
    common(analyze);
    analysis_flags(analyze);
    CLI::App* sri_cmd = app.add_subcommand("sri", "Systemic risk index");
    common(sri_cmd);
    analysis_flags(sri_cmd);
    sri_cmd->add_option("--analysis", o.analysis, "Directory written by analyze");
    sri_cmd->add_option("--mode", o.mode, "methodology or empirical_compat");
    sri_cmd->add_option("--components", o.components, "Component values in mode order");
    sri_cmd->add_option("--weights", o.weights, "Weights in mode order");
    CLI::App* report = app.add_subcommand("report", "Tables from analyze and sri outputs");
    common(report);
    report->add_option("--analysis", o.analysis, "Directory written by analyze")->required();
    report->add_option("--sri", o.sri_dir, "Directory written by sri")->required();
    CLI::App* config_cmd = app.add_subcommand("config", "Show the effective configuration");
    config_cmd->add_flag("--dump", o.dump, "Print the configuration as JSON");
    config_cmd->add_option("--config", o.config_path, "Scenario JSON file")->check(CLI::ExistingFile);
    config_cmd->add_option("--seed", o.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(o);
        if (simulate->parsed()) return cmd_simulate(o);
        if (analyze->parsed()) return cmd_analyze(o);
        if (sri_cmd->parsed()) return cmd_sri(o);
        if (report->parsed()) return cmd_report(o);
        if (config_cmd->parsed()) return cmd_config(o);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_code_for(e);
    }
    return kExitOther;
}

}  // namespace sysrisk::cli
