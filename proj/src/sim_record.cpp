#include "sysrisk/config.hpp"
#include "sysrisk/digest.hpp"
#include "sysrisk/sim_engine.hpp"

#include <fstream>

namespace sysrisk::sim {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

std::vector<fs::path> write_record(const SimulationRecord& rec, const fs::path& dir)
{
    fs::create_directories(dir);
    std::vector<fs::path> files = market::export_panel_csv(rec.panel, dir / "panel.csv");
    const auto n = rec.panel.n_assets();

    {
        const fs::path path = dir / "agents.csv";
        auto out = open_out(path);
        out << "tick,agent,kind,cash,wealth";
        for (const auto& a : rec.panel.assets) out << ",inv_" << a.symbol;
        out << '\n';
        for (const auto& s : rec.snapshots) {
            out << s.tick << ',' << s.id << ',' << agents::to_string(rec.agent_kinds[s.id]) << ','
                << format_double(s.cash) << ',' << format_double(s.wealth);
            for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_double(s.inventory(k));
            out << '\n';
        }
        files.push_back(path);
    }
    {
        const fs::path path = dir / "ticks.csv";
        auto out = open_out(path);
        out << "tick,halted,fills,trade_cash,delivered,tax,monitor_sri,reg_utility,pi_comm_tax,pi_position_limit,"
               "pi_circuit_breaker\n";
        for (const auto& t : rec.ticks) {
            auto pi = [&](agents::Policy p) {
                const auto it = t.intensities.find(p);
                return format_double(it == t.intensities.end() ? 0.0 : it->second);
            };
            out << t.tick << ',' << (t.halted ? 1 : 0) << ',' << t.fills << ',' << format_double(t.trade_cash) << ','
                << t.delivered << ',' << format_double(t.tax) << ',' << format_double(t.monitor_sri) << ','
                << format_double(t.reg_utility) << ',' << pi(agents::Policy::comm_tax) << ','
                << pi(agents::Policy::position_limit) << ',' << pi(agents::Policy::circuit_breaker) << '\n';
        }
        files.push_back(path);
    }
    {
        const fs::path path = dir / "messages.log";
        auto out = open_out(path);
        out << "tick,sender,receiver,kind,delivered,asset,value\n";
        for (const auto& m : rec.messages) {
            out << m.tick << ',' << m.sender << ',' << m.receiver << ',' << agents::to_string(m.kind) << ','
                << (m.delivered ? 1 : 0) << ',' << m.asset << ',' << format_double(m.value) << '\n';
        }
        files.push_back(path);
    }
    {
        const fs::path path = dir / "policy_events.csv";
        auto out = open_out(path);
        out << "tick,kind,policy,value\n";
        for (const auto& e : rec.events) {
            out << e.tick << ',' << e.kind << ',' << e.policy << ',' << format_double(e.value) << '\n';
        }
        files.push_back(path);
    }
    {
        const fs::path path = dir / "exogenous.csv";
        std::vector<std::string> columns;
        for (const auto& a : rec.panel.assets) columns.push_back(a.symbol);
        market::write_matrix_csv(path, columns, rec.exogenous);
        files.push_back(path);
    }

    nlohmann::ordered_json manifest;
    manifest["seed"] = rec.seed;
    manifest["config"] = config::to_json(rec.config);
    manifest["n_ticks"] = rec.panel.periods();
    manifest["n_assets"] = n;
    manifest["n_agents"] = rec.agent_kinds.size();
    manifest["exogenous_hash"] = rec.exogenous_hash;
    manifest["delivered_messages"] = rec.delivered_messages();
    auto& sink = manifest["tax_sink"] = nlohmann::ordered_json::array();
    for (const auto& [rate, count] : rec.tax_sink) sink.push_back({{"rate", rate}, {"count", count}});
    manifest["tax_sink_balance"] = rec.tax_sink_balance();
    manifest["initial_cash_total"] = rec.initial_cash_total;
    manifest["final_cash_total"] = rec.final_cash_total;
    std::size_t halts = 0;
    for (const auto& e : rec.events) halts += e.kind == "halt" ? 1 : 0;
    manifest["halt_events"] = halts;
    auto& listed = manifest["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files) listed.push_back({{"path", f.filename().string()}, {"sha256", sha256_file(f)}});

    const fs::path path = dir / "manifest.json";
    const fs::path tmp = dir / "manifest.json.tmp";
    {
        auto out = open_out(tmp);
        out << manifest.dump(2) << '\n';
    }
    fs::rename(tmp, path);
    files.insert(files.begin(), path);
    return files;
}

}  // namespace sysrisk::sim
