#include "sysrisk/sri.hpp"

#include <json.hpp>

#include <fstream>

namespace sysrisk::sri {

std::string report_json(const RiskReport& report, SriMode mode)
{
    nlohmann::ordered_json j;
    j["mode"] = to_string(mode);
    j["sri"] = report.total;
    j["sri_raw"] = report.total_raw;
    j["clamped"] = report.clamped;
    auto& rows = j["components"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"component", to_string(r.kind)},
                        {"label", display_name(r.kind)},
                        {"variant", r.variant},
                        {"value", r.value},
                        {"weight", r.weight},
                        {"contribution", r.contribution},
                        {"percentage", r.percentage}});
    }
    j["flags"] = report.flags;
    return j.dump(2);
}

void write_report_json(const std::filesystem::path& path, const RiskReport& report, SriMode mode)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << report_json(report, mode) << '\n';
}

void write_report_csv(const std::filesystem::path& path, const RiskReport& report)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << "Component,Value,Weight,Contribution,Percentage\n";
    for (const auto& r : report.rows) {
        out << display_name(r.kind) << ',' << format_double(r.value) << ',' << format_double(r.weight) << ','
            << format_double(r.contribution) << ',' << format_double(r.percentage) << '\n';
    }
    out << "Total SRI," << format_double(report.total) << ",1," << format_double(report.total_raw) << ",100\n";
}

}  // namespace sysrisk::sri
