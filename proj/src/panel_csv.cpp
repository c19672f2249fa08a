#include "sysrisk/market_data.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace sysrisk::market {

namespace fs = std::filesystem;

namespace {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool is_index_column(const std::string& name) { return name == "t" || name == "source"; }

double parse_cell(const std::string& cell, std::size_t row, std::size_t col, const fs::path& path)
{
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    if (!cell.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(path.string() + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": non-numeric cell '" + cell + "'");
    }
    return value;
}

CsvTable read_table(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    bool skip_first = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (!have_header) {
            skip_first = !cells.empty() && is_index_column(cells.front());
            table.columns.assign(cells.begin() + (skip_first ? 1 : 0), cells.end());
            std::set<std::string> seen;
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (table.columns[c].empty()) {
                    throw ParseError(path.string() + ": row 1, column " + std::to_string(c + 1) + ": empty symbol");
                }
                if (!seen.insert(table.columns[c]).second) {
                    throw ParseError(path.string() + ": row 1, column " + std::to_string(c + 1) +
                                     ": duplicate symbol '" + table.columns[c] + "'");
                }
            }
            have_header = true;
            continue;
        }
        const std::size_t offset = skip_first ? 1 : 0;
        if (cells.size() != table.columns.size() + offset) {
            throw ParseError(path.string() + ": row " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.columns.size() + offset) + " cells, found " +
                             std::to_string(cells.size()));
        }
        std::vector<double> values;
        values.reserve(table.columns.size());
        for (std::size_t c = offset; c < cells.size(); ++c) {
            values.push_back(parse_cell(cells[c], line_no, c + 1, path));
        }
        table.rows.push_back(std::move(values));
    }
    if (!have_header) throw ParseError(path.string() + ": empty file");
    if (table.columns.empty()) throw ParseError(path.string() + ": header has no symbols");
    return table;
}

Eigen::MatrixXd to_matrix(const CsvTable& table)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(table.columns.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = table.rows[r][c];
        }
    }
    return m;
}

std::string format_number(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

fs::path sidecar(const fs::path& main, const std::string& what)
{
    fs::path p = main;
    p.replace_filename(main.stem().string() + "." + what + ".csv");
    return p;
}

const char* const kSeriesNames[] = {"prices", "volumes", "spreads", "depths"};

}  // namespace

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& columns,
                      const Eigen::MatrixXd& values, const std::vector<std::string>& row_labels,
                      const std::string& index_name)
{
    require(static_cast<Eigen::Index>(columns.size()) == values.cols(), "header/column count mismatch");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << index_name;
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        out << (row_labels.empty() ? std::to_string(r) : row_labels.at(static_cast<std::size_t>(r)));
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << ',' << format_number(values(r, c));
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path, std::vector<std::string>* columns)
{
    CsvTable table = read_table(path);
    if (columns) *columns = table.columns;
    return to_matrix(table);
}

ReturnPanel load_panel_csv(const fs::path& path, CsvLayout layout)
{
    const CsvTable table = read_table(path);
    const Eigen::MatrixXd data = to_matrix(table);
    ReturnPanel panel;
    panel.assets.reserve(table.columns.size());
    for (const auto& symbol : table.columns) panel.assets.push_back({symbol, Sector::other});

    if (layout == CsvLayout::prices) {
        if (data.rows() < 3) {
            throw ParseError(path.string() + ": price layout needs at least 3 rows, found " +
                             std::to_string(data.rows()));
        }
        for (Eigen::Index r = 0; r < data.rows(); ++r) {
            for (Eigen::Index c = 0; c < data.cols(); ++c) {
                if (!(data(r, c) > 0.0)) {
                    throw ParseError(path.string() + ": row " + std::to_string(r + 2) + ", column " +
                                     std::to_string(c + 1) + ": price must be positive");
                }
            }
        }
        const auto t = data.rows() - 1;
        panel.prices = data.bottomRows(t);
        panel.returns = (data.bottomRows(t).array() / data.topRows(t).array() - 1.0).matrix();
    } else {
        if (data.rows() < 2) {
            throw ParseError(path.string() + ": return layout needs at least 2 rows, found " +
                             std::to_string(data.rows()));
        }
        panel.returns = data;
        const fs::path prices_path = sidecar(path, "prices");
        if (fs::exists(prices_path)) {
            panel.prices = read_matrix_csv(prices_path);
        } else {
            panel.prices = prices_from_returns(panel.returns);
            panel.flags.emplace_back("prices:reconstructed");
        }
        Eigen::MatrixXd* extras[] = {&panel.volumes, &panel.spreads, &panel.depths};
        for (int k = 0; k < 3; ++k) {
            const fs::path p = sidecar(path, kSeriesNames[k + 1]);
            if (fs::exists(p)) *extras[k] = read_matrix_csv(p);
        }
        const fs::path assets_path = sidecar(path, "assets");
        if (fs::exists(assets_path)) {
            std::ifstream in(assets_path);
            std::string line;
            std::getline(in, line);  // header
            std::size_t i = 0;
            while (std::getline(in, line)) {
                if (trim(line).empty()) continue;
                const auto cells = split(line);
                if (cells.size() != 2 || i >= panel.assets.size() || cells[0] != panel.assets[i].symbol) {
                    throw ParseError(assets_path.string() + ": row " + std::to_string(i + 2) +
                                     ": does not match panel symbols");
                }
                panel.assets[i++].sector = sector_from_string(cells[1]);
            }
        }
    }
    fill_default_liquidity(panel);
    try {
        panel.validate();
    } catch (const ValidationError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return panel;
}

std::vector<fs::path> export_panel_csv(const ReturnPanel& panel, const fs::path& path)
{
    std::vector<std::string> symbols;
    for (const auto& a : panel.assets) symbols.push_back(a.symbol);
    std::vector<fs::path> written{path};
    write_matrix_csv(path, symbols, panel.returns);
    const Eigen::MatrixXd* series[] = {&panel.prices, &panel.volumes, &panel.spreads, &panel.depths};
    for (int k = 0; k < 4; ++k) {
        if (series[k]->size() == 0 && panel.returns.size() != 0) continue;
        const fs::path p = sidecar(path, kSeriesNames[k]);
        Eigen::MatrixXd values = series[k]->size() == 0 ? Eigen::MatrixXd(0, panel.returns.cols()) : *series[k];
        write_matrix_csv(p, symbols, values);
        written.push_back(p);
    }
    const fs::path assets_path = sidecar(path, "assets");
    std::ofstream out(assets_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + assets_path.string() + "'");
    out << "symbol,sector\n";
    for (const auto& a : panel.assets) out << a.symbol << ',' << to_string(a.sector) << '\n';
    written.push_back(assets_path);
    return written;
}

}  // namespace sysrisk::market
