#include "sysrisk/entropy_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sysrisk::entropy {

double quantile_type7(std::vector<double> values, double q)
{
    require(!values.empty(), "quantile of empty set");
    require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

TENetwork threshold_adjacency(const Eigen::MatrixXd& te, double quantile, double scale)
{
    require(te.rows() == te.cols(), "transfer entropy matrix must be square");
    require(quantile > 0.0 && quantile < 1.0, "quantile must lie in (0, 1)");
    const auto n = te.rows();
    TENetwork net;
    net.scale = scale;
    net.te = te;
    net.adjacency = Adjacency::Zero(n, n);
    std::vector<double> positive;
    for (Eigen::Index i = 0; i < n; ++i) {
        require(te(i, i) == 0.0, "transfer entropy matrix must have a zero diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            require(te(i, j) >= 0.0, "transfer entropy entries must be nonnegative");
            if (i != j && te(i, j) > 0.0) positive.push_back(te(i, j));
        }
    }
    if (!positive.empty()) {
        net.threshold = quantile_type7(std::move(positive), quantile);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && te(i, j) > net.threshold) net.adjacency(i, j) = 1;
            }
        }
    }
    net.stats = network_stats(net.adjacency);
    return net;
}

NetworkStats network_stats(const Adjacency& adjacency)
{
    require(adjacency.rows() == adjacency.cols(), "adjacency must be square");
    const auto n = adjacency.rows();
    NetworkStats stats;
    stats.n_nodes = static_cast<std::size_t>(n);
    Adjacency undirected = Adjacency::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        require(adjacency(i, i) == 0, "adjacency must have a zero diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (adjacency(i, j) != 0) {
                ++stats.n_edges;
                undirected(i, j) = undirected(j, i) = 1;
            }
        }
    }
    if (n >= 2) {
        stats.density = static_cast<double>(stats.n_edges) / static_cast<double>(n * (n - 1));
    }
    if (n >= 1) stats.avg_degree = 2.0 * static_cast<double>(stats.n_edges) / static_cast<double>(n);

    std::size_t triangles = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (undirected(i, j))
                for (Eigen::Index k = j + 1; k < n; ++k)
                    if (undirected(j, k) && undirected(i, k)) ++triangles;
    std::size_t triples = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(undirected.row(i).sum());
        triples += d * (d - (d > 0 ? 1 : 0)) / 2;
    }
    stats.transitivity = triples > 0 ? 3.0 * static_cast<double>(triangles) / static_cast<double>(triples) : 0.0;
    return stats;
}

const std::vector<std::string>& network_stats_columns()
{
    static const std::vector<std::string> columns = {"Network Density", "Transitivity", "Average Degree",
                                                     "Number of Edges", "Number of Nodes"};
    return columns;
}

void write_edge_list(const std::filesystem::path& path, const TENetwork& network,
                     const std::vector<std::string>& symbols)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "src,dst,weight\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < network.adjacency.rows(); ++i) {
        for (Eigen::Index j = 0; j < network.adjacency.cols(); ++j) {
            if (network.adjacency(i, j)) {
                out << symbols.at(static_cast<std::size_t>(i)) << ',' << symbols.at(static_cast<std::size_t>(j)) << ','
                    << network.te(i, j) << '\n';
            }
        }
    }
}

}  // namespace sysrisk::entropy
