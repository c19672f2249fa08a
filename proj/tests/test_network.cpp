#include "sysrisk/entropy_net.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace sysrisk;
using namespace sysrisk::entropy;

namespace {

// Ordered-triple enumeration on the undirected projection.
double transitivity_oracle(const Adjacency& a)
{
    const auto n = a.rows();
    auto linked = [&](Eigen::Index i, Eigen::Index j) { return a(i, j) != 0 || a(j, i) != 0; };
    double closed = 0.0, connected = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j || i == c || j == c) continue;
                if (linked(c, i) && linked(c, j)) {
                    connected += 1.0;
                    closed += linked(i, j) ? 1.0 : 0.0;
                }
            }
        }
    }
    return connected > 0.0 ? closed / connected : 0.0;
}

Adjacency random_graph(Eigen::Index n, double p, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution coin(p);
    Adjacency a = Adjacency::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && coin(gen)) a(i, j) = 1;
    return a;
}

Eigen::MatrixXd distinct_te(Eigen::Index n, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Eigen::MatrixXd te = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) te(i, j) = u(gen);
    return te;
}

}  // namespace

TEST_CASE("type 7 quantile")
{
    CHECK(quantile_type7({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_type7({5}, 0.3) == 5.0);
    CHECK(quantile_type7({3, 1, 2}, 1.0) == 3.0);
    CHECK(quantile_type7({3, 1, 2}, 0.0) == 1.0);
    CHECK(quantile_type7({0, 10}, 0.85) == doctest::Approx(8.5));
    CHECK_THROWS_AS(quantile_type7({}, 0.5), ValidationError);
}

TEST_CASE("all-zero TE gives an empty network")
{
    const auto net = threshold_adjacency(Eigen::MatrixXd::Zero(8, 8), 0.85);
    CHECK(net.adjacency.sum() == 0);
    CHECK(net.stats.density == 0.0);
}

TEST_CASE("56 distinct values at q = 0.85")
{
    const auto te = distinct_te(8, 3);
    const auto net = threshold_adjacency(te, 0.85);
    std::vector<double> v;
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 8; ++j)
            if (i != j) v.push_back(te(i, j));
    std::sort(v.begin(), v.end());
    // rank 1 + 0.85 * 55 = 47.75 (1-based) lies between the 47th and 48th values
    const double theta = v[46] + 0.75 * (v[47] - v[46]);
    const auto expected = std::count_if(v.begin(), v.end(), [&](double x) { return x > theta; });
    CHECK(net.threshold == doctest::Approx(theta).epsilon(1e-14));
    CHECK(net.stats.n_edges == static_cast<std::size_t>(expected));
    CHECK(expected == 9);
}

TEST_CASE("raising the quantile never adds edges")
{
    for (unsigned seed = 0; seed < 20; ++seed) {
        Eigen::MatrixXd te = distinct_te(8, seed);
        te(1, 2) = te(2, 1) = te(3, 4) = 0.0;
        std::size_t previous = 1000;
        for (double q = 0.05; q < 1.0; q += 0.05) {
            const auto net = threshold_adjacency(te, q);
            CHECK(net.stats.n_edges <= previous);
            previous = net.stats.n_edges;
        }
    }
}

TEST_CASE("threshold input validation")
{
    Eigen::MatrixXd te = Eigen::MatrixXd::Zero(3, 3);
    te(0, 1) = -0.1;
    CHECK_THROWS_AS(threshold_adjacency(te, 0.5), ValidationError);
    CHECK_THROWS_AS(threshold_adjacency(Eigen::MatrixXd::Zero(3, 3), 1.0), ValidationError);
    CHECK_THROWS_AS(threshold_adjacency(Eigen::MatrixXd::Zero(2, 3), 0.5), ValidationError);
}

TEST_CASE("8-node 12-edge hub and spoke graph")
{
    Adjacency a = Adjacency::Zero(8, 8);
    for (int hub : {0, 1})
        for (int leaf = 2; leaf < 8; ++leaf) a(hub, leaf) = 1;
    const auto s = network_stats(a);
    CHECK(s.n_nodes == 8);
    CHECK(s.n_edges == 12);
    CHECK(s.density == doctest::Approx(12.0 / 56.0));
    CHECK(std::abs(s.density - 0.214) <= 0.0005);
    CHECK(s.avg_degree == 3.0);
    CHECK(s.transitivity == 0.0);
}

TEST_CASE("complete directed K3")
{
    Adjacency a = Adjacency::Ones(3, 3);
    a.diagonal().setZero();
    const auto s = network_stats(a);
    CHECK(s.density == 1.0);
    CHECK(s.transitivity == 1.0);
    CHECK(s.avg_degree == 4.0);
}

TEST_CASE("empty 5-node graph")
{
    const auto s = network_stats(Adjacency::Zero(5, 5));
    CHECK(s.density == 0.0);
    CHECK(s.transitivity == 0.0);
    CHECK(s.avg_degree == 0.0);
}

TEST_CASE("transitivity matches triple enumeration on random graphs")
{
    for (unsigned seed = 0; seed < 30; ++seed) {
        const auto a = random_graph(9, 0.1 + 0.02 * seed, seed);
        const auto s = network_stats(a);
        CHECK(s.transitivity == doctest::Approx(transitivity_oracle(a)).epsilon(1e-12));
        CHECK(s.n_edges == static_cast<std::size_t>(a.sum()));
        CHECK(s.avg_degree == doctest::Approx(2.0 * a.sum() / 9.0));
    }
}

TEST_CASE("stats column names")
{
    const std::vector<std::string> expected{"Network Density", "Transitivity", "Average Degree", "Number of Edges",
                                            "Number of Nodes"};
    CHECK(network_stats_columns() == expected);
}
