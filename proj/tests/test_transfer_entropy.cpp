#include "sysrisk/entropy_net.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace sysrisk;
using namespace sysrisk::entropy;

namespace {

std::pair<std::vector<double>, std::vector<double>> coupled_pair(std::size_t n, unsigned seed, double coupling)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = nd(gen);
    y[0] = nd(gen);
    for (std::size_t t = 0; t + 1 < n; ++t) y[t + 1] = coupling * x[t] + (1.0 - coupling) * nd(gen);
    return {x, y};
}

double silverman_h(const std::vector<double>& x)
{
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return 1.06 * std::sqrt(ss / static_cast<double>(x.size() - 1)) * std::pow(x.size(), -0.2);
}

// Normalised leave-one-out Gaussian product densities, history length 1.
double te_oracle(const std::vector<double>& x, const std::vector<double>& y)
{
    const double hx = silverman_h(x), hy = silverman_h(y);
    auto phi = [](double z, double h) { return std::exp(-0.5 * z * z / (h * h)) / (h * std::sqrt(2.0 * std::numbers::pi)); };
    const std::size_t n = y.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pabc = 0.0, pbc = 0.0, pab = 0.0, pb = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double a = phi(y[i + 1] - y[j + 1], hy);
            const double b = phi(y[i] - y[j], hy);
            const double c = phi(x[i] - x[j], hx);
            pabc += a * b * c;
            pbc += b * c;
            pab += a * b;
            pb += b;
        }
        acc += std::log((pabc / pbc) / (pab / pb));
    }
    return acc / static_cast<double>(n);
}

// Plug-in entropies of equal-width bins, history length 1.
double binned_oracle(const std::vector<double>& x, const std::vector<double>& y, int bins)
{
    auto bin = [bins](const std::vector<double>& v) {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        std::vector<int> out;
        for (double e : v) out.push_back(std::min(static_cast<int>((e - lo) / ((hi - lo) / bins)), bins - 1));
        return out;
    };
    const auto bx = bin(x), by = bin(y);
    const std::size_t n = y.size() - 1;
    std::map<std::vector<int>, double> abc, ab, bc, b;
    for (std::size_t t = 0; t < n; ++t) {
        abc[{by[t + 1], by[t], bx[t]}] += 1;
        ab[{by[t + 1], by[t]}] += 1;
        bc[{by[t], bx[t]}] += 1;
        b[{by[t]}] += 1;
    }
    auto entropy = [n](const std::map<std::vector<int>, double>& m) {
        double h = 0.0;
        for (const auto& [k, c] : m) h -= c / n * std::log(c / n);
        return h;
    };
    return entropy(ab) + entropy(bc) - entropy(abc) - entropy(b);
}

}  // namespace

TEST_CASE("kde estimator matches the normalised leave-one-out oracle")
{
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto [x, y] = coupled_pair(120, seed, 0.5);
        const auto est = transfer_entropy(x, y, TeParams{});
        CHECK(est.raw == doctest::Approx(te_oracle(x, y)).epsilon(1e-9));
        CHECK(est.value == std::max(est.raw, 0.0));
    }
}

TEST_CASE("binned estimator matches the plug-in entropy oracle")
{
    TeParams p;
    p.estimator = TeEstimator::binned;
    p.n_bins = 4;
    for (unsigned seed : {4u, 5u}) {
        const auto [x, y] = coupled_pair(300, seed, 0.6);
        CHECK(transfer_entropy(x, y, p).raw == doctest::Approx(binned_oracle(x, y, 4)).epsilon(1e-9));
    }
}

TEST_CASE("null calibration on independent pairs")
{
    int ok = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        const auto [x, y] = coupled_pair(500, 1000 + seed, 0.0);
        ok += transfer_entropy(x, y, TeParams{}).value <= 0.05 ? 1 : 0;
    }
    CHECK(ok >= 95);
}

TEST_CASE("directionality on a lagged coupling")
{
    int ok = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        const auto [x, y] = coupled_pair(500, 2000 + seed, 0.8);
        ok += transfer_entropy(x, y, TeParams{}).value > transfer_entropy(y, x, TeParams{}).value ? 1 : 0;
    }
    CHECK(ok >= 95);
}

TEST_CASE("constant target gives zero")
{
    const auto [x, y] = coupled_pair(100, 9, 0.5);
    const std::vector<double> flat(100, 1.5);
    const auto est = transfer_entropy(x, flat, TeParams{});
    CHECK(est.value == 0.0);
    CHECK(est.degenerate);
}

TEST_CASE("length checks")
{
    const std::vector<double> a(50, 0.0), b(40, 0.0), tiny(5, 0.0);
    CHECK_THROWS_AS(transfer_entropy(a, b, TeParams{}), ValidationError);
    CHECK_THROWS_AS(transfer_entropy(tiny, tiny, TeParams{}), ValidationError);
}

TEST_CASE("two-asset matrix has two computed entries")
{
    const auto [x, y] = coupled_pair(200, 12, 0.8);
    Eigen::MatrixXd m(200, 2);
    for (int t = 0; t < 200; ++t) {
        m(t, 0) = x[t];
        m(t, 1) = y[t];
    }
    const auto te = te_matrix(m, TeParams{});
    CHECK(te.te.rows() == 2);
    CHECK(te.te(0, 0) == 0.0);
    CHECK(te.te(1, 1) == 0.0);
    CHECK(te.te(0, 1) > 0.0);
    CHECK(te.te(0, 1) == transfer_entropy(x, y, TeParams{}).value);
    CHECK(te.te(1, 0) == transfer_entropy(y, x, TeParams{}).value);
}

TEST_CASE("asset permutation permutes the matrix")
{
    market::SyntheticSpec spec;
    spec.n_assets = 4;
    spec.n_periods = 120;
    const auto panel = market::generate_synthetic(spec);
    const std::vector<Eigen::Index> perm{2, 0, 3, 1};
    Eigen::MatrixXd shuffled(panel.returns.rows(), 4);
    for (Eigen::Index c = 0; c < 4; ++c) shuffled.col(c) = panel.returns.col(perm[c]);
    const auto a = te_matrix(panel.returns, TeParams{}).te;
    const auto b = te_matrix(shuffled, TeParams{}).te;
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(b(i, j) == a(perm[i], perm[j]));
    }
}

TEST_CASE("default panel TE is nonnegative with zero diagonal")
{
    const auto panel = market::generate_synthetic(market::SyntheticSpec{});
    const auto m = te_matrix(panel, TeParams{});
    CHECK(m.te.minCoeff() >= 0.0);
    CHECK(m.te.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.te.allFinite());
}

TEST_CASE("surrogate filtering only removes entries")
{
    const auto panel = market::generate_synthetic(market::SyntheticSpec{});
    TeParams p;
    const auto plain = te_matrix(panel, p);
    p.n_surrogates = 19;
    p.surrogate_seed = 5;
    const auto filtered = te_matrix(panel, p);
    for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 8; ++j) {
            CHECK((filtered.te(i, j) == plain.te(i, j) || filtered.te(i, j) == 0.0));
        }
    }
    CHECK(te_matrix(panel, p).te == filtered.te);
}
