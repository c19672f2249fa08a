#include "sysrisk/sri.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sysrisk;
using namespace sysrisk::sri;

namespace {

// Gaussian log-likelihood evaluated directly from the recursion.
double log_likelihood(const std::vector<double>& r, const GarchParams& p)
{
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= static_cast<double>(r.size());
    double h = var, ll = 0.0, e_prev = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        if (t > 0) h = p.omega + p.alpha * e_prev * e_prev + p.beta * h;
        const double e = r[t] - mean;
        ll += -0.5 * (std::log(2.0 * std::numbers::pi) + std::log(h) + e * e / h);
        e_prev = e;
    }
    return ll;
}

}  // namespace

TEST_CASE("variance recursion")
{
    const std::vector<double> r{0.01, -0.02, 0.03, 0.0};
    const GarchParams p{1e-5, 0.1, 0.8};
    const auto h = garch_variance(r, p);
    REQUIRE(h.size() == 4);
    const double mean = 0.005;
    double s0 = 0.0;
    for (double v : r) s0 += (v - mean) * (v - mean);
    s0 /= 4.0;
    CHECK(h[0] == doctest::Approx(s0));
    CHECK(h[1] == doctest::Approx(1e-5 + 0.1 * (0.01 - mean) * (0.01 - mean) + 0.8 * h[0]));
}

TEST_CASE("simulate then estimate recovers parameters")
{
    const GarchParams truth{1e-6, 0.05, 0.90};
    Rng rng(2024);
    const auto r = simulate_garch(truth, 5000, rng);
    const auto fit = fit_garch(r);
    CHECK(fit.converged);
    CHECK(std::abs(fit.params.omega - truth.omega) <= 0.5 * truth.omega);
    CHECK(std::abs(fit.params.alpha - truth.alpha) <= 0.5 * truth.alpha);
    CHECK(std::abs(fit.params.beta - truth.beta) <= 0.5 * truth.beta);
    CHECK(fit.log_likelihood == doctest::Approx(log_likelihood(r, fit.params)).epsilon(1e-8));
    CHECK(fit.log_likelihood >= log_likelihood(r, truth) - 1e-6);
}

TEST_CASE("fit respects the constraints")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        std::vector<double> r(300);
        for (auto& v : r) v = 0.01 * rng.normal();
        const auto fit = fit_garch(r);
        CHECK(fit.converged);
        CHECK(fit.params.omega > 0.0);
        CHECK(fit.params.alpha >= 0.0);
        CHECK(fit.params.beta >= 0.0);
        CHECK(fit.params.alpha + fit.params.beta <= kGarchMaxPersistence + 1e-12);
    }
}
