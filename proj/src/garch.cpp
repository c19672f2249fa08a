#include "sysrisk/sri.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace sysrisk::sri {

namespace {

struct Demeaned {
    std::vector<double> values;
    double variance = 0.0;
};

Demeaned demean(std::span<const double> returns)
{
    Demeaned d;
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    d.values.reserve(returns.size());
    for (double r : returns) d.values.push_back(r - mean);
    double ss = 0.0;
    for (double e : d.values) ss += e * e;
    d.variance = ss / static_cast<double>(returns.size());
    return d;
}

std::vector<double> variance_path(std::span<const double> e, double h0, const GarchParams& p)
{
    std::vector<double> h(e.size());
    if (e.empty()) return h;
    h[0] = h0;
    for (std::size_t t = 1; t < e.size(); ++t) h[t] = p.omega + p.alpha * e[t - 1] * e[t - 1] + p.beta * h[t - 1];
    return h;
}

// x = (log omega, a, b); alpha and beta are 0.999 * softmax(a, b, 0).
GarchParams decode(const gsl_vector* x)
{
    const double a = gsl_vector_get(x, 1);
    const double b = gsl_vector_get(x, 2);
    const double m = std::max({a, b, 0.0});
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    const double ec = std::exp(-m);
    const double z = ea + eb + ec;
    return {std::exp(gsl_vector_get(x, 0)), kGarchMaxPersistence * ea / z, kGarchMaxPersistence * eb / z};
}

struct LikelihoodData {
    const std::vector<double>* e;
    double h0;
};

double negative_log_likelihood(const gsl_vector* x, void* raw)
{
    const auto* data = static_cast<const LikelihoodData*>(raw);
    const GarchParams p = decode(x);
    const auto h = variance_path(*data->e, data->h0, p);
    double nll = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
        if (!(h[t] > 0.0) || !std::isfinite(h[t])) return std::numeric_limits<double>::max();
        const double e = (*data->e)[t];
        nll += 0.5 * (std::log(h[t]) + e * e / h[t]);
    }
    return std::isfinite(nll) ? nll : std::numeric_limits<double>::max();
}

struct VectorFree {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerFree {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

std::vector<double> garch_variance(std::span<const double> returns, const GarchParams& params)
{
    require(!returns.empty(), "garch_variance: empty series");
    require(params.omega > 0.0 && params.alpha >= 0.0 && params.beta >= 0.0, "garch_variance: invalid parameters");
    const Demeaned d = demean(returns);
    return variance_path(d.values, d.variance > 0.0 ? d.variance : params.omega, params);
}

GarchFit fit_garch(std::span<const double> returns)
{
    require(returns.size() >= 30, "fit_garch: need at least 30 observations");
    const Demeaned d = demean(returns);
    require(d.variance > 0.0, "fit_garch: zero-variance series");
    gsl_set_error_handler_off();

    // Work on unit-variance data; omega scales back by the sample variance.
    const double scale = std::sqrt(d.variance);
    std::vector<double> z(d.values.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = d.values[i] / scale;
    LikelihoodData data{&z, 1.0};

    const double s1 = 0.05 / kGarchMaxPersistence;
    const double s2 = 0.90 / kGarchMaxPersistence;
    const double s3 = 1.0 - s1 - s2;
    std::unique_ptr<gsl_vector, VectorFree> x(gsl_vector_alloc(3));
    gsl_vector_set(x.get(), 0, std::log(0.1));
    gsl_vector_set(x.get(), 1, std::log(s1 / s3));
    gsl_vector_set(x.get(), 2, std::log(s2 / s3));
    std::unique_ptr<gsl_vector, VectorFree> step(gsl_vector_alloc(3));
    gsl_vector_set_all(step.get(), 0.5);

    gsl_multimin_function fn{&negative_log_likelihood, 3, &data};
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerFree> solver(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3));
    gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

    GarchFit fit;
    constexpr std::size_t kMaxIterations = 5000;
    int status = GSL_CONTINUE;
    // Boundary optima (alpha -> 0 or persistence at the cap) send the
    // unconstrained parameters to infinity, so the simplex never shrinks;
    // a stalled objective also counts as converged.
    constexpr std::size_t kStallWindow = 200;
    double window_start = gsl_multimin_fminimizer_minimum(solver.get());
    while (status == GSL_CONTINUE && fit.iterations < kMaxIterations) {
        ++fit.iterations;
        if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-7);
        if (status == GSL_CONTINUE && fit.iterations % kStallWindow == 0) {
            const double now = gsl_multimin_fminimizer_minimum(solver.get());
            if (window_start - now <= 1e-10 * (1.0 + std::abs(now))) status = GSL_SUCCESS;
            window_start = now;
        }
    }
    fit.converged = status == GSL_SUCCESS;
    const GarchParams unit = decode(gsl_multimin_fminimizer_x(solver.get()));
    fit.params = {unit.omega * d.variance, unit.alpha, unit.beta};
    const double nll = gsl_multimin_fminimizer_minimum(solver.get());
    // Undo the change of variables in the Jacobian term: log h = log h_z + log var.
    fit.log_likelihood =
        -nll - 0.5 * static_cast<double>(z.size()) * (std::log(d.variance) + std::log(2.0 * std::numbers::pi));
    fit.variance = variance_path(d.values, d.variance, fit.params);
    if (nll >= std::numeric_limits<double>::max()) fit.converged = false;
    return fit;
}

std::vector<double> simulate_garch(const GarchParams& params, std::size_t length, Rng& rng)
{
    require(params.omega > 0.0 && params.alpha >= 0.0 && params.beta >= 0.0 && params.alpha + params.beta < 1.0,
            "simulate_garch: parameters must be stationary");
    std::vector<double> out(length);
    double h = params.omega / (1.0 - params.alpha - params.beta);
    double e_prev = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        if (t > 0) h = params.omega + params.alpha * e_prev * e_prev + params.beta * h;
        e_prev = std::sqrt(h) * rng.normal();
        out[t] = e_prev;
    }
    return out;
}

}  // namespace sysrisk::sri
