#include "sysrisk/entropy_net.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sysrisk::entropy {

namespace {

struct Embedding {
    std::vector<double> next;     // y_{t+1}
    std::vector<double> target;   // y_t .. y_{t-k+1}, row-major n x k
    std::vector<double> source;   // x_t .. x_{t-k+1}, row-major n x k
    std::size_t n = 0;
    std::size_t k = 0;
};

Embedding embed(std::span<const double> x, std::span<const double> y, std::size_t k)
{
    Embedding e;
    e.k = k;
    e.n = y.size() - k;
    e.next.resize(e.n);
    e.target.resize(e.n * k);
    e.source.resize(e.n * k);
    for (std::size_t i = 0; i < e.n; ++i) {
        const std::size_t t = k - 1 + i;
        e.next[i] = y[t + 1];
        for (std::size_t d = 0; d < k; ++d) {
            e.target[i * k + d] = y[t - d];
            e.source[i * k + d] = x[t - d];
        }
    }
    return e;
}

// Leave-one-out: each density is evaluated at a sample point without that
// point's own kernel. Points whose kernel sums underflow are skipped.
double kde_te(const Embedding& e, double hx, double hy)
{
    const std::size_t n = e.n;
    const std::size_t k = e.k;
    std::vector<double> s_abc(n, 0.0), s_bc(n, 0.0), s_ab(n, 0.0), s_b(n, 0.0);
    const double ix = 1.0 / hx;
    const double iy = 1.0 / hy;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = (e.next[i] - e.next[j]) * iy;
            double qb = 0.0;
            double qc = 0.0;
            for (std::size_t d = 0; d < k; ++d) {
                const double db = (e.target[i * k + d] - e.target[j * k + d]) * iy;
                const double dc = (e.source[i * k + d] - e.source[j * k + d]) * ix;
                qb += db * db;
                qc += dc * dc;
            }
            const double kb = std::exp(-0.5 * qb);
            if (kb == 0.0) continue;
            const double ka = std::exp(-0.5 * da * da);
            const double kc = std::exp(-0.5 * qc);
            const double ab = ka * kb;
            const double bc = kb * kc;
            const double abc = ab * kc;
            s_abc[i] += abc;
            s_abc[j] += abc;
            s_bc[i] += bc;
            s_bc[j] += bc;
            s_ab[i] += ab;
            s_ab[j] += ab;
            s_b[i] += kb;
            s_b[j] += kb;
        }
    }
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (s_abc[i] <= 0.0 || s_bc[i] <= 0.0 || s_ab[i] <= 0.0 || s_b[i] <= 0.0) continue;
        acc += std::log(s_abc[i]) + std::log(s_b[i]) - std::log(s_bc[i]) - std::log(s_ab[i]);
        ++used;
    }
    return used > 0 ? acc / static_cast<double>(used) : 0.0;
}

std::vector<std::size_t> bin_series(std::span<const double> xs, std::size_t bins)
{
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it;
    const double width = (*hi_it - lo) / static_cast<double>(bins);
    std::vector<std::size_t> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto b = width > 0.0 ? static_cast<std::size_t>((xs[i] - lo) / width) : 0;
        out[i] = std::min(b, bins - 1);
    }
    return out;
}

double binned_te(std::span<const double> x, std::span<const double> y, std::size_t k, std::size_t bins)
{
    const auto bx = bin_series(x, bins);
    const auto by = bin_series(y, bins);
    const std::size_t n = y.size() - k;
    auto history = [&](const std::vector<std::size_t>& b, std::size_t t) {
        std::uint64_t code = 0;
        for (std::size_t d = 0; d < k; ++d) code = code * bins + b[t - d];
        return code;
    };
    using Key3 = std::tuple<std::size_t, std::uint64_t, std::uint64_t>;
    std::map<Key3, std::size_t> c_abc;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> c_bc;
    std::map<std::pair<std::size_t, std::uint64_t>, std::size_t> c_ab;
    std::map<std::uint64_t, std::size_t> c_b;
    std::vector<Key3> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = k - 1 + i;
        const Key3 key{by[t + 1], history(by, t), history(bx, t)};
        keys[i] = key;
        ++c_abc[key];
        ++c_bc[{std::get<1>(key), std::get<2>(key)}];
        ++c_ab[{std::get<0>(key), std::get<1>(key)}];
        ++c_b[std::get<1>(key)];
    }
    double acc = 0.0;
    for (const auto& key : keys) {
        const auto& [a, b, c] = key;
        acc += std::log(static_cast<double>(c_abc[key]) * static_cast<double>(c_b[b]) /
                        (static_cast<double>(c_bc[{b, c}]) * static_cast<double>(c_ab[{a, b}])));
    }
    return acc / static_cast<double>(n);
}

double spread(std::span<const double> xs)
{
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *hi - *lo;
}

}  // namespace

void TeParams::validate() const
{
    kde.validate();
    require(history_length >= 1, "history_length must be >= 1");
    require(quantile > 0.0 && quantile < 1.0, "quantile must lie in (0, 1)");
    require(surrogate_alpha > 0.0 && surrogate_alpha < 1.0, "surrogate_alpha must lie in (0, 1)");
    require(n_bins >= 2, "n_bins must be >= 2");
}

TeEstimate transfer_entropy(std::span<const double> source, std::span<const double> target, const TeParams& params)
{
    params.validate();
    require(source.size() == target.size(), "transfer_entropy: source and target lengths differ");
    require(target.size() >= params.history_length + 10, "transfer_entropy: series too short for history length");

    TeEstimate out;
    if (!(spread(source) > 0.0) || !(spread(target) > 0.0)) {
        out.degenerate = true;
        return out;
    }
    if (params.estimator == TeEstimator::binned) {
        out.raw = binned_te(source, target, params.history_length, params.n_bins);
    } else {
        const Bandwidth hx = select_bandwidth(source, params.kde);
        const Bandwidth hy = select_bandwidth(target, params.kde);
        if (hx.floored || hy.floored) {
            out.degenerate = true;
            return out;
        }
        out.raw = kde_te(embed(source, target, params.history_length), hx.h, hy.h);
    }
    out.value = std::max(out.raw, 0.0);
    out.clamped = out.raw < 0.0;
    return out;
}

TeMatrix te_matrix(const Eigen::MatrixXd& series, const TeParams& params)
{
    params.validate();
    const auto n = series.cols();
    require(n >= 2, "te_matrix: need at least 2 assets");
    TeMatrix out;
    out.te = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::vector<double>> columns(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        columns[static_cast<std::size_t>(i)].assign(series.col(i).data(), series.col(i).data() + series.rows());
    }
    const Rng surrogate_root(params.surrogate_seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& src = columns[static_cast<std::size_t>(i)];
            const auto& dst = columns[static_cast<std::size_t>(j)];
            const TeEstimate est = transfer_entropy(src, dst, params);
            out.clamp_events += est.clamped ? 1 : 0;
            out.degenerate_pairs += est.degenerate ? 1 : 0;
            double value = est.value;
            if (params.n_surrogates > 0 && value > 0.0) {
                Rng rng = surrogate_root.substream("pair:" + std::to_string(i) + ":" + std::to_string(j));
                std::vector<double> shuffled = src;
                std::vector<double> null_values;
                null_values.reserve(params.n_surrogates);
                for (std::size_t r = 0; r < params.n_surrogates; ++r) {
                    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
                    null_values.push_back(transfer_entropy(shuffled, dst, params).value);
                }
                if (value <= quantile_type7(null_values, 1.0 - params.surrogate_alpha)) {
                    value = 0.0;
                    ++out.rejected_by_surrogates;
                }
            }
            out.te(i, j) = value;
        }
    }
    return out;
}

TeMatrix te_matrix(const wavelet::ScaleDecomposition& decomposition, std::size_t scale_index, const TeParams& params)
{
    return te_matrix(decomposition.band_matrix(scale_index), params);
}

TeMatrix te_matrix(const market::ReturnPanel& panel, const TeParams& params)
{
    return te_matrix(panel.returns, params);
}

}  // namespace sysrisk::entropy
