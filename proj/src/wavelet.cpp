#include "sysrisk/wavelet.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace sysrisk::wavelet {

namespace {

const double kNorm = std::pow(std::numbers::pi, -0.25);

void check_series(std::span<const double> series)
{
    require(!series.empty(), "cwt: empty series");
    require(series.size() >= 4, "cwt: series needs at least 4 points");
}

std::ptrdiff_t half_width(double scale) { return static_cast<std::ptrdiff_t>(std::ceil(kSupportSigmas * scale)); }

// Symmetric (half-sample) extension with period 2T.
double extended(std::span<const double> x, std::ptrdiff_t index, Boundary boundary)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    if (index >= 0 && index < n) return x[static_cast<std::size_t>(index)];
    if (boundary == Boundary::zero_pad) return 0.0;
    std::ptrdiff_t m = index % (2 * n);
    if (m < 0) m += 2 * n;
    if (m >= n) m = 2 * n - 1 - m;
    return x[static_cast<std::size_t>(m)];
}

// conj(psi(u / s)) for u in [-L, L].
ComplexSeries conj_taps(double scale, double omega0)
{
    const auto L = half_width(scale);
    ComplexSeries taps(static_cast<std::size_t>(2 * L + 1));
    for (std::ptrdiff_t u = -L; u <= L; ++u) {
        taps[static_cast<std::size_t>(u + L)] = std::conj(morlet(static_cast<double>(u) / scale, omega0));
    }
    return taps;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t n)
{
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!p) throw NumericalError("fftw_malloc failed");
    return FftwBuffer(p);
}

class FftwPlan {
public:
    FftwPlan(int n, fftw_complex* in, fftw_complex* out, int sign)
        : plan_(fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE))
    {
        if (!plan_) throw NumericalError("fftw plan creation failed");
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    ~FftwPlan() { fftw_destroy_plan(plan_); }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

void WaveletParams::validate() const
{
    require(std::isfinite(omega0) && omega0 > 0.0, "omega0 must be positive");
    require(!scales.empty(), "at least one scale is required");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        require(std::isfinite(scales[i]) && scales[i] > 0.0, "scales must be strictly positive");
        if (i > 0) require(scales[i] > scales[i - 1], "scales must be strictly increasing");
    }
}

Complex morlet(double t, double omega0)
{
    const double envelope = kNorm * std::exp(-0.5 * t * t);
    return {envelope * std::cos(omega0 * t), envelope * std::sin(omega0 * t)};
}

double fourier_peak_scale(double period, double omega0)
{
    return period * (omega0 + std::sqrt(2.0 + omega0 * omega0)) / (4.0 * std::numbers::pi);
}

std::vector<ComplexSeries> cwt(std::span<const double> series, const WaveletParams& params)
{
    check_series(series);
    params.validate();
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    std::vector<ComplexSeries> out;
    out.reserve(params.scales.size());
    for (double s : params.scales) {
        const auto L = half_width(s);
        const ComplexSeries taps = conj_taps(s, params.omega0);
        const double gain = 1.0 / std::sqrt(s);
        ComplexSeries w(series.size());
        for (std::ptrdiff_t tau = 0; tau < n; ++tau) {
            Complex acc{0.0, 0.0};
            for (std::ptrdiff_t u = -L; u <= L; ++u) {
                const std::ptrdiff_t t = tau + u;
                if (params.boundary == Boundary::zero_pad && (t < 0 || t >= n)) continue;
                acc += extended(series, t, params.boundary) * taps[static_cast<std::size_t>(u + L)];
            }
            w[static_cast<std::size_t>(tau)] = gain * acc;
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<ComplexSeries> cwt_fft(std::span<const double> series, const WaveletParams& params)
{
    check_series(series);
    params.validate();
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    std::vector<ComplexSeries> out;
    out.reserve(params.scales.size());
    for (double s : params.scales) {
        const auto L = half_width(s);
        const ComplexSeries taps = conj_taps(s, params.omega0);
        // e[m] = x(m - L), m in [0, n + 2L); c[n'] = sum_m e[m] h[n' - m] with
        // h[j] = taps[2L - j]; W(tau) sits at c[tau + 2L].
        const std::size_t ext_len = static_cast<std::size_t>(n + 2 * L);
        const std::size_t tap_len = taps.size();
        const std::size_t size = next_pow2(ext_len + tap_len - 1);

        auto a = fftw_buffer(size);
        auto b = fftw_buffer(size);
        auto fa = fftw_buffer(size);
        auto fb = fftw_buffer(size);
        for (std::size_t i = 0; i < size; ++i) {
            a[i][0] = a[i][1] = b[i][0] = b[i][1] = 0.0;
        }
        for (std::size_t m = 0; m < ext_len; ++m) {
            a[m][0] = extended(series, static_cast<std::ptrdiff_t>(m) - L, params.boundary);
        }
        for (std::size_t j = 0; j < tap_len; ++j) {
            const Complex h = taps[tap_len - 1 - j];
            b[j][0] = h.real();
            b[j][1] = h.imag();
        }
        FftwPlan pa(static_cast<int>(size), a.get(), fa.get(), FFTW_FORWARD);
        FftwPlan pb(static_cast<int>(size), b.get(), fb.get(), FFTW_FORWARD);
        pa.execute();
        pb.execute();
        for (std::size_t i = 0; i < size; ++i) {
            const Complex p = Complex(fa[i][0], fa[i][1]) * Complex(fb[i][0], fb[i][1]);
            fa[i][0] = p.real();
            fa[i][1] = p.imag();
        }
        FftwPlan inverse(static_cast<int>(size), fa.get(), a.get(), FFTW_BACKWARD);
        inverse.execute();

        const double gain = 1.0 / (std::sqrt(s) * static_cast<double>(size));
        ComplexSeries w(series.size());
        for (std::ptrdiff_t tau = 0; tau < n; ++tau) {
            const auto k = static_cast<std::size_t>(tau + 2 * L);
            w[static_cast<std::size_t>(tau)] = gain * Complex(a[k][0], a[k][1]);
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::size_t ScaleDecomposition::length() const
{
    return coefficients.empty() || coefficients.front().empty() ? 0 : coefficients.front().front().size();
}

Eigen::MatrixXd ScaleDecomposition::band_matrix(std::size_t scale_index) const
{
    require(scale_index < n_scales(), "scale index out of range");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(length()), static_cast<Eigen::Index>(n_assets()));
    for (std::size_t i = 0; i < n_assets(); ++i) {
        const auto& band = real_band[i][scale_index];
        for (std::size_t t = 0; t < band.size(); ++t) {
            m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = band[t];
        }
    }
    return m;
}

ScaleDecomposition decompose_panel(const market::ReturnPanel& panel, const WaveletParams& params)
{
    panel.validate();
    params.validate();
    ScaleDecomposition out;
    out.params = params;
    const auto t = static_cast<std::size_t>(panel.periods());
    if (static_cast<double>(t) < 2.0 * params.scales.back()) {
        std::ostringstream msg;
        msg << "series length " << t << " is shorter than twice the largest scale " << params.scales.back();
        out.warnings.push_back(msg.str());
    }
    std::vector<double> column(t);
    for (Eigen::Index i = 0; i < panel.n_assets(); ++i) {
        for (std::size_t k = 0; k < t; ++k) column[k] = panel.returns(static_cast<Eigen::Index>(k), i);
        auto coeffs = cwt(column, params);
        std::vector<std::vector<double>> bands;
        bands.reserve(coeffs.size());
        for (const auto& series : coeffs) {
            std::vector<double> band(series.size());
            for (std::size_t k = 0; k < series.size(); ++k) band[k] = series[k].real();
            bands.push_back(std::move(band));
        }
        out.coefficients.push_back(std::move(coeffs));
        out.real_band.push_back(std::move(bands));
    }
    return out;
}

std::vector<std::filesystem::path> export_real_bands(const ScaleDecomposition& decomposition,
                                                     const std::vector<std::string>& symbols,
                                                     const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> written;
    for (std::size_t s = 0; s < decomposition.n_scales(); ++s) {
        std::ostringstream name;
        name << "band_s" << decomposition.params.scales[s] << ".csv";
        const auto path = dir / name.str();
        market::write_matrix_csv(path, symbols, decomposition.band_matrix(s));
        written.push_back(path);
    }
    return written;
}

}  // namespace sysrisk::wavelet
