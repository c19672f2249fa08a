#pragma once

#include "sysrisk/market_data.hpp"

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

namespace sysrisk::wavelet {

using Complex = std::complex<double>;
using ComplexSeries = std::vector<Complex>;

enum class Boundary { reflect, zero_pad };

struct WaveletParams {
    double omega0 = 6.0;
    /// Scales in period units; must be strictly positive and increasing.
    std::vector<double> scales{1.0, 5.0, 15.0, 60.0};
    Boundary boundary = Boundary::reflect;

    void validate() const;
};

/// Half-width of the truncated kernel, in units of the scale. exp(-8^2/2) is
/// below 1.3e-14, so the truncation is invisible at double precision.
inline constexpr double kSupportSigmas = 8.0;

/// Morlet mother wavelet pi^(-1/4) exp(i w0 t) exp(-t^2/2).
Complex morlet(double t, double omega0 = 6.0);

/// Scale at which a sinusoid of the given period peaks in |W|^2.
double fourier_peak_scale(double period, double omega0 = 6.0);

/// Direct time-domain transform, one series per scale:
///   W(s, tau) = s^(-1/2) * sum_t x(t) conj(psi((t - tau) / s)).
std::vector<ComplexSeries> cwt(std::span<const double> series, const WaveletParams& params);

/// Same transform evaluated through FFT convolution; agrees with cwt().
std::vector<ComplexSeries> cwt_fft(std::span<const double> series, const WaveletParams& params);

struct ScaleDecomposition {
    /// coefficients[asset][scale][t]
    std::vector<std::vector<ComplexSeries>> coefficients;
    /// real_band[asset][scale][t] == coefficients[...].real()
    std::vector<std::vector<std::vector<double>>> real_band;
    WaveletParams params;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t n_assets() const { return coefficients.size(); }
    [[nodiscard]] std::size_t n_scales() const { return params.scales.size(); }
    [[nodiscard]] std::size_t length() const;

    /// T x N matrix of the real band at one scale.
    [[nodiscard]] Eigen::MatrixXd band_matrix(std::size_t scale_index) const;
};

ScaleDecomposition decompose_panel(const market::ReturnPanel& panel, const WaveletParams& params);

/// One CSV per scale (real band, panel layout), named band_s<scale>.csv.
std::vector<std::filesystem::path> export_real_bands(const ScaleDecomposition& decomposition,
                                                     const std::vector<std::string>& symbols,
                                                     const std::filesystem::path& dir);

}  // namespace sysrisk::wavelet
