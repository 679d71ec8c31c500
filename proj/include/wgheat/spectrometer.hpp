// spectrometer.hpp — Two-channel noise spectrometer: estimators and frequency sweeps
//
// A qubit couples equally to a probe line (occupation n_th) and a detection
// line (occupation n_r), so gamma_1 = 2 gamma_r. The residual nonradiative
// rate only enters the regime check.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wgheat/model.hpp"
#include "wgheat/spectrum.hpp"

namespace wgheat::spectrometer {

struct SpectrometerConfig {
    double gamma_r{0.0};   // rad/s per channel
    double gamma_n{0.0};   // rad/s, residual
    double gamma_phi{0.0}; // rad/s
    double n_th{0.0};      // probe channel
    double n_r{0.0};       // detection channel
    double omega01{0.0};   // rad/s

    // Throws when gamma_r / gamma_n < 10; returns warnings (ratio below 100,
    // dephasing not small against gamma_r).
    std::vector<std::string> validate() const;
    double delta_n() const { return n_th - n_r; }
};

// Matched-coupling rates: gamma_1 = 2 gamma_r, gamma_2 = gamma_r + gamma_phi,
// gamma_+ = gamma_r (n_th + n_r). The occupation corrections to gamma_1 are
// dropped, as in the low-occupation regime the estimators assume.
model::DerivedRates matched_rates(const SpectrometerConfig& cfg);

// S_th = hbar omega01 (gamma_r / 2 pi) gamma_2 dn / (d^2 + gamma_2^2).
Spectrum spectrometer_thermal_psd(std::span<const double> omega_grid, const SpectrometerConfig& cfg,
                                  PsdConvention convention = PsdConvention::per_hz);
// Strongly driven centre peak, hbar omega01 (gamma_r / 2 pi) gamma_2 / (2 (d^2 + gamma_2^2)).
Spectrum spectrometer_on_psd(std::span<const double> omega_grid, const SpectrometerConfig& cfg,
                             PsdConvention convention = PsdConvention::per_hz);
// Weak-probe reflection of the detection line in the matched model.
std::complex<double> spectrometer_reflection(double delta, const SpectrometerConfig& cfg);

struct PointwiseEstimate {
    std::vector<double> freqs_hz;
    std::vector<double> delta_n; // NaN where s_on is below the guard
    std::vector<bool> valid;
    double center{0.0};   // value at the s_on maximum
    double flatness{0.0}; // (max - min) / |center| within the s_on half maximum
    bool narrowband{false};
};
inline constexpr double pointwise_guard = 1e-3;      // of the s_on peak
inline constexpr double flatness_threshold = 0.05;

// dn(omega) = s_th / (2 s_on) on matching grids.
PointwiseEstimate estimate_delta_n_pointwise(const Spectrum& s_th, const Spectrum& s_on);

// dn = p_th / (2 p_on); the common gain cancels.
double estimate_delta_n_integrated(double p_th, double p_on);
double estimate_delta_n_integrated(const Spectrum& s_th, const Spectrum& s_on);

struct OccupationSplit {
    double n_th{0.0};
    double n_r{0.0};
    bool negative{false};
};
// Solves n_th + n_r = r and n_th - n_r = dn. Exact for the matched model
// (linewidth held at gamma_r).
OccupationSplit split_occupations(double delta_n, double r_on_resonance);
// Same split for two radiative baths whose occupations also broaden the line
// (gamma_phi = 0): there r = 1 - 1 / (1 + n_th + n_r)^2, about twice the sum.
OccupationSplit split_occupations_full(double delta_n, double r_on_resonance);

using NoiseProfile = std::function<double(double omega)>; // n_th at angular frequency

struct SweepOptions {
    double relative_noise{0.0}; // per spectral point, on both spectra
    std::uint64_t seed{0};      // point i uses seed + i
    int points_per_line{201};   // local grid omega01 +- span gamma_2
    double span_gamma2{5.0};
    int profile_quadrature{2001};
};

struct SweepPoint {
    double omega01_hz{0.0};
    double delta_n{0.0};      // S_on-weighted mean of the pointwise ratio over the half maximum
    double sigma{0.0};        // predicted from the relative noise
    double true_delta_n{0.0}; // Lorentzian-weighted profile average minus n_r
    double flatness{0.0};
    bool narrowband{false};
};

// The qubit sees the profile averaged over its own lineshape (HWHM gamma_2),
// so features narrower than gamma_2 are smeared out.
double lineshape_average(const NoiseProfile& n_th, double omega01, double gamma_2, int points = 2001);

std::vector<SweepPoint> sweep_spectrometer(const SpectrometerConfig& cfg, std::span<const double> omega01_grid,
                                           const NoiseProfile& n_th, const SweepOptions& opt = {});

} // namespace wgheat::spectrometer
