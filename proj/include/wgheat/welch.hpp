// welch.hpp — Averaged-periodogram PSD estimation and a Lorentzian noise surrogate

#pragma once

#include <cstdint>
#include <vector>

#include "wgheat/model.hpp"
#include "wgheat/spectrum.hpp"

namespace wgheat::welch {

// A sampled real voltage record. gain converts squared sample units to
// watts. lo_hz is the lab frequency that maps to baseband 0 Hz (a
// heterodyne local oscillator); spectra are reported at f + lo_hz.
struct TimeSeries {
    double sample_rate_hz{0.0};
    std::vector<double> samples;
    double gain{1.0};
    double lo_hz{0.0};

    std::size_t size() const { return samples.size(); }
    void validate() const;
    double variance() const;
};

enum class Window { hann, hamming, rectangular };

std::vector<double> window_coefficients(Window w, std::size_t n);

// Segment length 2^ceil(log2(20 fs / linewidth_hz)), capped at n / 8 (and
// rounded down to a power of two).
std::size_t default_segment_length(std::size_t n, double sample_rate_hz, double linewidth_hz);

// One-sided PSD in W/Hz: white noise of variance v gives v * gain / (fs / 2).
Spectrum welch_psd(const TimeSeries& ts, std::size_t segment_len, double overlap_fraction = 0.5,
                   Window window = Window::hann);

// Gaussian noise whose one-sided PSD is the thermal emission line of the
// rates: a Lorentzian of half width gamma_2 centred at fs/4 in baseband and
// carrying the power hbar omega01 gamma_r gamma_n dn / gamma_1. lo_hz places
// the line at omega01 in the lab frame. Deterministic per seed.
TimeSeries surrogate_timeseries(const model::DerivedRates& rates, double omega01, double duration_s,
                                double sample_rate_hz, std::uint64_t seed);

// Calibration gain of surrogate records, W per squared unit.
inline constexpr double surrogate_gain = 1e-21;

// Pointwise on - off on identical grids. Negative values are kept.
Spectrum subtract_background(const Spectrum& on, const Spectrum& off);

} // namespace wgheat::welch
