// spectrum.hpp — Frequency-domain PSD and two-time correlator containers

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace wgheat {

// per_hz:      2*pi*S(omega), W/Hz, integrates over frequency in Hz to watts.
// per_angular: S(omega), W/(rad/s), integrates over angular frequency.
enum class PsdConvention { per_hz, per_angular };

struct Spectrum {
    std::vector<double> freqs_hz; // absolute lab frequency, strictly increasing
    std::vector<double> values;
    PsdConvention convention{PsdConvention::per_hz};
    std::string meta;

    std::size_t size() const { return freqs_hz.size(); }
    void validate() const;

    // Trapezoidal integral; always returns watts regardless of convention.
    double integrated_power() const;
    std::size_t argmax() const;
    Spectrum converted(PsdConvention to) const;
};

enum class CorrelatorKind {
    sp_sm, // <sigma+(t) sigma-(0)>
    sm_sp, // <sigma-(0) sigma+(t)>
    sm,    // <sigma-(t)>
    sp,    // <sigma+(t)>
};

struct CorrelationTrace {
    std::vector<double> times; // s
    std::vector<std::complex<double>> values;
    CorrelatorKind kind{CorrelatorKind::sp_sm};
};

// Converts an angular frequency grid (rad/s) to Hz.
std::vector<double> to_hz(std::span<const double> omega);

// Spectrum filled from per-point PSD values S(omega) given on an angular grid.
Spectrum make_spectrum(std::span<const double> omega_grid, std::vector<double> s_angular,
                       PsdConvention convention, std::string meta = {});

} // namespace wgheat
