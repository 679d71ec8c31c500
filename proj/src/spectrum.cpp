// spectrum.cpp — Spectrum container checks, integration and convention changes

#include "wgheat/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "wgheat/errors.hpp"
#include "wgheat/linalg.hpp"
#include "wgheat/units.hpp"

namespace wgheat {

void Spectrum::validate() const {
    if (freqs_hz.size() != values.size()) throw DomainError("spectrum: size mismatch");
    if (!linalg::strictly_increasing(freqs_hz))
        throw DomainError("spectrum: frequencies must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("spectrum: non-finite value");
}

double Spectrum::integrated_power() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < freqs_hz.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (freqs_hz[i] - freqs_hz[i - 1]);
    // S(omega) d(omega) = 2 pi S(omega) df.
    return convention == PsdConvention::per_hz ? acc : acc * units::two_pi;
}

std::size_t Spectrum::argmax() const {
    if (values.empty()) throw DomainError("spectrum: empty");
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Spectrum Spectrum::converted(PsdConvention to) const {
    Spectrum out = *this;
    if (to == convention) return out;
    const double f = to == PsdConvention::per_hz ? units::two_pi : 1.0 / units::two_pi;
    for (auto& v : out.values) v *= f;
    out.convention = to;
    return out;
}

std::vector<double> to_hz(std::span<const double> omega) {
    std::vector<double> out(omega.size());
    std::transform(omega.begin(), omega.end(), out.begin(), units::rad_to_hz);
    return out;
}

Spectrum make_spectrum(std::span<const double> omega_grid, std::vector<double> s_angular,
                       PsdConvention convention, std::string meta) {
    Spectrum s;
    s.freqs_hz = to_hz(omega_grid);
    s.values = std::move(s_angular);
    s.convention = PsdConvention::per_angular;
    s.meta = std::move(meta);
    return s.converted(convention);
}

} // namespace wgheat
