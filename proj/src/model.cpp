// model.cpp — Rate composition and thermal occupation conversions

#include "wgheat/model.hpp"

#include <cmath>
#include <string>

#include "wgheat/errors.hpp"
#include "wgheat/units.hpp"

namespace wgheat::model {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

void require_nonnegative(double v, const char* what) {
    require_finite(v, what);
    if (v < 0.0) throw DomainError(std::string(what) + " must be >= 0");
}

} // namespace

void TransmonSpec::validate() const {
    require_finite(omega01, "omega01");
    if (omega01 <= 0.0) throw DomainError("omega01 must be > 0");
    require_nonnegative(gamma_phi, "gamma_phi");
    require_finite(anharmonicity, "anharmonicity");
    if (levels != 2 && levels != 3)
        throw DomainError("levels must be 2 or 3, got " + std::to_string(levels));
    if (levels == 3 && omega12() <= 0.0)
        throw DomainError("omega12 = omega01 + anharmonicity must be > 0");
}

void BathSpec::validate() const {
    require_nonnegative(gamma, "bath gamma");
    require_nonnegative(occupation, "bath occupation");
    if (occupation_12) require_nonnegative(*occupation_12, "bath occupation_12");
    if (statistics == BathStatistics::tls) {
        // A TLS ensemble cannot exceed n = 1/2 at any positive temperature.
        if (occupation >= 0.5 || (occupation_12 && *occupation_12 >= 0.5))
            throw DomainError("TLS bath occupation must be < 1/2");
    }
}

void QuasiparticleSpec::validate(double omega01) const {
    require_nonnegative(gamma_up, "quasiparticle gamma_up");
    require_nonnegative(gamma_down, "quasiparticle gamma_down");
    require_nonnegative(gap, "superconducting gap");
    require_nonnegative(r_n, "normal-state resistance");
    require_nonnegative(capacitance, "capacitance");
    if (gap > 0.0 && gap <= units::hbar * omega01)
        throw DomainError("superconducting gap must exceed hbar*omega01");
}

const DriveSpec* SystemConfig::drive(Transition t) const {
    for (const auto& d : drives)
        if (d.transition == t) return &d;
    return nullptr;
}

std::complex<double> SystemConfig::rabi(Transition t) const {
    const auto* d = drive(t);
    return d ? d->amplitude : std::complex<double>{};
}

double SystemConfig::detuning(Transition t) const {
    const auto* d = drive(t);
    return d ? d->detuning : 0.0;
}

SystemConfig SystemConfig::without_drives() const {
    SystemConfig c = *this;
    c.drives.clear();
    return c;
}

SystemConfig SystemConfig::with_drive(DriveSpec d) const {
    SystemConfig c = *this;
    std::erase_if(c.drives, [&](const DriveSpec& x) { return x.transition == d.transition; });
    c.drives.push_back(d);
    return c;
}

void SystemConfig::validate() const {
    transmon.validate();
    radiative.validate();
    nonradiative.validate();
    if (radiative.label != BathLabel::radiative || nonradiative.label != BathLabel::nonradiative)
        throw DomainError("expected exactly one radiative and one nonradiative bath");
    // Input-output relations assume a bosonic waveguide continuum.
    if (radiative.statistics != BathStatistics::bosonic)
        throw DomainError("the radiative (waveguide) bath must be bosonic");
    if (drives.size() > 2) throw DomainError("at most two drives are supported");
    int n01 = 0, n12 = 0;
    for (const auto& d : drives) {
        require_finite(d.detuning, "drive detuning");
        require_finite(d.amplitude.real(), "drive amplitude");
        require_finite(d.amplitude.imag(), "drive amplitude");
        (d.transition == Transition::t01 ? n01 : n12)++;
    }
    if (n01 > 1 || n12 > 1) throw DomainError("at most one drive per transition");
    if (n12 > 0 && transmon.levels != 3)
        throw DomainError("a 1<->2 drive requires a three-level transmon");
    if (quasiparticles) quasiparticles->validate(transmon.omega01);
}

ThermalWeights thermal_weights(double occupation, BathStatistics stats) {
    if (stats == BathStatistics::bosonic) return {occupation + 1.0, occupation};
    const double norm = 1.0 + 2.0 * occupation;
    return {(1.0 + occupation) / norm, occupation / norm};
}

namespace {

// Rate that reproduces the TLS weights with bosonic (n+1, n) factors.
double effective_rate(double gamma, double occupation, BathStatistics stats) {
    return stats == BathStatistics::tls ? gamma / (1.0 + 2.0 * occupation) : gamma;
}

} // namespace

DerivedRates DerivedRates::with_linewidth(double g2) const {
    if (!(g2 > 0.0) || !std::isfinite(g2)) throw DomainError("linewidth must be positive");
    DerivedRates r = *this;
    r.gamma_2 = g2;
    r.linewidth_overridden = true;
    return r;
}

DerivedRates derive_rates(double gamma_r, double gamma_n, double n_r, double n_n,
                          double gamma_phi) {
    DerivedRates r;
    r.gamma_r = gamma_r;
    r.gamma_n = gamma_n;
    r.n_r = n_r;
    r.n_n = n_n;
    r.gamma_phi = gamma_phi;
    r.gamma_plus = n_n * gamma_n + n_r * gamma_r;
    r.gamma_minus = (n_n + 1.0) * gamma_n + (n_r + 1.0) * gamma_r;
    r.gamma_1 = r.gamma_plus + r.gamma_minus;
    r.gamma_2 = gamma_phi + 0.5 * r.gamma_1;
    return r;
}

DerivedRates derive_rates(const SystemConfig& config) {
    config.validate();
    const auto& rad = config.radiative;
    const auto& non = config.nonradiative;
    const double gphi = config.transmon.gamma_phi;

    DerivedRates r = derive_rates(rad.gamma,
                                  effective_rate(non.gamma, non.occupation, non.statistics),
                                  rad.occupation, non.occupation, gphi);
    if (config.transmon.levels == 3) {
        ThreeLevelRates t;
        t.n_r01 = rad.occupation;
        t.n_n01 = non.occupation;
        t.n_r12 = rad.occupation_for(Transition::t12);
        t.n_n12 = non.occupation_for(Transition::t12);
        t.gamma_n01 = effective_rate(non.gamma, t.n_n01, non.statistics);
        t.gamma_n12 = effective_rate(non.gamma, t.n_n12, non.statistics);
        t.gamma_plus_01 = rad.gamma * t.n_r01 + t.gamma_n01 * t.n_n01;
        t.gamma_minus_01 = rad.gamma * (t.n_r01 + 1.0) + t.gamma_n01 * (t.n_n01 + 1.0);
        t.gamma_plus_12 = rad.gamma * t.n_r12 + t.gamma_n12 * t.n_n12;
        t.gamma_minus_12 = rad.gamma * (t.n_r12 + 1.0) + t.gamma_n12 * (t.n_n12 + 1.0);
        t.gamma_1_01 = t.gamma_plus_01 + t.gamma_minus_01;
        t.gamma_1_12 = t.gamma_plus_12 + t.gamma_minus_12;
        t.gamma_2_01 = gphi + 0.5 * t.gamma_1_01;
        t.gamma_2_t = t.gamma_2_01 + t.gamma_plus_12;
        t.gamma_2_02 = gphi + 0.5 * t.gamma_plus_01 + t.gamma_minus_12;
        r.three = t;
    }
    return r;
}

double occupation_from_temperature(double temperature, double omega, BathStatistics stats) {
    require_finite(temperature, "temperature");
    if (!(omega > 0.0)) throw DomainError("omega must be > 0");
    if (temperature < 0.0) throw DomainError("temperature must be >= 0");
    if (temperature == 0.0) return 0.0;
    const double x = units::hbar * omega / (units::k_boltzmann * temperature);
    return stats == BathStatistics::bosonic ? 1.0 / std::expm1(x) : 1.0 / (std::exp(x) + 1.0);
}

double temperature_from_occupation(double occupation, double omega, BathStatistics stats) {
    require_finite(occupation, "occupation");
    if (!(omega > 0.0)) throw DomainError("omega must be > 0");
    if (occupation < 0.0) throw DomainError("occupation must be >= 0");
    if (occupation == 0.0) return 0.0; // zero-temperature sentinel
    double log_ratio = 0.0;
    if (stats == BathStatistics::bosonic) {
        log_ratio = std::log1p(1.0 / occupation);
    } else {
        if (occupation >= 0.5)
            throw DomainError("TLS occupation >= 1/2 has no positive temperature");
        log_ratio = std::log1p(-occupation) - std::log(occupation);
    }
    return units::hbar * omega / (units::k_boltzmann * log_ratio);
}

double occupation_temperature(double value, double omega, BathStatistics stats, Direction dir) {
    return dir == Direction::n_from_t ? occupation_from_temperature(value, omega, stats)
                                      : temperature_from_occupation(value, omega, stats);
}

double tls_rate_scaling(double gamma_n_zero, double temperature, double omega) {
    require_finite(temperature, "temperature");
    if (temperature < 0.0) throw DomainError("temperature must be >= 0");
    if (temperature == 0.0) return gamma_n_zero;
    return gamma_n_zero * std::tanh(units::hbar * omega / (units::k_boltzmann * temperature));
}

double effective_qubit_occupation(double rho11) {
    require_finite(rho11, "rho11");
    if (rho11 < 0.0) throw DomainError("rho11 must be >= 0");
    if (rho11 >= 0.5) throw DomainError("population inversion (rho11 >= 1/2) has no thermal occupation");
    return rho11 / (1.0 - 2.0 * rho11);
}

namespace table1 {

SystemConfig config(int levels) {
    SystemConfig c;
    c.transmon.omega01 = units::hz_to_rad(omega01_hz);
    c.transmon.anharmonicity = units::hz_to_rad(anharmonicity_hz);
    c.transmon.levels = levels;
    c.transmon.gamma_phi = 0.0;
    c.radiative = BathSpec{BathLabel::radiative, units::hz_to_rad(gamma_r_hz), n_r};
    c.nonradiative = BathSpec{BathLabel::nonradiative, units::hz_to_rad(gamma_n_hz), n_n};
    return c;
}

DerivedRates fitted_rates() {
    return derive_rates(config()).with_linewidth(units::hz_to_rad(gamma_2_hz));
}

} // namespace table1

} // namespace wgheat::model
