// model.hpp — Parameter records, derived rates and occupation/temperature maps
//
// Unit convention: every rate and frequency held by these types is angular
// (rad/s). Temperatures are kelvin, energies joules. Conversion to Hz only
// happens at the I/O boundary (see units.hpp).

#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace wgheat::model {

enum class BathLabel { radiative, nonradiative };
enum class BathStatistics { bosonic, tls };
enum class Transition { t01, t12 };

struct TransmonSpec {
    double omega01{0.0};
    double anharmonicity{0.0}; // omega12 - omega01, negative for a transmon
    int levels{2};
    double gamma_phi{0.0};

    double omega12() const { return omega01 + anharmonicity; }
    void validate() const;
};

// A thermal environment. The occupation is the stored quantity; temperature
// is derived on demand through occupation_temperature(). occupation_12 is the
// occupation seen by the 1<->2 transition of a three-level transmon; when it
// is absent the 0<->1 occupation is reused.
struct BathSpec {
    BathLabel label{BathLabel::radiative};
    double gamma{0.0};
    double occupation{0.0};
    BathStatistics statistics{BathStatistics::bosonic};
    std::optional<double> occupation_12;

    double occupation_for(Transition t) const {
        return t == Transition::t12 && occupation_12 ? *occupation_12 : occupation;
    }
    void validate() const;
};

// Coherent drive in the frame rotating at the drive frequency. detuning is
// omega_p - omega_transition; zero amplitude means the drive is off.
struct DriveSpec {
    Transition transition{Transition::t01};
    double detuning{0.0};
    std::complex<double> amplitude{0.0, 0.0};

    bool active() const { return amplitude != std::complex<double>{0.0, 0.0}; }
};

struct QuasiparticleSpec {
    double gamma_up{0.0};
    double gamma_down{0.0};
    double gap{0.0};         // J
    double r_n{0.0};         // Ohm
    double capacitance{0.0}; // F

    void validate(double omega01) const;
};

struct SystemConfig {
    TransmonSpec transmon;
    BathSpec radiative{BathLabel::radiative};
    BathSpec nonradiative{BathLabel::nonradiative};
    std::vector<DriveSpec> drives;
    std::optional<QuasiparticleSpec> quasiparticles;

    // nullptr when no drive addresses that transition.
    const DriveSpec* drive(Transition t) const;
    // Rabi amplitude on a transition, zero when undriven.
    std::complex<double> rabi(Transition t) const;
    double detuning(Transition t) const;

    SystemConfig without_drives() const;
    SystemConfig with_drive(DriveSpec d) const;

    void validate() const;
};

// Composite rates of the three-level model. The 1<->2 quantities follow the
// convenience convention of the three-level equations of motion: they are
// half the actual thermalisation rates of that transition (the factor of two
// is carried by the dissipator prefactors).
struct ThreeLevelRates {
    double n_r01{0.0}, n_n01{0.0}, n_r12{0.0}, n_n12{0.0};
    double gamma_n01{0.0}, gamma_n12{0.0}; // effective (TLS-rescaled) nonradiative rates
    double gamma_plus_01{0.0}, gamma_minus_01{0.0};
    double gamma_plus_12{0.0}, gamma_minus_12{0.0};
    double gamma_1_01{0.0}, gamma_1_12{0.0};
    double gamma_2_01{0.0};
    double gamma_2_t{0.0};  // gamma_2_01 + gamma_plus_12
    double gamma_2_02{0.0}; // gamma_phi + gamma_plus_01/2 + gamma_minus_12

    double delta_n() const { return n_n01 - n_r01; }
};

// All composite rates of the two-level model. gamma_n is the effective
// nonradiative rate: for a TLS bath it is already rescaled by 1/(1+2n_n),
// which makes every bosonic-form closed expression valid unchanged.
struct DerivedRates {
    double gamma_r{0.0};
    double gamma_n{0.0};
    double n_r{0.0};
    double n_n{0.0};
    double gamma_phi{0.0};
    double gamma_plus{0.0};
    double gamma_minus{0.0};
    double gamma_1{0.0};
    double gamma_2{0.0};
    bool linewidth_overridden{false};
    std::optional<ThreeLevelRates> three;

    double delta_n() const { return n_n - n_r; }
    double thermal_population() const { return gamma_plus / gamma_1; }

    // Copy with gamma_2 replaced by an independently measured linewidth
    // (e.g. the fitted 143 kHz, which is narrower than gamma_1/2).
    DerivedRates with_linewidth(double gamma_2) const;
};

DerivedRates derive_rates(const SystemConfig& config);

// Two-level bosonic rates straight from the four bath numbers.
DerivedRates derive_rates(double gamma_r, double gamma_n, double n_r, double n_n,
                          double gamma_phi = 0.0);

enum class Direction { n_from_t, t_from_n };

double occupation_from_temperature(double temperature, double omega, BathStatistics stats);
double temperature_from_occupation(double occupation, double omega, BathStatistics stats);
double occupation_temperature(double value, double omega, BathStatistics stats, Direction dir);

// Temperature dependence of a TLS-limited decay rate,
// gamma_n0 * tanh(hbar omega / kB T).
double tls_rate_scaling(double gamma_n_zero, double temperature, double omega);

// Occupation of a thermal oscillator with the given excited-state population.
double effective_qubit_occupation(double rho11);

// Bosonic weights (down, up) of the dissipators of a bath, or their TLS
// replacement ((1+n)/(1+2n), n/(1+2n)).
struct ThermalWeights {
    double down{1.0};
    double up{0.0};
};
ThermalWeights thermal_weights(double occupation, BathStatistics stats);

// Table 1 of the measured device, as a configuration.
namespace table1 {
inline constexpr double omega01_hz = 5.5e9;
inline constexpr double anharmonicity_hz = -250e6;
inline constexpr double gamma_r_hz = 227e3;
inline constexpr double gamma_n_hz = 55e3;
inline constexpr double gamma_2_hz = 143e3;
inline constexpr double n_r = 0.004;
inline constexpr double n_n = 0.139;
inline constexpr double delta_n = 0.135;
inline constexpr double mollow_rabi_hz = 8.8e6;
inline constexpr double autler_rabi_hz = 1.5e6;
inline constexpr double reflection_numerator_hz = 214e3;
inline constexpr double gap_uev = 170.0;
inline constexpr double r_n_ohm = 6.3e3;
inline constexpr double capacitance_ff = 78.0;

SystemConfig config(int levels = 2);
// derive_rates(config()) with gamma_2 pinned to the fitted 143 kHz.
DerivedRates fitted_rates();
} // namespace table1

} // namespace wgheat::model
