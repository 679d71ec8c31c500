// analytic.hpp — Closed-form observables of the two- and three-level models
//
// Spectral densities S(omega) are per angular frequency; Spectrum objects
// default to the 2*pi*S(omega) display convention (W/Hz). Validity regimes
// (weak probe, strong drive) are the caller's responsibility: every formula
// stays evaluable outside its regime so breakdown can be plotted.

#pragma once

#include <complex>
#include <span>

#include "wgheat/model.hpp"
#include "wgheat/spectrum.hpp"

namespace wgheat::analytic {

using cplx = std::complex<double>;

// Steady-state moments of the driven two-level system.
struct SteadyMoments {
    cplx sm;     // <sigma->
    double spsm; // <sigma+ sigma->
    double smsp; // <sigma- sigma+>
};
SteadyMoments steady_moments(double delta, cplx omega_rabi, const model::DerivedRates& rates);

// Effective reflection numerator gamma_r (1 - 2 gamma_+ / gamma_1).
double reflection_numerator(const model::DerivedRates& rates);
// Weak-probe reflection, r = 1 - i A / (delta + i gamma_2).
cplx reflection_two_level(double delta, const model::DerivedRates& rates);
// Exact input-output reflection from a steady coherence, 1 - 2 i gamma_r <sigma-> / Omega.
cplx reflection_from_coherence(cplx sm, cplx omega_rabi, double gamma_r);

// Thermal emission line. Coefficient gamma_r gamma_n dn / gamma_1 (rad/s).
double thermal_coefficient(const model::DerivedRates& rates);
double thermal_psd_at(double omega, const model::DerivedRates& rates, double omega01);
Spectrum thermal_psd(std::span<const double> omega_grid, const model::DerivedRates& rates,
                     double omega01, PsdConvention convention = PsdConvention::per_hz);

// Centre peak of the resonance-fluorescence triplet under strong drive.
double mollow_center_psd_at(double omega, const model::DerivedRates& rates, double omega01);
Spectrum mollow_center_psd(std::span<const double> omega_grid, const model::DerivedRates& rates,
                           double omega01, PsdConvention convention = PsdConvention::per_hz);

// Resonant power lost from the waveguide, W.
double power_loss(double omega_rabi, const model::DerivedRates& rates, double omega01);
// Rabi rate at which the resonant power loss changes sign, sqrt(2 gamma_2 gamma_r dn).
double power_loss_zero_crossing(const model::DerivedRates& rates);

// Work rate hbar omega01 Re(i Omega* <sigma->). The energy scale hbar omega01
// is absent from the bare expression but required for watts.
double work_rate(cplx omega_rabi, double delta, const model::DerivedRates& rates, double omega01);
// On resonance, hbar omega01 |Omega| |<sigma->|.
double work_rate_resonant(double omega_rabi, const model::DerivedRates& rates, double omega01);

struct PowerBudget {
    double p_loss{0.0};
    double w_dot{0.0};
    double q_dot_r{0.0};
    double q_dot_n{0.0};
    double u_dot{0.0}; // q_dot_r + q_dot_n + w_dot

    double max_flow() const;
};
PowerBudget heat_rates(cplx omega_rabi, double delta, const model::DerivedRates& rates,
                       double omega01);

// Area under the thermal line, hbar omega01 gamma_r gamma_n dn / gamma_1.
double integrated_thermal_power(const model::DerivedRates& rates, double omega01);
// The same area by numerical quadrature of thermal_psd_at. The whole line is
// mapped onto a finite interval through omega = omega01 + gamma_2 tan(theta);
// a truncated window would miss 2/(pi K) of the area beyond +-K gamma_2.
double integrated_thermal_power_quadrature(const model::DerivedRates& rates, double omega01,
                                           int points = 4001);
// Trapezoidal area of thermal_psd over omega01 +- half_span_gamma2 * gamma_2.
double windowed_thermal_power(const model::DerivedRates& rates, double omega01,
                              double half_span_gamma2, int points = 8001);

// Three-level corrections (rates.three required).
double g_factor(const model::DerivedRates& rates);
double f_factor(const model::DerivedRates& rates);
double y_factor(const model::DerivedRates& rates);
cplx reflection_three_level(double delta, const model::DerivedRates& rates);
Spectrum mollow_center_three_level(std::span<const double> omega_grid,
                                   const model::DerivedRates& rates, double omega01,
                                   PsdConvention convention = PsdConvention::per_hz);
Spectrum thermal_psd_three_level(std::span<const double> omega_grid,
                                 const model::DerivedRates& rates, double omega01,
                                 PsdConvention convention = PsdConvention::per_hz);

// Autler-Townes side peaks of the 0<->1 emission under a strong 1<->2 drive:
// Lorentzians at omega01 -+ omega2/sqrt(2) with half width
// (gamma_2_t + gamma_2_02)/2.
double autler_numerator(const model::DerivedRates& rates);
double autler_half_width(const model::DerivedRates& rates);
double autler_sidepeaks_at(double omega, const model::DerivedRates& rates, double omega2_rabi,
                           double omega01);
Spectrum autler_sidepeaks(std::span<const double> omega_grid, const model::DerivedRates& rates,
                          double omega2_rabi, double omega01,
                          PsdConvention convention = PsdConvention::per_hz);

// Quasiparticles.
double qp_power_loss(const model::DerivedRates& rates, const model::QuasiparticleSpec& qp,
                     double omega01);
double qp_population(double n_ratio, double gap, double omega01);
// Inverse of qp_population: n_qp / n_cp from an excited-state population.
double qp_density_ratio(double rho11, double gap, double omega01);

struct QpRates {
    double gamma_down{0.0};
    double gamma_up{0.0};
    double gamma_qp{0.0}; // gamma_down - gamma_up
};
QpRates qp_gamma_down(double rho11_qp, double r_n, double capacitance, double gap, double omega01);

struct QpThermal {
    double x_qp{0.0};
    double gamma_qp{0.0}; // s^-1
};
QpThermal qp_thermal_rate(double temperature, double gap, double omega01);

} // namespace wgheat::analytic
