// fit.hpp — Damped least-squares fits of spectra, reflection traces and power-loss curves
//
// Files and fit parameters speak Hz (no implicit 2 pi). Centers are absolute
// lab frequencies; internally they are fitted as offsets from the data peak
// so the optimizer sees O(linewidth) numbers.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgheat/model.hpp"
#include "wgheat/spectrum.hpp"

namespace wgheat::fit {

using cplx = std::complex<double>;

struct Param {
    std::string name;
    double value{0.0};
    double sigma{0.0};
};

struct FitResult {
    std::vector<Param> params; // free parameters first, then derived quantities
    std::size_t n_free{0};
    Eigen::MatrixXd covariance; // of the free parameters
    double residual_rms{0.0};
    bool converged{false};
    int iterations{0};
    double gradient_norm{0.0};    // max |cos| between residual and Jacobian columns
    double condition_number{0.0}; // of the Jacobian scaled by typical parameter sizes
    std::vector<std::string> flags;
    std::string message;

    const Param& param(const std::string& name) const;
    double value(const std::string& name) const { return param(name).value; }
    double sigma(const std::string& name) const { return param(name).sigma; }
    bool flagged(const std::string& flag) const;
};

struct LeastSquaresOptions {
    int max_iterations{200};
    double cost_tol{1e-10}; // relative change of the sum of squares
    double grad_tol{1e-12};
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Levenberg-Marquardt on r(p). scale gives the typical size of each
// parameter (finite-difference steps and conditioning). Sigmas come from the
// Jacobian covariance scaled by the residual variance sum r^2 / (m - p).
FitResult least_squares(const ResidualFn& residuals, Eigen::VectorXd p0, const Eigen::VectorXd& scale,
                        const std::vector<std::string>& names, const LeastSquaresOptions& opt = {});

// Optional per-point 1-sigma weights; empty means uniform.
using Weights = std::vector<double>;

// Sum of n_peaks Lorentzians A w^2 / ((f - c)^2 + w^2). Parameters
// center_hz, hwhm_hz, amplitude (suffix _2 for the second peak), plus
// baseline when requested (a constant pedestal, e.g. aliased tails).
FitResult fit_lorentzian(const Spectrum& spec, int n_peaks = 1, const Weights& sigma = {},
                         bool baseline = false);

// 2 pi S = hbar 2 pi c 2 k gamma / (df^2 + gamma^2), the thermal line.
// Parameters coefficient_hz (k = gamma_r gamma_n dn / (2 pi gamma_1)),
// gamma2_hz, center_hz; derived integrated_power_w.
FitResult fit_thermal(const Spectrum& spec, const Weights& sigma = {});

// 2 pi S = hbar 2 pi c g gamma / (2 (df^2 + gamma^2)), the Mollow center peak.
// Parameters gamma_r_hz, gamma2_hz, center_hz.
FitResult fit_mollow(const Spectrum& spec, const Weights& sigma = {});

struct PowerLossPoint {
    double rabi_hz{0.0};
    double watts{0.0};
};
struct PowerLossFixed {
    double gamma2_hz{0.0};
    double gamma_r_hz{0.0};
    double omega01_hz{0.0};
    // Reflection numerator; closes gamma_1 = gamma_r (gamma_r + gamma_n) / A.
    // Without it gamma_1 = 2 gamma_2 (no pure dephasing).
    std::optional<double> numerator_hz;
    // 1-sigma uncertainties of the fixed inputs, propagated into the fit sigmas.
    double gamma2_sigma_hz{0.0};
    double gamma_r_sigma_hz{0.0};
    double numerator_sigma_hz{0.0};
    double gamma2_gamma_r_correlation{0.0}; // both usually come from the Mollow fit
};
// Parameters gamma_n_hz, delta_n. Flags: ill_conditioned (all points on one
// side of zero or a near-singular Jacobian), delta_n_unidentifiable.
FitResult fit_power_loss(const std::vector<PowerLossPoint>& points, const PowerLossFixed& fixed,
                         const Weights& sigma = {});
// The model used by fit_power_loss, in watts.
double power_loss_model(double rabi_hz, double gamma_n_hz, double delta_n, const PowerLossFixed& fixed);

struct ReflectionPoint {
    double delta_hz{0.0};
    cplx r;
};
enum class ReflectionMode { complex, magnitude, phase };
// r = 1 - i A / ((delta - c) + i gamma). Parameters numerator_hz, gamma2_hz,
// center_hz (a detuning offset).
FitResult fit_reflection(const std::vector<ReflectionPoint>& trace,
                         ReflectionMode mode = ReflectionMode::complex, const Weights& sigma = {});
cplx reflection_model(double delta_hz, double numerator_hz, double gamma2_hz, double center_hz);

struct Table1Record {
    double gamma_r_hz{0.0}, gamma_2_hz{0.0}, gamma_n_hz{0.0}, delta_n{0.0}, numerator_hz{0.0};
    double rho11{0.0}, n_r{0.0}, n_n{0.0}, n_q{0.0}, gamma_1_hz{0.0};
    double t_r_mk{0.0}, t_n_mk{0.0}, t_q_mk{0.0};
    // 1-sigma uncertainties propagated linearly from the fit sigmas.
    double sigma_n_r{0.0}, sigma_n_n{0.0}, sigma_gamma_1_hz{0.0};
    double gamma_2_reflection_hz{0.0};
    double gamma_2_discrepancy_hz{0.0}; // reflection minus Mollow
    double gamma_phi_implied_hz{0.0};   // gamma_2 - gamma_1 / 2
    double dephasing_z{0.0}; // (gamma_1 - 2 gamma_2) over its combined sigma
    std::vector<std::string> flags;
};

// Solves dn = n_n - n_r and rho11 = (n_n gamma_n + n_r gamma_r) / gamma_1 with
// rho11 = (1 - A / gamma_r) / 2. The Mollow gamma_2 is primary.
Table1Record reconcile_table1(const FitResult& mollow, const FitResult& power_loss,
                              const FitResult& reflection, double omega01_hz);

// Synthetic data for round trips. Noise is Gaussian, seeded with
// std::mt19937_64; relative noise multiplies each point by (1 + s N(0,1)),
// absolute noise adds s_abs N(0,1).
struct Noise {
    double relative{0.0};
    double absolute{0.0};
    std::uint64_t seed{0};
};
Spectrum add_noise(const Spectrum& spec, const Noise& noise);
std::vector<PowerLossPoint> synth_power_loss(const std::vector<double>& rabi_hz,
                                             const model::DerivedRates& rates, double omega01,
                                             const Noise& noise = {});
std::vector<ReflectionPoint> synth_reflection(const std::vector<double>& delta_hz,
                                              const model::DerivedRates& rates, const Noise& noise = {});

// Noise levels giving fit uncertainties of the size quoted with the Table-1
// numbers (about 4 kHz on gamma_r and gamma_2, 3 kHz on gamma_n, 0.2 kHz on
// the thermal coefficient). Absolute levels are fractions of the line peak.
struct ReferenceScenario {
    std::vector<double> spectrum_offsets_hz; // around omega01
    std::vector<double> rabi_hz;
    std::vector<double> reflection_delta_hz;
    double mollow_noise{0.0};     // relative to the Mollow peak
    double thermal_noise{0.0};    // relative to the thermal peak
    double power_loss_noise{0.0}; // relative, per point
    double power_loss_floor{0.0}; // absolute, relative to hbar omega01 gamma_n / 2
    double reflection_noise{0.0}; // absolute, on Re and Im
};
ReferenceScenario reference_scenario();

struct SyntheticSet {
    Spectrum mollow;
    Spectrum thermal;
    std::vector<PowerLossPoint> power_loss;
    std::vector<ReflectionPoint> reflection;
};
// All datasets from one rate set; the seed is split deterministically.
SyntheticSet synthesize(const model::DerivedRates& rates, double omega01, const ReferenceScenario& sc,
                        std::uint64_t seed, bool noiseless = false);

struct RoundTrip {
    FitResult mollow, thermal, power_loss, reflection;
    Table1Record table;
};
RoundTrip fit_all(const SyntheticSet& data, double omega01_hz);

} // namespace wgheat::fit
