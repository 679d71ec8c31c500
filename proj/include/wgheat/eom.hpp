// eom.hpp — Closed Heisenberg equations of motion for low-order moments
//
// Two-level basis (s1, s1*, s2) = (<sigma->, <sigma+>, <sigma+ sigma->).
// Weak-drive three-level basis (w1, w1*, w2, w3) = (<sigma-01>, <sigma+01>,
// <sigma+01 sigma-01>, <sigma-01 sigma+01>); the 1<->2 rates follow the
// half-rate convention of ThreeLevelRates.
//
// d/dt x = M x + B. Detunings are omega_p - omega_transition.

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgheat/model.hpp"
#include "wgheat/spectrum.hpp"

namespace wgheat::eom {

using cplx = std::complex<double>;

struct MomentSystem {
    int order{0};
    Eigen::MatrixXcd m_matrix;
    Eigen::VectorXcd b_vector;
    std::vector<std::string> labels;
};

MomentSystem eom_two_level(double delta, cplx omega_rabi, const model::DerivedRates& rates);

// Requires rates.three. The closed set exists only without a 1<->2 drive;
// a nonzero omega2 is rejected.
MomentSystem eom_three_level_weak(double delta01, cplx omega1, const model::DerivedRates& rates,
                                  cplx omega2 = {});

struct MomentVector {
    Eigen::VectorXcd values;
    std::vector<std::string> labels;

    cplx at(const std::string& label) const;
};

// Solves M x = -B.
MomentVector moment_steady(const MomentSystem& system);

// Largest real part of the spectrum of M.
double spectral_abscissa(const MomentSystem& system);

// Two-time correlators sp_sm = <sigma+(t) sigma-(0)> and sm_sp =
// <sigma-(0) sigma+(t)> by the regression theorem applied to the moment
// equations; sm / sp give the one-time relaxation from the ground state.
// Negative times follow from conjugate symmetry.
CorrelationTrace correlator_from_eom(const MomentSystem& system, const MomentVector& steady,
                                     std::span<const double> t_grid,
                                     CorrelatorKind kind = CorrelatorKind::sp_sm);

// Full-line Fourier transform of the fluctuation part of an sp_sm or sm_sp
// correlator at rotating-frame frequency omega_rot, through (i w - M)^{-1}.
double fluctuation_spectrum(const MomentSystem& system, const MomentVector& steady,
                            double omega_rot, CorrelatorKind kind);

} // namespace wgheat::eom
