// lindblad.hpp — Dense Lindblad generator, steady state, dynamics and
// quantum-regression correlators for the 2- and 3-level transmon.
//
// Superoperator convention: density matrices are vectorised by stacking
// columns, vec(A X B) = (B^T (x) A) vec(X). Every module uses this ordering.
//
// Basis ordering: |0>, |1>[, |2>]; sigma_- = |0><1|, sigma_z = |1><1| - |0><0|.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgheat/model.hpp"
#include "wgheat/spectrum.hpp"

namespace wgheat::lindblad {

using cplx = std::complex<double>;

class DensityMatrix {
public:
    // Validates hermiticity and unit trace (1e-12) and positivity (-1e-10).
    explicit DensityMatrix(Eigen::MatrixXcd rho);

    static DensityMatrix ground(int dim);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    double population(int level) const { return rho_(level, level).real(); }
    cplx expectation(const Eigen::MatrixXcd& op) const { return (op * rho_).trace(); }
    Eigen::VectorXcd vec() const;

    static DensityMatrix from_vec(const Eigen::VectorXcd& v, int dim);

private:
    Eigen::MatrixXcd rho_;
};

struct Superoperator {
    Eigen::MatrixXcd matrix; // dim^2 x dim^2
    int dim{0};

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return matrix * v; }
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
    double norm() const;
};

// Building blocks on column-stacked vectors.
namespace superop {
Eigen::MatrixXcd left(const Eigen::MatrixXcd& a);   // rho -> a rho
Eigen::MatrixXcd right(const Eigen::MatrixXcd& b);  // rho -> rho b
Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& h); // rho -> -i [h, rho]
// D[c] rho = 2 c rho c^dag - {c^dag c, rho}
Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& c);
} // namespace superop

// Operators in the transmon basis.
namespace ops {
Eigen::MatrixXcd lowering(int dim, int lower, int upper); // |lower><upper|
Eigen::MatrixXcd projector(int dim, int level);
Eigen::MatrixXcd sigma_minus(int dim);                    // |0><1|
Eigen::MatrixXcd sigma_z();                               // 2-level
} // namespace ops

// The generator split by physical origin. total() is the full Liouvillian.
struct GeneratorParts {
    Superoperator hamiltonian;
    Superoperator radiative;
    Superoperator nonradiative;
    Superoperator dephasing;
    Superoperator quasiparticle;

    Superoperator total() const;
};

Eigen::MatrixXcd hamiltonian(const model::SystemConfig& config);
GeneratorParts build_generator_parts(const model::SystemConfig& config);
Superoperator build_liouvillian(const model::SystemConfig& config);

DensityMatrix steady_state(const Superoperator& l);

struct EvolveOptions {
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    double min_step{0.0}; // 0: derived from the grid span
};
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Superoperator& l,
                                  std::span<const double> t_grid, const EvolveOptions& opts = {});

enum class OperatorOrder {
    later_left,  // <A(t) B(0)> = Tr{A e^{Lt}[B rho]}
    later_right, // <B(0) A(t)> = Tr{A e^{Lt}[rho B]}
};

// Stationary two-time correlator on t_grid. Negative times are filled by the
// conjugate symmetry of stationary correlators.
CorrelationTrace regression_correlator(const Superoperator& l, const DensityMatrix& steady,
                                       const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                       std::span<const double> t_grid,
                                       OperatorOrder order = OperatorOrder::later_left,
                                       CorrelatorKind kind = CorrelatorKind::sp_sm);

// Both emission correlators of the 0<->1 transition.
CorrelationTrace emission_correlator(const model::SystemConfig& config, CorrelatorKind kind,
                                     std::span<const double> t_grid);

// Full-line Fourier transform  int dt e^{-i w t} <dA(t) dB(0)>  of the
// fluctuation correlator, evaluated through the resolvent of L (the
// coherent delta term <A><B> is excluded). Requires B = A^dag.
double fluctuation_spectrum(const Superoperator& l, const DensityMatrix& steady,
                            const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                            double omega_rot, OperatorOrder order);

// Output PSD of the waveguide (incoherent part of the emitted field,
// no black-body background) on an absolute angular frequency grid.
// The grid must cover omega01 +- 20 gamma_2.
Spectrum output_psd_numeric(const model::SystemConfig& config, std::span<const double> omega_grid,
                            PsdConvention convention = PsdConvention::per_hz);

// Same quantity at one absolute angular frequency, S(omega) convention, no
// coverage check.
double output_psd_at(const model::SystemConfig& config, double omega);

// Frequency of the rotating frame of the 0<->1 transition.
double frame_frequency(const model::SystemConfig& config);

// Steady-state 0<->1 moments.
struct Moments {
    cplx sm;   // <sigma->
    double spsm; // <sigma+ sigma->
    double smsp; // <sigma- sigma+>
};
Moments steady_moments(const model::SystemConfig& config);

// hbar omega01 (<b_in^dag b_in> - <b_out^dag b_out>) from the steady state.
double output_intensity_numeric(const model::SystemConfig& config);

// Energy flows hbar omega01 d<n>/dt split by generator part, in the steady
// state. n is the excitation number of the 0<->1 transition.
struct NumericBudget {
    double w_dot{0.0};
    double q_dot_r{0.0};
    double q_dot_n{0.0};
    double q_dot_qp{0.0};
    double q_dot_phi{0.0};
};
NumericBudget energy_flows_numeric(const model::SystemConfig& config);

// Truncation horizon for correlator traces, 15 / gamma_2.
double correlation_horizon(const model::DerivedRates& rates);

// Spectrum from a sampled stationary correlator (t >= 0 part, uniform grid)
// by trapezoidal Fourier quadrature with an exponential tail taper.
double transform_trace(const CorrelationTrace& trace, double omega_rot);

} // namespace wgheat::lindblad
