// lindblad.cpp — Numerical oracle: generator assembly, null-space steady state,
// adaptive dynamics and quantum-regression spectra

#include "wgheat/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "wgheat/errors.hpp"
#include "wgheat/linalg.hpp"
#include "wgheat/units.hpp"

namespace wgheat::lindblad {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using model::SystemConfig;
using model::Transition;

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPosTol = 1e-10;

// Evolved states carry integrator error; their checks are looser.
constexpr double kEvolvedTraceTol = 1e-8;
constexpr double kEvolvedHermTol = 1e-9;

void check_density(const MatrixXcd& rho, double herm_tol, double trace_tol) {
    if (rho.rows() != rho.cols() || (rho.rows() != 2 && rho.rows() != 3))
        throw DomainError("density matrix must be 2x2 or 3x3");
    if (!rho.allFinite()) throw NumericalError("density matrix has non-finite entries");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol)
        throw NumericalError("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr = std::abs(rho.trace() - 1.0);
    if (tr > trace_tol)
        throw NumericalError("density matrix trace deviates from 1 by " + std::to_string(tr));
    const MatrixXcd h = 0.5 * (rho + rho.adjoint());
    const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXcd>(h, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    if (min_eig < -kPosTol)
        throw NumericalError("density matrix has negative eigenvalue " + std::to_string(min_eig));
}

DensityMatrix make_checked(MatrixXcd rho, double herm_tol, double trace_tol);

} // namespace

DensityMatrix::DensityMatrix(MatrixXcd rho) : rho_(std::move(rho)) {
    check_density(rho_, kHermTol, kTraceTol);
}

DensityMatrix DensityMatrix::ground(int dim) {
    MatrixXcd g = MatrixXcd::Zero(dim, dim);
    g(0, 0) = 1.0;
    return DensityMatrix(g);
}

VectorXcd DensityMatrix::vec() const {
    return Eigen::Map<const VectorXcd>(rho_.data(), rho_.size());
}

DensityMatrix DensityMatrix::from_vec(const VectorXcd& v, int dim) {
    return DensityMatrix(Eigen::Map<const MatrixXcd>(v.data(), dim, dim));
}

namespace {

DensityMatrix make_checked(MatrixXcd rho, double herm_tol, double trace_tol) {
    check_density(rho, herm_tol, trace_tol);
    // Normalise the residual drift away before the strict constructor runs;
    // the drift itself has been bounded above.
    MatrixXcd h = 0.5 * (rho + rho.adjoint());
    h /= h.trace();
    return DensityMatrix(h);
}

} // namespace

MatrixXcd Superoperator::apply(const MatrixXcd& rho) const {
    VectorXcd v = matrix * Eigen::Map<const VectorXcd>(rho.data(), rho.size());
    return Eigen::Map<const MatrixXcd>(v.data(), dim, dim);
}

double Superoperator::norm() const { return matrix.cwiseAbs().rowwise().sum().maxCoeff(); }

namespace superop {

MatrixXcd left(const MatrixXcd& a) {
    const auto n = a.rows();
    return Eigen::kroneckerProduct(MatrixXcd::Identity(n, n), a);
}

MatrixXcd right(const MatrixXcd& b) {
    const auto n = b.rows();
    return Eigen::kroneckerProduct(MatrixXcd(b.transpose()), MatrixXcd::Identity(n, n));
}

MatrixXcd commutator(const MatrixXcd& h) {
    return cplx(0.0, -1.0) * (left(h) - right(h));
}

MatrixXcd dissipator(const MatrixXcd& c) {
    const MatrixXcd cdc = c.adjoint() * c;
    return 2.0 * left(c) * right(c.adjoint()) - left(cdc) - right(cdc);
}

} // namespace superop

namespace ops {

MatrixXcd lowering(int dim, int lower, int upper) {
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    m(lower, upper) = 1.0;
    return m;
}

MatrixXcd projector(int dim, int level) { return lowering(dim, level, level); }

MatrixXcd sigma_minus(int dim) { return lowering(dim, 0, 1); }

MatrixXcd sigma_z() { return projector(2, 1) - projector(2, 0); }

} // namespace ops

Superoperator GeneratorParts::total() const {
    return {hamiltonian.matrix + radiative.matrix + nonradiative.matrix + dephasing.matrix
                + quasiparticle.matrix,
            hamiltonian.dim};
}

MatrixXcd hamiltonian(const SystemConfig& config) {
    const int d = config.transmon.levels;
    const MatrixXcd sm01 = ops::lowering(d, 0, 1);
    const cplx om1 = config.rabi(Transition::t01);
    const double det1 = config.detuning(Transition::t01);

    // -Delta/2 sigma_z equals -Delta |1><1| up to a multiple of identity.
    MatrixXcd h = -det1 * ops::projector(d, 1);
    h += 0.5 * (om1 * MatrixXcd(sm01.adjoint()) + std::conj(om1) * sm01);
    if (d == 3) {
        const MatrixXcd sm12 = ops::lowering(d, 1, 2);
        const cplx om2 = config.rabi(Transition::t12);
        const double det2 = config.detuning(Transition::t12);
        h += -(det1 + det2) * ops::projector(d, 2);
        // The 1<->2 dipole element is sqrt(2) larger.
        h += 0.5 * std::sqrt(2.0) * (om2 * MatrixXcd(sm12.adjoint()) + std::conj(om2) * sm12);
    }
    return h;
}

namespace {

// (gamma/2) [ w_down D[c] + w_up D[c^dag] ] with D[c] rho = 2 c rho c^dag - {c^dag c, rho},
// i.e. standard-form rates gamma*w_down and gamma*w_up.
MatrixXcd thermal_pair(double half_rate, model::ThermalWeights w, const MatrixXcd& c) {
    MatrixXcd out = half_rate * w.down * superop::dissipator(c);
    if (w.up != 0.0) out += half_rate * w.up * superop::dissipator(c.adjoint());
    return out;
}

} // namespace

GeneratorParts build_generator_parts(const SystemConfig& config) {
    config.validate();
    const int d = config.transmon.levels;
    const int n2 = d * d;
    const auto zero = [&] { return Superoperator{MatrixXcd::Zero(n2, n2), d}; };

    GeneratorParts p{zero(), zero(), zero(), zero(), zero()};
    p.hamiltonian.matrix = superop::commutator(hamiltonian(config));

    const auto& rad = config.radiative;
    const auto& non = config.nonradiative;
    const MatrixXcd sm01 = ops::lowering(d, 0, 1);

    p.radiative.matrix = thermal_pair(0.5 * rad.gamma,
                                      model::thermal_weights(rad.occupation, rad.statistics), sm01);
    p.nonradiative.matrix = thermal_pair(
        0.5 * non.gamma, model::thermal_weights(non.occupation, non.statistics), sm01);

    if (d == 3) {
        // 1<->2 dissipators carry prefactor gamma (not gamma/2): the sqrt(2)
        // dipole enhancement doubles the rates of that transition.
        const MatrixXcd sm12 = ops::lowering(d, 1, 2);
        p.radiative.matrix += thermal_pair(
            rad.gamma,
            model::thermal_weights(rad.occupation_for(Transition::t12), rad.statistics), sm12);
        p.nonradiative.matrix += thermal_pair(
            non.gamma,
            model::thermal_weights(non.occupation_for(Transition::t12), non.statistics), sm12);
    }

    const double gphi = config.transmon.gamma_phi;
    if (gphi > 0.0) {
        if (d == 2) {
            p.dephasing.matrix = 0.25 * gphi * superop::dissipator(ops::sigma_z());
        } else {
            for (int i = 0; i < d; ++i)
                p.dephasing.matrix += 0.5 * gphi * superop::dissipator(ops::projector(d, i));
        }
    }

    if (config.quasiparticles) {
        // Standard-form rates gamma_down, gamma_up on the 0<->1 transition.
        const auto& qp = *config.quasiparticles;
        p.quasiparticle.matrix = 0.5 * qp.gamma_down * superop::dissipator(sm01)
                                 + 0.5 * qp.gamma_up * superop::dissipator(sm01.adjoint());
    }
    return p;
}

Superoperator build_liouvillian(const SystemConfig& config) {
    return build_generator_parts(config).total();
}

DensityMatrix steady_state(const Superoperator& l) {
    const int d = l.dim;
    const int n2 = d * d;
    if (l.matrix.rows() != n2 || l.matrix.cols() != n2)
        throw DomainError("superoperator size does not match its dimension");

    const double scale = l.norm();
    if (!(scale > 0.0)) throw NumericalError("steady state: generator is zero (no unique fixed point)");

    Eigen::JacobiSVD<MatrixXcd> svd(l.matrix);
    const auto& sv = svd.singularValues();
    const double tol = 1e-11 * sv(0);
    int nullity = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol) ++nullity;
    if (nullity > 1)
        throw NumericalError("steady state: null space of dimension " + std::to_string(nullity)
                             + " (disconnected or purely unitary model)");

    // Augment with the trace condition and solve in the least-squares sense.
    MatrixXcd a(n2 + 1, n2);
    a.topRows(n2) = l.matrix / scale;
    for (int k = 0; k < n2; ++k) a(n2, k) = (k % (d + 1) == 0) ? 1.0 : 0.0;
    VectorXcd rhs = VectorXcd::Zero(n2 + 1);
    rhs(n2) = 1.0;
    const VectorXcd x = a.colPivHouseholderQr().solve(rhs);

    MatrixXcd rho = Eigen::Map<const MatrixXcd>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();

    const VectorXcd v = Eigen::Map<const VectorXcd>(rho.data(), n2);
    const double residual = (l.matrix * v).cwiseAbs().maxCoeff() / scale;
    if (residual > 1e-10)
        throw NumericalError("steady state: residual " + std::to_string(residual) + " too large");
    return DensityMatrix(rho);
}

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Superoperator& l,
                                  std::span<const double> t_grid, const EvolveOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    using state = std::vector<cplx>;

    if (!linalg::strictly_increasing(t_grid)) throw DomainError("evolve: time grid must be strictly increasing");
    if (rho0.dim() != l.dim) throw DomainError("evolve: state and generator dimensions differ");

    const auto n2 = static_cast<Eigen::Index>(l.dim) * l.dim;
    const VectorXcd v0 = rho0.vec();
    state x(v0.data(), v0.data() + n2);

    auto rhs = [&](const state& in, state& out, double /*t*/) {
        Eigen::Map<const VectorXcd> vin(in.data(), n2);
        Eigen::Map<VectorXcd> vout(out.data(), n2);
        vout.noalias() = l.matrix * vin;
    };

    std::vector<DensityMatrix> result;
    result.reserve(t_grid.size());
    auto observer = [&](const state& s, double /*t*/) {
        MatrixXcd rho = Eigen::Map<const MatrixXcd>(s.data(), l.dim, l.dim);
        result.push_back(make_checked(std::move(rho), kEvolvedHermTol, kEvolvedTraceTol));
    };

    const double span = t_grid.back() - t_grid.front();
    const double dt0 = span > 0.0 ? span / 1e3 : 1.0;
    try {
        auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                               odeint::runge_kutta_dopri5<state>());
        odeint::integrate_times(stepper, rhs, x, t_grid.begin(), t_grid.end(), dt0, observer,
                                odeint::max_step_checker(100000));
    } catch (const odeint::step_adjustment_error& e) {
        throw NumericalError(std::string("evolve: step-size underflow: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        throw NumericalError(std::string("evolve: step-size underflow: ") + e.what());
    } catch (const odeint::odeint_error& e) {
        throw NumericalError(std::string("evolve: integration failed: ") + e.what());
    }
    return result;
}

namespace {

double stationarity_residual(const Superoperator& l, const DensityMatrix& rho) {
    const double scale = l.norm();
    if (!(scale > 0.0)) return 0.0;
    return (l.matrix * rho.vec()).cwiseAbs().maxCoeff() / scale;
}

void require_stationary(const Superoperator& l, const DensityMatrix& rho) {
    if (rho.dim() != l.dim) throw DomainError("state and generator dimensions differ");
    if (stationarity_residual(l, rho) > 1e-8)
        throw DomainError("regression correlator: input state is not stationary under L");
}

VectorXcd as_vec(const MatrixXcd& m) { return Eigen::Map<const VectorXcd>(m.data(), m.size()); }

cplx trace_with(const MatrixXcd& a, const VectorXcd& v, int d) {
    const Eigen::Map<const MatrixXcd> m(v.data(), d, d);
    return (a * m).trace();
}

} // namespace

CorrelationTrace regression_correlator(const Superoperator& l, const DensityMatrix& steady,
                                       const MatrixXcd& a, const MatrixXcd& b,
                                       std::span<const double> t_grid, OperatorOrder order,
                                       CorrelatorKind kind) {
    require_stationary(l, steady);
    const int d = l.dim;
    const MatrixXcd& rho = steady.matrix();

    const bool later_left = order == OperatorOrder::later_left;
    const VectorXcd x_pos = as_vec(later_left ? MatrixXcd(b * rho) : MatrixXcd(rho * b));
    const MatrixXcd a_dag = a.adjoint();
    const MatrixXcd b_dag = b.adjoint();
    const VectorXcd x_neg = as_vec(later_left ? MatrixXcd(a_dag * rho) : MatrixXcd(rho * a_dag));

    CorrelationTrace out;
    out.kind = kind;
    out.times.assign(t_grid.begin(), t_grid.end());
    out.values.reserve(t_grid.size());
    for (double t : t_grid) {
        const MatrixXcd prop = linalg::expm(l.matrix * std::abs(t));
        if (t >= 0.0) {
            out.values.push_back(trace_with(a, prop * x_pos, d));
        } else {
            out.values.push_back(std::conj(trace_with(b_dag, prop * x_neg, d)));
        }
    }
    return out;
}

CorrelationTrace emission_correlator(const SystemConfig& config, CorrelatorKind kind,
                                     std::span<const double> t_grid) {
    const auto l = build_liouvillian(config);
    const auto ss = steady_state(l);
    const int d = config.transmon.levels;
    const MatrixXcd sm = ops::sigma_minus(d);
    const MatrixXcd sp = sm.adjoint();
    switch (kind) {
    case CorrelatorKind::sp_sm:
        return regression_correlator(l, ss, sp, sm, t_grid, OperatorOrder::later_left, kind);
    case CorrelatorKind::sm_sp:
        return regression_correlator(l, ss, sp, sm, t_grid, OperatorOrder::later_right, kind);
    case CorrelatorKind::sm:
    case CorrelatorKind::sp: {
        // One-time expectation relaxing from the ground state.
        const auto states = evolve(DensityMatrix::ground(d), l, t_grid);
        CorrelationTrace tr;
        tr.kind = kind;
        tr.times.assign(t_grid.begin(), t_grid.end());
        for (const auto& s : states)
            tr.values.push_back(s.expectation(kind == CorrelatorKind::sm ? sm : sp));
        return tr;
    }
    }
    throw DomainError("unknown correlator kind");
}

double fluctuation_spectrum(const Superoperator& l, const DensityMatrix& steady,
                            const MatrixXcd& a, const MatrixXcd& b, double omega_rot,
                            OperatorOrder order) {
    const int d = l.dim;
    const int n2 = d * d;
    const MatrixXcd& rho = steady.matrix();
    const VectorXcd rho_vec = steady.vec();

    // (i w - L + |rho><1|) is invertible and coincides with (i w - L) on
    // traceless vectors.
    MatrixXcd k = cplx(0.0, omega_rot) * MatrixXcd::Identity(n2, n2) - l.matrix;
    for (int col = 0; col < n2; col += d + 1) k.col(col) += rho_vec;
    const auto lu = k.partialPivLu();

    auto half_line = [&](const MatrixXcd& left_op, const MatrixXcd& src) {
        const cplx mean = src.trace();
        const VectorXcd x = as_vec(src) - mean * rho_vec;
        return trace_with(left_op, lu.solve(x), d);
    };

    const bool later_left = order == OperatorOrder::later_left;
    const MatrixXcd src_pos = later_left ? MatrixXcd(b * rho) : MatrixXcd(rho * b);
    const MatrixXcd a_dag = a.adjoint();
    const MatrixXcd src_neg = later_left ? MatrixXcd(a_dag * rho) : MatrixXcd(rho * a_dag);

    // Negative-time half: g(-t) = conj(h(t)) with h built from (B^dag, A^dag);
    // its transform is conj of h's half-line transform at the same omega.
    const cplx pos = half_line(a, src_pos);
    const cplx neg = std::conj(half_line(b.adjoint(), src_neg));
    return (pos + neg).real();
}

double frame_frequency(const SystemConfig& config) {
    return config.transmon.omega01 + config.detuning(Transition::t01);
}

namespace {

struct EmissionModel {
    Superoperator l;
    DensityMatrix ss;
    MatrixXcd sp;
    MatrixXcd sm;
    double frame;
    double prefactor;      // hbar omega01 / 2 pi
    double weight_emit;    // gamma_r (n_r + 1)
    double weight_absorb;  // gamma_r n_r

    explicit EmissionModel(const SystemConfig& c)
        : l(build_liouvillian(c)),
          ss(steady_state(l)),
          sp(ops::sigma_minus(c.transmon.levels).adjoint()),
          sm(ops::sigma_minus(c.transmon.levels)),
          frame(frame_frequency(c)),
          prefactor(units::photon_energy(c.transmon.omega01) / units::two_pi),
          weight_emit(c.radiative.gamma * (c.radiative.occupation + 1.0)),
          weight_absorb(c.radiative.gamma * c.radiative.occupation) {}

    double at(double omega) const {
        const double w = omega - frame;
        const double emit = fluctuation_spectrum(l, ss, sp, sm, w, OperatorOrder::later_left);
        double absorb = 0.0;
        if (weight_absorb != 0.0)
            absorb = fluctuation_spectrum(l, ss, sp, sm, w, OperatorOrder::later_right);
        return prefactor * (weight_emit * emit - weight_absorb * absorb);
    }
};

} // namespace

double output_psd_at(const SystemConfig& config, double omega) {
    return EmissionModel(config).at(omega);
}

Spectrum output_psd_numeric(const SystemConfig& config, std::span<const double> omega_grid,
                            PsdConvention convention) {
    const auto rates = model::derive_rates(config);
    if (!linalg::strictly_increasing(omega_grid))
        throw DomainError("output_psd_numeric: grid must be strictly increasing");
    const double w01 = config.transmon.omega01;
    const double g2 = rates.three ? rates.three->gamma_2_t : rates.gamma_2;
    if (omega_grid.front() > w01 - 20.0 * g2 || omega_grid.back() < w01 + 20.0 * g2)
        throw DomainError("output_psd_numeric: grid must cover omega01 +- 20 gamma_2");

    const EmissionModel em(config);
    std::vector<double> s(omega_grid.size());
    for (std::size_t i = 0; i < omega_grid.size(); ++i) s[i] = em.at(omega_grid[i]);
    return make_spectrum(omega_grid, std::move(s), convention, "lindblad-numeric");
}

Moments steady_moments(const SystemConfig& config) {
    const auto ss = steady_state(build_liouvillian(config));
    const auto& r = ss.matrix();
    return {r(1, 0), r(1, 1).real(), r(0, 0).real()};
}

double output_intensity_numeric(const SystemConfig& config) {
    const Moments m = steady_moments(config);
    const auto& rad = config.radiative;
    const cplx om = config.rabi(Transition::t01);
    const double flux = -rad.gamma * (rad.occupation + 1.0) * m.spsm
                        + rad.gamma * rad.occupation * m.smsp
                        + (cplx(0.0, 1.0) * std::conj(om) * m.sm).real();
    return units::photon_energy(config.transmon.omega01) * flux;
}

NumericBudget energy_flows_numeric(const SystemConfig& config) {
    const auto parts = build_generator_parts(config);
    const auto ss = steady_state(parts.total());
    const int d = config.transmon.levels;

    MatrixXcd energy = MatrixXcd::Zero(d, d);
    energy(1, 1) = units::photon_energy(config.transmon.omega01);
    if (d == 3)
        energy(2, 2) = units::photon_energy(config.transmon.omega01 + config.transmon.omega12());

    auto flow = [&](const Superoperator& part) {
        return (energy * part.apply(ss.matrix())).trace().real();
    };
    return {flow(parts.hamiltonian), flow(parts.radiative), flow(parts.nonradiative),
            flow(parts.quasiparticle), flow(parts.dephasing)};
}

double correlation_horizon(const model::DerivedRates& rates) {
    if (!(rates.gamma_2 > 0.0)) throw DomainError("correlation horizon needs gamma_2 > 0");
    return 15.0 / rates.gamma_2;
}

double transform_trace(const CorrelationTrace& trace, double omega_rot) {
    const auto& t = trace.times;
    const auto& g = trace.values;
    if (t.size() < 2 || t.front() != 0.0 || !linalg::strictly_increasing(t))
        throw DomainError("transform_trace: need an increasing grid starting at t = 0");

    // Exact integral of the piecewise-linear interpolant times e^{-i w t}.
    cplx acc = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        const double h = t[k + 1] - t[k];
        const double theta = omega_rot * h;
        cplx i0, i1;
        if (std::abs(theta) < 1e-4) {
            i0 = h * cplx(1.0 - theta * theta / 6.0, -theta / 2.0);
            i1 = h * h * cplx(0.5 - theta * theta / 8.0, -theta / 3.0);
        } else {
            const cplx e = std::exp(cplx(0.0, -theta));
            i0 = (1.0 - e) / cplx(0.0, omega_rot);
            i1 = (e * cplx(1.0, theta) - 1.0) / (omega_rot * omega_rot);
        }
        const cplx phase = std::exp(cplx(0.0, -omega_rot * t[k]));
        acc += phase * (g[k] * i0 + (g[k + 1] - g[k]) / h * i1);
    }
    // Stationary correlators with B = A^dag satisfy g(-t) = conj(g(t)).
    return 2.0 * acc.real();
}

} // namespace wgheat::lindblad
