// eom.cpp — Moment matrices, steady solve and regression through exp(M t)

#include "wgheat/eom.hpp"

#include <algorithm>
#include <cmath>

#include "wgheat/errors.hpp"
#include "wgheat/linalg.hpp"

namespace wgheat::eom {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr cplx I{0.0, 1.0};

} // namespace

MomentSystem eom_two_level(double delta, cplx om, const model::DerivedRates& r) {
    MomentSystem s;
    s.order = 3;
    s.labels = {"s1", "s1*", "s2"};
    s.m_matrix = MatrixXcd::Zero(3, 3);
    s.m_matrix(0, 0) = I * delta - r.gamma_2;
    s.m_matrix(0, 2) = I * om;
    s.m_matrix(1, 1) = -I * delta - r.gamma_2;
    s.m_matrix(1, 2) = -I * std::conj(om);
    s.m_matrix(2, 0) = I * std::conj(om) / 2.0;
    s.m_matrix(2, 1) = -I * om / 2.0;
    s.m_matrix(2, 2) = -r.gamma_1;
    s.b_vector = VectorXcd(3);
    s.b_vector << -I * om / 2.0, I * std::conj(om) / 2.0, r.gamma_plus;
    return s;
}

MomentSystem eom_three_level_weak(double delta01, cplx om, const model::DerivedRates& r, cplx omega2) {
    if (!r.three) throw DomainError("three-level moment equations need three-level rates");
    if (omega2 != cplx{}) throw DomainError("the weak-drive closed set requires no 1<->2 drive");
    const auto& t = *r.three;
    const cplx omc = std::conj(om);
    MomentSystem s;
    s.order = 4;
    s.labels = {"w1", "w1*", "w2", "w3"};
    MatrixXcd& m = s.m_matrix;
    m = MatrixXcd::Zero(4, 4);
    m(0, 0) = I * delta01 - t.gamma_2_t;
    m(0, 2) = I * om / 2.0;
    m(0, 3) = -I * om / 2.0;
    m(1, 1) = -I * delta01 - t.gamma_2_t;
    m(1, 2) = -I * omc / 2.0;
    m(1, 3) = I * omc / 2.0;
    m(2, 0) = I * omc / 2.0;
    m(2, 1) = -I * om / 2.0;
    m(2, 2) = -t.gamma_minus_01 - t.gamma_1_12;
    m(2, 3) = t.gamma_plus_01 - t.gamma_minus_12;
    m(3, 0) = -I * omc / 2.0;
    m(3, 1) = I * om / 2.0;
    m(3, 2) = t.gamma_minus_01;
    m(3, 3) = -t.gamma_plus_01;
    s.b_vector = VectorXcd::Zero(4);
    s.b_vector(2) = t.gamma_minus_12;
    return s;
}

cplx MomentVector::at(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw DomainError("unknown moment label " + label);
    return values(it - labels.begin());
}

MomentVector moment_steady(const MomentSystem& s) {
    Eigen::JacobiSVD<MatrixXcd> svd(s.m_matrix);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(sv.size() - 1) < 1e-13 * sv(0))
        throw NumericalError("moment equations are singular (no unique steady state)");
    return {s.m_matrix.partialPivLu().solve(-s.b_vector), s.labels};
}

double spectral_abscissa(const MomentSystem& s) {
    return Eigen::ComplexEigenSolver<MatrixXcd>(s.m_matrix, false).eigenvalues().real().maxCoeff();
}

namespace {

struct Regression {
    VectorXcd y0;    // <X sigma-(0)> or <sigma-(0) X> at t = 0
    VectorXcd y_inf; // long-time limit
};

// Initial conditions for the two emission correlators. Operator products
// reduce with sigma-^2 = 0 and sigma- sigma+ sigma- = sigma-.
Regression regression_data(const MomentSystem& s, const MomentVector& st, CorrelatorKind kind) {
    const cplx sm = st.values(0);
    const auto n = s.order;
    VectorXcd y0 = VectorXcd::Zero(n);
    if (kind == CorrelatorKind::sp_sm) {
        y0(1) = st.values(2);
        if (n == 4) y0(3) = sm;
    } else if (kind == CorrelatorKind::sm_sp) {
        y0(1) = n == 4 ? st.values(3) : 1.0 - st.values(2);
        y0(2) = sm;
    } else {
        throw DomainError("regression needs a two-time correlator kind");
    }
    // The inhomogeneity B multiplies <sigma-(0)>, so the asymptote is x_ss <sigma->.
    return {y0, st.values * sm};
}

void require_stable(const MomentSystem& s) {
    if (spectral_abscissa(s) >= 0.0)
        throw NumericalError("moment equations are unstable (eigenvalue with Re >= 0)");
}

} // namespace

CorrelationTrace correlator_from_eom(const MomentSystem& s, const MomentVector& st,
                                     std::span<const double> t_grid, CorrelatorKind kind) {
    require_stable(s);
    CorrelationTrace out;
    out.kind = kind;
    out.times.assign(t_grid.begin(), t_grid.end());
    out.values.reserve(t_grid.size());

    if (kind == CorrelatorKind::sm || kind == CorrelatorKind::sp) {
        const int idx = kind == CorrelatorKind::sm ? 0 : 1;
        for (double t : t_grid) {
            if (t < 0.0) throw DomainError("one-time relaxation needs t >= 0");
            const VectorXcd x = st.values - linalg::expm(s.m_matrix * t) * st.values;
            out.values.push_back(x(idx));
        }
        return out;
    }

    const auto reg = regression_data(s, st, kind);
    const VectorXcd delta0 = reg.y0 - reg.y_inf;
    for (double t : t_grid) {
        const VectorXcd y = reg.y_inf + linalg::expm(s.m_matrix * std::abs(t)) * delta0;
        out.values.push_back(t >= 0.0 ? y(1) : std::conj(y(1)));
    }
    return out;
}

double fluctuation_spectrum(const MomentSystem& s, const MomentVector& st, double omega_rot,
                            CorrelatorKind kind) {
    require_stable(s);
    const auto reg = regression_data(s, st, kind);
    const MatrixXcd k = cplx(0.0, omega_rot) * MatrixXcd::Identity(s.order, s.order) - s.m_matrix;
    const VectorXcd half = k.partialPivLu().solve(reg.y0 - reg.y_inf);
    return 2.0 * half(1).real();
}

} // namespace wgheat::eom
