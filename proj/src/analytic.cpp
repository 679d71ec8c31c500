// analytic.cpp — Closed-form reflection, spectra, energy flows and
// quasiparticle rates

#include "wgheat/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wgheat/errors.hpp"
#include "wgheat/units.hpp"

namespace wgheat::analytic {

using model::DerivedRates;

namespace {

constexpr cplx I{0.0, 1.0};

const model::ThreeLevelRates& three(const DerivedRates& r) {
    if (!r.three) throw DomainError("three-level observable needs three-level rates");
    return *r.three;
}

double lorentz(double d, double width) { return width / (d * d + width * width); }

template <class F>
Spectrum tabulate(std::span<const double> grid, PsdConvention convention, const char* meta, F f) {
    std::vector<double> s(grid.size());
    std::transform(grid.begin(), grid.end(), s.begin(), f);
    return make_spectrum(grid, std::move(s), convention, meta);
}

} // namespace

SteadyMoments steady_moments(double delta, cplx om, const DerivedRates& r) {
    const double g2 = r.gamma_2;
    const double lor = delta * delta + g2 * g2;
    const double den = 2.0 * std::norm(om) * g2 + 2.0 * lor * r.gamma_1;
    if (!(den > 0.0)) throw DomainError("steady moments undefined for vanishing rates");
    return {om * (r.gamma_1 - 2.0 * r.gamma_plus) * cplx(delta, -g2) / den,
            (std::norm(om) * g2 + 2.0 * r.gamma_plus * lor) / den,
            (std::norm(om) * g2 + 2.0 * r.gamma_minus * lor) / den};
}

double reflection_numerator(const DerivedRates& r) {
    if (r.gamma_r == 0.0) return 0.0;
    return r.gamma_r * (1.0 - 2.0 * r.gamma_plus / r.gamma_1);
}

cplx reflection_two_level(double delta, const DerivedRates& r) {
    if (r.gamma_2 == 0.0 && delta == 0.0) throw DomainError("reflection pole at delta = gamma_2 = 0");
    return 1.0 - I * reflection_numerator(r) / cplx(delta, r.gamma_2);
}

cplx reflection_from_coherence(cplx sm, cplx om, double gamma_r) {
    if (om == cplx{}) throw DomainError("reflection from a coherence needs a nonzero drive");
    return 1.0 - 2.0 * I * gamma_r * sm / om;
}

double thermal_coefficient(const DerivedRates& r) {
    return r.gamma_r * r.gamma_n * r.delta_n() / r.gamma_1;
}

double thermal_psd_at(double omega, const DerivedRates& r, double w01) {
    return units::photon_energy(w01) / units::two_pi * 2.0 * thermal_coefficient(r)
           * lorentz(omega - w01, r.gamma_2);
}

Spectrum thermal_psd(std::span<const double> grid, const DerivedRates& r, double w01,
                     PsdConvention c) {
    return tabulate(grid, c, "analytic-thermal", [&](double w) { return thermal_psd_at(w, r, w01); });
}

double mollow_center_psd_at(double omega, const DerivedRates& r, double w01) {
    return units::photon_energy(w01) / units::two_pi * r.gamma_r * 0.5
           * lorentz(omega - w01, r.gamma_2);
}

Spectrum mollow_center_psd(std::span<const double> grid, const DerivedRates& r, double w01,
                           PsdConvention c) {
    return tabulate(grid, c, "analytic-mollow-center",
                    [&](double w) { return mollow_center_psd_at(w, r, w01); });
}

double power_loss(double om, const DerivedRates& r, double w01) {
    const double o2 = om * om;
    return units::photon_energy(w01) * r.gamma_n / 2.0
           * (o2 - 2.0 * r.gamma_2 * r.gamma_r * r.delta_n()) / (o2 + r.gamma_2 * r.gamma_1);
}

double power_loss_zero_crossing(const DerivedRates& r) {
    const double x = 2.0 * r.gamma_2 * r.gamma_r * r.delta_n();
    if (x < 0.0) throw DomainError("no zero crossing when delta_n < 0");
    return std::sqrt(x);
}

double work_rate(cplx om, double delta, const DerivedRates& r, double w01) {
    if (om == cplx{}) return 0.0;
    const auto m = steady_moments(delta, om, r);
    return units::photon_energy(w01) * (I * std::conj(om) * m.sm).real();
}

double work_rate_resonant(double om, const DerivedRates& r, double w01) {
    if (om == 0.0) return 0.0;
    const auto m = steady_moments(0.0, om, r);
    return units::photon_energy(w01) * std::abs(om) * std::abs(m.sm);
}

double PowerBudget::max_flow() const {
    return std::max({std::abs(p_loss), std::abs(w_dot), std::abs(q_dot_r), std::abs(q_dot_n)});
}

PowerBudget heat_rates(cplx om, double delta, const DerivedRates& r, double w01) {
    const auto m = steady_moments(delta, om, r);
    const double e = units::photon_energy(w01);
    PowerBudget b;
    b.q_dot_r = e * r.gamma_r * (r.n_r * m.smsp - (r.n_r + 1.0) * m.spsm);
    b.q_dot_n = e * r.gamma_n * (r.n_n * m.smsp - (r.n_n + 1.0) * m.spsm);
    b.w_dot = e * (I * std::conj(om) * m.sm).real();
    b.p_loss = b.q_dot_r + b.w_dot;
    b.u_dot = b.q_dot_r + b.q_dot_n + b.w_dot;
    return b;
}

double integrated_thermal_power(const DerivedRates& r, double w01) {
    return units::photon_energy(w01) * thermal_coefficient(r);
}

double integrated_thermal_power_quadrature(const DerivedRates& r, double w01, int points) {
    if (points < 3) throw DomainError("quadrature needs at least 3 points");
    // Open midpoint rule in theta avoids the endpoints at +-pi/2.
    const double h = M_PI / points;
    double acc = 0.0;
    for (int k = 0; k < points; ++k) {
        const double theta = -M_PI / 2.0 + (k + 0.5) * h;
        const double c = std::cos(theta);
        const double omega = w01 + r.gamma_2 * std::tan(theta);
        acc += thermal_psd_at(omega, r, w01) * r.gamma_2 / (c * c);
    }
    return acc * h;
}

double windowed_thermal_power(const DerivedRates& r, double w01, double half_span, int points) {
    if (points < 2) throw DomainError("window quadrature needs at least 2 points");
    const double a = w01 - half_span * r.gamma_2;
    const double h = 2.0 * half_span * r.gamma_2 / (points - 1);
    double acc = 0.0;
    for (int k = 0; k < points; ++k) {
        const double wgt = (k == 0 || k == points - 1) ? 0.5 : 1.0;
        acc += wgt * thermal_psd_at(a + k * h, r, w01);
    }
    return acc * h;
}

double g_factor(const DerivedRates& r) {
    const auto& t = three(r);
    return t.gamma_minus_12 * t.gamma_1_01
           / (t.gamma_plus_01 * t.gamma_plus_12 + t.gamma_minus_12 * t.gamma_1_01);
}

double f_factor(const DerivedRates& r) {
    const auto& t = three(r);
    return t.gamma_minus_12 / (2.0 * t.gamma_minus_12 + t.gamma_plus_12);
}

double y_factor(const DerivedRates& r) {
    const auto& t = three(r);
    return t.gamma_minus_12 / (t.gamma_minus_12 * t.gamma_1_01 + t.gamma_plus_12 * t.gamma_plus_01);
}

cplx reflection_three_level(double delta, const DerivedRates& r) {
    const auto& t = three(r);
    if (t.gamma_2_t == 0.0 && delta == 0.0) throw DomainError("reflection pole at delta = gamma_2 = 0");
    const double num = r.gamma_r * (1.0 - 2.0 * t.gamma_plus_01 / t.gamma_1_01);
    return 1.0 - I * num * g_factor(r) / cplx(delta, t.gamma_2_t);
}

Spectrum mollow_center_three_level(std::span<const double> grid, const DerivedRates& r, double w01,
                                   PsdConvention c) {
    const double g2t = three(r).gamma_2_t;
    const double pre = units::photon_energy(w01) / units::two_pi * r.gamma_r * f_factor(r);
    return tabulate(grid, c, "analytic-mollow-center-3",
                    [&](double w) { return pre * lorentz(w - w01, g2t); });
}

Spectrum thermal_psd_three_level(std::span<const double> grid, const DerivedRates& r, double w01,
                                 PsdConvention c) {
    const auto& t = three(r);
    const double pre = units::photon_energy(w01) / units::two_pi * r.gamma_r * 2.0 * t.gamma_n01
                       * t.delta_n() * y_factor(r);
    return tabulate(grid, c, "analytic-thermal-3",
                    [&](double w) { return pre * lorentz(w - w01, t.gamma_2_t); });
}

double autler_numerator(const DerivedRates& r) {
    const auto& t = three(r);
    return t.gamma_plus_01 + t.n_r01 * (t.gamma_1_01 - 2.0 * t.gamma_minus_12);
}

double autler_half_width(const DerivedRates& r) {
    const auto& t = three(r);
    return 0.5 * (t.gamma_2_t + t.gamma_2_02);
}

double autler_sidepeaks_at(double omega, const DerivedRates& r, double omega2, double w01) {
    const auto& t = three(r);
    const double sum = t.gamma_2_t + t.gamma_2_02;
    const double tail = 2.0 * (t.gamma_minus_12 + t.gamma_plus_01) - t.gamma_minus_01;
    const double pre = units::photon_energy(w01) / units::two_pi * r.gamma_r * 2.0 * sum
                       * autler_numerator(r) / tail;
    const double split = omega2 / std::sqrt(2.0);
    double s = 0.0;
    for (double sign : {1.0, -1.0}) {
        const double d = omega - w01 + sign * split;
        s += pre / (4.0 * d * d + sum * sum);
    }
    return s;
}

Spectrum autler_sidepeaks(std::span<const double> grid, const DerivedRates& r, double omega2,
                          double w01, PsdConvention c) {
    return tabulate(grid, c, "analytic-autler-sidepeaks",
                    [&](double w) { return autler_sidepeaks_at(w, r, omega2, w01); });
}

double qp_power_loss(const DerivedRates& r, const model::QuasiparticleSpec& qp, double w01) {
    const double num = r.gamma_r * r.gamma_n * (r.n_r - r.n_n)
                       - r.gamma_r * ((r.n_r + 1.0) * qp.gamma_up - r.n_r * qp.gamma_down);
    return units::photon_energy(w01) * num / (r.gamma_1 + qp.gamma_up + qp.gamma_down);
}

namespace {

double gap_ratio(double gap, double w01) {
    const double x = gap / units::photon_energy(w01);
    if (!(x > 1.0)) throw DomainError("the gap must exceed hbar*omega01");
    return x;
}

} // namespace

double qp_population(double n_ratio, double gap, double w01) {
    if (n_ratio < 0.0) throw DomainError("quasiparticle density ratio must be >= 0");
    return 2.17 * n_ratio * std::pow(gap_ratio(gap, w01), 3.65);
}

double qp_density_ratio(double rho11, double gap, double w01) {
    if (rho11 < 0.0) throw DomainError("population must be >= 0");
    return rho11 / (2.17 * std::pow(gap_ratio(gap, w01), 3.65));
}

QpRates qp_gamma_down(double rho11, double r_n, double cap, double gap, double w01) {
    if (!(r_n > 0.0) || !(cap > 0.0) || rho11 < 0.0)
        throw DomainError("quasiparticle rates need R_N > 0, C > 0, rho11 >= 0");
    QpRates q;
    q.gamma_down = std::sqrt(2.0) / (2.17 * r_n * cap) * std::pow(gap_ratio(gap, w01), -2.15) * rho11;
    q.gamma_up = rho11 * q.gamma_down;
    q.gamma_qp = q.gamma_down - q.gamma_up;
    return q;
}

QpThermal qp_thermal_rate(double temperature, double gap, double w01) {
    if (temperature < 0.0) throw DomainError("temperature must be >= 0");
    const double ratio = gap_ratio(gap, w01);
    if (temperature == 0.0) return {};
    const double kt = units::k_boltzmann * temperature;
    QpThermal q;
    q.x_qp = std::sqrt(2.0 * M_PI * gap * kt) / gap * std::exp(-gap / kt);
    q.gamma_qp = w01 / M_PI * std::sqrt(2.0 * ratio) * q.x_qp;
    return q;
}

} // namespace wgheat::analytic
