// test_fit.cpp — Least squares, line-shape fits and the Table-1 reconciliation

#include "doctest.h"

#include <cmath>
#include <random>

#include "wgheat/analytic.hpp"
#include "wgheat/errors.hpp"
#include "wgheat/fit.hpp"
#include "wgheat/linalg.hpp"
#include "wgheat/units.hpp"

using namespace wgheat;
using namespace wgheat::fit;
using units::hz_to_rad;
using units::rad_to_hz;

namespace {

const double f01 = model::table1::omega01_hz;
const double w01 = hz_to_rad(f01);

model::DerivedRates table1() { return model::table1::fitted_rates(); }

model::DerivedRates rates_hz(double gr, double gn, double nr, double nn, double g2) {
    return model::derive_rates(hz_to_rad(gr), hz_to_rad(gn), nr, nn).with_linewidth(hz_to_rad(g2));
}

std::vector<double> line_grid(double half_span_hz = 2e6, int n = 401) {
    return linalg::linspace(w01 - hz_to_rad(half_span_hz), w01 + hz_to_rad(half_span_hz), n);
}

bool within(double v, double truth, double sigma, double k = 2.0) { return std::abs(v - truth) <= k * sigma; }

} // namespace

TEST_CASE("least squares core") {
    // Straight line: exact ordinary least squares.
    std::vector<double> x, y;
    for (int k = 0; k < 20; ++k) {
        x.push_back(k);
        y.push_back(1.5 + 0.25 * k + (k % 3 == 0 ? 0.1 : -0.05));
    }
    auto res = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(20);
        for (int k = 0; k < 20; ++k) r(k) = p(0) + p(1) * x[k] - y[k];
        return r;
    };
    Eigen::MatrixXd a(20, 2);
    Eigen::VectorXd b(20);
    for (int k = 0; k < 20; ++k) {
        a(k, 0) = 1.0;
        a(k, 1) = x[k];
        b(k) = y[k];
    }
    const Eigen::Vector2d ols = a.colPivHouseholderQr().solve(b);
    const double s2 = (a * ols - b).squaredNorm() / 18.0;
    const Eigen::Matrix2d cov = (a.transpose() * a).inverse() * s2;

    const auto f = least_squares(res, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0), {"a", "b"});
    CHECK(f.converged);
    CHECK(f.value("a") == doctest::Approx(ols(0)).epsilon(1e-9));
    CHECK(f.value("b") == doctest::Approx(ols(1)).epsilon(1e-9));
    CHECK(f.sigma("a") == doctest::Approx(std::sqrt(cov(0, 0))).epsilon(1e-6));
    CHECK(f.sigma("b") == doctest::Approx(std::sqrt(cov(1, 1))).epsilon(1e-6));
    CHECK(f.gradient_norm < 1e-6);
    CHECK(f.residual_rms > 0.0);
    CHECK_THROWS_AS(f.value("c"), DomainError);
    CHECK_THROWS_AS(least_squares(res, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), {"a"}), DomainError);

    // An iteration cap of one is reported, not hidden.
    auto rosen = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(2);
        r << 10.0 * (p(1) - p(0) * p(0)), 1.0 - p(0);
        return r;
    };
    LeastSquaresOptions one;
    one.max_iterations = 1;
    const auto capped = least_squares(rosen, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(1, 1), {"x", "y"}, one);
    CHECK_FALSE(capped.converged);
    CHECK(capped.message.find("no convergence") != std::string::npos);
    const auto full = least_squares(rosen, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(1, 1), {"x", "y"});
    CHECK(full.converged);
    CHECK(full.value("x") == doctest::Approx(1.0).epsilon(1e-8));
    for (const auto& p : full.params) CHECK(p.sigma >= 0.0);
}

TEST_CASE("Lorentzian fits") {
    const auto r = table1();
    const auto th = analytic::thermal_psd(line_grid(), r, w01);
    const double peak = units::two_pi * analytic::thermal_psd_at(w01, r, w01);

    SUBCASE("noiseless recovery") {
        const auto f = fit_lorentzian(th);
        CHECK(f.converged);
        CHECK(f.value("center_hz") == doctest::Approx(f01).epsilon(1e-12));
        CHECK(f.value("hwhm_hz") == doctest::Approx(143e3).epsilon(1e-8));
        CHECK(f.value("amplitude") == doctest::Approx(peak).epsilon(1e-8));
    }
    SUBCASE("tiny absolute scale does not matter") {
        auto shifted = th;
        for (auto& fr : shifted.freqs_hz) fr -= 1000.0;
        const auto f = fit_lorentzian(shifted);
        CHECK(f.value("center_hz") == doctest::Approx(f01 - 1000.0).epsilon(1e-12));
        CHECK(f.value("hwhm_hz") == doctest::Approx(143e3).epsilon(1e-8));
    }
    SUBCASE("5% multiplicative noise, 200 seeds") {
        Weights w;
        for (double v : th.values) w.push_back(0.05 * v);
        int inside = 0;
        for (std::uint64_t s = 1; s <= 200; ++s) {
            const auto f = fit_lorentzian(add_noise(th, {0.05, 0.0, s}), 1, w);
            inside += within(f.value("hwhm_hz"), 143e3, f.sigma("hwhm_hz"));
        }
        // Frozen from the first run: 192 of 200.
        CHECK(inside >= 190);
    }
    SUBCASE("unresolvable peak") {
        const auto coarse = analytic::thermal_psd(line_grid(2e6, 21), r, w01);
        CHECK_THROWS_AS(fit_lorentzian(coarse), DomainError);
        CHECK_THROWS_AS(fit_lorentzian(th, 3), DomainError);
        CHECK_THROWS_AS(fit_lorentzian(th.converted(PsdConvention::per_angular)), DomainError);
    }
    SUBCASE("baseline term") {
        auto lifted = th;
        for (auto& v : lifted.values) v += 0.1 * peak;
        const auto f = fit_lorentzian(lifted, 1, {}, true);
        CHECK(f.value("hwhm_hz") == doctest::Approx(143e3).epsilon(1e-8));
        CHECK(f.value("baseline") == doctest::Approx(0.1 * peak).epsilon(1e-8));
    }
}

TEST_CASE("two-peak fit of the Autler-Townes side peaks") {
    const auto r3 = model::derive_rates(model::table1::config(3));
    const double om2 = hz_to_rad(1.5e6);
    const auto grid = linalg::linspace(w01 - 2.0 * om2, w01 + 2.0 * om2, 801);
    const auto s = analytic::autler_sidepeaks(grid, r3, om2, w01);
    const auto f = fit_lorentzian(s, 2);
    CHECK(f.converged);
    const double bin = rad_to_hz(grid[1] - grid[0]);
    const double split = rad_to_hz(om2) / std::sqrt(2.0);
    CHECK(std::abs(f.value("center_hz") - (f01 - split)) <= bin);
    CHECK(std::abs(f.value("center_hz_2") - (f01 + split)) <= bin);
    CHECK(f.value("amplitude") == doctest::Approx(f.value("amplitude_2")).epsilon(1e-6));
}

TEST_CASE("thermal fit") {
    const auto r = table1();
    const auto th = analytic::thermal_psd(line_grid(), r, w01);
    SUBCASE("noiseless") {
        const auto f = fit_thermal(th);
        CHECK(f.value("coefficient_hz") == doctest::Approx(rad_to_hz(analytic::thermal_coefficient(r))).epsilon(1e-8));
        CHECK(f.value("gamma2_hz") == doctest::Approx(143e3).epsilon(1e-8));
        CHECK(f.value("integrated_power_w") == doctest::Approx(analytic::integrated_thermal_power(r, w01)).epsilon(1e-8));
    }
    SUBCASE("reference noise level") {
        const auto d = synthesize(r, w01, reference_scenario(), 1);
        const auto f = fit_thermal(d.thermal);
        CHECK(f.sigma("coefficient_hz") == doctest::Approx(200.0).epsilon(0.25));
        CHECK(std::abs(f.value("coefficient_hz") - 5.6e3) <= 2.0 * 200.0);
        CHECK(std::abs(f.value("integrated_power_w") - 132e-21) <= 5e-21 + 2.0 * f.sigma("integrated_power_w"));
    }
    SUBCASE("no occupation difference") {
        const auto eq = rates_hz(227e3, 55e3, 0.004, 0.004, 143e3);
        const auto z = add_noise(analytic::thermal_psd(line_grid(), eq, w01), {0.05, 0.0, 3});
        const auto f = fit_thermal(z);
        CHECK(f.converged);
        CHECK(std::abs(f.value("coefficient_hz")) <= 2.0 * f.sigma("coefficient_hz"));
    }
}

TEST_CASE("Mollow fit") {
    const auto r = table1();
    const auto m = analytic::mollow_center_psd(line_grid(), r, w01);
    const auto f = fit_mollow(m);
    CHECK(f.value("gamma_r_hz") == doctest::Approx(227e3).epsilon(1e-8));
    CHECK(f.value("gamma2_hz") == doctest::Approx(143e3).epsilon(1e-8));
    CHECK(f.value("center_hz") == doctest::Approx(f01).epsilon(1e-14));

    auto scaled = m;
    for (auto& v : scaled.values) v *= 3.7;
    const auto g = fit_mollow(scaled);
    CHECK(g.value("gamma2_hz") == doctest::Approx(f.value("gamma2_hz")).epsilon(1e-9));
    CHECK(g.value("gamma_r_hz") == doctest::Approx(3.7 * 227e3).epsilon(1e-8));

    const auto d = synthesize(r, w01, reference_scenario(), 1);
    const auto n = fit_mollow(d.mollow);
    CHECK(n.sigma("gamma_r_hz") == doctest::Approx(4e3).epsilon(0.25));
    CHECK(n.sigma("gamma2_hz") == doctest::Approx(4e3).epsilon(0.25));
    CHECK(within(n.value("gamma_r_hz"), 227e3, n.sigma("gamma_r_hz")));
    CHECK(within(n.value("gamma2_hz"), 143e3, n.sigma("gamma2_hz")));
}

TEST_CASE("power-loss fit") {
    const auto r = table1();
    const double a_hz = rad_to_hz(analytic::reflection_numerator(r));
    const PowerLossFixed fx{143e3, 227e3, f01, a_hz};
    const auto sc = reference_scenario();

    SUBCASE("model matches the closed form") {
        for (double f : {0.0, 50e3, 95e3, 1e6})
            CHECK(power_loss_model(f, 55e3, 0.135, fx)
                  == doctest::Approx(analytic::power_loss(hz_to_rad(f), r, w01)).epsilon(1e-12));
    }
    SUBCASE("noiseless") {
        const auto f = fit_power_loss(synth_power_loss(sc.rabi_hz, r, w01), fx);
        CHECK(f.converged);
        CHECK(f.value("gamma_n_hz") == doctest::Approx(55e3).epsilon(1e-8));
        CHECK(f.value("delta_n") == doctest::Approx(0.135).epsilon(1e-8));
        CHECK(f.flags.empty());
    }
    SUBCASE("reference noise level") {
        const auto d = synthesize(r, w01, sc, 1);
        const auto f = fit_power_loss(d.power_loss, fx);
        CHECK(std::abs(f.value("gamma_n_hz") - 55e3) <= 3e3);
        CHECK(std::abs(f.value("delta_n") - 0.135) <= 0.01 + 0.005);
        CHECK(f.sigma("delta_n") == doctest::Approx(0.009).epsilon(0.3));
    }
    SUBCASE("four-isolator scenario") {
        const auto iso = rates_hz(227e3, 53e3, 0.004, 0.004, 143e3);
        const PowerLossFixed fi{143e3, 227e3, f01, rad_to_hz(analytic::reflection_numerator(iso))};
        const double sat = units::photon_energy(w01) * iso.gamma_n / 2.0;
        const auto pts = synth_power_loss(sc.rabi_hz, iso, w01, {0.0, sc.power_loss_floor * sat, 5});
        const auto f = fit_power_loss(pts, fi);
        CHECK(std::abs(f.value("gamma_n_hz") - 53e3) <= 4e3);
        CHECK(std::abs(f.value("delta_n")) <= 2.0 * f.sigma("delta_n"));
    }
    SUBCASE("degenerate inputs are flagged") {
        std::vector<double> high;
        for (int k = 0; k < 10; ++k) high.push_back(1e8 * (1 + k));
        const auto sat = fit_power_loss(synth_power_loss(high, r, w01), fx);
        CHECK(sat.flagged("delta_n_unidentifiable"));
        CHECK(sat.flagged("ill_conditioned"));
        const auto low = fit_power_loss(synth_power_loss({5e3, 10e3, 20e3, 30e3, 40e3, 50e3}, r, w01), fx);
        CHECK(low.flagged("ill_conditioned"));
        CHECK_THROWS_AS(fit_power_loss(synth_power_loss({1e3, 1e5, 1e6, 1e7}, r, w01), fx), DomainError);
    }
    SUBCASE("gamma_1 closure without a reflection numerator") {
        const auto c = rates_hz(227e3, 55e3, 0.004, 0.139, 149.553e3);
        const PowerLossFixed nofx{rad_to_hz(c.gamma_2), 227e3, f01, std::nullopt};
        CHECK(power_loss_model(100e3, 55e3, 0.135, nofx)
              == doctest::Approx(analytic::power_loss(hz_to_rad(100e3), c, w01)).epsilon(1e-4));
    }
}

TEST_CASE("reflection fit") {
    const auto r = table1();
    const auto sc = reference_scenario();
    const double a_hz = rad_to_hz(analytic::reflection_numerator(r));

    const auto f = fit_reflection(synth_reflection(sc.reflection_delta_hz, r));
    CHECK(f.value("numerator_hz") == doctest::Approx(a_hz).epsilon(1e-8));
    CHECK(f.value("numerator_hz") == doctest::Approx(214e3).epsilon(1e-3));
    CHECK(f.value("gamma2_hz") == doctest::Approx(143e3).epsilon(1e-8));
    CHECK(std::abs(f.value("center_hz")) < 1e-6);

    // No radiative coupling: r == 1 everywhere.
    const auto dark = rates_hz(0.0, 55e3, 0.004, 0.139, 143e3);
    const auto fd = fit_reflection(synth_reflection(sc.reflection_delta_hz, dark));
    CHECK(fd.value("numerator_hz") == 0.0);

    // Magnitude-only and phase-only fits agree on gamma_2 at 5% noise.
    const auto noisy = synth_reflection(sc.reflection_delta_hz, r, {0.0, 0.05, 9});
    const auto fm = fit_reflection(noisy, ReflectionMode::magnitude);
    const auto fp = fit_reflection(noisy, ReflectionMode::phase);
    CHECK(fm.converged);
    CHECK(fp.converged);
    CHECK(std::abs(fm.value("gamma2_hz") - fp.value("gamma2_hz"))
          <= 2.0 * std::hypot(fm.sigma("gamma2_hz"), fp.sigma("gamma2_hz")));

    std::vector<ReflectionPoint> unsorted = synth_reflection({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, r);
    std::swap(unsorted[2], unsorted[3]);
    CHECK_THROWS_AS(fit_reflection(unsorted), DomainError);
}

TEST_CASE("Table-1 reconciliation") {
    const auto r = table1();
    const auto rt = fit_all(synthesize(r, w01, reference_scenario(), 0, true), f01);
    const auto& t = rt.table;
    SUBCASE("noiseless reference tuple") {
        CHECK(t.gamma_r_hz == doctest::Approx(227e3).epsilon(1e-6));
        CHECK(t.gamma_2_hz == doctest::Approx(143e3).epsilon(1e-6));
        CHECK(t.gamma_n_hz == doctest::Approx(55e3).epsilon(1e-6));
        CHECK(t.delta_n == doctest::Approx(0.135).epsilon(1e-6));
        CHECK(t.numerator_hz == doctest::Approx(rad_to_hz(analytic::reflection_numerator(r))).epsilon(1e-6));
        CHECK(t.n_r == doctest::Approx(0.004).epsilon(1e-6));
        CHECK(t.n_n == doctest::Approx(0.139).epsilon(1e-6));
        CHECK(t.gamma_1_hz == doctest::Approx(299.106e3).epsilon(1e-6));
        CHECK(t.t_r_mk == doctest::Approx(50.0).epsilon(0.06));
        CHECK(t.t_q_mk == doctest::Approx(78.0).epsilon(0.06));
        CHECK(t.t_n_mk == doctest::Approx(131.0).epsilon(0.06));
        CHECK(t.flags.empty());
        // Gamma_2 = 143 kHz is narrower than gamma_1 / 2: negative implied dephasing.
        CHECK(t.gamma_phi_implied_hz == doctest::Approx(143e3 - 299.106e3 / 2.0).epsilon(1e-6));
    }
    SUBCASE("zero occupations") {
        const auto z = rates_hz(227e3, 55e3, 0.0, 0.0, 143e3);
        const auto rz = fit_all(synthesize(z, w01, reference_scenario(), 0, true), f01);
        CHECK(std::abs(rz.table.n_r) < 1e-12);
        CHECK(std::abs(rz.table.n_n) < 1e-12);
        CHECK(rz.table.t_r_mk < 1.0);
        CHECK(rz.table.t_n_mk < 1.0);
    }
    SUBCASE("inconsistent inputs are flagged") {
        auto pl = rt.power_loss;
        pl.params[1].value = 0.5; // dn too large for the measured rho11
        const auto bad = reconcile_table1(rt.mollow, pl, rt.reflection, f01);
        CHECK(std::find(bad.flags.begin(), bad.flags.end(), "negative_occupation") != bad.flags.end());
        auto nc = rt.mollow;
        nc.converged = false;
        CHECK_THROWS_AS(reconcile_table1(nc, rt.power_loss, rt.reflection, f01), DomainError);
    }
    SUBCASE("reference-noise round trip and dephasing check") {
        const auto n = fit_all(synthesize(r, w01, reference_scenario(), 1), f01);
        CHECK(within(n.table.n_r, 0.004, n.table.sigma_n_r));
        CHECK(within(n.table.n_n, 0.139, n.table.sigma_n_n));
        CHECK(n.table.sigma_gamma_1_hz > 0.0);
        CHECK(std::isfinite(n.table.dephasing_z));
    }
}

TEST_CASE("random ground-truth round trips") {
    std::mt19937_64 g(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int ok_r = 0, ok_n = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const double gr = 150e3 + 150e3 * u(g), gn = 30e3 + 50e3 * u(g);
        const double nr = 0.01 * u(g), nn = nr + 0.05 + 0.2 * u(g);
        const auto rr = model::derive_rates(hz_to_rad(gr), hz_to_rad(gn), nr, nn);
        const auto rt = fit_all(synthesize(rr, w01, reference_scenario(), 100 + static_cast<std::uint64_t>(i)), f01);
        ok_r += within(rt.table.n_r, nr, rt.table.sigma_n_r);
        ok_n += within(rt.table.n_n, nn, rt.table.sigma_n_n);
    }
    // Frozen from the first run: 97 and 99 of 100.
    CHECK(ok_r >= 95);
    CHECK(ok_n >= 95);
}
