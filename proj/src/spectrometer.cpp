// spectrometer.cpp — Matched-coupling spectra, delta-n estimators and the frequency sweep

#include "wgheat/spectrometer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "wgheat/analytic.hpp"
#include "wgheat/errors.hpp"
#include "wgheat/linalg.hpp"
#include "wgheat/parallel.hpp"
#include "wgheat/units.hpp"

namespace wgheat::spectrometer {

std::vector<std::string> SpectrometerConfig::validate() const {
    if (!(gamma_r > 0.0)) throw DomainError("spectrometer: gamma_r must be positive");
    if (!(gamma_n >= 0.0) || !(gamma_phi >= 0.0)) throw DomainError("spectrometer: rates must be non-negative");
    if (!(n_th >= 0.0) || !(n_r >= 0.0)) throw DomainError("spectrometer: occupations must be non-negative");
    if (!(omega01 > 0.0)) throw DomainError("spectrometer: omega01 must be positive");
    std::vector<std::string> warnings;
    if (gamma_n > 0.0) {
        const double ratio = gamma_r / gamma_n;
        if (ratio < 10.0) throw DomainError("spectrometer: gamma_r / gamma_n below 10, channels do not dominate");
        if (ratio < 100.0) warnings.emplace_back("gamma_n_not_negligible");
    }
    if (gamma_phi > 0.1 * gamma_r) warnings.emplace_back("dephasing_not_small");
    return warnings;
}

model::DerivedRates matched_rates(const SpectrometerConfig& cfg) {
    cfg.validate();
    model::DerivedRates r;
    r.gamma_r = cfg.gamma_r;
    r.gamma_n = cfg.gamma_r; // the probe line plays the second bath
    r.n_r = cfg.n_r;
    r.n_n = cfg.n_th;
    r.gamma_phi = cfg.gamma_phi;
    r.gamma_plus = cfg.gamma_r * (cfg.n_th + cfg.n_r);
    r.gamma_1 = 2.0 * cfg.gamma_r;
    r.gamma_minus = r.gamma_1 - r.gamma_plus;
    r.gamma_2 = cfg.gamma_r + cfg.gamma_phi;
    r.linewidth_overridden = true;
    return r;
}

Spectrum spectrometer_thermal_psd(std::span<const double> grid, const SpectrometerConfig& cfg,
                                  PsdConvention convention) {
    // gamma_r gamma_r dn / gamma_1 * 2 = gamma_r dn for the matched rates.
    auto s = analytic::thermal_psd(grid, matched_rates(cfg), cfg.omega01, convention);
    s.meta = "spectrometer-thermal";
    return s;
}

Spectrum spectrometer_on_psd(std::span<const double> grid, const SpectrometerConfig& cfg,
                             PsdConvention convention) {
    auto s = analytic::mollow_center_psd(grid, matched_rates(cfg), cfg.omega01, convention);
    s.meta = "spectrometer-on";
    return s;
}

std::complex<double> spectrometer_reflection(double delta, const SpectrometerConfig& cfg) {
    return analytic::reflection_two_level(delta, matched_rates(cfg));
}

PointwiseEstimate estimate_delta_n_pointwise(const Spectrum& s_th, const Spectrum& s_on) {
    s_th.validate();
    s_on.validate();
    if (s_th.freqs_hz != s_on.freqs_hz) throw DomainError("pointwise estimate: grids differ");
    if (s_th.convention != s_on.convention) throw DomainError("pointwise estimate: conventions differ");
    if (s_on.size() == 0) throw DomainError("pointwise estimate: empty spectra");
    const std::size_t k0 = s_on.argmax();
    const double peak = s_on.values[k0];
    if (!(peak > 0.0)) throw DomainError("pointwise estimate: s_on has no positive peak");

    PointwiseEstimate e;
    e.freqs_hz = s_th.freqs_hz;
    e.delta_n.assign(s_on.size(), std::numeric_limits<double>::quiet_NaN());
    e.valid.assign(s_on.size(), false);
    for (std::size_t k = 0; k < s_on.size(); ++k) {
        if (s_on.values[k] < pointwise_guard * peak) continue;
        e.delta_n[k] = s_th.values[k] / (2.0 * s_on.values[k]);
        e.valid[k] = true;
    }
    e.center = e.delta_n[k0];

    double lo = e.center, hi = e.center;
    for (std::size_t k = 0; k < s_on.size(); ++k) {
        if (s_on.values[k] < 0.5 * peak) continue;
        lo = std::min(lo, e.delta_n[k]);
        hi = std::max(hi, e.delta_n[k]);
    }
    const double spread = hi - lo;
    if (spread == 0.0) e.flatness = 0.0;
    else if (e.center == 0.0) e.flatness = std::numeric_limits<double>::infinity();
    else e.flatness = spread / std::abs(e.center);
    e.narrowband = e.flatness > flatness_threshold;
    return e;
}

double estimate_delta_n_integrated(double p_th, double p_on) {
    if (!(p_on > 0.0)) throw DomainError("integrated estimate: p_on must be positive");
    return p_th / (2.0 * p_on);
}

double estimate_delta_n_integrated(const Spectrum& s_th, const Spectrum& s_on) {
    if (s_th.freqs_hz != s_on.freqs_hz) throw DomainError("integrated estimate: grids differ");
    return estimate_delta_n_integrated(s_th.integrated_power(), s_on.integrated_power());
}

OccupationSplit split_occupations(double delta_n, double r) {
    OccupationSplit s{0.5 * (r + delta_n), 0.5 * (r - delta_n), false};
    s.negative = s.n_th < 0.0 || s.n_r < 0.0;
    return s;
}

OccupationSplit split_occupations_full(double delta_n, double r) {
    if (!(r < 1.0)) throw DomainError("full split: reflection must stay below 1");
    return split_occupations(delta_n, 1.0 / std::sqrt(1.0 - r) - 1.0);
}

double lineshape_average(const NoiseProfile& n_th, double w01, double g2, int points) {
    if (points < 3) throw DomainError("lineshape average needs at least 3 points");
    if (!(g2 > 0.0)) throw DomainError("lineshape average needs a positive linewidth");
    // omega = omega01 + gamma_2 tan(theta) turns the normalised Lorentzian
    // into the uniform weight dtheta / pi.
    const double h = M_PI / points;
    double acc = 0.0;
    for (int k = 0; k < points; ++k) acc += n_th(w01 + g2 * std::tan(-M_PI / 2.0 + (k + 0.5) * h));
    return acc / points;
}

std::vector<SweepPoint> sweep_spectrometer(const SpectrometerConfig& cfg, std::span<const double> grid,
                                           const NoiseProfile& n_th, const SweepOptions& opt) {
    cfg.validate();
    if (opt.points_per_line < 3 || !(opt.span_gamma2 > 0.0))
        throw DomainError("sweep: bad local grid");
    if (!(opt.relative_noise >= 0.0)) throw DomainError("sweep: negative noise level");
    std::vector<SweepPoint> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        SpectrometerConfig c = cfg;
        c.omega01 = grid[i];
        const double g2 = c.gamma_r + c.gamma_phi;
        c.n_th = lineshape_average(n_th, c.omega01, g2, opt.profile_quadrature);
        const double dn = c.n_th - c.n_r;
        c.n_th = std::max(c.n_th, 0.0); // S_on does not depend on it
        auto local = linalg::linspace(c.omega01 - opt.span_gamma2 * g2, c.omega01 + opt.span_gamma2 * g2,
                                      static_cast<std::size_t>(opt.points_per_line));
        const auto on = spectrometer_on_psd(local, c);
        // In the matched model S_th = 2 dn S_on point by point; building it this
        // way also covers profiles dipping below n_r.
        auto th = on;
        for (std::size_t k = 0; k < th.size(); ++k) th.values[k] = 2.0 * dn * on.values[k];
        th.meta = "spectrometer-thermal";
        auto on_n = on;
        if (opt.relative_noise > 0.0) {
            std::mt19937_64 rng(opt.seed + i);
            std::normal_distribution<double> g(0.0, 1.0);
            for (std::size_t k = 0; k < th.size(); ++k) {
                th.values[k] *= 1.0 + opt.relative_noise * g(rng);
                on_n.values[k] *= 1.0 + opt.relative_noise * g(rng);
            }
        }
        const auto est = estimate_delta_n_pointwise(th, on_n);
        const double peak = on.values[on.argmax()];
        double sw = 0.0, sw2 = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < on.size(); ++k) {
            if (on.values[k] < 0.5 * peak || !est.valid[k]) continue;
            sw += on.values[k];
            sw2 += on.values[k] * on.values[k];
            acc += on.values[k] * est.delta_n[k];
        }
        SweepPoint& p = out[i];
        p.omega01_hz = units::rad_to_hz(c.omega01);
        p.delta_n = acc / sw;
        p.sigma = std::abs(dn) * opt.relative_noise * std::sqrt(2.0 * sw2) / sw;
        p.true_delta_n = dn;
        p.flatness = est.flatness;
        p.narrowband = est.narrowband;
    });
    return out;
}

} // namespace wgheat::spectrometer
