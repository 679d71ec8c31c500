// scenarios.cpp — Scenario runners and the dry-run regime report

#include "scenarios.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "config.hpp"
#include "wgheat/analytic.hpp"
#include "wgheat/errors.hpp"
#include "wgheat/linalg.hpp"
#include "wgheat/lindblad.hpp"
#include "wgheat/spectrometer.hpp"
#include "wgheat/units.hpp"
#include "wgheat/welch.hpp"

namespace wgheat::cli {

namespace fs = std::filesystem;
using units::hz_to_rad;
using units::rad_to_hz;

namespace {

// Regime rule for closed forms that assume a strong drive.
constexpr double strong_drive_ratio = 30.0;
// Weak-probe reflection needs the probe well below the linewidth.
constexpr double weak_probe_ratio = 0.1;

struct Context {
    const json& cfg;
    const json& block;
    fs::path base;
    model::SystemConfig system;
    model::DerivedRates rates; // closed-form rates (linewidth override applied)
    double w01{0.0};
    std::uint64_t seed{0};
};

fs::path input_path(const Context& c, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : c.base / path;
}

std::vector<double> centred_grid(double w01, const json& b) {
    const double hs = number(b, "half_span_hz");
    if (!(hs > 0.0)) throw ConfigError("half_span_hz: must be positive");
    return linalg::linspace(w01 - hz_to_rad(hs), w01 + hz_to_rad(hs), count(b, "points", 3));
}

std::vector<double> rabi_grid_hz(const json& b) {
    const double lo = number(b, "rabi_min_hz"), hi = number(b, "rabi_max_hz");
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("rabi grid: need 0 < rabi_min_hz < rabi_max_hz");
    return linalg::logspace(lo, hi, count(b, "points", 2));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

model::SystemConfig driven(const model::SystemConfig& c, model::Transition t, double detuning, double rabi) {
    return c.with_drive({t, detuning, {rabi, 0.0}});
}

RunResult spectrum(const Context& c) {
    const auto grid = centred_grid(c.w01, c.block);
    const double om = hz_to_rad(number(c.block, "mollow_rabi_hz"));
    const bool three = c.system.transmon.levels == 3;
    RunResult r;
    const auto th = three ? analytic::thermal_psd_three_level(grid, c.rates, c.w01)
                          : analytic::thermal_psd(grid, c.rates, c.w01);
    const auto mo = three ? analytic::mollow_center_three_level(grid, c.rates, c.w01)
                          : analytic::mollow_center_psd(grid, c.rates, c.w01);
    r.outputs.emplace_back("spectrum_thermal.csv", spectrum_table(th).str());
    r.outputs.emplace_back("spectrum_mollow.csv", spectrum_table(mo).str());
    if (c.block.at("numeric").get<bool>()) {
        const auto nth = lindblad::output_psd_numeric(c.system.without_drives(), grid);
        const auto nmo = lindblad::output_psd_numeric(driven(c.system.without_drives(), model::Transition::t01, 0.0, om), grid);
        r.outputs.emplace_back("spectrum_thermal_numeric.csv", spectrum_table(nth).str());
        r.outputs.emplace_back("spectrum_mollow_numeric.csv", spectrum_table(nmo).str());
    }
    return r;
}

RunResult reflection(const Context& c) {
    const double hs = number(c.block, "half_span_hz");
    if (!(hs > 0.0)) throw ConfigError("half_span_hz: must be positive");
    const auto delta_hz = linalg::linspace(-hs, hs, count(c.block, "points", 3));
    const bool three = c.system.transmon.levels == 3;
    CsvTable a{{"delta_hz", "re", "im"}, {}};
    for (double d : delta_hz) {
        const auto v = three ? analytic::reflection_three_level(hz_to_rad(d), c.rates)
                             : analytic::reflection_two_level(hz_to_rad(d), c.rates);
        a.rows.push_back({d, v.real(), v.imag()});
    }
    RunResult r;
    r.outputs.emplace_back("reflection.csv", a.str());
    if (c.block.at("numeric").get<bool>()) {
        const double probe = hz_to_rad(number(c.block, "probe_rabi_hz"));
        if (!(probe > 0.0)) throw ConfigError("probe_rabi_hz: must be positive");
        CsvTable n{{"delta_hz", "re", "im"}, {}};
        for (double d : delta_hz) {
            const auto m = lindblad::steady_moments(driven(c.system.without_drives(), model::Transition::t01, hz_to_rad(d), probe));
            const auto v = analytic::reflection_from_coherence(m.sm, {probe, 0.0}, c.system.radiative.gamma);
            n.rows.push_back({d, v.real(), v.imag()});
        }
        r.outputs.emplace_back("reflection_numeric.csv", n.str());
    }
    return r;
}

RunResult power_loss(const Context& c) {
    const auto rabi = rabi_grid_hz(c.block);
    CsvTable a{{"rabi_hz", "watts"}, {}};
    for (double f : rabi) a.rows.push_back({f, analytic::power_loss(hz_to_rad(f), c.rates, c.w01)});
    RunResult r;
    r.outputs.emplace_back("power_loss.csv", a.str());
    if (c.block.at("numeric").get<bool>()) {
        CsvTable n{{"rabi_hz", "watts"}, {}};
        for (double f : rabi)
            n.rows.push_back({f, lindblad::output_intensity_numeric(driven(c.system.without_drives(), model::Transition::t01, 0.0, hz_to_rad(f)))});
        r.outputs.emplace_back("power_loss_numeric.csv", n.str());
    }
    const json summary{{"zero_crossing_hz", rad_to_hz(analytic::power_loss_zero_crossing(c.rates))},
                       {"p_loss_zero_drive_w", analytic::power_loss(0.0, c.rates, c.w01)},
                       {"p_loss_saturated_w", units::photon_energy(c.w01) * c.rates.gamma_n / 2.0}};
    r.outputs.emplace_back("power_loss.json", dump(summary));
    return r;
}

RunResult budget(const Context& c) {
    CsvTable t{{"rabi_hz", "p_loss_w", "w_dot_w", "q_dot_r_w", "q_dot_n_w", "u_dot_w"}, {}};
    json records = json::array();
    for (double f : rabi_grid_hz(c.block)) {
        const auto b = analytic::heat_rates({hz_to_rad(f), 0.0}, 0.0, c.rates, c.w01);
        t.rows.push_back({f, b.p_loss, b.w_dot, b.q_dot_r, b.q_dot_n, b.u_dot});
        records.push_back({{"rabi_hz", f},
                           {"p_loss_w", b.p_loss},
                           {"w_dot_w", b.w_dot},
                           {"q_dot_r_w", b.q_dot_r},
                           {"q_dot_n_w", b.q_dot_n},
                           {"u_dot_w", b.u_dot},
                           {"max_flow_w", b.max_flow()}});
    }
    RunResult r;
    r.outputs.emplace_back("budget.csv", t.str());
    r.outputs.emplace_back("budget.json", dump(records));
    return r;
}

RunResult autler(const Context& c) {
    if (c.system.transmon.levels != 3) throw ConfigError("autler: system.levels must be 3");
    const auto grid = centred_grid(c.w01, c.block);
    const double om2 = hz_to_rad(number(c.block, "rabi_12_hz"));
    const auto base = c.system.without_drives();
    const auto off = lindblad::output_psd_numeric(base, grid);
    const auto on = lindblad::output_psd_numeric(driven(base, model::Transition::t12, 0.0, om2), grid);
    RunResult r;
    r.outputs.emplace_back("autler_off.csv", spectrum_table(off).str());
    r.outputs.emplace_back("autler_on.csv", spectrum_table(on).str());
    r.outputs.emplace_back("autler_difference.csv", spectrum_table(welch::subtract_background(on, off)).str());
    r.outputs.emplace_back("autler_sidepeaks.csv",
                           spectrum_table(analytic::autler_sidepeaks(grid, c.rates, om2, c.w01)).str());
    return r;
}

RunResult qp(const Context& c) {
    const json& q = c.cfg.at("system").at("quasiparticles");
    const double gap = units::uev_to_joule(number(q, "gap_uev"));
    const double rho11 = optional_number(c.block, "rho11").value_or(c.rates.thermal_population());
    const double t_mk = number(c.block, "temperature_mk");
    const auto rates = analytic::qp_gamma_down(rho11, number(q, "r_n_ohm"), number(q, "capacitance_ff") * 1e-15,
                                               gap, c.w01);
    const auto thermal = analytic::qp_thermal_rate(units::mk_to_kelvin(t_mk), gap, c.w01);
    const model::QuasiparticleSpec spec{rates.gamma_up, rates.gamma_down, gap, number(q, "r_n_ohm"),
                                        number(q, "capacitance_ff") * 1e-15};
    const double denom = rates.gamma_down - rates.gamma_up;
    const json out{{"rho11", rho11},
                   {"x_qp", analytic::qp_density_ratio(rho11, gap, c.w01)},
                   {"gamma_down_hz", rad_to_hz(rates.gamma_down)},
                   {"gamma_up_hz", rad_to_hz(rates.gamma_up)},
                   {"gamma_qp_hz", rad_to_hz(rates.gamma_qp)},
                   {"temperature_mk", t_mk},
                   {"thermal_x_qp", thermal.x_qp},
                   {"thermal_gamma_qp_per_s", thermal.gamma_qp},
                   {"p_loss_qp_w", analytic::qp_power_loss(c.rates, spec, c.w01)},
                   {"zero_loss_n_r", denom > 0.0 ? json(rates.gamma_up / denom) : json(nullptr)}};
    RunResult r;
    r.outputs.emplace_back("qp.json", dump(out));
    return r;
}

welch::Window window(const std::string& w) {
    if (w == "hann") return welch::Window::hann;
    if (w == "hamming") return welch::Window::hamming;
    if (w == "rectangular") return welch::Window::rectangular;
    throw ConfigError("welch.window: expected hann, hamming or rectangular");
}

welch::TimeSeries read_series(const Context& c, const std::string& path) {
    const auto fmt = c.block.at("format").get<std::string>();
    if (fmt == "csv") return read_timeseries_csv(input_path(c, path), number(c.block, "gain"), number(c.block, "lo_hz"));
    if (fmt == "raw") return read_timeseries_raw(input_path(c, path));
    throw ConfigError("welch.format: expected csv or raw");
}

RunResult welch_run(const Context& c) {
    const auto input = optional_string(c.block, "input");
    const auto background = optional_string(c.block, "background");
    const auto win = window(c.block.at("window").get<std::string>());
    if (background && !input) throw ConfigError("welch.background needs welch.input");
    welch::TimeSeries ts;
    if (input) ts = read_series(c, *input);
    else ts = welch::surrogate_timeseries(c.rates, c.w01, number(c.block, "duration_s"),
                                          number(c.block, "sample_rate_hz"), c.seed);
    std::size_t seg = c.block.at("segment_length").get<std::size_t>();
    if (seg == 0) seg = welch::default_segment_length(ts.size(), ts.sample_rate_hz, rad_to_hz(c.rates.gamma_2));
    const double overlap = number(c.block, "overlap");
    auto spec = welch::welch_psd(ts, seg, overlap, win);
    if (background) spec = welch::subtract_background(spec, welch::welch_psd(read_series(c, *background), seg, overlap, win));

    RunResult r;
    r.outputs.emplace_back("welch.csv", spectrum_table(spec).str());
    if (c.block.at("write_timeseries").get<bool>()) r.outputs.emplace_back("timeseries.csv", timeseries_table(ts).str());
    if (c.block.at("fit").get<bool>()) {
        const auto f = fit::fit_lorentzian(spec, 1, {}, true);
        json j = fit_json(f);
        j["segment_length"] = seg;
        j["integrated_power_w"] = spec.integrated_power();
        r.outputs.emplace_back("welch_fit.json", dump(j));
        if (!f.converged) {
            r.numerical_failure = true;
            r.message = "Lorentzian fit of the Welch spectrum did not converge";
        }
    }
    return r;
}

fit::ReflectionMode reflection_mode(const std::string& m) {
    if (m == "complex") return fit::ReflectionMode::complex;
    if (m == "magnitude") return fit::ReflectionMode::magnitude;
    if (m == "phase") return fit::ReflectionMode::phase;
    throw ConfigError("fit.mode: expected complex, magnitude or phase");
}

RunResult fit_run(const Context& c) {
    const auto kind = c.block.at("kind").get<std::string>();
    const auto input = optional_string(c.block, "input");
    const auto data = input ? fit::SyntheticSet{}
                            : fit::synthesize(c.rates, c.w01, fit::reference_scenario(), c.seed);
    RunResult r;
    fit::FitResult f;
    auto spectrum_in = [&](const Spectrum& synth) {
        if (input) return read_spectrum(input_path(c, *input));
        r.outputs.emplace_back("fit_data.csv", spectrum_table(synth).str());
        return synth;
    };
    if (kind == "mollow") f = fit::fit_mollow(spectrum_in(data.mollow));
    else if (kind == "thermal") f = fit::fit_thermal(spectrum_in(data.thermal));
    else if (kind == "lorentzian") {
        const auto peaks = c.block.at("peaks").get<std::size_t>();
        if (peaks < 1 || peaks > 2) throw ConfigError("fit.peaks: expected 1 or 2");
        f = fit::fit_lorentzian(spectrum_in(data.thermal), int(peaks), {}, c.block.at("baseline").get<bool>());
    } else if (kind == "reflection") {
        const auto mode = reflection_mode(c.block.at("mode").get<std::string>());
        std::vector<fit::ReflectionPoint> trace;
        if (input) trace = read_reflection(input_path(c, *input));
        else {
            trace = data.reflection;
            CsvTable t{{"delta_hz", "re", "im"}, {}};
            for (const auto& p : trace) t.rows.push_back({p.delta_hz, p.r.real(), p.r.imag()});
            r.outputs.emplace_back("fit_data.csv", t.str());
        }
        f = fit::fit_reflection(trace, mode);
    } else if (kind == "power-loss") {
        fit::PowerLossFixed fx;
        fx.gamma2_hz = optional_number(c.block, "gamma2_hz").value_or(rad_to_hz(c.rates.gamma_2));
        fx.gamma_r_hz = optional_number(c.block, "gamma_r_hz").value_or(rad_to_hz(c.rates.gamma_r));
        fx.omega01_hz = rad_to_hz(c.w01);
        fx.numerator_hz = optional_number(c.block, "numerator_hz");
        if (!input && !fx.numerator_hz) fx.numerator_hz = rad_to_hz(analytic::reflection_numerator(c.rates));
        std::vector<fit::PowerLossPoint> pts;
        if (input) pts = read_power_loss(input_path(c, *input));
        else {
            pts = data.power_loss;
            CsvTable t{{"rabi_hz", "watts"}, {}};
            for (const auto& p : pts) t.rows.push_back({p.rabi_hz, p.watts});
            r.outputs.emplace_back("fit_data.csv", t.str());
        }
        f = fit::fit_power_loss(pts, fx);
    } else {
        throw ConfigError("fit.kind: expected mollow, thermal, lorentzian, reflection or power-loss");
    }
    json j = fit_json(f);
    j["kind"] = kind;
    r.outputs.emplace_back("fit.json", dump(j));
    if (!f.converged) {
        r.numerical_failure = true;
        r.message = "fit did not converge: " + f.message;
    }
    return r;
}

RunResult table1_run(const Context& c) {
    const char* keys[] = {"mollow", "thermal", "power_loss", "reflection"};
    int given = 0;
    for (const char* k : keys) given += optional_string(c.block, k).has_value();
    if (given != 0 && given != 4)
        throw ConfigError("table1: give all of mollow, thermal, power_loss, reflection or none");
    fit::SyntheticSet data;
    if (given == 4) {
        data.mollow = read_spectrum(input_path(c, *optional_string(c.block, "mollow")));
        data.thermal = read_spectrum(input_path(c, *optional_string(c.block, "thermal")));
        data.power_loss = read_power_loss(input_path(c, *optional_string(c.block, "power_loss")));
        data.reflection = read_reflection(input_path(c, *optional_string(c.block, "reflection")));
    } else {
        data = fit::synthesize(c.rates, c.w01, fit::reference_scenario(), c.seed, c.block.at("noiseless").get<bool>());
    }
    const auto rt = fit::fit_all(data, rad_to_hz(c.w01));
    const json out{{"table", table1_json(rt.table)},
                   {"mollow", fit_json(rt.mollow)},
                   {"thermal", fit_json(rt.thermal)},
                   {"reflection", fit_json(rt.reflection)},
                   {"power_loss", fit_json(rt.power_loss)}};
    RunResult r;
    r.outputs.emplace_back("table1.json", dump(out));
    return r;
}

spectrometer::NoiseProfile profile(const json& b) {
    const json& p = b.at("profile");
    const auto kind = p.at("kind").get<std::string>();
    const double level = number(b, "n_th"), base = number(p, "baseline");
    const double centre = hz_to_rad(number(p, "center_hz")), width = hz_to_rad(number(p, "width_hz"));
    if (kind == "flat") return [level](double) { return level; };
    if (kind == "step") return [=](double w) { return w < centre ? base : level; };
    if (kind == "peak") {
        if (!(width > 0.0)) throw ConfigError("profile.width_hz: must be positive");
        return [=](double w) {
            const double d = w - centre;
            return base + (level - base) * width * width / (d * d + width * width);
        };
    }
    throw ConfigError("profile.kind: expected flat, step or peak");
}

RunResult spectrometer_run(const Context& c) {
    const auto cfg = spectrometer_config(c.block);
    const auto warnings = cfg.validate();
    const double lo = number(c.block, "omega_min_hz"), hi = number(c.block, "omega_max_hz");
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("spectrometer: need 0 < omega_min_hz <= omega_max_hz");
    const auto grid = linalg::linspace(hz_to_rad(lo), hz_to_rad(hi), count(c.block, "points", 1));
    spectrometer::SweepOptions opt;
    opt.relative_noise = number(c.block, "relative_noise");
    opt.seed = c.seed;
    const auto pts = spectrometer::sweep_spectrometer(cfg, grid, profile(c.block), opt);

    CsvTable t{{"omega01_hz", "delta_n"}, {}};
    json points = json::array();
    double mean = 0.0;
    for (const auto& p : pts) {
        t.rows.push_back({p.omega01_hz, p.delta_n});
        points.push_back({{"omega01_hz", p.omega01_hz},
                          {"delta_n", p.delta_n},
                          {"sigma", p.sigma},
                          {"true_delta_n", p.true_delta_n},
                          {"flatness", p.flatness},
                          {"narrowband", p.narrowband}});
        mean += p.delta_n / double(pts.size());
    }
    json summary{{"warnings", warnings}, {"mean_delta_n", mean}, {"points", points}};
    if (const auto r = optional_number(c.block, "reflection_r")) {
        const auto s = spectrometer::split_occupations(mean, *r);
        summary["split"] = {{"n_th", s.n_th}, {"n_r", s.n_r}, {"negative", s.negative}};
    }
    RunResult r;
    r.outputs.emplace_back("spectrometer.csv", t.str());
    r.outputs.emplace_back("spectrometer.json", dump(summary));
    return r;
}

} // namespace

RunResult run_scenario(const json& cfg, const fs::path& base) {
    const auto s = cfg.at("scenario").get<std::string>();
    const json& block = cfg.at(s == "power-loss" ? "power_loss" : s);
    Context c{cfg, block, base, system_config(cfg), {}, 0.0, cfg.at("seed").get<std::uint64_t>()};
    c.rates = closed_form_rates(cfg, c.system);
    c.w01 = c.system.transmon.omega01;
    static const std::map<std::string, std::function<RunResult(const Context&)>> table{
        {"spectrum", spectrum}, {"reflection", reflection}, {"power-loss", power_loss},
        {"budget", budget},     {"autler", autler},         {"qp", qp},
        {"welch", welch_run},   {"fit", fit_run},           {"table1", table1_run},
        {"spectrometer", spectrometer_run}};
    return table.at(s)(c);
}

json validate_report(const json& cfg, const fs::path& base) {
    const auto s = cfg.at("scenario").get<std::string>();
    const json& b = cfg.at(s == "power-loss" ? "power_loss" : s);
    const auto system = system_config(cfg);
    const auto rates = closed_form_rates(cfg, system);
    const auto plain = model::derive_rates(system);
    json warnings = json::array(), notes = json::array();
    auto fmt = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };

    notes.push_back("gamma_1/2pi = " + fmt(rad_to_hz(plain.gamma_1) / 1e3) + " kHz, gamma_2/2pi = "
                    + fmt(rad_to_hz(rates.gamma_2) / 1e3) + " kHz");
    if (rates.gamma_2 < 0.5 * plain.gamma_1)
        notes.push_back("gamma_2_hz is narrower than gamma_1/2: closed forms use it, the Lindblad oracle cannot");
    auto strong_drive = [&](const char* key, double rabi_hz, double gamma_1) {
        const double ratio = hz_to_rad(rabi_hz) / gamma_1;
        const std::string what = std::string(key) + " / gamma_1 = " + fmt(ratio);
        if (ratio >= strong_drive_ratio) notes.push_back("strong drive: " + what);
        else warnings.push_back("strong drive not reached: " + what + " (closed forms assume >= 30)");
    };
    auto file_exists = [&](const char* key) {
        if (const auto p = optional_string(b, key)) {
            const fs::path path = fs::path(*p).is_absolute() ? fs::path(*p) : base / *p;
            if (!fs::exists(path)) warnings.push_back(std::string(key) + ": file not found: " + path.string());
        }
    };

    if (s == "spectrum") {
        strong_drive("mollow_rabi_hz", number(b, "mollow_rabi_hz"), plain.gamma_1);
        const double need = 20.0 * rad_to_hz(plain.gamma_2);
        if (b.at("numeric").get<bool>() && number(b, "half_span_hz") < need)
            warnings.push_back("half_span_hz below 20 gamma_2 (" + fmt(need) + " Hz): numeric spectra will be refused");
    } else if (s == "reflection") {
        const double ratio = hz_to_rad(number(b, "probe_rabi_hz")) / rates.gamma_2;
        if (ratio > weak_probe_ratio)
            warnings.push_back("weak probe not reached: probe_rabi_hz / gamma_2 = " + fmt(ratio));
        else notes.push_back("weak probe: probe_rabi_hz / gamma_2 = " + format_double(ratio));
    } else if (s == "power-loss" || s == "budget") {
        notes.push_back("power loss changes sign at " + fmt(rad_to_hz(analytic::power_loss_zero_crossing(rates)) / 1e3)
                        + " kHz");
    } else if (s == "autler") {
        if (system.transmon.levels != 3) warnings.push_back("autler needs system.levels = 3");
        else strong_drive("rabi_12_hz", number(b, "rabi_12_hz"), plain.three->gamma_1_01);
    } else if (s == "welch") {
        file_exists("input");
        file_exists("background");
        if (!optional_string(b, "input")) {
            const double fs_hz = number(b, "sample_rate_hz");
            const double need = 10.0 * rad_to_hz(rates.gamma_2);
            if (fs_hz <= need) warnings.push_back("sample_rate_hz at or below 10 gamma_2/2pi: surrogate will be refused");
            const auto n = static_cast<std::size_t>(number(b, "duration_s") * fs_hz);
            std::size_t seg = b.at("segment_length").get<std::size_t>();
            if (seg == 0 && n >= 16) seg = welch::default_segment_length(n, fs_hz, rad_to_hz(rates.gamma_2));
            if (seg > 0) {
                const double per_fwhm = 2.0 * rad_to_hz(rates.gamma_2) / (fs_hz / double(seg));
                if (per_fwhm < 8.0) warnings.push_back("fewer than 8 bins per linewidth: " + fmt(per_fwhm));
                else notes.push_back("bins per linewidth: " + fmt(per_fwhm));
            }
        }
    } else if (s == "fit") {
        file_exists("input");
    } else if (s == "table1") {
        for (const char* k : {"mollow", "thermal", "power_loss", "reflection"}) file_exists(k);
    } else if (s == "spectrometer") {
        for (const auto& w : spectrometer_config(b).validate()) warnings.push_back(w);
    }
    return {{"status", "ok"}, {"scenario", s}, {"warnings", warnings}, {"notes", notes}};
}

} // namespace wgheat::cli
