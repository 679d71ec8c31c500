// config.cpp — Scenario defaults, strict merging and JSON to model conversion

#include "config.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "wgheat/cli.hpp"
#include "wgheat/errors.hpp"
#include "wgheat/units.hpp"

namespace wgheat::cli {

namespace {

constexpr std::array<const char*, 6> simulate_scenarios{"spectrum", "reflection", "power-loss",
                                                       "budget",   "autler",     "qp"};
constexpr std::array<const char*, 4> own_scenarios{"welch", "fit", "table1", "spectrometer"};

std::string block_key(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

json bath_defaults(double gamma_hz, double occupation) {
    return {{"gamma_hz", gamma_hz},      {"occupation", occupation}, {"temperature_mk", nullptr},
            {"statistics", "bosonic"},   {"occupation_12", nullptr}};
}

json system_defaults(unsigned levels) {
    using namespace model::table1;
    return {{"omega01_hz", omega01_hz},
            {"anharmonicity_hz", anharmonicity_hz},
            {"levels", levels},
            {"gamma_phi_hz", 0.0},
            {"gamma_2_hz", nullptr},
            {"radiative", bath_defaults(gamma_r_hz, n_r)},
            {"nonradiative", bath_defaults(gamma_n_hz, n_n)},
            {"quasiparticles",
             {{"gap_uev", gap_uev},
              {"r_n_ohm", r_n_ohm},
              {"capacitance_ff", capacitance_ff},
              {"gamma_up_hz", 0.0},
              {"gamma_down_hz", 0.0}}}};
}

json block_defaults(const std::string& s) {
    using namespace model::table1;
    if (s == "spectrum")
        return {{"half_span_hz", 3.5e6}, {"points", 701u}, {"mollow_rabi_hz", mollow_rabi_hz}, {"numeric", true}};
    if (s == "reflection")
        return {{"half_span_hz", 1e6}, {"points", 201u}, {"numeric", true}, {"probe_rabi_hz", 1e3}};
    if (s == "power-loss")
        return {{"rabi_min_hz", 1e4}, {"rabi_max_hz", 1e7}, {"points", 61u}, {"numeric", true}};
    if (s == "budget") return {{"rabi_min_hz", 1e4}, {"rabi_max_hz", 1e7}, {"points", 61u}};
    if (s == "autler") return {{"rabi_12_hz", autler_rabi_hz}, {"half_span_hz", 4.5e6}, {"points", 601u}};
    if (s == "qp") return {{"rho11", nullptr}, {"temperature_mk", 131.0}};
    if (s == "welch")
        return {{"input", nullptr},        {"format", "csv"},      {"background", nullptr},
                {"gain", 1.0},             {"lo_hz", 0.0},         {"segment_length", 0u},
                {"overlap", 0.5},          {"window", "hann"},     {"duration_s", 1.0},
                {"sample_rate_hz", 3e6},   {"fit", true},          {"write_timeseries", false}};
    if (s == "fit")
        return {{"kind", "mollow"},     {"input", nullptr},        {"mode", "complex"},
                {"gamma2_hz", nullptr}, {"gamma_r_hz", nullptr},   {"numerator_hz", nullptr},
                {"peaks", 1u},          {"baseline", false}};
    if (s == "table1")
        return {{"mollow", nullptr}, {"thermal", nullptr}, {"power_loss", nullptr}, {"reflection", nullptr},
                {"noiseless", false}};
    if (s == "spectrometer")
        return {{"gamma_r_hz", 500e3},
                {"gamma_n_hz", 2e3},
                {"gamma_phi_hz", 0.0},
                {"n_th", n_n},
                {"n_r", n_r},
                {"omega_min_hz", 5.4e9},
                {"omega_max_hz", 5.6e9},
                {"points", 41u},
                {"profile", {{"kind", "flat"}, {"baseline", n_r}, {"center_hz", 5.5e9}, {"width_hz", 20e6}}},
                {"relative_noise", 0.0},
                {"reflection_r", nullptr}};
    throw ConfigError("unknown scenario '" + s + "'");
}

const char* type_name(const json& j) {
    if (j.is_boolean()) return "boolean";
    if (j.is_number_unsigned()) return "non-negative integer";
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    if (j.is_object()) return "object";
    if (j.is_array()) return "array";
    return "null";
}

// Defaults double as the schema: a user value must match the default's type.
void merge(json& into, const json& user, const std::string& path, std::vector<std::string>& errors) {
    if (!user.is_object()) {
        errors.push_back(path + ": expected object, got " + type_name(user));
        return;
    }
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string p = path.empty() ? it.key() : path + "." + it.key();
        if (!into.contains(it.key())) {
            errors.push_back(p + ": unknown key");
            continue;
        }
        json& d = into[it.key()];
        const json& u = it.value();
        bool ok = false;
        if (d.is_object()) {
            merge(d, u, p, errors);
            continue;
        }
        if (d.is_null()) ok = u.is_null() || u.is_number() || u.is_string();
        else if (d.is_boolean()) ok = u.is_boolean();
        else if (d.is_number_unsigned()) ok = u.is_number_unsigned();
        else if (d.is_number()) ok = u.is_number();
        else if (d.is_string()) ok = u.is_string();
        if (ok) d = u.is_number() && d.is_number_float() ? json(u.get<double>()) : u;
        else errors.push_back(p + ": expected " + std::string(type_name(d)) + ", got " + type_name(u));
    }
}

model::BathStatistics statistics(const json& bath, const std::string& where) {
    const auto s = bath.at("statistics").get<std::string>();
    if (s == "bosonic") return model::BathStatistics::bosonic;
    if (s == "tls") return model::BathStatistics::tls;
    throw ConfigError(where + ".statistics: expected 'bosonic' or 'tls'");
}

} // namespace

bool is_simulate_scenario(const std::string& s) {
    return std::find(simulate_scenarios.begin(), simulate_scenarios.end(), s) != simulate_scenarios.end();
}

std::string subcommand_for(const std::string& s) {
    if (is_simulate_scenario(s)) return "simulate";
    if (std::find(own_scenarios.begin(), own_scenarios.end(), s) != own_scenarios.end()) return s;
    throw ConfigError("unknown scenario '" + s + "'");
}

json scenario_defaults(const std::string& s) {
    return {{"scenario", s},
            {"seed", 1u},
            {"system", system_defaults(s == "autler" ? 3u : 2u)},
            {block_key(s), block_defaults(s)}};
}

json resolve_config(const json& user) {
    if (!user.is_object()) throw ConfigError("config: expected a JSON object");
    if (!user.contains("scenario")) throw ConfigError("config: missing required key 'scenario'");
    if (!user["scenario"].is_string()) throw ConfigError("scenario: expected string");
    const auto s = user["scenario"].get<std::string>();
    subcommand_for(s);

    json r = scenario_defaults(s);
    std::vector<std::string> errors;
    merge(r, user, "", errors);
    if (user.contains("system") && user["system"].is_object()) {
        for (const char* b : {"radiative", "nonradiative"}) {
            const json& sys = user["system"];
            if (!sys.contains(b) || !sys[b].is_object()) continue;
            const json& ub = sys[b];
            const bool has_t = ub.contains("temperature_mk") && !ub["temperature_mk"].is_null();
            if (has_t && ub.contains("occupation"))
                errors.push_back(std::string("system.") + b + ": give occupation or temperature_mk, not both");
        }
    }
    if (!errors.empty()) {
        std::string msg = "config has " + std::to_string(errors.size()) + " error(s):";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    // Temperatures given instead of occupations are converted here so the
    // resolved config carries both.
    for (const char* b : {"radiative", "nonradiative"}) {
        json& bath = r["system"][b];
        const auto t = optional_number(bath, "temperature_mk");
        if (!t) continue;
        try {
            bath["occupation"] = model::occupation_from_temperature(
                units::mk_to_kelvin(*t), units::hz_to_rad(number(r["system"], "omega01_hz")),
                statistics(bath, std::string("system.") + b));
        } catch (const DomainError& e) {
            throw ConfigError(std::string("system.") + b + ".temperature_mk: " + e.what());
        }
    }
    return r;
}

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw ConfigError(std::string(key) + ": expected number");
    return j[key].get<double>();
}

std::optional<double> optional_number(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + ": expected number or null");
    return j[key].get<double>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw ConfigError(std::string(key) + ": expected string or null");
    return j[key].get<std::string>();
}

std::size_t count(const json& j, const char* key, std::size_t min) {
    const auto n = j.at(key).get<std::size_t>();
    if (n < min) throw ConfigError(std::string(key) + ": must be at least " + std::to_string(min));
    return n;
}

model::SystemConfig system_config(const json& resolved) {
    const json& s = resolved.at("system");
    model::SystemConfig c;
    c.transmon.omega01 = units::hz_to_rad(number(s, "omega01_hz"));
    c.transmon.anharmonicity = units::hz_to_rad(number(s, "anharmonicity_hz"));
    c.transmon.levels = s.at("levels").get<int>();
    c.transmon.gamma_phi = units::hz_to_rad(number(s, "gamma_phi_hz"));
    auto bath = [&](const char* name, model::BathLabel label) {
        const json& b = s.at(name);
        model::BathSpec spec{label, units::hz_to_rad(number(b, "gamma_hz")), number(b, "occupation"),
                             statistics(b, std::string("system.") + name)};
        spec.occupation_12 = optional_number(b, "occupation_12");
        return spec;
    };
    c.radiative = bath("radiative", model::BathLabel::radiative);
    c.nonradiative = bath("nonradiative", model::BathLabel::nonradiative);
    const json& q = s.at("quasiparticles");
    const double up = units::hz_to_rad(number(q, "gamma_up_hz"));
    const double down = units::hz_to_rad(number(q, "gamma_down_hz"));
    if (up > 0.0 || down > 0.0)
        c.quasiparticles = model::QuasiparticleSpec{up, down, units::uev_to_joule(number(q, "gap_uev")),
                                                    number(q, "r_n_ohm"), number(q, "capacitance_ff") * 1e-15};
    c.validate();
    return c;
}

model::DerivedRates closed_form_rates(const json& resolved, const model::SystemConfig& c) {
    auto r = model::derive_rates(c);
    if (const auto g2 = optional_number(resolved.at("system"), "gamma_2_hz")) {
        if (!(*g2 > 0.0)) throw ConfigError("system.gamma_2_hz: must be positive");
        r = r.with_linewidth(units::hz_to_rad(*g2));
    }
    return r;
}

spectrometer::SpectrometerConfig spectrometer_config(const json& b) {
    spectrometer::SpectrometerConfig c;
    c.gamma_r = units::hz_to_rad(number(b, "gamma_r_hz"));
    c.gamma_n = units::hz_to_rad(number(b, "gamma_n_hz"));
    c.gamma_phi = units::hz_to_rad(number(b, "gamma_phi_hz"));
    c.n_th = number(b, "n_th");
    c.n_r = number(b, "n_r");
    c.omega01 = units::hz_to_rad(0.5 * (number(b, "omega_min_hz") + number(b, "omega_max_hz")));
    return c;
}

} // namespace wgheat::cli
