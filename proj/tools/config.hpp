// config.hpp — Scenario defaults, strict merging and JSON to model conversion

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "wgheat/model.hpp"
#include "wgheat/spectrometer.hpp"

namespace wgheat::cli {

using json = nlohmann::json;

// Scenario names accepted by each subcommand.
bool is_simulate_scenario(const std::string& s);
// Subcommand that runs a scenario (simulate, welch, fit, table1, spectrometer).
std::string subcommand_for(const std::string& scenario);

// Defaults of one scenario: scenario, seed, system and the scenario block.
json scenario_defaults(const std::string& scenario);

// Typed accessors; a wrong type or a failed enum check throws ConfigError.
double number(const json& j, const char* key);
std::optional<double> optional_number(const json& j, const char* key);
std::optional<std::string> optional_string(const json& j, const char* key);
std::size_t count(const json& j, const char* key, std::size_t min);

// System block to model types. gamma_2_hz, when set, replaces the derived
// linewidth in the closed forms (the Lindblad oracle keeps gamma_1/2 + gamma_phi).
model::SystemConfig system_config(const json& resolved);
model::DerivedRates closed_form_rates(const json& resolved, const model::SystemConfig& c);
spectrometer::SpectrometerConfig spectrometer_config(const json& block);

} // namespace wgheat::cli
