// scenarios.hpp — Scenario runners and the dry-run regime report

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "io.hpp"

namespace wgheat::cli {

struct RunResult {
    Outputs outputs;
    // Set when a fit did not converge; outputs are still written.
    bool numerical_failure{false};
    std::string message;
};

// Input paths in the config are taken relative to base_dir.
RunResult run_scenario(const nlohmann::json& resolved, const std::filesystem::path& base_dir);

// Schema and regime checks without computation: status, warnings and notes.
nlohmann::json validate_report(const nlohmann::json& resolved, const std::filesystem::path& base_dir);

} // namespace wgheat::cli
