// cli.hpp — Config-driven command-line front end
//
// Configs are strict JSON in SI units with explicit _hz / _mk suffixes.
// Every output file X gets a sidecar X.meta.json holding the resolved config
// and the SHA-256 of X. Exit codes: 0 ok, 1 config, 2 numerical, 3 I/O.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

namespace wgheat::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_io = 3;

// argv[0] is the program name. Diagnostics go to err, reports to out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Merges a user config over the defaults of its scenario. Unknown keys and
// type mismatches are collected and thrown together as a ConfigError.
nlohmann::json resolve_config(const nlohmann::json& user);

std::string sha256_hex(std::string_view data);

} // namespace wgheat::cli
