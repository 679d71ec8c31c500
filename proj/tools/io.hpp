// io.hpp — CSV tables, time-series input and sidecar-stamped output files

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wgheat/fit.hpp"
#include "wgheat/spectrum.hpp"
#include "wgheat/welch.hpp"

namespace wgheat::cli {

// Shortest text that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string str() const;
};

// Reads a numeric CSV whose first line must equal the expected header.
// Unreadable or malformed files throw IoError.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& header);

CsvTable spectrum_table(const Spectrum& s); // freq_hz,psd_w_per_hz
Spectrum read_spectrum(const std::filesystem::path& path);
std::vector<fit::ReflectionPoint> read_reflection(const std::filesystem::path& path); // delta_hz,re,im
std::vector<fit::PowerLossPoint> read_power_loss(const std::filesystem::path& path);  // rabi_hz,watts

// t_s,volts with a uniform time step; gain and LO come from the config.
welch::TimeSeries read_timeseries_csv(const std::filesystem::path& path, double gain, double lo_hz);
// Little-endian float64 samples plus a sidecar path + ".json" with
// sample_rate_hz, gain and optionally lo_hz.
welch::TimeSeries read_timeseries_raw(const std::filesystem::path& path);
CsvTable timeseries_table(const welch::TimeSeries& ts); // t_s,volts

nlohmann::json fit_json(const fit::FitResult& f);
nlohmann::json table1_json(const fit::Table1Record& t);

// Named file contents produced by one run.
using Outputs = std::vector<std::pair<std::string, std::string>>;

// Writes each output and its sidecar name.meta.json with the resolved config
// and the SHA-256 of the file bytes. Failures throw IoError.
void write_outputs(const std::filesystem::path& dir, const Outputs& outputs, const std::string& subcommand,
                   const nlohmann::json& resolved);

} // namespace wgheat::cli
