// io.cpp — CSV tables, time-series input and sidecar-stamped output files

#include "io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "wgheat/cli.hpp"
#include "wgheat/errors.hpp"

namespace wgheat::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return ss.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(cell);
    if (!line.empty() && line.back() == ',') parts.emplace_back();
    return parts;
}

double parse_cell(const std::string& cell, const fs::path& path, std::size_t line) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && e[-1] == ' ') --e;
    double v = 0.0;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        throw IoError(path.string() + ":" + std::to_string(line) + ": not a number: '" + cell + "'");
    return v;
}

} // namespace

CsvTable read_csv(const fs::path& path, const std::vector<std::string>& header) {
    std::istringstream in(slurp(path));
    CsvTable t{header, {}};
    std::string line;
    std::size_t n = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (!seen_header) {
            if (cells != header) {
                std::string want;
                for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
                throw IoError(path.string() + ": expected header '" + want + "'");
            }
            seen_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw IoError(path.string() + ":" + std::to_string(n) + ": expected " + std::to_string(header.size())
                          + " columns");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_cell(c, path, n));
        t.rows.push_back(std::move(row));
    }
    if (!seen_header) throw IoError(path.string() + ": empty file");
    return t;
}

CsvTable spectrum_table(const Spectrum& s) {
    const auto hz = s.converted(PsdConvention::per_hz);
    CsvTable t{{"freq_hz", "psd_w_per_hz"}, {}};
    for (std::size_t k = 0; k < hz.size(); ++k) t.rows.push_back({hz.freqs_hz[k], hz.values[k]});
    return t;
}

Spectrum read_spectrum(const fs::path& path) {
    const auto t = read_csv(path, {"freq_hz", "psd_w_per_hz"});
    Spectrum s;
    for (const auto& r : t.rows) {
        s.freqs_hz.push_back(r[0]);
        s.values.push_back(r[1]);
    }
    s.meta = "file:" + path.filename().string();
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return s;
}

std::vector<fit::ReflectionPoint> read_reflection(const fs::path& path) {
    std::vector<fit::ReflectionPoint> out;
    for (const auto& r : read_csv(path, {"delta_hz", "re", "im"}).rows) out.push_back({r[0], {r[1], r[2]}});
    return out;
}

std::vector<fit::PowerLossPoint> read_power_loss(const fs::path& path) {
    std::vector<fit::PowerLossPoint> out;
    for (const auto& r : read_csv(path, {"rabi_hz", "watts"}).rows) out.push_back({r[0], r[1]});
    return out;
}

welch::TimeSeries read_timeseries_csv(const fs::path& path, double gain, double lo_hz) {
    const auto t = read_csv(path, {"t_s", "volts"});
    if (t.rows.size() < 2) throw IoError(path.string() + ": need at least two samples");
    const double dt = (t.rows.back()[0] - t.rows.front()[0]) / double(t.rows.size() - 1);
    if (!(dt > 0.0)) throw IoError(path.string() + ": time column must increase");
    for (std::size_t i = 1; i < t.rows.size(); ++i)
        if (std::abs(t.rows[i][0] - t.rows[i - 1][0] - dt) > 1e-6 * dt)
            throw IoError(path.string() + ": time step is not uniform");
    welch::TimeSeries ts;
    ts.sample_rate_hz = 1.0 / dt;
    ts.gain = gain;
    ts.lo_hz = lo_hz;
    for (const auto& r : t.rows) ts.samples.push_back(r[1]);
    return ts;
}

welch::TimeSeries read_timeseries_raw(const fs::path& path) {
    const fs::path side = path.string() + ".json";
    json meta;
    try {
        meta = json::parse(slurp(side));
    } catch (const json::exception& e) {
        throw IoError(side.string() + ": " + e.what());
    }
    welch::TimeSeries ts;
    if (!meta.is_object()) throw IoError(side.string() + ": expected an object");
    for (auto it = meta.begin(); it != meta.end(); ++it) {
        if (!it.value().is_number()) throw IoError(side.string() + ": " + it.key() + " must be a number");
        const double v = it.value().get<double>();
        if (it.key() == "sample_rate_hz") ts.sample_rate_hz = v;
        else if (it.key() == "gain") ts.gain = v;
        else if (it.key() == "lo_hz") ts.lo_hz = v;
        else throw IoError(side.string() + ": unknown key " + it.key());
    }
    if (!meta.contains("sample_rate_hz") || !meta.contains("gain"))
        throw IoError(side.string() + ": needs sample_rate_hz and gain");

    const std::string bytes = slurp(path);
    if (bytes.size() % 8 != 0) throw IoError(path.string() + ": size is not a multiple of 8 bytes");
    ts.samples.resize(bytes.size() / 8);
    for (std::size_t i = 0; i < ts.samples.size(); ++i) {
        std::uint64_t u;
        std::memcpy(&u, bytes.data() + 8 * i, 8);
        if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
        ts.samples[i] = std::bit_cast<double>(u);
    }
    return ts;
}

CsvTable timeseries_table(const welch::TimeSeries& ts) {
    CsvTable t{{"t_s", "volts"}, {}};
    t.rows.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) t.rows.push_back({double(i) / ts.sample_rate_hz, ts.samples[i]});
    return t;
}

json fit_json(const fit::FitResult& f) {
    json params = json::array();
    for (std::size_t i = 0; i < f.params.size(); ++i)
        params.push_back({{"name", f.params[i].name},
                          {"value", f.params[i].value},
                          {"sigma", f.params[i].sigma},
                          {"free", i < f.n_free}});
    json cov = json::array();
    for (Eigen::Index i = 0; i < f.covariance.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < f.covariance.cols(); ++j) row.push_back(f.covariance(i, j));
        cov.push_back(row);
    }
    return {{"params", params},
            {"covariance", cov},
            {"residual_rms", f.residual_rms},
            {"converged", f.converged},
            {"iterations", f.iterations},
            {"gradient_norm", f.gradient_norm},
            {"condition_number", f.condition_number},
            {"flags", f.flags},
            {"message", f.message}};
}

json table1_json(const fit::Table1Record& t) {
    return {{"gamma_r_hz", t.gamma_r_hz},
            {"gamma_2_hz", t.gamma_2_hz},
            {"gamma_n_hz", t.gamma_n_hz},
            {"delta_n", t.delta_n},
            {"numerator_hz", t.numerator_hz},
            {"rho11", t.rho11},
            {"n_r", t.n_r},
            {"n_n", t.n_n},
            {"n_q", t.n_q},
            {"gamma_1_hz", t.gamma_1_hz},
            {"t_r_mk", t.t_r_mk},
            {"t_n_mk", t.t_n_mk},
            {"t_q_mk", t.t_q_mk},
            {"sigma_n_r", t.sigma_n_r},
            {"sigma_n_n", t.sigma_n_n},
            {"sigma_gamma_1_hz", t.sigma_gamma_1_hz},
            {"gamma_2_reflection_hz", t.gamma_2_reflection_hz},
            {"gamma_2_discrepancy_hz", t.gamma_2_discrepancy_hz},
            {"gamma_phi_implied_hz", t.gamma_phi_implied_hz},
            {"dephasing_z", t.dephasing_z},
            {"flags", t.flags}};
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + p.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed: " + p.string());
}

} // namespace

void write_outputs(const fs::path& dir, const Outputs& outputs, const std::string& subcommand,
                   const json& resolved) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : outputs) {
        write_file(dir / name, content);
        const json meta{{"file", name},
                        {"bytes", content.size()},
                        {"sha256", sha256_hex(content)},
                        {"subcommand", subcommand},
                        {"config", resolved}};
        write_file(dir / (name + ".meta.json"), meta.dump(2) + "\n");
    }
}

} // namespace wgheat::cli
