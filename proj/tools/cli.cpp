// cli.cpp — Subcommand dispatch, flag handling and exit-code mapping

#include "wgheat/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "scenarios.hpp"
#include "wgheat/errors.hpp"
#include "wgheat/parallel.hpp"

namespace wgheat::cli {

namespace fs = std::filesystem;

namespace {

json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Driven qubit between a cold waveguide and a hot bath: simulate, fit, estimate"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;

    const std::vector<std::pair<std::string, std::string>> subs{
        {"simulate", "closed-form and numeric observables (spectrum, reflection, power-loss, budget, autler, qp)"},
        {"fit", "fit one spectrum, reflection trace or power-loss curve"},
        {"welch", "averaged-periodogram PSD of a time series or a surrogate record"},
        {"table1", "fit all datasets and reconcile the bath parameters"},
        {"spectrometer", "sweep the two-channel noise spectrometer"},
        {"validate", "schema and regime checks without computation"}};
    for (const auto& [name, help] : subs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config")->required();
        if (name != "validate") {
            sub->add_option("--out", out_dir, "output directory");
            sub->add_option("--seed", seed, "overrides the config seed");
            sub->add_option("--threads", threads, "worker threads (default: WGHEAT_THREADS or all cores)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? exit_ok : exit_config;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        if (threads > 0) set_thread_count(threads);
        json user = load_config(config_path);
        if (seed && user.is_object()) user["seed"] = *seed;
        const json resolved = resolve_config(user);
        const auto scenario = resolved.at("scenario").get<std::string>();
        const fs::path base = fs::path(config_path).parent_path();

        if (sub == "validate") {
            out << validate_report(resolved, base).dump(2) << "\n";
            return exit_ok;
        }
        if (subcommand_for(scenario) != sub)
            throw ConfigError("scenario '" + scenario + "' runs under '" + subcommand_for(scenario) + "', not '" + sub + "'");
        const auto result = run_scenario(resolved, base);
        write_outputs(out_dir, result.outputs, sub, resolved);
        for (const auto& [name, content] : result.outputs) out << (fs::path(out_dir) / name).string() << "\n";
        if (threads > 0) set_thread_count(0);
        if (result.numerical_failure) {
            err << "numerical failure: " << result.message << "\n";
            return exit_numerical;
        }
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        set_thread_count(0);
        return exit_numerical;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        set_thread_count(0);
        return exit_io;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
    }
    set_thread_count(0);
    return exit_config;
}

} // namespace wgheat::cli
