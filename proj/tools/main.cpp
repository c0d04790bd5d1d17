#include "uavsec/engine.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/localize.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    std::istringstream stream(csv);
    std::string tok;
    while (std::getline(stream, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw uavsec::config_error(what + ": cannot parse '" + tok + "' as a number");
        }
    }
    return out;
}

std::vector<uavsec::detectloc::RssMeasurement> read_measurement_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw uavsec::io_error("cannot open measurement file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) {
        throw uavsec::config_error("measurement file '" + path + "' is empty");
    }
    if (line != "x,y,z,rss_dbm" && line != "x,y,z,rss_dbm\r") {
        throw uavsec::config_error("measurement file must start with header 'x,y,z,rss_dbm'");
    }
    std::vector<uavsec::detectloc::RssMeasurement> ms;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto vals = parse_double_list(line, path + ":" + std::to_string(lineno));
        if (vals.size() != 4) {
            throw uavsec::config_error(path + ":" + std::to_string(lineno) +
                                       ": expected 4 columns x,y,z,rss_dbm");
        }
        ms.push_back({{vals[0], vals[1], vals[2]}, vals[3]});
    }
    return ms;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, const std::string& format,
                 const std::string& fading, int threads) {
    auto cfg = uavsec::engine::load_scenario(scenario_path);
    uavsec::engine::RunOptions opts;
    opts.fading_disabled = fading == "off";
    opts.threads = threads;
    opts.seed_override = seed;
    const auto result = uavsec::engine::run(cfg, opts);

    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir);
    if (format == "json") {
        uavsec::engine::emit_records_json(result, (base / "records.json").string());
    } else {
        uavsec::engine::emit_records_csv(result, (base / "records.csv").string());
    }
    uavsec::engine::emit_summary_json(result, (base / "summary.json").string());
    uavsec::engine::emit_effective_config(result, (base / "effective_config.json").string());
    std::cout << "wrote " << result.records.size() << " records to " << out_dir << "\n";
    return 0;
}

int run_localize(const std::string& input_csv, const std::string& bounds_arg, int grid) {
    const auto vals = parse_double_list(bounds_arg, "--bounds");
    if (vals.size() != 6) {
        throw uavsec::config_error("--bounds expects x0,y0,z0,x1,y1,z1");
    }
    const auto ms = read_measurement_csv(input_csv);
    uavsec::detectloc::SearchBounds bounds{{vals[0], vals[1], vals[2]},
                                           {vals[3], vals[4], vals[5]}};
    uavsec::detectloc::LocalizeOptions lopts;
    lopts.coarse_cells_per_axis = grid;
    const auto est =
        uavsec::detectloc::rss_localize(ms, uavsec::channel::ChannelParams{}, bounds, lopts);
    json out{{"position", {est.position.x, est.position.y, est.position.z}},
             {"est_tx_power_dbm", est.est_tx_power_dbm},
             {"residual_db2", est.residual_db2},
             {"bounds_limited", est.bounds_limited},
             {"sensors", ms.size()}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_sweep(const std::string& scenario_path, const std::string& param,
              const std::string& values_arg, const std::string& out_path, int threads) {
    std::ifstream in(scenario_path);
    if (!in) throw uavsec::io_error("cannot open scenario file '" + scenario_path + "'");
    json base;
    try {
        base = json::parse(in);
    } catch (const json::parse_error& e) {
        throw uavsec::config_error("scenario file '" + scenario_path + "': " + e.what());
    }
    const auto values = parse_double_list(values_arg, "--values");
    uavsec::engine::RunOptions opts;
    opts.threads = threads;
    const auto rows = uavsec::engine::sweep(base, param, values, opts);
    const std::string table = uavsec::engine::format_sweep_csv(param, rows);
    if (out_path.empty() || out_path == "-") {
        std::cout << table;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw uavsec::io_error("cannot open '" + out_path + "' for writing");
        os << table;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uavsec - link-level simulator for UAV-assisted radio attack "
                 "prevention, detection and recovery"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, format = "csv", fading = "on";
    std::optional<std::uint64_t> seed;
    int threads = 1;
    auto* sim = app.add_subcommand("simulate", "run a scenario and emit per-step metrics");
    sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();
    sim->add_option("--seed", seed, "override the scenario master seed");
    sim->add_option("--format", format, "records format")
        ->check(CLI::IsMember({"csv", "json"}));
    sim->add_option("--fading", fading, "small-scale fading ('off' pins amplitude to 1)")
        ->check(CLI::IsMember({"on", "off"}));
    sim->add_option("--threads", threads, "per-link sampling threads")
        ->check(CLI::PositiveNumber);

    std::string input_csv, bounds_arg;
    int grid = 64;
    auto* loc = app.add_subcommand("localize", "estimate a transmitter position from RSS samples");
    loc->add_option("--input", input_csv, "CSV with columns x,y,z,rss_dbm")->required();
    loc->add_option("--bounds", bounds_arg, "search box x0,y0,z0,x1,y1,z1")->required();
    loc->add_option("--grid", grid, "coarse grid cells per axis")->check(CLI::PositiveNumber);

    std::string param, values_arg, sweep_out = "-";
    auto* swp = app.add_subcommand("sweep", "re-run a scenario across values of one field");
    swp->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    swp->add_option("--param", param, "dotted path of a numeric config field")->required();
    swp->add_option("--values", values_arg, "comma-separated values")->required();
    swp->add_option("--out", sweep_out, "output CSV path, '-' for stdout");
    swp->add_option("--threads", threads, "per-link sampling threads")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
        if (sim->parsed()) {
            return run_simulate(scenario_path, out_dir, seed, format, fading, threads);
        }
        if (loc->parsed()) {
            return run_localize(input_csv, bounds_arg, grid);
        }
        if (swp->parsed()) {
            return run_sweep(scenario_path, param, values_arg, sweep_out, threads);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const uavsec::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const uavsec::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const uavsec::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
