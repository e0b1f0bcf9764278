// infnet command-line harness: runs scenarios through the discrete, continuum
// and analytic pipelines, and exports influence networks as Hasse diagrams.
//
// Exit codes: 0 success, 1 tolerance failure or mid-run truncation,
// 2 unreadable or invalid input.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infnet/scenario.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_tolerance = 1;
constexpr int exit_input = 2;

int run_one(const std::string& path, const std::string& out_dir, bool seed_override,
            std::uint64_t seed, std::ostream& log) {
    infnet::Scenario sc;
    try {
        sc = infnet::load_scenario(path);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << path << ": " << e.what() << "\n";
        return exit_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << path << ": " << e.what() << "\n";
        return exit_input;
    }
    if (seed_override) {
        sc.seed = seed;
        sc.seed_set = true;
    }
    try {
        const auto outcome = infnet::run_scenario(sc, out_dir);
        for (const auto& f : outcome.files_written) log << "wrote " << f << "\n";
        if (!outcome.diagnostic.empty()) std::cerr << sc.name << ": " << outcome.diagnostic << "\n";
        if (outcome.report.contains("checks")) {
            for (const auto& check : outcome.report.at("checks")) {
                log << (check.at("pass").get<bool>() ? "PASS " : "FAIL ")
                    << check.at("name").get<std::string>() << " (value "
                    << check.at("value").get<double>() << ", tolerance "
                    << check.at("tolerance").get<double>() << ")\n";
            }
        }
        return outcome.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << sc.name << ": " << e.what() << "\n";
        return exit_input;
    } catch (const std::domain_error& e) {
        std::cerr << sc.name << ": " << e.what() << "\n";
        return exit_input;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"influence-network simulator and geodesic-form verifier"};
    app.require_subcommand(1);

    std::string out_dir;
    app.add_option("--out", out_dir,
                   "output directory (default: $INFNET_OUT_DIR or the working directory)");

    auto* run_cmd = app.add_subcommand("run", "run one scenario file");
    std::string scenario_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the scenario seed");

    auto* export_cmd = app.add_subcommand("export-network",
                                          "render a network JSON file as a DOT digraph");
    std::string network_path;
    std::string dot_path;
    export_cmd->add_option("network", network_path, "network JSON file")->required();
    export_cmd->add_option("-o,--output", dot_path, "output DOT file (default: stdout)");

    auto* batch_cmd = app.add_subcommand("batch", "run every scenario JSON in a directory");
    std::string batch_dir;
    unsigned jobs = 1;
    batch_cmd->add_option("dir", batch_dir, "directory of scenario files")->required();
    batch_cmd->add_option("--jobs", jobs, "run scenarios in parallel")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    if (*run_cmd) {
        return run_one(scenario_path, out_dir, seed_set, seed, std::cout);
    }

    if (*export_cmd) {
        std::ifstream in(network_path);
        if (!in) {
            std::cerr << "cannot open network file: " << network_path << "\n";
            return exit_input;
        }
        try {
            const auto net_json = nlohmann::json::parse(in);
            const auto result = infnet::export_network(net_json);
            for (const auto& warning : result.warnings) {
                std::cerr << "warning: " << warning << "\n";
            }
            if (dot_path.empty()) {
                std::cout << result.dot;
            } else {
                std::ofstream out(dot_path, std::ios::binary);
                if (!out) {
                    std::cerr << "cannot write: " << dot_path << "\n";
                    return exit_input;
                }
                out << result.dot;
                std::cout << "wrote " << dot_path << "\n";
            }
            return exit_ok;
        } catch (const nlohmann::json::exception& e) {
            std::cerr << network_path << ": " << e.what() << "\n";
            return exit_input;
        } catch (const std::exception& e) {
            std::cerr << network_path << ": " << e.what() << "\n";
            return exit_input;
        }
    }

    // batch: each scenario writes under <out>/<scenario stem>/ so parallel runs
    // stay isolated.
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(batch_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "no scenario files in " << batch_dir << "\n";
        return exit_input;
    }
    const auto base = infnet::resolve_output_base(out_dir);
    std::vector<std::future<int>> results;
    std::vector<std::string> logs(files.size());
    const unsigned parallel = std::max(1u, jobs);
    int worst = exit_ok;
    for (std::size_t begin = 0; begin < files.size(); begin += parallel) {
        const std::size_t end = std::min(files.size(), begin + parallel);
        results.clear();
        for (std::size_t i = begin; i < end; ++i) {
            results.push_back(std::async(std::launch::async, [&, i] {
                std::ostringstream log;
                const auto sub = base / files[i].stem();
                const int code = run_one(files[i].string(), sub.string(), false, 0, log);
                logs[i] = log.str();
                return code;
            }));
        }
        for (std::size_t i = begin; i < end; ++i) {
            const int code = results[i - begin].get();
            std::cout << files[i].filename().string() << ": exit " << code << "\n"
                      << logs[i];
            worst = std::max(worst, code);
        }
    }
    return worst;
}
