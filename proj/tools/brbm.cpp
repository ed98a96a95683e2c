#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "brbm/errors.hpp"
#include "brbm/experiment.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kGuard = 3, kNumerical = 4 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branching Brownian motion experiments"};
    app.set_version_flag("--version", std::string(brbm::kVersion));

    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::optional<unsigned> threads;
    bool list = false;

    app.add_option("experiment", experiment, "experiment name (see --list)");
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out_path, "override the output CSV path");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_flag("--list", list, "list experiments and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (list) {
        for (auto name : brbm::experiment_names()) std::cout << name << '\n';
        return kOk;
    }
    if (experiment.empty() || config_path.empty()) {
        std::cerr << "usage: brbm <experiment> --config <file> [--seed N] [--out PATH]\n";
        return kUsage;
    }

    brbm::ExperimentConfig config;
    try {
        std::ifstream in(config_path);
        nlohmann::json doc = nlohmann::json::parse(in);
        if (!doc.is_object()) throw brbm::ValidationError("config: expected a JSON object");
        if (doc.contains("experiment") && doc["experiment"] != experiment)
            throw brbm::ValidationError("experiment: config names '" + doc["experiment"].get<std::string>() +
                                        "' but the command line asks for '" + experiment + "'");
        doc["experiment"] = experiment;
        if (seed) doc["seed"] = *seed;
        if (out_path) doc["output_path"] = *out_path;
        if (threads) doc["threads"] = *threads;
        config = brbm::parse_config(doc);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config: " << e.what() << '\n';
        return kValidation;
    } catch (const brbm::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kValidation;
    }

    const auto table = brbm::run_experiment(config);
    try {
        brbm::write_outputs(config.output_path, config, table);
    } catch (const std::exception& e) {
        std::cerr << "output: " << e.what() << '\n';
        return kUsage;
    }

    switch (table.status) {
        case brbm::RunStatus::Ok:
            std::cerr << table.rows.size() << " rows -> " << config.output_path << '\n';
            return kOk;
        case brbm::RunStatus::ResourceGuard:
            std::cerr << "resource guard: " << table.message << " (partial results written)\n";
            return kGuard;
        case brbm::RunStatus::Numerical:
            std::cerr << "numerical failure: " << table.message << " (partial results written)\n";
            return kNumerical;
    }
    return kOk;
}
