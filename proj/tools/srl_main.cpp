#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "srl/run_modes.hpp"

namespace {

int run_mode(srl::RunMode mode, const std::string& config_path, const std::string& out_dir,
             int jobs) {
    std::ifstream in(config_path);
    if (!in) {
        std::cout << "{\"error\":\"io\",\"message\":\"cannot read config " << config_path << "\"}\n";
        return 3;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    srl::RunConfig cfg;
    try {
        cfg = srl::parse_config(buffer.str());
    } catch (const srl::ConfigError& ex) {
        std::cout << "{\"error\":\"config\",\"message\":\"" << ex.what() << "\"}\n";
        return 1;
    }
    cfg.mode = mode;
    if (!out_dir.empty()) {
        cfg.output.dir = out_dir;
    }
    for (const auto& warning : cfg.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }

    const srl::RunOutcome outcome = srl::execute_run(cfg, jobs);
    if (outcome.exit_code != 0) {
        std::cout << outcome.error_json << "\n";
    } else {
        for (const auto& file : outcome.files) {
            std::cerr << "wrote " << file << "\n";
        }
    }
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state superradiant laser simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;

    const std::vector<std::pair<std::string, srl::RunMode>> modes = {
        {"steady", srl::RunMode::steady},       {"spectrum", srl::RunMode::spectrum},
        {"sweep", srl::RunMode::sweep},         {"scaling", srl::RunMode::scaling},
        {"oracle-check", srl::RunMode::oracle_check}, {"fig5", srl::RunMode::fig5}};

    for (const auto& [name, mode] : modes) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--jobs", jobs, "concurrent workers for sweeps")->check(CLI::PositiveNumber);
        srl::RunMode m = mode;
        sub->callback([&, m]() { std::exit(run_mode(m, config_path, out_dir, jobs)); });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
