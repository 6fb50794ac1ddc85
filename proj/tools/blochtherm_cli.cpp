// Command-line runner for the scenario suite.
//
// Exit codes: 0 on success, 2 for configuration errors (the message names
// the offending key), 3 for numerical failures (integrator abort).

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "blochtherm/scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Bloch-sphere thermodynamics of open two-level systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    bool svg_override = false;

    auto* run = app.add_subcommand("run", "run a scenario described by a JSON config file");
    run->add_option("--config", config_path, "path to the JSON configuration")->required();
    run->add_option("--out", out_override, "output directory (overrides the config)");
    run->add_flag("--svg", svg_override, "emit SVG charts alongside the CSV output");

    auto* list = app.add_subcommand("list-scenarios", "list available scenarios");
    auto* version = app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (version->parsed()) {
        std::printf("blochtherm %s\n", blochtherm::version_string);
        return 0;
    }
    if (list->parsed()) {
        for (const auto& [name, blurb] : blochtherm::scenario_catalog())
            std::printf("%-12s %s\n", name.c_str(), blurb.c_str());
        return 0;
    }

    try {
        blochtherm::ScenarioConfig cfg = blochtherm::load_config_file(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (svg_override) cfg.emit_svg = true;
        blochtherm::run_scenario(cfg);
        return 0;
    } catch (const blochtherm::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const blochtherm::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}
