#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "expgsp/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

int cmd_run(const std::string& path, const std::string& out_override, bool has_seed,
            std::uint64_t seed, int threads) {
    expgsp::Scenario scenario = expgsp::parse_scenario_file(path);
    if (has_seed) scenario.seed = seed;

    expgsp::RunOptions options;
    options.threads = threads;
    const expgsp::RunResult result = expgsp::run_scenario(scenario, options);

    std::string dir = !out_override.empty() ? out_override
                      : !scenario.out_dir.empty() ? scenario.out_dir
                                                  : std::string("results");
    expgsp::write_outputs(result, scenario, dir);
    std::cout << "wrote " << result.points.size() << " sweep point(s) to " << dir << "\n";
    return 0;
}

int cmd_verify(const std::string& path) {
    const expgsp::Scenario scenario = expgsp::parse_scenario_file(path);
    expgsp::verify_scenario(scenario);
    std::cout << "scenario ok: " << scenario.values.size() << " bidders, "
              << scenario.steps_sweep.size() * scenario.explore_sweep.size()
              << " sweep point(s)\n";
    return 0;
}

int cmd_init(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return kExitValidation;
    }
    out << expgsp::write_scenario(expgsp::example_scenario());
    std::cout << "wrote example scenario to " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exploratory keyword auction simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;

    auto* run = app.add_subcommand("run", "evaluate a scenario sweep and write result files");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (default: scenario's `out`, else ./results)");
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--threads", threads, "worker threads for sweep points")
        ->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "parse and validate a scenario, run nothing");
    verify->add_option("scenario", scenario_path, "scenario file")->required();

    std::string init_path;
    auto* init = app.add_subcommand("init", "write a starter scenario");
    init->add_option("--example", init_path, "path for the example scenario")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return cmd_run(scenario_path, out_dir, seed_opt->count() > 0, seed, threads);
        if (app.got_subcommand(verify)) return cmd_verify(scenario_path);
        if (app.got_subcommand(init)) return cmd_init(init_path);
    } catch (const expgsp::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
