// Command-line front end: `hartree run <config>` executes one scenario from a
// config file, `hartree suite` runs the whole preset matrix. Exit codes:
// 0 all checks passed, 1 at least one check failed, 2 config error,
// 3 numerical abort (boundary-guard trip or non-finite field).

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hartree/scenarios.hpp"

namespace {

int report(const std::vector<hartree::RunSummary>& results) {
    bool any_fail = false;
    bool any_abort = false;
    for (const hartree::RunSummary& summary : results) {
        for (const hartree::CheckResult& check : summary.checks) {
            std::printf("[%s] %s.%s: %s\n", check.passed ? "PASS" : "FAIL",
                        summary.scenario.c_str(), check.name.c_str(), check.detail.c_str());
            any_fail = any_fail || !check.passed;
        }
        std::printf("-- %s: %s (%.1f s)\n", summary.scenario.c_str(),
                    summary.all_passed() ? "all checks passed" : "FAILED",
                    summary.wall_seconds);
        any_abort = any_abort || summary.numerical_abort;
    }
    if (any_abort)
        return 3;
    return any_fail ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudospectral simulator for the Hartree-type Schrodinger equation "
                 "with a decay-estimate verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string only;
    std::vector<std::string> overrides;
    unsigned long long seed = 1;
    int workers = 1;
    int dimension = 0;
    bool fast = false;

    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario from a config file");
    run_cmd->add_option("config", config_path, "Scenario config file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    run_cmd->add_option("--set", overrides,
                        "Config override 'section.key=value' (repeatable)");
    run_cmd->add_option("--only", only, "Skip unless the config's scenario matches");
    CLI::Option* run_seed = run_cmd->add_option("--seed", seed, "Random corpus seed");
    CLI::Option* run_workers =
        run_cmd->add_option("--workers", workers, "Workers for independent sub-runs");

    CLI::App* suite_cmd = app.add_subcommand("suite", "Run the full preset matrix");
    suite_cmd->add_option("--out", out_dir, "Root output directory (default suite_out)");
    suite_cmd->add_option("--only", only, "Restrict to one preset label or scenario name");
    suite_cmd->add_option("--seed", seed, "Random corpus seed");
    suite_cmd->add_option("--workers", workers, "Workers for independent sub-runs");
    suite_cmd->add_option("--dimension", dimension, "Keep only presets of this dimension");
    suite_cmd->add_flag("--fast", fast, "Skip the slow presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            hartree::KeyValueConfig kv = hartree::KeyValueConfig::parse_file(config_path);
            for (const std::string& assignment : overrides)
                kv.apply_override(assignment);
            hartree::ScenarioConfig cfg = hartree::load_scenario_config(kv);
            if (!out_dir.empty())
                cfg.output_directory = out_dir;
            if (run_seed->count() > 0)
                cfg.seed = seed;
            if (run_workers->count() > 0)
                cfg.workers = workers;
            if (!only.empty() && only != cfg.scenario) {
                std::printf("skipped: config scenario '%s' does not match --only '%s'\n",
                            cfg.scenario.c_str(), only.c_str());
                return 0;
            }
            return report({hartree::run_scenario(cfg)});
        }
        const std::string root = out_dir.empty() ? "suite_out" : out_dir;
        return report(hartree::run_suite(only, root, seed, workers, dimension, fast));
    } catch (const hartree::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    }
}
