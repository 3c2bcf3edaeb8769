#pragma once

// Scenario orchestration: named preset experiments, config loading, result
// persistence (CSV + summary.json + optional snapshots), and the aggregate
// suite. Every scenario returns a RunSummary whose checks cover exactly the
// claims it is responsible for.

#include <string>
#include <vector>

#include "json.hpp"

#include "hartree/bootstrap.hpp"
#include "hartree/config.hpp"
#include "hartree/diagnostics.hpp"
#include "hartree/physics.hpp"
#include "hartree/propagator.hpp"

namespace hartree {

struct ScenarioConfig {
    std::string scenario = "free_decay";

    // [grid]
    int dimension = 1;
    int points = 4096;
    double half_length = 256.0;

    // [potential] / [interaction]
    PotentialSpec potential = PotentialSpec::zero();
    InteractionSpec interaction = InteractionSpec::none();

    // [initial]
    std::string initial_family = "gaussian"; // gaussian | plane_wave | constant
    double amplitude = 1.0;
    double width = 2.0;
    double wavevector = 0.0; // plane_wave modulation along the first axis

    // [time]
    double dt = 0.01;
    double t_end = 20.0;
    int stride = 100;

    // [output]
    std::string output_directory = "out";
    bool write_csv = true;
    bool write_snapshots = false;

    // [tolerances] — 0 means "use the scenario default"
    double boundary_mass_max = 1e-6;
    double fit_t_min = 0.0;
    double fit_t_max = 0.0;
    double dt_fit_t_min = 0.0;
    double dt_fit_t_max = 0.0;

    // [scenario] — extra knobs used by individual scenarios
    double epsilon = 0.0; // bootstrap_sweep barrier epsilon (0 = preset)
    double c_coeff = 0.0; // bootstrap_sweep cubic coefficient (0 = preset)
    double t0 = 4.0;      // large_data_gronwall tail start
    std::vector<int> mollifier_indices = {1, 2, 4, 8};
    int corpus_size = 5;  // fields per measured-constant corpus
    int pair_count = 100; // Kato-Ponce pairs
    int band_limit = 32;  // random corpus band limit

    // CLI-level
    unsigned long long seed = 1;
    int workers = 1;
};

// Built-in preset for a scenario name; throws ConfigError for unknown names.
ScenarioConfig default_config(const std::string& scenario);

// free_decay preset adjusted for dimension d in {1,2,3}.
ScenarioConfig free_decay_variant(int dimension);

// Preset defaults overlaid with a parsed config; validates types, ranges and
// the strict schema. Throws ConfigError on any violation.
ScenarioConfig load_scenario_config(const KeyValueConfig& kv);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunSummary {
    std::string scenario;
    std::vector<CheckResult> checks;
    nlohmann::json payload; // scenario-specific measurements
    double wall_seconds = 0.0;
    bool numerical_abort = false; // boundary-guard trip or NaN

    bool all_passed() const;
    nlohmann::json to_json() const;
};

// Individual scenario runners (write outputs under config.output_directory).
RunSummary run_free_decay(const ScenarioConfig& config);
RunSummary run_linear_dispersive(const ScenarioConfig& config);
RunSummary run_small_data(const ScenarioConfig& config);      // hartree or cubic
RunSummary run_cubic_limit(const ScenarioConfig& config);
RunSummary run_bootstrap_sweep(const ScenarioConfig& config);
RunSummary run_inequality_suite(const ScenarioConfig& config);
RunSummary run_large_data_gronwall(const ScenarioConfig& config);

// Integrator-quality studies shared by the suite and the acceptance gate:
// energy-drift dt scaling, Duhamel-residual refinement, self-convergence
// order, and time reversibility, all on small d=1 models.
RunSummary run_integrator_checks(const ScenarioConfig& config);

// Dispatch by config.scenario.
RunSummary run_scenario(const ScenarioConfig& config);

// Runs every preset (free_decay in d=1,2,3) plus the integrator checks,
// writing one output directory per entry under out_root. `only` restricts to
// a single scenario name when non-empty; `dimension` != 0 keeps only presets
// of that dimension; `fast` drops the slow entries (free_decay_d3,
// derivative_decay, small_data_cubic, large_data_gronwall).
std::vector<RunSummary> run_suite(const std::string& only, const std::string& out_root,
                                  unsigned long long seed, int workers, int dimension = 0,
                                  bool fast = false);

} // namespace hartree
