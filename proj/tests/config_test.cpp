// Config-layer tests: the strict key=value grammar, typed getters, override
// handling, schema validation with precise origins, and scenario loading
// (preset defaults, range checks, and agreement with the shipped preset files).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hartree/config.hpp"
#include "hartree/scenarios.hpp"

#include <string>
#include <vector>

using namespace hartree;

namespace {

bool message_contains(const ConfigError& err, const std::string& needle) {
    return std::string(err.what()).find(needle) != std::string::npos;
}

template <typename Fn>
std::string config_error_message(Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& err) {
        return err.what();
    }
    return "";
}

} // namespace

TEST_CASE("the parser handles sections, comments, and whitespace") {
    const std::string text =
        "# leading comment\n"
        "scenario = free_decay\n"
        "\n"
        "[grid]\n"
        "  dimension =  2 \n"
        "; another comment style\n"
        "points=1024\n"
        "[time]\n"
        "dt = 0.005\n";
    const KeyValueConfig kv = KeyValueConfig::parse_text(text, "demo.cfg");

    CHECK(kv.has("scenario"));
    CHECK(kv.get_string("scenario", "") == "free_decay");
    CHECK(kv.get_int("grid.dimension", -1) == 2);
    CHECK(kv.get_int("grid.points", -1) == 1024);
    CHECK(kv.get_double("time.dt", 0.0) == 0.005);
    CHECK(kv.where("grid.dimension") == "demo.cfg:5");
    CHECK(kv.where("time.dt") == "demo.cfg:9");
    CHECK(kv.where("nope") == "<unset>");
    CHECK(kv.entries().size() == 4);
    CHECK(!kv.has("grid.half_length"));
}

TEST_CASE("grammar violations fail with the offending line") {
    CHECK_THROWS_AS(KeyValueConfig::parse_text("just words\n", "bad.cfg"), ConfigError);
    CHECK(message_contains(
        ConfigError(config_error_message(
            [] { KeyValueConfig::parse_text("a = 1\njust words\n", "bad.cfg"); })),
        "bad.cfg:2"));

    CHECK_THROWS_AS(KeyValueConfig::parse_text("dt =\n", "bad.cfg"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_text("[grid\npoints = 8\n", "bad.cfg"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_text("[gr id]\n", "bad.cfg"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_text("ke y = 1\n", "bad.cfg"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("duplicate keys report both the new and the original origin") {
    const std::string text = "[time]\ndt = 0.01\ndt = 0.02\n";
    const std::string msg =
        config_error_message([&] { KeyValueConfig::parse_text(text, "dup.cfg"); });
    CHECK(message_contains(ConfigError(msg), "dup.cfg:3"));
    CHECK(message_contains(ConfigError(msg), "duplicate key 'time.dt'"));
    CHECK(message_contains(ConfigError(msg), "dup.cfg:2"));
}

TEST_CASE("typed getters are strict about their formats") {
    const KeyValueConfig kv = KeyValueConfig::parse_text(
        "[grid]\npoints = 64\n[time]\ndt = 1.2.3\nt_end = 4x\nstride = 5\n"
        "[output]\ncsv = yes\nsnapshots = Off\n"
        "[interaction]\nmollifier_indices = 1, 2, 4, 8\n",
        "typed.cfg");

    CHECK(kv.get_int("grid.points", 0) == 64);
    CHECK(kv.get_int("missing", 9) == 9);
    CHECK_THROWS_AS(kv.get_double("time.dt", 0.0), ConfigError);
    CHECK_THROWS_AS(kv.get_double("time.t_end", 0.0), ConfigError);
    CHECK_THROWS_AS(kv.get_int("time.dt", 0), ConfigError);
    CHECK(kv.get_bool("output.csv", false));
    CHECK(!kv.get_bool("output.snapshots", true));
    CHECK(kv.get_bool("unset_flag", true));
    CHECK(kv.get_int_list("interaction.mollifier_indices", {}) ==
          std::vector<int>({1, 2, 4, 8}));
    CHECK(kv.get_int_list("unset_list", {3}) == std::vector<int>({3}));

    const KeyValueConfig booleans = KeyValueConfig::parse_text(
        "a = true\nb = ON\nc = 1\nd = false\ne = off\nf = 0\ng = maybe\n", "b.cfg");
    CHECK(booleans.get_bool("a", false));
    CHECK(booleans.get_bool("b", false));
    CHECK(booleans.get_bool("c", false));
    CHECK(!booleans.get_bool("d", true));
    CHECK(!booleans.get_bool("e", true));
    CHECK(!booleans.get_bool("f", true));
    CHECK_THROWS_AS(booleans.get_bool("g", true), ConfigError);

    const KeyValueConfig bad_list =
        KeyValueConfig::parse_text("[interaction]\nmollifier_indices = 1,two,3\n", "l.cfg");
    CHECK_THROWS_AS(bad_list.get_int_list("interaction.mollifier_indices", {}), ConfigError);
}

TEST_CASE("overrides replace file values and carry their own origin") {
    KeyValueConfig kv = KeyValueConfig::parse_text("[time]\ndt = 0.01\n", "o.cfg");
    kv.apply_override("time.dt=0.5");
    CHECK(kv.get_double("time.dt", 0.0) == 0.5);
    CHECK(kv.where("time.dt") == "override 'time.dt=0.5'");

    kv.apply_override("scenario=bootstrap_sweep");
    CHECK(kv.get_string("scenario", "") == "bootstrap_sweep");

    CHECK_THROWS_AS(kv.apply_override("no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(kv.apply_override("time.dt="), ConfigError);
    CHECK_THROWS_AS(kv.apply_override("ti me.dt=1"), ConfigError);
    CHECK_THROWS_AS(kv.apply_override("time.d t=1"), ConfigError);
}

TEST_CASE("schema validation pinpoints unknown keys and sections") {
    const KeyValueConfig ok = KeyValueConfig::parse_text(
        "scenario = free_decay\n[grid]\ndimension = 1\npoints = 64\nhalf_length = 8\n"
        "[scenario]\nseed = 7\nworkers = 2\n",
        "ok.cfg");
    CHECK_NOTHROW(validate_against_schema(ok));

    const KeyValueConfig typo =
        KeyValueConfig::parse_text("scenario = free_decay\n[grid]\npints = 64\n", "typo.cfg");
    const std::string msg = config_error_message([&] { validate_against_schema(typo); });
    CHECK(message_contains(ConfigError(msg), "unknown key 'grid.pints'"));
    CHECK(message_contains(ConfigError(msg), "typo.cfg:3"));

    const KeyValueConfig alien =
        KeyValueConfig::parse_text("[universe]\nanswer = 42\n", "alien.cfg");
    CHECK_THROWS_AS(validate_against_schema(alien), ConfigError);
}

TEST_CASE("the schema table itself stays complete") {
    const auto& schema = config_schema();
    for (const std::string section :
         {"", "grid", "potential", "interaction", "initial", "time", "output", "tolerances",
          "scenario"})
        CHECK(schema.count(section) == 1);
    CHECK(schema.at("") == std::vector<std::string>({"scenario"}));
}

TEST_CASE("scenario loading fills preset defaults and honors explicit keys") {
    const KeyValueConfig minimal =
        KeyValueConfig::parse_text("scenario = free_decay\n", "m.cfg");
    const ScenarioConfig defaults = load_scenario_config(minimal);
    CHECK(defaults.scenario == "free_decay");
    CHECK(defaults.dimension == 1);
    CHECK(defaults.points == 4096);
    CHECK(defaults.half_length == 256.0);
    CHECK(defaults.dt == 0.01);
    CHECK(defaults.t_end == 20.0);
    CHECK(defaults.stride == 100);
    CHECK(defaults.boundary_mass_max == 1e-6);
    CHECK(defaults.seed == 1);
    CHECK(defaults.workers == 1);
    CHECK(defaults.interaction.is_none());

    const KeyValueConfig tweaked = KeyValueConfig::parse_text(
        "scenario = free_decay\n[grid]\npoints = 512\nhalf_length = 64\n"
        "[time]\ndt = 0.02\nt_end = 10\n[scenario]\nseed = 13\n",
        "t.cfg");
    const ScenarioConfig custom = load_scenario_config(tweaked);
    CHECK(custom.points == 512);
    CHECK(custom.half_length == 64.0);
    CHECK(custom.dt == 0.02);
    CHECK(custom.t_end == 10.0);
    CHECK(custom.seed == 13);
    // Untouched keys keep the preset values.
    CHECK(custom.stride == 100);
    CHECK(custom.boundary_mass_max == 1e-6);
}

TEST_CASE("scenario loading rejects out-of-range and unknown settings") {
    auto load = [](const std::string& body) {
        return load_scenario_config(KeyValueConfig::parse_text(body, "r.cfg"));
    };
    CHECK_THROWS_AS(load("scenario = warp_drive\n"), ConfigError);
    CHECK_THROWS_AS(load("[grid]\ndimension = 1\n"), ConfigError); // scenario key required
    CHECK_THROWS_AS(load("scenario = free_decay\n[grid]\npoints = 63\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[grid]\npoints = 4\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[grid]\ndimension = 4\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[grid]\nhalf_length = -8\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[time]\ndt = 0\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[time]\nt_end = 0.001\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[time]\nstride = 0\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[tolerances]\nboundary_mass_max = 1.5\n"),
                    ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[potential]\nfamily = quartic\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[interaction]\nfamily = quintic\n"),
                    ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[initial]\nfamily = soliton\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[initial]\nwidth = 0\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = large_data_gronwall\n[scenario]\nt0 = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[scenario]\nworkers = 0\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\n[scenario]\ncorpus_size = 2\n"), ConfigError);
    CHECK_THROWS_AS(load("scenario = free_decay\nunknown = 1\n"), ConfigError);
}

#ifdef HARTREE_CONFIG_DIR
TEST_CASE("shipped preset files agree with the built-in presets") {
    const std::string dir = HARTREE_CONFIG_DIR;
    const ScenarioConfig from_file =
        load_scenario_config(KeyValueConfig::parse_file(dir + "/free_decay_d1.cfg"));
    const ScenarioConfig preset = free_decay_variant(1);
    CHECK(from_file.dimension == preset.dimension);
    CHECK(from_file.points == preset.points);
    CHECK(from_file.half_length == preset.half_length);
    CHECK(from_file.width == preset.width);
    CHECK(from_file.dt == preset.dt);
    CHECK(from_file.t_end == preset.t_end);
    CHECK(from_file.stride == preset.stride);
    CHECK(from_file.boundary_mass_max == preset.boundary_mass_max);

    const ScenarioConfig d3_file =
        load_scenario_config(KeyValueConfig::parse_file(dir + "/free_decay_d3.cfg"));
    const ScenarioConfig d3 = free_decay_variant(3);
    CHECK(d3_file.dimension == 3);
    CHECK(d3_file.points == d3.points);
    CHECK(d3_file.half_length == d3.half_length);

    // Every shipped file must parse clean against the schema.
    for (const std::string name :
         {"free_decay_d1.cfg", "free_decay_d2.cfg", "free_decay_d3.cfg", "linear_dispersive.cfg",
          "small_data_hartree.cfg", "small_data_cubic.cfg", "derivative_decay.cfg",
          "cubic_limit.cfg", "bootstrap_sweep.cfg", "inequality_suite.cfg",
          "large_data_gronwall.cfg"}) {
        const KeyValueConfig kv = KeyValueConfig::parse_file(dir + "/" + name);
        CHECK_NOTHROW(validate_against_schema(kv));
        CHECK_NOTHROW(load_scenario_config(kv));
    }
}
#endif
