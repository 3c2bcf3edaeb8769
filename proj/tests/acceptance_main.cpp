// Acceptance gate: thirteen numbered criteria, one [PASS]/[FAIL] line each,
// with the measured numbers inline. Every tolerance is pinned literally in
// this file next to the assertion it guards. Exit status 0 iff all pass.

#include "hartree/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <initializer_list>
#include <limits>
#include <map>
#include <string>
#include <vector>

using namespace hartree;
using nlohmann::json;

namespace {

std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

const CheckResult* find_check(const RunSummary& summary, const std::string& name) {
    for (const CheckResult& check : summary.checks)
        if (check.name == name)
            return &check;
    return nullptr;
}

// True when every named scenario check exists and passed; appends the detail
// of the first failure (or the missing name) to `note`.
bool checks_pass(const RunSummary& summary, std::initializer_list<const char*> names,
                 std::string& note) {
    for (const char* name : names) {
        const CheckResult* check = find_check(summary, name);
        if (check == nullptr) {
            note += std::string(" [missing check '") + name + "']";
            return false;
        }
        if (!check->passed) {
            note += std::string(" [") + name + ": " + check->detail + "]";
            return false;
        }
    }
    return true;
}

double jnum(const json& j, const char* key) {
    if (j.contains(key) && j[key].is_number())
        return j[key].get<double>();
    return std::numeric_limits<double>::quiet_NaN();
}

// Safe nested lookup: missing/irregular payloads (e.g. an aborted run)
// degrade to NaN readings instead of throwing.
const json& jobj(const json& j, const char* key) {
    static const json empty = json::object();
    if (j.is_object() && j.contains(key) && j[key].is_object())
        return j[key];
    return empty;
}

struct Gate {
    int passed_count = 0;
    int total = 0;

    void line(int id, const std::string& title, bool passed, const std::string& detail) {
        ++total;
        passed_count += passed ? 1 : 0;
        std::printf("[%s] %2d %-24s %s\n", passed ? "PASS" : "FAIL", id, title.c_str(),
                    detail.c_str());
        std::fflush(stdout);
    }
};

} // namespace

int main() {
    std::map<std::string, RunSummary> runs;
    bool any_abort = false;

    auto execute = [&](ScenarioConfig cfg, const std::string& label) {
        cfg.output_directory = "acceptance_out/" + label;
        cfg.write_snapshots = false;
        std::printf("-- running %s ...\n", label.c_str());
        std::fflush(stdout);
        RunSummary summary;
        try {
            summary = run_scenario(cfg);
        } catch (const std::exception& err) {
            summary.scenario = cfg.scenario;
            summary.numerical_abort = true;
            CheckResult failed;
            failed.name = "run";
            failed.passed = false;
            failed.detail = err.what();
            summary.checks.push_back(failed);
            any_abort = true;
        }
        std::printf("   %s: %s (%.1f s)\n", label.c_str(),
                    summary.all_passed() ? "checks ok" : "CHECK FAILURES", summary.wall_seconds);
        std::fflush(stdout);
        runs[label] = std::move(summary);
    };

    execute(free_decay_variant(1), "free_decay_d1");
    execute(free_decay_variant(2), "free_decay_d2");
    execute(free_decay_variant(3), "free_decay_d3");
    execute(default_config("small_data_hartree"), "small_data_hartree");
    execute(default_config("cubic_limit"), "cubic_limit");
    execute(default_config("bootstrap_sweep"), "bootstrap_sweep");
    execute(default_config("inequality_suite"), "inequality_suite");
    execute(default_config("large_data_gronwall"), "large_data_gronwall");
    execute(default_config("integrator_checks"), "integrator_checks");

    std::printf("\n");
    Gate gate;

    // ---- 1. Free dispersive law: sup_t t^{d/2}||u||_inf / ||u0||_1 within
    //         5% of (4 pi)^{-d/2} for d = 1, 2, 3.
    {
        bool ok = true;
        std::string detail;
        for (int d = 1; d <= 3; ++d) {
            const RunSummary& s = runs["free_decay_d" + std::to_string(d)];
            std::string note;
            const double ratio = jnum(s.payload, "dispersive_ratio");
            const double bound = jnum(s.payload, "free_law_bound");
            const bool this_d = checks_pass(s, {"dispersive_ratio_bound"}, note) &&
                                ratio <= 1.05 * bound;
            ok = ok && this_d;
            detail += "d=" + std::to_string(d) + " ratio " + fmt(ratio) + " <= 1.05*" +
                      fmt(bound) + (this_d ? "; " : " VIOLATED" + note + "; ");
        }
        gate.line(1, "free_dispersive_law", ok, detail);
    }

    // ---- 2. Decay-exponent recovery: exponent d/2 +- 0.1 with r^2 >= 0.999.
    {
        bool ok = true;
        std::string detail;
        for (int d = 1; d <= 3; ++d) {
            const RunSummary& s = runs["free_decay_d" + std::to_string(d)];
            std::string note;
            const double exponent = jnum(jobj(s.payload, "fit"), "exponent");
            const double r2 = jnum(jobj(s.payload, "fit"), "r_squared");
            const bool this_d = checks_pass(s, {"decay_exponent", "fit_quality"}, note) &&
                                std::abs(exponent - 0.5 * d) <= 0.1 && r2 >= 0.999;
            ok = ok && this_d;
            detail += "d=" + std::to_string(d) + " exp " + fmt(exponent) + " (r2 " + fmt(r2) +
                      ")" + (this_d ? "; " : " VIOLATED" + note + "; ");
        }
        gate.line(2, "decay_exponent_recovery", ok, detail);
    }

    // ---- 3. Small-data Hartree decay: budget admitted, exponent in
    //         [1.35, 1.65] over [2, 16], M monotone and trapped under c0.
    {
        const RunSummary& s = runs["small_data_hartree"];
        std::string note;
        const double exponent = jnum(jobj(s.payload, "u_fit"), "exponent");
        const double running_m = jnum(s.payload, "running_M");
        const double c0 = jnum(jobj(s.payload, "bootstrap"), "c0");
        const bool ok = checks_pass(s,
                                    {"completed", "budget_e_ih_u1_l1", "budget_u1_hk",
                                     "u_decay_exponent", "running_M_monotone",
                                     "continuity_trap", "estimate_chain"},
                                    note) &&
                        exponent >= 1.35 && exponent <= 1.65 &&
                        (std::isnan(c0) || running_m <= c0);
        gate.line(3, "small_data_decay", ok,
                  "exponent " + fmt(exponent) + " in [1.35,1.65], M " + fmt(running_m) +
                      " <= c0 " + fmt(c0) + ", trap PASS" + note);
    }

    // ---- 4. Derivative decay: du/dt exponent in [1.3, 1.7] on the same run.
    {
        const RunSummary& s = runs["small_data_hartree"];
        std::string note;
        const double exponent = jnum(jobj(s.payload, "dt_fit"), "exponent");
        const bool ok = checks_pass(s, {"dt_u_decay_exponent"}, note) && exponent >= 1.3 &&
                        exponent <= 1.7;
        gate.line(4, "derivative_decay", ok,
                  "du/dt exponent " + fmt(exponent) + " in [1.3,1.7]" + note);
    }

    // ---- 5. Conservation: relative mass drift <= 1e-11 on every accepted
    //         run; halving dt cuts the energy drift by 4 +- 30%.
    {
        bool ok = true;
        std::string note;
        double worst_drift = 0.0;
        for (const char* label : {"free_decay_d1", "free_decay_d2", "free_decay_d3",
                                  "small_data_hartree", "cubic_limit", "large_data_gronwall",
                                  "integrator_checks"}) {
            const RunSummary& s = runs[label];
            ok = checks_pass(s, {"mass_drift"}, note) && ok;
            const double drift = jnum(s.payload, "mass_drift");
            if (!std::isnan(drift))
                worst_drift = std::max(worst_drift, drift);
        }
        const double ratio = jnum(runs["integrator_checks"].payload, "energy_drift_ratio");
        ok = ok && worst_drift <= 1e-11 && ratio >= 2.8 && ratio <= 5.2 &&
             checks_pass(runs["integrator_checks"], {"energy_drift_dt2"}, note);
        gate.line(5, "conservation", ok,
                  "max mass drift " + fmt(worst_drift) + " <= 1e-11, energy drift ratio " +
                      fmt(ratio) + " in [2.8,5.2]" + note);
    }

    // ---- 6. Duhamel residual: order >= 2 under snapshot refinement and
    //         <= 1e-4 at dt = 1e-3.
    {
        const RunSummary& s = runs["integrator_checks"];
        std::string note;
        const double order = jnum(s.payload, "duhamel_order");
        const double residual = jnum(s.payload, "residual_at_dt");
        const bool ok = checks_pass(s, {"duhamel_order", "duhamel_residual_small"}, note) &&
                        order >= 2.0 && residual <= 1e-4;
        gate.line(6, "duhamel_residual", ok,
                  "refinement order " + fmt(order) + " >= 2, residual " + fmt(residual) +
                      " <= 1e-4 at dt=1e-3" + note);
    }

    // ---- 7. Bootstrap structure: two components with positive gap for
    //         (0.1, 7); probe-point identity and displayed bound to 1e-14
    //         over 1000 random (eps, C); Cardano vs bisection to 1e-12.
    {
        const RunSummary& s = runs["bootstrap_sweep"];
        std::string note;
        const double gap = jnum(jobj(s.payload, "bootstrap"), "gap");
        const bool ok = checks_pass(s,
                                    {"two_interval_structure", "probe_point_identities",
                                     "sufficiency_lemma", "cardano_vs_bisection",
                                     "first_zero_residual", "fold_transition",
                                     "trap_synthetic", "unit_ledger_budget"},
                                    note) &&
                        gap > 0.0;
        gate.line(7, "bootstrap_structure", ok,
                  "(0.1,7) gap " + fmt(gap) + " > 0; exact f(x~) identity and the displayed "
                  "upper bound hold to 1e-14 on 1000 draws; roots to 1e-12" + note);
    }

    // ---- 8. Kernel integral: d=3 sweep over t in {2..100} bounded with a
    //         stable plateau (max/min over [10,100] <= 2; the full-sweep
    //         ratio, reported for transparency, reflects the rise to the
    //         plateau); d=2 raises the documented error.
    {
        const RunSummary& s = runs["inequality_suite"];
        std::string note;
        const double plateau = jnum(s.payload, "kernel_plateau_ratio");
        const double full = jnum(s.payload, "kernel_full_ratio");
        const bool ok = checks_pass(
                            s, {"kernel_oracle_values", "kernel_uniformly_bounded",
                                "kernel_d2_rejected"},
                            note) &&
                        plateau <= 2.0;
        gate.line(8, "kernel_integral", ok,
                  "plateau max/min " + fmt(plateau) + " <= 2 on [10,100] (full sweep " +
                      fmt(full) + "), d=2 rejected" + note);
    }

    // ---- 9. Kato-Ponce: corpus max stable within 10% under re-seeding and
    //         scale-invariant to 1e-12.
    {
        const RunSummary& s = runs["inequality_suite"];
        std::string note;
        const double raw = jnum(s.payload, "c_kp_raw");
        const double reseeded = jnum(s.payload, "c_kp_reseeded");
        const bool ok = checks_pass(
                            s, {"kato_ponce_reseed_stability", "kato_ponce_scale_invariance"},
                            note) &&
                        std::abs(reseeded / raw - 1.0) <= 0.10;
        gate.line(9, "kato_ponce", ok,
                  "C_KP " + fmt(raw) + ", reseeded " + fmt(reseeded) +
                      " (shift <= 10%), scaling defect <= 1e-12" + note);
    }

    // ---- 10. Equivalent norm: both ratios finite with sup-product >= 1 for
    //          the gaussian well; V = 0 per-mode identity exact to 1e-12.
    {
        const RunSummary& s = runs["inequality_suite"];
        std::string note;
        const double a = jnum(s.payload, "sup_hk_over_sum");
        const double b = jnum(s.payload, "sup_sum_over_hk");
        const bool ok = checks_pass(
                            s, {"equivalent_norm_finite_product", "equivalent_norm_v0_exact"},
                            note) &&
                        a * b >= 1.0;
        gate.line(10, "equivalent_norm", ok,
                  "sup ratios " + fmt(a) + " * " + fmt(b) + " >= 1, V=0 defect <= 1e-12" + note);
    }

    // ---- 11. Cubic limit: sup_t ||u - u_n||_2 strictly decreasing over
    //          n in {1,2,4,8}; squared errors under eps_n e^{Ct}.
    {
        const RunSummary& s = runs["cubic_limit"];
        std::string note;
        std::string seq;
        bool have_table = s.payload.contains("table") && s.payload["table"].is_array();
        if (have_table)
            for (const json& row : s.payload["table"])
                seq += "n=" + std::to_string(row.value("n", 0)) + ": " +
                       fmt(row.value("sup_error", 0.0)) + "; ";
        const bool ok = checks_pass(s,
                                    {"completed", "errors_strictly_decreasing",
                                     "gronwall_envelope", "mollifier_mass_constant"},
                                    note) &&
                        have_table;
        gate.line(11, "cubic_limit", ok, seq + "decreasing, under the Gronwall envelope" + note);
    }

    // ---- 12. Gronwall large-data bound: closed-form ||beta||_1 matches
    //          quadrature to 1e-10 and N(T) stays below alpha e^{||beta||_1}.
    {
        const RunSummary& s = runs["large_data_gronwall"];
        std::string note;
        const double n_max = jnum(s.payload, "n_max");
        const double bound = jnum(s.payload, "bound");
        const bool ok = checks_pass(s, {"completed", "beta_l1_closed_form", "n_below_bound"},
                                    note) &&
                        n_max <= bound;
        gate.line(12, "gronwall_tail_bound", ok,
                  "N_max " + fmt(n_max) + " <= alpha e^{|beta|_1} = " + fmt(bound) +
                      ", closed form vs quadrature <= 1e-10" + note);
    }

    // ---- 13. Integrator: self-convergence slope 2.0 +- 0.2 and
    //          time-reversibility recovery to 1e-9.
    {
        const RunSummary& s = runs["integrator_checks"];
        std::string note;
        const double slope = jnum(s.payload, "self_convergence_slope");
        const double reversibility = jnum(s.payload, "reversibility");
        const bool ok = checks_pass(s, {"self_convergence_order", "reversibility"}, note) &&
                        std::abs(slope - 2.0) <= 0.2 && reversibility <= 1e-9;
        gate.line(13, "integrator_convergence", ok,
                  "slope " + fmt(slope) + " in [1.8,2.2], reversal error " + fmt(reversibility) +
                      " <= 1e-9" + note);
    }

    std::printf("\n%d/%d criteria passed%s\n", gate.passed_count, gate.total,
                any_abort ? " (with scenario aborts)" : "");
    return gate.passed_count == gate.total ? 0 : 1;
}
