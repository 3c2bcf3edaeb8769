#pragma once

// Exact analysis of the cubic barrier function f(x) = eps + C x^3 - x that
// drives the continuity-trap argument, plus the smallness budget it imposes
// on initial data and the Gronwall-type tail bound for large data.

#include <cstddef>
#include <utility>
#include <vector>

#include "hartree/diagnostics.hpp"

namespace hartree {

// Full root/interval structure of f(x) = epsilon + c_coeff x^3 - x on [0, inf).
struct BootstrapAnalysis {
    double epsilon = 0.0;
    double c_coeff = 0.0;

    // Sufficient-smallness threshold 1/(2 sqrt(6C)): epsilon below it
    // guarantees two components. The converse is false; the analysis always
    // reports the actual sign structure.
    double threshold = 0.0;

    // Probe point x~ = 1/sqrt(6C) used by the sufficiency proof: f'(x~) = -1/2
    // and f(x~) <= epsilon - 1/(2 sqrt(6C))
    // (exact value: f(x~) = epsilon - 5/(6 sqrt(6C))).
    double x_tilde = 0.0;
    double f_at_x_tilde = 0.0;
    double f_prime_at_x_tilde = 0.0;

    // Interior minimum of f on (0, inf): x* = 1/sqrt(3C). Two components
    // exist if and only if f(x*) < 0.
    double x_min = 0.0;
    double f_min = 0.0;

    // Real roots of f in [0, inf), sorted ascending. A double root at the
    // fold appears once.
    std::vector<double> roots;

    // Connected components of {x >= 0 : f(x) >= 0}; the last component is
    // unbounded (second == +inf).
    std::vector<std::pair<double, double>> intervals;

    // True when {f >= 0} has exactly two components separated by a strictly
    // positive gap. A fold (double root, gap 0) does not count.
    bool two_intervals = false;

    // sup of the component containing 0; finite exactly when two_intervals.
    double c0 = 0.0;

    // Distance between the two components (0 when there is only one).
    double gap = 0.0;

    // Largest discrepancy between the closed-form roots and the bisection
    // cross-check (0 when there is no positive root).
    double cardano_bisection_gap = 0.0;

    double f(double x) const { return epsilon + c_coeff * x * x * x - x; }
    double f_prime(double x) const { return 3.0 * c_coeff * x * x - 1.0; }
};

// Solves f = 0 in closed form (trigonometric method for three real roots,
// Cardano otherwise), cross-validates every nonnegative root by bisection,
// and classifies the interval structure. Throws std::invalid_argument unless
// epsilon > 0 and c_coeff > 0.
BootstrapAnalysis analyze(double epsilon, double c_coeff);

struct ContinuityTrapResult {
    bool passed = false;                     // verdict PASS (vs JUMPED)
    std::ptrdiff_t first_offending_index = -1; // first sample beyond c0; -1 if none
    double margin = 0.0;                     // min over samples of (c0 - M)
};

// Checks a time-ordered running-M series against the trap: every sample must
// stay in the first component [0, c0]. A sample in the gap or the second
// component means the continuity argument was jumped (numerics problem or
// data too large). Requires a two-component analysis and a non-empty series.
ContinuityTrapResult continuity_trap(const std::vector<double>& m_series,
                                     const BootstrapAnalysis& analysis);

// Concrete numeric smallness thresholds the initial data must satisfy for the
// trap to apply, derived from the measured constants ledger.
struct SmallnessBudget {
    double c_coeff = 0.0;       // C = 3 ||w||_1 max(C^{infE}, C^{kE})
    double epsilon = 0.0;       // the barrier epsilon (from the analysis)
    double threshold = 0.0;     // 1/(2 sqrt(6C))
    double c0 = 0.0;            // sup I_1 (from the analysis)
    double epsilon0 = 0.0;      // min(epsilon, c0) / (3 C^V C^{DS})
    double e_ih_u1_l1_max = 0.0; // admissible ||e^{iH} u_1||_1   (= epsilon0)
    double u1_hk_max = 0.0;      // admissible ||u_1||_{H^k}      (= epsilon0)
    double per_term_budget = 0.0; // epsilon / 3, each chain term must fit it
    double m_start_max = 0.0;    // implied bound 3 C^V epsilon0 on M(1), <= c0
};

// Requires a populated ledger, w_l1 > 0, dimension >= 3, and an analysis whose
// c_coeff matches 3 w_l1 max(C^{infE}, C^{kE}) built from the ledger.
SmallnessBudget smallness_budget(const BootstrapAnalysis& analysis,
                                 const ConstantsLedger& ledger, double w_l1,
                                 int dimension);

// L1 tail mass of beta(s) = 2^{d/2+1} c1 |s|^{-d/2} on [t0, inf), in closed
// form: 2^{d/2+1} c1 t0^{1-d/2} / (d/2 - 1). Throws std::domain_error for
// d < 3 (beta is not integrable) and std::invalid_argument for t0 < 2.
double beta_l1_norm(double c1, double t0, int d);

// Same integral by adaptive quadrature after the substitution s = t0 e^y,
// truncated where the integrand has decayed below 1e-80. Oracle for the
// closed form; agreement to 1e-10 relative.
double beta_l1_norm_quadrature(double c1, double t0, int d);

// The explicit tail bound alpha * exp(beta_integral) on N(T) for T >= t0.
// n_series_at_t0 holds the measured running-N samples from t0 onward; when
// non-empty, its first entry must not exceed alpha (alpha dominates 2 N(t0)
// by construction, so a violation means alpha was assembled wrongly).
double gronwall_bound(const std::vector<double>& n_series_at_t0, double alpha,
                      double beta_integral);

} // namespace hartree
