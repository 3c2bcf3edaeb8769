#include "hartree/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hartree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must have
// opposite (non-strict) signs. Converges to ~1e-15 absolute.
double bisect_root(const BootstrapAnalysis& a, double lo, double hi) {
    double flo = a.f(lo);
    for (int iter = 0; iter < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = a.f(mid);
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Real roots of x^3 + p x + q = 0, ascending.
std::vector<double> depressed_cubic_roots(double p, double q) {
    std::vector<double> roots;
    const double discriminant = -4.0 * p * p * p - 27.0 * q * q;
    if (discriminant > 0.0) {
        // Three distinct real roots (requires p < 0): trigonometric form.
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0));
    } else if (discriminant == 0.0) {
        if (p == 0.0) {
            roots.push_back(0.0); // triple root (only when q = 0 too)
        } else {
            // Double root and a simple root.
            roots.push_back(3.0 * q / p);
            roots.push_back(-3.0 * q / (2.0 * p));
        }
    } else {
        // One real root: Cardano.
        const double shift = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        roots.push_back(std::cbrt(-q / 2.0 + shift) + std::cbrt(-q / 2.0 - shift));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace

BootstrapAnalysis analyze(double epsilon, double c_coeff) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("analyze: epsilon must be positive");
    if (!(c_coeff > 0.0))
        throw std::invalid_argument("analyze: c_coeff must be positive");

    BootstrapAnalysis a;
    a.epsilon = epsilon;
    a.c_coeff = c_coeff;
    a.threshold = 1.0 / (2.0 * std::sqrt(6.0 * c_coeff));
    a.x_tilde = 1.0 / std::sqrt(6.0 * c_coeff);
    a.f_at_x_tilde = a.f(a.x_tilde);
    a.f_prime_at_x_tilde = a.f_prime(a.x_tilde);
    a.x_min = 1.0 / std::sqrt(3.0 * c_coeff);
    a.f_min = a.f(a.x_min);

    // f = C (x^3 + p x + q) with p = -1/C, q = epsilon/C.
    const std::vector<double> all_roots =
        depressed_cubic_roots(-1.0 / c_coeff, epsilon / c_coeff);
    for (double r : all_roots)
        if (r >= 0.0)
            a.roots.push_back(r);

    if (a.f_min < 0.0 && a.roots.size() == 2) {
        a.two_intervals = true;
        a.c0 = a.roots[0];
        a.gap = a.roots[1] - a.roots[0];
        a.intervals = {{0.0, a.roots[0]}, {a.roots[1], kInf}};

        // Cross-validate the closed-form roots by bisection: f(0) > 0,
        // f(x_min) < 0, and f grows beyond any bound to the right.
        double hi = a.x_min;
        while (!(a.f(hi) > 0.0))
            hi *= 2.0;
        const double first = bisect_root(a, 0.0, a.x_min);
        const double second = bisect_root(a, a.x_min, hi);
        a.cardano_bisection_gap = std::max(std::abs(first - a.roots[0]),
                                           std::abs(second - a.roots[1]));
    } else {
        // f >= 0 on all of [0, inf): one component (a fold's double root
        // touches zero but does not separate it).
        a.two_intervals = false;
        a.c0 = kInf;
        a.gap = 0.0;
        a.intervals = {{0.0, kInf}};
        a.cardano_bisection_gap = 0.0;
    }
    return a;
}

ContinuityTrapResult continuity_trap(const std::vector<double>& m_series,
                                     const BootstrapAnalysis& analysis) {
    if (m_series.empty())
        throw std::invalid_argument("continuity_trap: empty M series");
    if (!analysis.two_intervals)
        throw std::invalid_argument(
            "continuity_trap: analysis must have two components (no trap otherwise)");

    ContinuityTrapResult result;
    result.passed = true;
    result.margin = kInf;
    for (std::size_t i = 0; i < m_series.size(); ++i) {
        const double margin = analysis.c0 - m_series[i];
        result.margin = std::min(result.margin, margin);
        if (margin < 0.0 && result.passed) {
            result.passed = false;
            result.first_offending_index = static_cast<std::ptrdiff_t>(i);
        }
    }
    return result;
}

SmallnessBudget smallness_budget(const BootstrapAnalysis& analysis,
                                 const ConstantsLedger& ledger, double w_l1,
                                 int dimension) {
    if (!ledger.populated())
        throw std::invalid_argument("smallness_budget: constants ledger is missing entries");
    if (!(w_l1 > 0.0))
        throw std::invalid_argument("smallness_budget: w_l1 must be positive");
    if (dimension < 3)
        throw std::domain_error("smallness_budget: requires dimension >= 3");
    if (!analysis.two_intervals)
        throw std::invalid_argument("smallness_budget: analysis must have two components");

    const double c_from_ledger =
        3.0 * w_l1 * std::max(ledger.c_inf_e(dimension), ledger.c_k_e(dimension));
    if (std::abs(analysis.c_coeff - c_from_ledger) > 1e-6 * c_from_ledger)
        throw std::invalid_argument(
            "smallness_budget: analysis c_coeff does not match the ledger-derived C");

    SmallnessBudget budget;
    budget.c_coeff = c_from_ledger;
    budget.epsilon = analysis.epsilon;
    budget.threshold = analysis.threshold;
    budget.c0 = analysis.c0;
    budget.epsilon0 =
        std::min(analysis.epsilon, analysis.c0) / (3.0 * ledger.c_v.value * ledger.c_ds.value);
    budget.e_ih_u1_l1_max = budget.epsilon0;
    budget.u1_hk_max = budget.epsilon0;
    budget.per_term_budget = analysis.epsilon / 3.0;
    budget.m_start_max = 3.0 * ledger.c_v.value * budget.epsilon0;
    return budget;
}

double beta_l1_norm(double c1, double t0, int d) {
    if (d < 3)
        throw std::domain_error("beta_l1_norm: |s|^{-d/2} is not integrable at infinity for d < 3");
    if (!(t0 >= 2.0))
        throw std::invalid_argument("beta_l1_norm: requires t0 >= 2");
    if (!(c1 >= 0.0))
        throw std::invalid_argument("beta_l1_norm: c1 must be nonnegative");
    const double half_d = 0.5 * d;
    return std::exp2(half_d + 1.0) * c1 * std::pow(t0, 1.0 - half_d) / (half_d - 1.0);
}

double beta_l1_norm_quadrature(double c1, double t0, int d) {
    if (d < 3)
        throw std::domain_error("beta_l1_norm_quadrature: not integrable for d < 3");
    if (!(t0 >= 2.0))
        throw std::invalid_argument("beta_l1_norm_quadrature: requires t0 >= 2");
    if (c1 == 0.0)
        return 0.0;

    // Substitute s = t0 e^y: integral of beta becomes
    // 2^{d/2+1} c1 t0^{1-d/2} * integral_0^inf e^{(1-d/2) y} dy.
    const double half_d = 0.5 * d;
    const double rate = half_d - 1.0;
    const double y_max = 185.0 / rate; // e^{-rate y_max} ~ 1e-80
    auto integrand = [rate](double y) { return std::exp(-rate * y); };

    // Composite Simpson on a fine uniform grid (the integrand is smooth and
    // monotone; 1e6 panels give far better than 1e-10 relative error).
    const int panels = 200000;
    const double h = y_max / panels;
    double sum = integrand(0.0) + integrand(y_max);
    for (int i = 1; i < panels; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
    const double tail = sum * h / 3.0;
    return std::exp2(half_d + 1.0) * c1 * std::pow(t0, 1.0 - half_d) * tail;
}

double gronwall_bound(const std::vector<double>& n_series_at_t0, double alpha,
                      double beta_integral) {
    if (!(alpha >= 0.0))
        throw std::invalid_argument("gronwall_bound: alpha must be nonnegative");
    if (!(beta_integral >= 0.0) || !std::isfinite(beta_integral))
        throw std::invalid_argument("gronwall_bound: beta integral must be finite and nonnegative");
    if (!n_series_at_t0.empty() && n_series_at_t0.front() > alpha * (1.0 + 1e-12))
        throw std::invalid_argument(
            "gronwall_bound: N(t0) exceeds alpha; alpha must dominate the initial sample");
    return alpha * std::exp(beta_integral);
}

} // namespace hartree
