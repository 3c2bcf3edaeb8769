#ifndef HARTREE_DIAGNOSTICS_HPP
#define HARTREE_DIAGNOSTICS_HPP

// Everything measured: the running quantities N(T), M(T), M~(T), decay-
// exponent fits, and numerical verifiers for each inequality the decay
// argument uses (dispersive constants, Kato-Ponce, equivalent Sobolev norm,
// the convolution-kernel integral, the estimate chain).

#include "hartree/propagator.hpp"

#include <optional>

namespace hartree {

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;            // ||u||_2
    double energy = 0.0;          // signed
    double sup_norm = 0.0;        // ||u||_inf (grid max)
    double l1_norm = 0.0;         // ||u||_1
    double hk_norm = 0.0;         // ||u||_{H^k}
    double dk_l2 = 0.0;           // ||D^k u||_2
    double dt_sup_norm = 0.0;     // ||du/dt||_inf
    double boundary_mass_fraction = 0.0;
    // Companions of du/dt needed for M~(T); not part of the CSV schema.
    double dt_dk_l2 = 0.0;        // ||D^k du/dt||_2
    double dt_l2 = 0.0;           // ||du/dt||_2
};

DiagnosticsRecord record(const ComplexField& u, double t, const ModelSpec& model);

// Running bookkeeping quantities.  With d the grid dimension and records
// appended in time order:
//   running_N = sup_{records, t >= 1} t^{d/2} sup_norm        (the t >= 1 convention),
//   running_M = running_N + sup_{t >= 1} dk_l2 + mass-at-start,
//   running_M_tilde = running_M + sup_{t>=1} t^{d/2} dt_sup_norm
//                   + sup_{t>=1} dt_dk_l2 + sup_{t>=1} dt_l2,
//   n_zero_based = sup over all records of (1+t)^{d/2} sup_norm.
// All four are nondecreasing as records append.
struct TrajectoryDiagnostics {
    int dimension = 3;
    std::vector<DiagnosticsRecord> records;
    std::vector<double> running_N_series;
    std::vector<double> running_M_series;
    double running_N = 0.0;
    double running_M = 0.0;
    double running_M_tilde = 0.0;
    double n_zero_based = 0.0;
    double mass_at_start = 0.0;

    void append(const DiagnosticsRecord& rec);

private:
    bool have_first_ = false;
    double sup_dk_ = 0.0, sup_dt_weighted_ = 0.0, sup_dt_dk_ = 0.0, sup_dt_l2_ = 0.0;
};

// CSV schema: t,mass,energy,sup_norm,l1_norm,hk_norm,dk_l2,dt_sup_norm,
// boundary_mass_fraction,running_N,running_M -- 17 significant digits.
void write_csv(const std::string& path, const TrajectoryDiagnostics& diagnostics);

// ---------------------------------------------------------------------------
// Decay fits: least squares of log y against log(1 + t) over the window.

struct DecayFit {
    double amplitude = 0.0; // c in y ~ c (1+t)^{-exponent}
    double exponent = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

DecayFit fit_power_law(const std::vector<double>& ts, const std::vector<double>& ys);

DecayFit decay_fit(const std::vector<DiagnosticsRecord>& records, double t_min, double t_max);

// Same fit on an arbitrary record column (e.g. the du/dt sup norm).
DecayFit decay_fit_column(const std::vector<DiagnosticsRecord>& records, double t_min,
                          double t_max, double (*column)(const DiagnosticsRecord&));

// ---------------------------------------------------------------------------
// Measured constants.  `raw` is the measured extremum; `value` is the ledger
// entry max(raw, 1), honoring the convention that all upper-index constants
// are >= 1.

struct MeasuredConstant {
    double raw = 0.0;
    double value = 1.0;
    int corpus_size = 0;
};

MeasuredConstant make_measured(double raw, int corpus_size);

struct ConstantsLedger {
    MeasuredConstant c_v;  // dispersive:      ||e^{-itH} f||_inf <= C^V |t|^{-d/2} ||f||_1
    MeasuredConstant c_ds; // H^k propagation: ||e^{-itH} f||_{H^k} <= C^DS ||f||_{H^k}
    MeasuredConstant c_es; // norm equivalence between ||.||_{H^k} and ||.||_2 + ||D^k .||_2
    MeasuredConstant c_kp; // Kato-Ponce product ratio
    MeasuredConstant c_s;  // Sobolev embedding ||f||_inf <= C^S ||f||_{H^k}

    bool populated() const;
    double c_se() const;          // 4 C^S C^DS C^ES (C^KP)^2
    double c_inf_e(int d) const;  // 2^{2+d/2}/(d-2) C^V + 2^{d/2} C^SE   (d > 2)
    double c_k_e(int d) const;    // 4 C^ES C^DS (C^KP)^2 / (d-1)
};

// max over corpus x times of |t|^{d/2} ||e^{-itH} f||_inf / ||f||_1.
MeasuredConstant dispersive_constant(const ModelSpec& model_with_w_zeroed,
                                     const std::vector<ComplexField>& corpus,
                                     const std::vector<double>& times, double dt_hint = 0.01);

// max over corpus x times of ||e^{-itH} f||_{H^k} / ||f||_{H^k}.
MeasuredConstant hk_propagation_constant(const ModelSpec& model,
                                         const std::vector<ComplexField>& corpus,
                                         const std::vector<double>& times, double dt_hint = 0.01);

// max over corpus of max(||f||_{H^k}/(||f||_2 + ||D^k f||_2), reciprocal).
MeasuredConstant norm_equivalence_constant(const std::vector<ComplexField>& corpus, int k);

// max over corpus of ||f||_inf / ||f||_{H^k}.
MeasuredConstant sobolev_embedding_constant(const std::vector<ComplexField>& corpus, int k);

// ||D^k(f h)||_2 / (||D^k f||_2 ||h||_inf + ||f||_inf ||D^k h||_2).
// Inputs must be band-limited (top third of the spectrum empty).
double kato_ponce_ratio(const ComplexField& f, const ComplexField& h, int k);

// The two ratios (||phi||_{H^k} / sum_{j<=k/2} ||(-Laplace+V)^j phi||_2, reciprocal).
struct EquivalentNormRatios {
    double hk_over_sum = 0.0;
    double sum_over_hk = 0.0;
};
EquivalentNormRatios equivalent_norm_ratio(const ComplexField& phi, const ModelSpec& model, int k);

// I(t) = int_0^{max(t-1,0)} (1+t)^{d/2} |t-s|^{-d/2} (1+s)^{-d/2} ds by
// adaptive quadrature split at s = t/2; throws std::domain_error for d < 3
// (the integral is not uniformly bounded below dimension 3).
double kernel_integral(double t, int d);

// Per-record evaluation of the decay-estimate chain
//   t^{d/2} ||u(t)||_inf <= C^V ||e^{iH} u1||_1 + C^{infE} ||w||_1 M(t)^3.
struct ChainCheckRow {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
};
std::vector<ChainCheckRow> estimate_chain_check(const TrajectoryDiagnostics& diagnostics,
                                                const ConstantsLedger& ledger, double w_l1,
                                                double e_ih_u1_l1);

} // namespace hartree

#endif
