#include "hartree/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hartree {

namespace {

double finite_or_throw(double value, const char* what) {
    if (!std::isfinite(value))
        throw std::runtime_error(std::string(what) + ": non-finite value");
    return value;
}

// Adaptive Simpson with absolute+relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a))
        return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

double sup_column(const DiagnosticsRecord& r) { return r.sup_norm; }

} // namespace

DiagnosticsRecord record(const ComplexField& u, double t, const ModelSpec& model) {
    DiagnosticsRecord rec;
    rec.t = t;

    const SpectralField u_hat = forward_transform(u);
    rec.mass = lp_norm(u, 2.0);
    rec.sup_norm = sup_norm(u);
    rec.l1_norm = lp_norm(u, 1.0);
    rec.hk_norm = sobolev_norm(u_hat, static_cast<double>(model.sobolev_index));
    rec.dk_l2 = dk_l2_norm(u_hat, static_cast<double>(model.sobolev_index));
    rec.boundary_mass_fraction = boundary_mass_fraction(u);
    rec.energy = energy(u, model);

    const ComplexField dtu = time_derivative(u, model);
    rec.dt_sup_norm = sup_norm(dtu);
    rec.dt_l2 = lp_norm(dtu, 2.0);
    const SpectralField dtu_hat = forward_transform(dtu);
    rec.dt_dk_l2 = dk_l2_norm(dtu_hat, static_cast<double>(model.sobolev_index));

    finite_or_throw(rec.mass + rec.sup_norm + rec.l1_norm + rec.hk_norm + rec.dk_l2 +
                        rec.dt_sup_norm + rec.energy,
                    "record");
    return rec;
}

void TrajectoryDiagnostics::append(const DiagnosticsRecord& rec) {
    if (!records.empty() && rec.t <= records.back().t)
        throw std::invalid_argument("TrajectoryDiagnostics: records must be time-ordered");
    if (!have_first_) {
        mass_at_start = rec.mass;
        have_first_ = true;
    }
    records.push_back(rec);

    const double half_d = 0.5 * dimension;
    n_zero_based = std::max(n_zero_based, std::pow(1.0 + rec.t, half_d) * rec.sup_norm);
    if (rec.t >= 1.0 - 1e-12) {
        const double weight = std::pow(rec.t, half_d);
        running_N = std::max(running_N, weight * rec.sup_norm);
        sup_dk_ = std::max(sup_dk_, rec.dk_l2);
        sup_dt_weighted_ = std::max(sup_dt_weighted_, weight * rec.dt_sup_norm);
        sup_dt_dk_ = std::max(sup_dt_dk_, rec.dt_dk_l2);
        sup_dt_l2_ = std::max(sup_dt_l2_, rec.dt_l2);
    }
    running_M = running_N + sup_dk_ + mass_at_start;
    running_M_tilde = running_M + sup_dt_weighted_ + sup_dt_dk_ + sup_dt_l2_;
    running_N_series.push_back(running_N);
    running_M_series.push_back(running_M);
}

void write_csv(const std::string& path, const TrajectoryDiagnostics& diagnostics) {
    std::FILE* file = std::fopen(path.c_str(), "w");
    if (!file)
        throw std::runtime_error("write_csv: cannot open " + path);
    std::fputs("t,mass,energy,sup_norm,l1_norm,hk_norm,dk_l2,dt_sup_norm,"
               "boundary_mass_fraction,running_N,running_M\n",
               file);
    for (std::size_t i = 0; i < diagnostics.records.size(); ++i) {
        const DiagnosticsRecord& r = diagnostics.records[i];
        std::fprintf(file, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     r.t, r.mass, r.energy, r.sup_norm, r.l1_norm, r.hk_norm, r.dk_l2,
                     r.dt_sup_norm, r.boundary_mass_fraction, diagnostics.running_N_series[i],
                     diagnostics.running_M_series[i]);
    }
    if (std::fclose(file) != 0)
        throw std::runtime_error("write_csv: short write to " + path);
}

DecayFit fit_power_law(const std::vector<double>& ts, const std::vector<double>& ys) {
    if (ts.size() != ys.size())
        throw std::invalid_argument("fit_power_law: mismatched series");

    std::vector<double> x, y;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ys[i] > 0.0) {
            x.push_back(std::log1p(ts[i]));
            y.push_back(std::log(ys[i]));
        }
    }
    if (x.size() < 2)
        throw std::invalid_argument("fit_power_law: fewer than 2 positive samples");

    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0)
        throw std::invalid_argument("fit_power_law: degenerate window (all equal times)");

    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double resid = y[i] - (intercept + slope * x[i]);
        ss_res += resid * resid;
    }

    DecayFit fit;
    fit.amplitude = std::exp(intercept);
    fit.exponent = -slope;
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.points = static_cast<int>(x.size());
    return fit;
}

DecayFit decay_fit_column(const std::vector<DiagnosticsRecord>& records, double t_min,
                          double t_max, double (*column)(const DiagnosticsRecord&)) {
    std::vector<double> ts, ys;
    for (const DiagnosticsRecord& r : records) {
        if (r.t >= t_min - 1e-12 && r.t <= t_max + 1e-12) {
            ts.push_back(r.t);
            ys.push_back(column(r));
        }
    }
    if (ts.size() < 8)
        throw std::invalid_argument("decay_fit: window contains fewer than 8 records");
    return fit_power_law(ts, ys);
}

DecayFit decay_fit(const std::vector<DiagnosticsRecord>& records, double t_min, double t_max) {
    return decay_fit_column(records, t_min, t_max, &sup_column);
}

MeasuredConstant make_measured(double raw, int corpus_size) {
    MeasuredConstant constant;
    constant.raw = raw;
    constant.value = std::max(raw, 1.0);
    constant.corpus_size = corpus_size;
    return constant;
}

bool ConstantsLedger::populated() const {
    return c_v.corpus_size > 0 && c_ds.corpus_size > 0 && c_es.corpus_size > 0 &&
           c_kp.corpus_size > 0 && c_s.corpus_size > 0;
}

double ConstantsLedger::c_se() const {
    return 4.0 * c_s.value * c_ds.value * c_es.value * c_kp.value * c_kp.value;
}

double ConstantsLedger::c_inf_e(int d) const {
    if (d <= 2)
        throw std::domain_error("c_inf_e: defined for d >= 3 only");
    return std::exp2(2.0 + 0.5 * d) / (d - 2.0) * c_v.value + std::exp2(0.5 * d) * c_se();
}

double ConstantsLedger::c_k_e(int d) const {
    if (d < 2)
        throw std::domain_error("c_k_e: defined for d >= 2 only");
    return 4.0 * c_es.value * c_ds.value * c_kp.value * c_kp.value / (d - 1.0);
}

MeasuredConstant dispersive_constant(const ModelSpec& model,
                                     const std::vector<ComplexField>& corpus,
                                     const std::vector<double>& times, double dt_hint) {
    if (corpus.size() < 5)
        throw std::invalid_argument("dispersive_constant: corpus must contain at least 5 fields");
    const double half_d = 0.5 * model.grid.dimension;
    double raw = 0.0;
    for (const ComplexField& f : corpus) {
        const double l1 = lp_norm(f, 1.0);
        if (!(l1 > 0.0))
            throw std::invalid_argument("dispersive_constant: zero field in corpus");
        for (double t : times) {
            if (!(t > 0.0))
                throw std::invalid_argument("dispersive_constant: times must be positive");
            const ComplexField g = linear_propagate(f, t, model, dt_hint);
            raw = std::max(raw, std::pow(t, half_d) * sup_norm(g) / l1);
        }
    }
    return make_measured(raw, static_cast<int>(corpus.size()));
}

MeasuredConstant hk_propagation_constant(const ModelSpec& model,
                                         const std::vector<ComplexField>& corpus,
                                         const std::vector<double>& times, double dt_hint) {
    if (corpus.size() < 5)
        throw std::invalid_argument("hk_propagation_constant: corpus must contain at least 5 fields");
    const double k = static_cast<double>(model.sobolev_index);
    double raw = 0.0;
    for (const ComplexField& f : corpus) {
        const double hk = sobolev_norm(f, k);
        if (!(hk > 0.0))
            throw std::invalid_argument("hk_propagation_constant: zero field in corpus");
        for (double t : times) {
            const ComplexField g = linear_propagate(f, t, model, dt_hint);
            raw = std::max(raw, sobolev_norm(g, k) / hk);
        }
    }
    return make_measured(raw, static_cast<int>(corpus.size()));
}

MeasuredConstant norm_equivalence_constant(const std::vector<ComplexField>& corpus, int k) {
    if (corpus.empty())
        throw std::invalid_argument("norm_equivalence_constant: empty corpus");
    double raw = 0.0;
    for (const ComplexField& f : corpus) {
        const SpectralField f_hat = forward_transform(f);
        const double hk = sobolev_norm(f_hat, static_cast<double>(k));
        const double split = l2_norm(f_hat) + dk_l2_norm(f_hat, static_cast<double>(k));
        if (!(hk > 0.0) || !(split > 0.0))
            throw std::invalid_argument("norm_equivalence_constant: zero field in corpus");
        raw = std::max(raw, std::max(hk / split, split / hk));
    }
    return make_measured(raw, static_cast<int>(corpus.size()));
}

MeasuredConstant sobolev_embedding_constant(const std::vector<ComplexField>& corpus, int k) {
    if (corpus.empty())
        throw std::invalid_argument("sobolev_embedding_constant: empty corpus");
    double raw = 0.0;
    for (const ComplexField& f : corpus) {
        const double hk = sobolev_norm(f, static_cast<double>(k));
        if (!(hk > 0.0))
            throw std::invalid_argument("sobolev_embedding_constant: zero field in corpus");
        raw = std::max(raw, sup_norm(f) / hk);
    }
    return make_measured(raw, static_cast<int>(corpus.size()));
}

namespace {

void require_band_limited(const ComplexField& f, const char* what) {
    const SpectralField f_hat = forward_transform(f);
    const int d = f.grid.dimension;
    const int n = f.grid.points_per_axis;
    double total = 0.0, top = 0.0;
    for (std::size_t i = 0; i < f_hat.coefficients.size(); ++i) {
        const double e = std::norm(f_hat.coefficients[i]);
        total += e;
        std::size_t rest = i;
        bool in_top_third = false;
        for (int axis = d - 1; axis >= 0; --axis) {
            const int k = static_cast<int>(rest % n);
            rest /= n;
            const int j = (k < n / 2) ? k : k - n;
            if (3 * std::abs(j) > n) in_top_third = true;
        }
        if (in_top_third) top += e;
    }
    if (total > 0.0 && top > 1e-20 * total)
        throw std::invalid_argument(std::string(what) +
                                    ": input is not band-limited (top third of spectrum occupied)");
}

} // namespace

double kato_ponce_ratio(const ComplexField& f, const ComplexField& h, int k) {
    if (!(f.grid == h.grid))
        throw std::invalid_argument("kato_ponce_ratio: fields on different grids");
    require_band_limited(f, "kato_ponce_ratio");
    require_band_limited(h, "kato_ponce_ratio");

    const double order = static_cast<double>(k);
    const double dk_f = dk_l2_norm(forward_transform(f), order);
    const double dk_h = dk_l2_norm(forward_transform(h), order);
    const double sup_f = sup_norm(f);
    const double sup_h = sup_norm(h);
    const double denominator = dk_f * sup_h + sup_f * dk_h;
    if (!(denominator > 0.0))
        throw std::invalid_argument("kato_ponce_ratio: zero denominator");

    ComplexField product{f.grid, std::vector<cplx>(f.values.size())};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        product.values[i] = f.values[i] * h.values[i];
    return dk_l2_norm(forward_transform(product), order) / denominator;
}

EquivalentNormRatios equivalent_norm_ratio(const ComplexField& phi, const ModelSpec& model,
                                           int k) {
    if (k <= 0 || k % 2 != 0)
        throw std::invalid_argument("equivalent_norm_ratio: k must be a positive even integer");
    const double hk = sobolev_norm(phi, static_cast<double>(k));
    if (!(hk > 0.0))
        throw std::invalid_argument("equivalent_norm_ratio: zero field");

    const auto v = potential_values(model.potential, model.grid);
    double sum = 0.0;
    ComplexField power = phi; // (-Laplace + V)^j phi
    for (int j = 0; 2 * j <= k; ++j) {
        sum += lp_norm(power, 2.0);
        if (2 * (j + 1) <= k) {
            const ComplexField lap =
                inverse_transform(apply_multiplier(forward_transform(power), SymbolSpec::power(2.0)));
            for (std::size_t i = 0; i < power.values.size(); ++i)
                power.values[i] = lap.values[i] + v[i] * power.values[i];
        }
    }
    return EquivalentNormRatios{hk / sum, sum / hk};
}

double kernel_integral(double t, int d) {
    if (d < 3)
        throw std::domain_error(
            "kernel_integral: the integral is not uniformly bounded for d < 3 "
            "(the decay argument requires d >= 3)");
    if (!(t >= 0.0))
        throw std::invalid_argument("kernel_integral: t must be nonnegative");
    const double upper = std::max(t - 1.0, 0.0);
    if (upper <= 0.0)
        return 0.0;

    const double half_d = 0.5 * d;
    const double prefactor = std::pow(1.0 + t, half_d);
    auto integrand = [&](double s) {
        return prefactor * std::pow(std::abs(t - s), -half_d) * std::pow(1.0 + s, -half_d);
    };
    // Split where the proof switches estimates (s = t/2); |t - s| >= 1 on the
    // whole range because the upper limit stops at t - 1.
    const double mid = std::min(0.5 * t, upper);
    const double tol = 1e-13;
    return integrate(integrand, 0.0, mid, tol) + integrate(integrand, mid, upper, tol);
}

std::vector<ChainCheckRow> estimate_chain_check(const TrajectoryDiagnostics& diagnostics,
                                                const ConstantsLedger& ledger, double w_l1,
                                                double e_ih_u1_l1) {
    if (!ledger.populated())
        throw std::invalid_argument("estimate_chain_check: constants ledger is not populated");
    const double half_d = 0.5 * diagnostics.dimension;
    const double c_inf_e = ledger.c_inf_e(diagnostics.dimension);

    std::vector<ChainCheckRow> rows;
    for (std::size_t i = 0; i < diagnostics.records.size(); ++i) {
        const DiagnosticsRecord& r = diagnostics.records[i];
        if (r.t < 1.0 - 1e-12)
            continue;
        ChainCheckRow row;
        row.t = r.t;
        row.lhs = std::pow(r.t, half_d) * r.sup_norm;
        const double m = diagnostics.running_M_series[i];
        row.rhs = ledger.c_v.value * e_ih_u1_l1 + c_inf_e * w_l1 * m * m * m;
        row.margin = row.rhs - row.lhs;
        rows.push_back(row);
    }
    return rows;
}

} // namespace hartree
