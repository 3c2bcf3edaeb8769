#include "hartree/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hartree {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex fftw_planning_mutex;

void run_dft(const GridSpec& grid, const std::vector<cplx>& in,
             std::vector<cplx>& out, int sign) {
    out.resize(in.size());
    int n[3] = {grid.points_per_axis, grid.points_per_axis, grid.points_per_axis};
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planning_mutex);
        // FFTW_ESTIMATE keeps planning deterministic and leaves the arrays
        // untouched during planning; out-of-place c2c preserves the input.
        plan = fftw_plan_dft(grid.dimension, n,
                             reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                             reinterpret_cast<fftw_complex*>(out.data()),
                             sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
        if (plan == nullptr)
            throw std::runtime_error("FFTW failed to create a transform plan");
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planning_mutex);
        fftw_destroy_plan(plan);
    }
}

// Decomposes a flat row-major index into per-axis storage indices.
inline void axis_indices(std::size_t flat, int d, int n, int k[3]) {
    k[2] = k[1] = k[0] = 0;
    for (int axis = d - 1; axis >= 0; --axis) {
        k[axis] = static_cast<int>(flat % n);
        flat /= n;
    }
}

void check_same_grid_size(const GridSpec& grid, std::size_t length, const char* what) {
    if (length != grid.total_points())
        throw std::invalid_argument(std::string(what) + ": array length does not match the grid");
}

} // namespace

std::size_t GridSpec::total_points() const {
    std::size_t total = 1;
    for (int axis = 0; axis < dimension; ++axis)
        total *= static_cast<std::size_t>(points_per_axis);
    return total;
}

double GridSpec::cell_volume() const {
    return std::pow(spacing(), dimension);
}

double GridSpec::box_volume() const {
    return std::pow(2.0 * half_length, dimension);
}

std::vector<double> GridSpec::axis_wavenumbers() const {
    const int n = points_per_axis;
    std::vector<double> xi(n);
    const double base = std::numbers::pi / half_length;
    for (int k = 0; k < n; ++k) {
        const int j = (k < n / 2) ? k : k - n;
        xi[k] = base * j;
    }
    return xi;
}

std::vector<double> GridSpec::axis_coordinates() const {
    const int n = points_per_axis;
    const double h = spacing();
    std::vector<double> x(n);
    for (int m = 0; m < n; ++m)
        x[m] = -half_length + m * h;
    return x;
}

GridSpec make_grid(int dimension, int points_per_axis, double half_length) {
    if (dimension < 1 || dimension > 3)
        throw std::invalid_argument("make_grid: dimension must be 1, 2 or 3");
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
        throw std::invalid_argument("make_grid: points_per_axis must be even and >= 8");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw std::invalid_argument("make_grid: half_length must be positive");
    return GridSpec{dimension, points_per_axis, half_length};
}

AnalyticSpec gaussian_spec(double amplitude, double width) {
    AnalyticTerm term;
    term.family = "gaussian";
    term.amplitude = amplitude;
    term.width = width;
    return AnalyticSpec{{term}};
}

ComplexField sample(const GridSpec& grid, const AnalyticSpec& spec) {
    const int d = grid.dimension;
    const int n = grid.points_per_axis;
    const auto x = grid.axis_coordinates();

    ComplexField field{grid, std::vector<cplx>(grid.total_points(), cplx(0.0, 0.0))};
    for (const AnalyticTerm& term : spec.terms) {
        if (term.family != "gaussian" && term.family != "plane_wave" && term.family != "constant")
            throw std::invalid_argument("sample: unknown analytic family '" + term.family + "'");
        if (term.family == "gaussian" && !(term.width > 0.0))
            throw std::invalid_argument("sample: gaussian width must be positive");
        if (!std::isfinite(term.amplitude.real()) || !std::isfinite(term.amplitude.imag()))
            throw std::invalid_argument("sample: non-finite amplitude");

        int k[3];
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            axis_indices(i, d, n, k);
            double r2 = 0.0, phase = 0.0;
            for (int axis = 0; axis < d; ++axis) {
                const double xa = x[k[axis]];
                const double dx = xa - term.center[axis];
                r2 += dx * dx;
                phase += term.wavevector[axis] * xa;
            }
            cplx value = term.amplitude;
            if (phase != 0.0)
                value *= std::polar(1.0, phase);
            if (term.family == "gaussian")
                value *= std::exp(-r2 / (2.0 * term.width * term.width));
            field.values[i] += value;
        }
    }
    return field;
}

SpectralField forward_transform(const ComplexField& field) {
    check_same_grid_size(field.grid, field.values.size(), "forward_transform");
    SpectralField out{field.grid, {}};
    run_dft(field.grid, field.values, out.coefficients, FFTW_FORWARD);

    const int d = field.grid.dimension;
    const int n = field.grid.points_per_axis;
    const double scale = field.grid.cell_volume();
    int k[3];
    for (std::size_t i = 0; i < out.coefficients.size(); ++i) {
        axis_indices(i, d, n, k);
        const int parity = (k[0] + k[1] + k[2]) & 1;
        out.coefficients[i] *= parity ? -scale : scale;
    }
    return out;
}

ComplexField inverse_transform(const SpectralField& spectral) {
    check_same_grid_size(spectral.grid, spectral.coefficients.size(), "inverse_transform");
    const int d = spectral.grid.dimension;
    const int n = spectral.grid.points_per_axis;
    const double scale = 1.0 / spectral.grid.box_volume();

    std::vector<cplx> staged(spectral.coefficients.size());
    int k[3];
    for (std::size_t i = 0; i < staged.size(); ++i) {
        axis_indices(i, d, n, k);
        const int parity = (k[0] + k[1] + k[2]) & 1;
        staged[i] = spectral.coefficients[i] * (parity ? -scale : scale);
    }

    ComplexField out{spectral.grid, {}};
    run_dft(spectral.grid, staged, out.values, FFTW_BACKWARD);
    return out;
}

SymbolSpec SymbolSpec::power(double s) { return SymbolSpec{Kind::power, s, 0.0}; }
SymbolSpec SymbolSpec::bessel(double s) { return SymbolSpec{Kind::bessel, s, 0.0}; }
SymbolSpec SymbolSpec::free_flow(double t) { return SymbolSpec{Kind::free_flow, 0.0, t}; }
SymbolSpec SymbolSpec::two_thirds_filter() { return SymbolSpec{Kind::two_thirds_filter, 0.0, 0.0}; }

SpectralField apply_multiplier(const SpectralField& spectral, const SymbolSpec& symbol) {
    check_same_grid_size(spectral.grid, spectral.coefficients.size(), "apply_multiplier");
    if ((symbol.kind == SymbolSpec::Kind::power || symbol.kind == SymbolSpec::Kind::bessel) &&
        symbol.order < 0.0)
        throw std::invalid_argument("apply_multiplier: negative symbol order");

    const int d = spectral.grid.dimension;
    const int n = spectral.grid.points_per_axis;
    const auto xi = spectral.grid.axis_wavenumbers();

    SpectralField out{spectral.grid, spectral.coefficients};
    int k[3];
    for (std::size_t i = 0; i < out.coefficients.size(); ++i) {
        axis_indices(i, d, n, k);
        double xi2 = 0.0;
        for (int axis = 0; axis < d; ++axis)
            xi2 += xi[k[axis]] * xi[k[axis]];

        switch (symbol.kind) {
        case SymbolSpec::Kind::power:
            // s = 0 is the identity (0^0 := 1 on the zero mode).
            out.coefficients[i] *= (symbol.order == 0.0) ? 1.0 : std::pow(xi2, 0.5 * symbol.order);
            break;
        case SymbolSpec::Kind::bessel:
            out.coefficients[i] *= std::pow(1.0 + xi2, 0.5 * symbol.order);
            break;
        case SymbolSpec::Kind::free_flow:
            out.coefficients[i] *= std::polar(1.0, -symbol.time * xi2);
            break;
        case SymbolSpec::Kind::two_thirds_filter: {
            bool keep = true;
            for (int axis = 0; axis < d; ++axis) {
                const int j = (k[axis] < n / 2) ? k[axis] : k[axis] - n;
                if (3 * std::abs(j) > n) keep = false;
            }
            if (!keep) out.coefficients[i] = 0.0;
            break;
        }
        }
    }
    return out;
}

double lp_norm(const ComplexField& field, double p) {
    check_same_grid_size(field.grid, field.values.size(), "lp_norm");
    if (std::isinf(p)) {
        double maxabs = 0.0;
        for (const cplx& v : field.values)
            maxabs = std::max(maxabs, std::abs(v));
        return maxabs;
    }
    if (p < 1.0)
        throw std::invalid_argument("lp_norm: p must be in [1, infinity]");

    const double hd = field.grid.cell_volume();
    double sum = 0.0;
    if (p == 2.0) {
        for (const cplx& v : field.values)
            sum += std::norm(v);
        return std::sqrt(hd * sum);
    }
    if (p == 1.0) {
        for (const cplx& v : field.values)
            sum += std::abs(v);
        return hd * sum;
    }
    for (const cplx& v : field.values)
        sum += std::pow(std::abs(v), p);
    return std::pow(hd * sum, 1.0 / p);
}

double sup_norm(const ComplexField& field) {
    return lp_norm(field, std::numeric_limits<double>::infinity());
}

double sobolev_norm(const SpectralField& spectral, double s) {
    check_same_grid_size(spectral.grid, spectral.coefficients.size(), "sobolev_norm");
    if (s < 0.0)
        throw std::invalid_argument("sobolev_norm: negative order");
    const int d = spectral.grid.dimension;
    const int n = spectral.grid.points_per_axis;
    const auto xi = spectral.grid.axis_wavenumbers();

    double sum = 0.0;
    int k[3];
    for (std::size_t i = 0; i < spectral.coefficients.size(); ++i) {
        axis_indices(i, d, n, k);
        double xi2 = 0.0;
        for (int axis = 0; axis < d; ++axis)
            xi2 += xi[k[axis]] * xi[k[axis]];
        sum += std::pow(1.0 + xi2, s) * std::norm(spectral.coefficients[i]);
    }
    return std::sqrt(sum / spectral.grid.box_volume());
}

double sobolev_norm(const ComplexField& field, double s) {
    return sobolev_norm(forward_transform(field), s);
}

double l2_norm(const SpectralField& spectral) {
    double sum = 0.0;
    for (const cplx& c : spectral.coefficients)
        sum += std::norm(c);
    return std::sqrt(sum / spectral.grid.box_volume());
}

double dk_l2_norm(const SpectralField& spectral, double k_order) {
    check_same_grid_size(spectral.grid, spectral.coefficients.size(), "dk_l2_norm");
    if (k_order < 0.0)
        throw std::invalid_argument("dk_l2_norm: negative order");
    const int d = spectral.grid.dimension;
    const int n = spectral.grid.points_per_axis;
    const auto xi = spectral.grid.axis_wavenumbers();

    double sum = 0.0;
    int k[3];
    for (std::size_t i = 0; i < spectral.coefficients.size(); ++i) {
        axis_indices(i, d, n, k);
        double xi2 = 0.0;
        for (int axis = 0; axis < d; ++axis)
            xi2 += xi[k[axis]] * xi[k[axis]];
        const double weight = (k_order == 0.0) ? 1.0 : std::pow(xi2, k_order);
        sum += weight * std::norm(spectral.coefficients[i]);
    }
    return std::sqrt(sum / spectral.grid.box_volume());
}

double boundary_mass_fraction(const ComplexField& field, double shell) {
    check_same_grid_size(field.grid, field.values.size(), "boundary_mass_fraction");
    const int d = field.grid.dimension;
    const int n = field.grid.points_per_axis;
    const double edge = (1.0 - shell) * field.grid.half_length;
    const auto x = field.grid.axis_coordinates();

    std::vector<char> in_shell(n);
    for (int m = 0; m < n; ++m)
        in_shell[m] = std::abs(x[m]) >= edge - 1e-12 * field.grid.half_length;

    double total = 0.0, boundary = 0.0;
    int k[3];
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const double m2 = std::norm(field.values[i]);
        total += m2;
        axis_indices(i, d, n, k);
        for (int axis = 0; axis < d; ++axis) {
            if (in_shell[k[axis]]) {
                boundary += m2;
                break;
            }
        }
    }
    return (total > 0.0) ? boundary / total : 0.0;
}

double SeededNormal::operator()() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on the standardized raw mt19937_64 stream: bit-reproducible
    // across standard library implementations, unlike std::normal_distribution.
    const double u1 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

ComplexField random_band_limited(const GridSpec& grid, int max_mode,
                                 std::uint64_t seed, double envelope_sigma) {
    const int d = grid.dimension;
    const int n = grid.points_per_axis;
    if (max_mode < 1 || 2 * max_mode >= n)
        throw std::invalid_argument("random_band_limited: max_mode out of range");

    SeededNormal normal(seed);
    SpectralField spectral{grid, std::vector<cplx>(grid.total_points(), cplx(0.0, 0.0))};
    int k[3];
    for (std::size_t i = 0; i < spectral.coefficients.size(); ++i) {
        axis_indices(i, d, n, k);
        bool in_band = true;
        for (int axis = 0; axis < d; ++axis) {
            const int j = (k[axis] < n / 2) ? k[axis] : k[axis] - n;
            if (std::abs(j) > max_mode) in_band = false;
        }
        if (in_band)
            spectral.coefficients[i] = cplx(normal(), normal());
    }

    ComplexField field = inverse_transform(spectral);
    if (envelope_sigma > 0.0) {
        const auto x = grid.axis_coordinates();
        const double two_sigma2 = 2.0 * envelope_sigma * envelope_sigma;
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            axis_indices(i, d, n, k);
            double r2 = 0.0;
            for (int axis = 0; axis < d; ++axis)
                r2 += x[k[axis]] * x[k[axis]];
            field.values[i] *= std::exp(-r2 / two_sigma2);
        }
    }
    return field;
}

} // namespace hartree
