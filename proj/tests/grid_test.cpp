// Transform-layer tests against closed forms: the continuum gaussian Fourier
// transform, Parseval, norm identities for plane waves and gaussians, and the
// documented behavior of the seeded corpus generator.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hartree/grid.hpp"

#include <cmath>
#include <complex>

using namespace hartree;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Index of per-axis mode j in transform storage order.
int mode_slot(int j, int n) { return j >= 0 ? j : j + n; }
} // namespace

TEST_CASE("gaussian forward transform matches the continuum closed form") {
    const GridSpec grid = make_grid(1, 256, 16.0);
    const double sigma = 1.5, amplitude = 0.8;
    const ComplexField u = sample(grid, gaussian_spec(amplitude, sigma));
    const SpectralField u_hat = forward_transform(u);
    const std::vector<double> xi = grid.axis_wavenumbers();

    // u_hat(xi) = A (2 pi)^{1/2} sigma e^{-sigma^2 xi^2 / 2}
    for (int j = -20; j <= 20; ++j) {
        const int slot = mode_slot(j, grid.points_per_axis);
        const double expected = amplitude * std::sqrt(2.0 * kPi) * sigma *
                                std::exp(-0.5 * sigma * sigma * xi[slot] * xi[slot]);
        CHECK(std::abs(u_hat.coefficients[slot] - cplx(expected, 0.0)) <= 1e-10);
    }
}

TEST_CASE("gaussian transform closed form holds in d = 2") {
    const GridSpec grid = make_grid(2, 64, 12.0);
    const double sigma = 1.2;
    const ComplexField u = sample(grid, gaussian_spec(1.0, sigma));
    const SpectralField u_hat = forward_transform(u);
    const std::vector<double> xi = grid.axis_wavenumbers();
    const int n = grid.points_per_axis;
    for (int jx : {-3, 0, 2}) {
        for (int jy : {-1, 0, 4}) {
            const int slot = mode_slot(jx, n) * n + mode_slot(jy, n);
            const double xi2 = xi[mode_slot(jx, n)] * xi[mode_slot(jx, n)] +
                               xi[mode_slot(jy, n)] * xi[mode_slot(jy, n)];
            const double expected = 2.0 * kPi * sigma * sigma * std::exp(-0.5 * sigma * sigma * xi2);
            CHECK(std::abs(u_hat.coefficients[slot] - cplx(expected, 0.0)) <= 1e-9);
        }
    }
}

TEST_CASE("Parseval identity and transform roundtrip") {
    const GridSpec grid = make_grid(2, 32, 8.0);
    const ComplexField f = random_band_limited(grid, 9, 12345, 0.0);
    const SpectralField f_hat = forward_transform(f);

    double physical = 0.0;
    for (const cplx& v : f.values)
        physical += std::norm(v);
    physical *= grid.cell_volume();
    double spectral = 0.0;
    for (const cplx& c : f_hat.coefficients)
        spectral += std::norm(c);
    spectral /= grid.box_volume();
    CHECK(physical == doctest::Approx(spectral).epsilon(1e-12));

    const ComplexField back = inverse_transform(f_hat);
    double max_err = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        max_err = std::max(max_err, std::abs(back.values[i] - f.values[i]));
        max_abs = std::max(max_abs, std::abs(f.values[i]));
    }
    CHECK(max_err <= 1e-12 * max_abs);
}

TEST_CASE("L1 norm of the d = 3 unit gaussian matches (2 pi)^{3/2}") {
    const GridSpec grid = make_grid(3, 48, 12.0);
    const ComplexField u = sample(grid, gaussian_spec(1.0, 1.0));
    CHECK(lp_norm(u, 1.0) == doctest::Approx(15.749609945722415).epsilon(1e-7));
}

TEST_CASE("norms of a plane wave against closed forms") {
    const GridSpec grid = make_grid(1, 128, 16.0);
    AnalyticSpec spec;
    AnalyticTerm term;
    term.family = "plane_wave";
    term.amplitude = 2.0;
    term.wavevector = {8.0 * kPi / grid.half_length, 0.0, 0.0};
    spec.terms.push_back(term);
    const ComplexField f = sample(grid, spec);

    const double l2 = 2.0 * std::sqrt(grid.box_volume());
    const double xi0 = term.wavevector[0];
    CHECK(lp_norm(f, 2.0) == doctest::Approx(l2).epsilon(1e-12));
    CHECK(sup_norm(f) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lp_norm(f, 1.0) == doctest::Approx(2.0 * grid.box_volume()).epsilon(1e-12));
    for (double s : {0.0, 1.0, 2.0}) {
        const double expected = std::pow(1.0 + xi0 * xi0, 0.5 * s) * l2;
        CHECK(sobolev_norm(f, s) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(dk_l2_norm(forward_transform(f), 2.0) ==
          doctest::Approx(xi0 * xi0 * l2).epsilon(1e-12));
}

TEST_CASE("power multiplier realizes -Laplace on a gaussian") {
    const GridSpec grid = make_grid(1, 512, 16.0);
    const ComplexField g = sample(grid, gaussian_spec(1.0, 1.0));
    const ComplexField lap =
        inverse_transform(apply_multiplier(forward_transform(g), SymbolSpec::power(2.0)));
    // For g = e^{-x^2/2}:  -g'' = (1 - x^2) g.
    const std::vector<double> xs = grid.axis_coordinates();
    double max_err = 0.0;
    for (int m = 0; m < grid.points_per_axis; ++m) {
        const double expected = (1.0 - xs[m] * xs[m]) * std::exp(-0.5 * xs[m] * xs[m]);
        max_err = std::max(max_err, std::abs(lap.values[m] - cplx(expected, 0.0)));
    }
    CHECK(max_err <= 1e-8);
}

TEST_CASE("free-flow multiplier reproduces the dispersed gaussian") {
    const GridSpec grid = make_grid(1, 1024, 64.0);
    const double sigma = 2.0, t = 0.7;
    const ComplexField u0 = sample(grid, gaussian_spec(1.0, sigma));
    const ComplexField ut =
        inverse_transform(apply_multiplier(forward_transform(u0), SymbolSpec::free_flow(t)));

    // u(t, x) = (sigma^2 / (sigma^2 + 2 i t))^{1/2} e^{-x^2 / (2 (sigma^2 + 2 i t))}
    const cplx denom(sigma * sigma, 2.0 * t);
    const cplx prefactor = std::sqrt(cplx(sigma * sigma, 0.0) / denom);
    const std::vector<double> xs = grid.axis_coordinates();
    double max_err = 0.0;
    for (int m = 0; m < grid.points_per_axis; ++m) {
        const cplx expected = prefactor * std::exp(-xs[m] * xs[m] / (2.0 * denom));
        max_err = std::max(max_err, std::abs(ut.values[m] - expected));
    }
    CHECK(max_err <= 1e-10);

    // |t|^{d/2} ||u(t)||_inf = sigma / R(t)^{1/2} * t^{1/2} with R = sqrt(sigma^4 + 4 t^2).
    const double R = std::sqrt(std::pow(sigma, 4.0) + 4.0 * t * t);
    CHECK(sup_norm(ut) == doctest::Approx(sigma / std::sqrt(R)).epsilon(1e-10));
}

TEST_CASE("axis wavenumbers come in transform storage order") {
    const GridSpec grid = make_grid(1, 8, kPi);
    const std::vector<double> xi = grid.axis_wavenumbers();
    const double expected[8] = {0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0};
    REQUIRE(xi.size() == 8);
    for (int k = 0; k < 8; ++k)
        CHECK(xi[k] == doctest::Approx(expected[k]).epsilon(1e-15));
}

TEST_CASE("boundary mass fraction flags edge concentration") {
    const GridSpec grid = make_grid(1, 64, 8.0);
    ComplexField centered{grid, std::vector<cplx>(64, cplx(0.0, 0.0))};
    centered.values[32] = 1.0; // x = 0
    CHECK(boundary_mass_fraction(centered) == doctest::Approx(0.0));

    ComplexField edge{grid, std::vector<cplx>(64, cplx(0.0, 0.0))};
    edge.values[0] = 1.0; // x = -L, inside the outer 10% shell
    CHECK(boundary_mass_fraction(edge) == doctest::Approx(1.0));
}

TEST_CASE("two-thirds filter empties the top of the spectrum only") {
    const GridSpec grid = make_grid(1, 48, 6.0);
    const ComplexField f = random_band_limited(grid, 23, 777, 0.0);
    const SpectralField filtered =
        apply_multiplier(forward_transform(f), SymbolSpec::two_thirds_filter());
    const SpectralField raw = forward_transform(f);
    for (int k = 0; k < 48; ++k) {
        const int j = k < 24 ? k : k - 48;
        if (std::abs(j) > 16)
            CHECK(std::abs(filtered.coefficients[k]) == 0.0);
        else
            CHECK(std::abs(filtered.coefficients[k] - raw.coefficients[k]) <= 1e-14);
    }
}

TEST_CASE("seeded corpus generator is reproducible and band-limited") {
    const GridSpec grid = make_grid(1, 128, 16.0);
    const ComplexField a = random_band_limited(grid, 10, 42, 0.0);
    const ComplexField b = random_band_limited(grid, 10, 42, 0.0);
    const ComplexField c = random_band_limited(grid, 10, 43, 0.0);
    double same = 0.0, other = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        same = std::max(same, std::abs(a.values[i] - b.values[i]));
        other = std::max(other, std::abs(a.values[i] - c.values[i]));
    }
    CHECK(same == 0.0);
    CHECK(other > 1e-3);

    const SpectralField a_hat = forward_transform(a);
    double top = 0.0;
    for (int k = 0; k < 128; ++k) {
        const int j = k < 64 ? k : k - 128;
        if (std::abs(j) > 10)
            top = std::max(top, std::abs(a_hat.coefficients[k]));
    }
    CHECK(top <= 1e-11 * sup_norm(a));

    // Envelope concentrates the field away from the box edge.
    const ComplexField enveloped = random_band_limited(grid, 10, 42, 2.0);
    CHECK(boundary_mass_fraction(enveloped) <= 1e-8);
}

TEST_CASE("gaussian normal generator: reproducibility and moments") {
    SeededNormal g1(7), g2(7), g3(8);
    bool matched = true, distinct = false;
    for (int i = 0; i < 20; ++i) {
        const double x = g1();
        matched = matched && (x == g2());
        distinct = distinct || (x != g3());
    }
    CHECK(matched);
    CHECK(distinct);

    SeededNormal g(123);
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = g();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) <= 0.03);
    CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("grid and sampling preconditions are enforced") {
    CHECK_THROWS_AS(make_grid(0, 64, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 64, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 63, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 4, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 64, 0.0), std::invalid_argument);

    const GridSpec grid = make_grid(1, 64, 8.0);
    AnalyticSpec bad;
    AnalyticTerm term;
    term.family = "vortex";
    bad.terms.push_back(term);
    CHECK_THROWS_AS(sample(grid, bad), std::invalid_argument);
    CHECK_THROWS_AS(sample(grid, gaussian_spec(1.0, 0.0)), std::invalid_argument);

    const ComplexField f = sample(grid, gaussian_spec(1.0, 1.0));
    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(sobolev_norm(f, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_multiplier(forward_transform(f), SymbolSpec::power(-2.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(random_band_limited(grid, 64, 1, 0.0), std::invalid_argument);
}
