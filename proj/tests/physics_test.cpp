// Model-layer tests: potential realizations, the interaction symbol and its
// mollifier scaling, the convolution nonlinearity against a gaussian closed
// form and Young's inequality, the energy functional, and the equation RHS.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hartree/grid.hpp"
#include "hartree/physics.hpp"

#include <cmath>
#include <complex>

using namespace hartree;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("potential realizations match their defining formulas") {
    const GridSpec grid = make_grid(1, 64, 8.0);
    const std::vector<double> xs = grid.axis_coordinates();

    const ComplexField well = realize_potential(PotentialSpec::gaussian_well(-0.3, 1.5), grid);
    const ComplexField lattice = realize_potential(PotentialSpec::smooth_lattice(0.2, kPi / 4.0), grid);
    const ComplexField none = realize_potential(PotentialSpec::zero(), grid);
    for (int m = 0; m < grid.points_per_axis; ++m) {
        CHECK(well.values[m].real() ==
              doctest::Approx(-0.3 * std::exp(-xs[m] * xs[m] / (2.0 * 1.5 * 1.5))).epsilon(1e-14));
        CHECK(lattice.values[m].real() ==
              doctest::Approx(0.2 * std::cos(kPi / 4.0 * xs[m])).epsilon(1e-14));
        CHECK(well.values[m].imag() == 0.0);
        CHECK(none.values[m] == cplx(0.0, 0.0));
    }

    const GridSpec grid2 = make_grid(2, 16, 4.0);
    const ComplexField well2 = realize_potential(PotentialSpec::gaussian_well(1.0, 2.0), grid2);
    const std::vector<double> xs2 = grid2.axis_coordinates();
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
            const double r2 = xs2[a] * xs2[a] + xs2[b] * xs2[b];
            CHECK(well2.values[static_cast<std::size_t>(a) * 16 + b].real() ==
                  doctest::Approx(std::exp(-r2 / 8.0)).epsilon(1e-14));
        }
}

TEST_CASE("interaction symbol: gaussian closed form and mollifier scaling") {
    const GridSpec grid = make_grid(1, 256, 16.0);
    const std::vector<double> xi = grid.axis_wavenumbers();

    const auto base = interaction_symbol(InteractionSpec::gaussian(0.7, 1.25), grid);
    for (int k = 0; k < 256; ++k)
        CHECK(base[k] ==
              doctest::Approx(0.7 * std::exp(-0.5 * 1.25 * 1.25 * xi[k] * xi[k])).epsilon(1e-14));

    // w_n(x) = n^d w(n x) has symbol w_hat(xi / n): doubling the index is the
    // same as halving the width.
    const auto mollified = interaction_symbol(InteractionSpec::mollified_gaussian(0.7, 1.25, 2), grid);
    const auto halved = interaction_symbol(InteractionSpec::gaussian(0.7, 0.625), grid);
    for (int k = 0; k < 256; ++k)
        CHECK(mollified[k] == doctest::Approx(halved[k]).epsilon(1e-14));

    // Every mollifier preserves the total mass: symbol value 1 * lambda at xi = 0.
    CHECK(mollified[0] == doctest::Approx(0.7).epsilon(1e-15));

    const auto none = interaction_symbol(InteractionSpec::none(), grid);
    for (int k = 0; k < 256; ++k)
        CHECK(none[k] == 0.0);
}

TEST_CASE("interaction symbol rejects unresolved mollifiers and the cubic mode") {
    const GridSpec grid = make_grid(1, 512, 24.0); // h = 0.09375
    CHECK_NOTHROW(interaction_symbol(InteractionSpec::mollified_gaussian(1.0, 2.5, 6), grid));
    CHECK_THROWS_AS(interaction_symbol(InteractionSpec::mollified_gaussian(1.0, 2.5, 32), grid),
                    std::invalid_argument);
    CHECK_THROWS_AS(interaction_symbol(InteractionSpec::cubic(1.0), grid),
                    std::invalid_argument);
    CHECK_THROWS_AS(interaction_symbol(InteractionSpec::gaussian(1.0, -2.0), grid),
                    std::invalid_argument);
}

TEST_CASE("l1 mass of the interaction families") {
    CHECK(InteractionSpec::gaussian(0.1, 2.0).l1_mass() == 0.1);
    CHECK(InteractionSpec::gaussian(-0.3, 2.0).l1_mass() == 0.3);
    CHECK(InteractionSpec::mollified_gaussian(0.5, 1.0, 8).l1_mass() == 0.5);
    CHECK(InteractionSpec::cubic(-1.0).l1_mass() == 1.0);
    CHECK(InteractionSpec::none().l1_mass() == 0.0);
}

TEST_CASE("convolution nonlinearity matches the gaussian-by-gaussian closed form") {
    const GridSpec grid = make_grid(1, 512, 24.0);
    const double sigma_u = 1.5, sigma_w = 2.0, lambda = 0.5;
    const ComplexField u = sample(grid, gaussian_spec(1.0, sigma_u));
    const ComplexField conv = hartree_term(u, InteractionSpec::gaussian(lambda, sigma_w), grid);

    // |u|^2 is a gaussian of variance s^2 = sigma_u^2 / 2; convolving with the
    // mass-lambda gaussian of variance sigma_w^2 gives
    //   lambda (s^2 / (sigma_w^2 + s^2))^{1/2} e^{-x^2 / (2 (sigma_w^2 + s^2))}.
    const double s2 = 0.5 * sigma_u * sigma_u;
    const double v2 = sigma_w * sigma_w + s2;
    const double prefactor = lambda * std::sqrt(s2 / v2);
    const std::vector<double> xs = grid.axis_coordinates();
    double max_err = 0.0;
    for (int m = 0; m < grid.points_per_axis; ++m) {
        const double expected = prefactor * std::exp(-xs[m] * xs[m] / (2.0 * v2));
        max_err = std::max(max_err, std::abs(conv.values[m] - cplx(expected, 0.0)));
    }
    CHECK(max_err <= 1e-8);
    CHECK(prefactor == doctest::Approx(0.23426064283290909).epsilon(1e-14));

    // Cubic mode: the term is the pointwise sign * |u|^2.
    const ComplexField cubic = hartree_term(u, InteractionSpec::cubic(-1.0), grid);
    for (int m = 0; m < grid.points_per_axis; m += 37)
        CHECK(cubic.values[m].real() ==
              doctest::Approx(-std::norm(u.values[m])).epsilon(1e-14));
}

TEST_CASE("convolution nonlinearity obeys Young's inequality on a random corpus") {
    const GridSpec grid = make_grid(2, 48, 8.0);
    const InteractionSpec w = InteractionSpec::gaussian(0.8, 2.0); // width > 4h = 4/3
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const ComplexField u = random_band_limited(grid, 12, seed, 0.0);
        const ComplexField conv = hartree_term(u, w, grid);
        double conv_sup = 0.0, imag_sup = 0.0;
        for (const cplx& v : conv.values) {
            conv_sup = std::max(conv_sup, std::abs(v));
            imag_sup = std::max(imag_sup, std::abs(v.imag()));
        }
        const double bound = w.l1_mass() * sup_norm(u) * sup_norm(u);
        CHECK(conv_sup <= bound * (1.0 + 1e-8));
        CHECK(imag_sup <= 1e-12 * sup_norm(u) * sup_norm(u));
    }
}

TEST_CASE("energy: quadratic and quartic parts scale as amplitude^2 and amplitude^4") {
    const GridSpec grid = make_grid(1, 256, 16.0);
    const PotentialSpec V = PotentialSpec::gaussian_well(-0.4, 1.2);
    const InteractionSpec w = InteractionSpec::gaussian(0.6, 1.5);
    const ModelSpec full = make_model(grid, V, w);
    const ModelSpec linear = make_model(grid, V, InteractionSpec::none());

    const ComplexField u = sample(grid, gaussian_spec(1.0, 1.5));
    ComplexField u2 = u;
    for (cplx& v : u2.values)
        v *= 2.0;

    const double e_lin = energy(u, linear);
    const double quartic = energy(u, full) - e_lin;
    CHECK(energy(u2, full) ==
          doctest::Approx(4.0 * e_lin + 16.0 * quartic).epsilon(1e-10));
}

TEST_CASE("free kinetic energy of the unit gaussian equals sqrt(pi)/(2 sigma)") {
    const GridSpec grid = make_grid(1, 512, 24.0);
    const ModelSpec free_model =
        make_model(grid, PotentialSpec::zero(), InteractionSpec::none());
    const ComplexField u = sample(grid, gaussian_spec(1.0, 1.5));
    CHECK(energy(u, free_model) == doctest::Approx(0.59081795030183859).epsilon(1e-8));
    CHECK(mass(u) == doctest::Approx(lp_norm(u, 2.0)).epsilon(1e-15));
}

TEST_CASE("RHS is linear when the interaction is off") {
    const GridSpec grid = make_grid(1, 128, 12.0);
    const ModelSpec model =
        make_model(grid, PotentialSpec::gaussian_well(-0.2, 1.0), InteractionSpec::none());
    const ComplexField f = random_band_limited(grid, 20, 5, 0.0);
    const ComplexField g = random_band_limited(grid, 20, 6, 0.0);
    ComplexField combo = f;
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = cplx(2.0, -1.0) * f.values[i] + cplx(0.0, 3.0) * g.values[i];

    const ComplexField rf = rhs(f, model);
    const ComplexField rg = rhs(g, model);
    const ComplexField rc = rhs(combo, model);
    double max_err = 0.0;
    for (std::size_t i = 0; i < rc.values.size(); ++i)
        max_err = std::max(max_err, std::abs(rc.values[i] - cplx(2.0, -1.0) * rf.values[i] -
                                             cplx(0.0, 3.0) * rg.values[i]));
    CHECK(max_err <= 1e-12 * (sup_norm(rf) + sup_norm(rg)));
}

TEST_CASE("RHS on a plane wave in the free model is -i |xi|^2 u") {
    const GridSpec grid = make_grid(1, 64, 8.0);
    AnalyticSpec spec;
    AnalyticTerm term;
    term.family = "plane_wave";
    term.amplitude = 1.5;
    term.wavevector = {3.0 * kPi / grid.half_length, 0.0, 0.0};
    spec.terms.push_back(term);
    const ComplexField u = sample(grid, spec);
    const ModelSpec model = make_model(grid, PotentialSpec::zero(), InteractionSpec::none());
    const ComplexField r = rhs(u, model);
    const double xi2 = term.wavevector[0] * term.wavevector[0];
    double max_err = 0.0;
    for (std::size_t i = 0; i < r.values.size(); ++i)
        max_err = std::max(max_err, std::abs(r.values[i] - cplx(0.0, -xi2) * u.values[i]));
    CHECK(max_err <= 1e-12 * xi2);
}

TEST_CASE("model construction validates the Sobolev index") {
    const GridSpec grid = make_grid(3, 16, 4.0);
    const ModelSpec defaulted =
        make_model(grid, PotentialSpec::zero(), InteractionSpec::none());
    CHECK(defaulted.sobolev_index == 2);
    CHECK_NOTHROW(make_model(grid, PotentialSpec::zero(), InteractionSpec::none(), 4));
    CHECK_THROWS_AS(make_model(grid, PotentialSpec::zero(), InteractionSpec::none(), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        make_model(grid, PotentialSpec::gaussian_well(-1.0, 0.0), InteractionSpec::none()),
        std::invalid_argument);
}
