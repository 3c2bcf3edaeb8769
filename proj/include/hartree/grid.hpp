#ifndef HARTREE_GRID_HPP
#define HARTREE_GRID_HPP

// Periodic-box discretization, discrete Fourier transforms, Fourier-multiplier
// operators, and norm computations.
//
// Transform convention (frozen; every dispersive-constant check depends on it):
// the box is [-L, L)^d sampled at x_m = -L + m*h, h = 2L/n, and the forward
// transform approximates the continuum integral transform
//
//     f_hat(xi) = \int f(x) e^{-i xi.x} dx      via
//     u_hat[k]  = h^d * (-1)^{k_1+...+k_d} * DFT[f][k],
//
// where DFT is the unnormalized forward FFT and xi_j = (pi/L)*j with
// j in {-n/2, ..., n/2-1} stored in standard FFT order (j = k for k < n/2,
// j = k - n otherwise).  The (-1)^{sum k} factor carries the e^{-i xi.(-L)}
// phase of the box origin.  The inverse is
//
//     f[m] = (2L)^{-d} * sum_k u_hat[k] e^{i xi_k . x_m},
//
// so -Laplace has symbol |xi|^2, D^k = (-Laplace)^{k/2} has symbol |xi|^k,
// and Parseval reads  h^d sum |f|^2 = (2L)^{-d} sum |u_hat|^2.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hartree {

using cplx = std::complex<double>;

struct GridSpec {
    int dimension = 1;        // d in {1, 2, 3}
    int points_per_axis = 8;  // even, >= 8
    double half_length = 1.0; // L; box is [-L, L)^d

    double spacing() const { return 2.0 * half_length / points_per_axis; }
    std::size_t total_points() const;
    double cell_volume() const;  // h^d
    double box_volume() const;   // (2L)^d

    // Per-axis wavenumbers xi_j = (pi/L) j in transform storage order.
    std::vector<double> axis_wavenumbers() const;
    // Per-axis coordinates x_m = -L + m h.
    std::vector<double> axis_coordinates() const;

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int dimension, int points_per_axis, double half_length);

struct ComplexField {
    GridSpec grid;
    std::vector<cplx> values; // row-major over axes, length n^d
};

struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coefficients; // transform storage order, length n^d
};

// ---------------------------------------------------------------------------
// Closed-form sampling families.

struct AnalyticTerm {
    // "gaussian":  amplitude * e^{i k.x} * e^{-|x - center|^2 / (2 width^2)}
    // "plane_wave": amplitude * e^{i k.x}
    // "constant":  amplitude
    std::string family = "gaussian";
    cplx amplitude = 1.0;
    double width = 1.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> wavevector{0.0, 0.0, 0.0};
};

struct AnalyticSpec {
    std::vector<AnalyticTerm> terms; // pointwise sum
};

AnalyticSpec gaussian_spec(double amplitude, double width);

ComplexField sample(const GridSpec& grid, const AnalyticSpec& spec);

// ---------------------------------------------------------------------------
// Transforms.

SpectralField forward_transform(const ComplexField& field);
ComplexField inverse_transform(const SpectralField& spectral);

// ---------------------------------------------------------------------------
// Fourier multipliers.

struct SymbolSpec {
    enum class Kind {
        power,            // |xi|^s, s >= 0 (s = 0 gives the identity)
        bessel,           // (1 + |xi|^2)^{s/2}
        free_flow,        // e^{-i t |xi|^2}
        two_thirds_filter // zero modes with any axis |j| > n/3
    };
    Kind kind = Kind::power;
    double order = 0.0; // s
    double time = 0.0;  // t

    static SymbolSpec power(double s);
    static SymbolSpec bessel(double s);
    static SymbolSpec free_flow(double t);
    static SymbolSpec two_thirds_filter();
};

SpectralField apply_multiplier(const SpectralField& spectral, const SymbolSpec& symbol);

// ---------------------------------------------------------------------------
// Norms.  lp_norm uses the rectangle rule (spectrally accurate for smooth
// periodic integrands, exact for p = 2 by Parseval); p = infinity is the grid
// max, a lower bound of the true sup for band-limited fields.

double lp_norm(const ComplexField& field, double p);
double sup_norm(const ComplexField& field); // lp_norm(field, inf)

// H^s norm  ||(1+|xi|^2)^{s/2} f_hat||_2  in the discrete convention.
double sobolev_norm(const ComplexField& field, double s);
double sobolev_norm(const SpectralField& spectral, double s);

// Spectral-side L^2 and homogeneous ||D^k f||_2 = |||xi|^k f_hat||_2.
double l2_norm(const SpectralField& spectral);
double dk_l2_norm(const SpectralField& spectral, double k);

// Fraction of the discrete mass h^d |f|^2 carried by points whose coordinate
// lies in the outermost `shell` fraction of [-L, L) on any axis.
double boundary_mass_fraction(const ComplexField& field, double shell = 0.1);

// ---------------------------------------------------------------------------
// Seeded random fields (portable: raw mt19937_64 + Box-Muller, so corpora are
// bit-reproducible across standard libraries).

struct SeededNormal {
    explicit SeededNormal(std::uint64_t seed) : rng_(seed) {}
    double operator()();

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Random field with complex gaussian coefficients on modes |j| <= max_mode per
// axis (top of the spectrum empty), optionally multiplied in physical space by
// a centered gaussian envelope (envelope_sigma > 0).
ComplexField random_band_limited(const GridSpec& grid, int max_mode,
                                 std::uint64_t seed, double envelope_sigma = 0.0);

} // namespace hartree

#endif
