#ifndef HARTREE_PHYSICS_HPP
#define HARTREE_PHYSICS_HPP

// Model specification for  i du/dt = -Laplace u + V u + (w * |u|^2) u  and its
// local cubic variant  +/- |u|^2 u:  external potentials V, interaction
// potentials w (including the mollifier family w_n(x) = n^d w(n x)), the
// energy functional, and the equation's right-hand side.

#include "hartree/grid.hpp"

namespace hartree {

struct PotentialSpec {
    enum class Family { zero, gaussian_well, smooth_lattice };
    Family family = Family::zero;
    double depth = 0.0;              // may be negative
    double width = 1.0;              // sigma_V for gaussian_well
    double lattice_wavevector = 0.0; // kappa for smooth_lattice: depth * sum_i cos(kappa x_i)

    static PotentialSpec zero();
    static PotentialSpec gaussian_well(double depth, double width);
    static PotentialSpec smooth_lattice(double depth, double kappa);

    bool is_zero() const { return family == Family::zero || depth == 0.0; }
};

struct InteractionSpec {
    // none:               w = 0 (linear equation)
    // gaussian:           w(x) = total_mass (2 pi width^2)^{-d/2} e^{-|x|^2/(2 width^2)}
    // mollified_gaussian: w_n(x) = n^d w(n x) with n = mollifier_index
    // cubic:              local +/- |u|^2 u with sign = cubic_sign (w formally +/- delta)
    enum class Family { none, gaussian, mollified_gaussian, cubic };
    Family family = Family::none;
    double total_mass = 0.0; // lambda = integral of w, signed
    double width = 1.0;      // sigma_w
    int mollifier_index = 1; // n >= 1
    double cubic_sign = 1.0; // +1 defocusing, -1 focusing

    static InteractionSpec none();
    static InteractionSpec gaussian(double total_mass, double width);
    static InteractionSpec mollified_gaussian(double total_mass, double width, int index);
    static InteractionSpec cubic(double sign);

    bool is_none() const { return family == Family::none || (family != Family::cubic && total_mass == 0.0); }
    bool is_cubic() const { return family == Family::cubic; }
    // ||w||_1 (= |total_mass| for the nonnegative gaussian families; 1 for the
    // cubic mode's formal delta).
    double l1_mass() const;
};

struct ModelSpec {
    GridSpec grid;
    PotentialSpec potential;
    InteractionSpec interaction;
    int sobolev_index = 2; // k: even, > dimension/2
};

// sobolev_index <= 0 selects the default: the smallest even k > d/2 (k = 2 for
// every implemented dimension).
ModelSpec make_model(const GridSpec& grid, const PotentialSpec& potential,
                     const InteractionSpec& interaction, int sobolev_index = 0);

// Samples of V on the grid; imaginary parts exactly zero.
ComplexField realize_potential(const PotentialSpec& spec, const GridSpec& grid);

// Real-valued V as a plain array (the representation the propagator uses).
std::vector<double> potential_values(const PotentialSpec& spec, const GridSpec& grid);

// The interaction symbol w_hat(xi) on the wavenumber lattice, from the
// closed-form gaussian transform  w_hat(xi) = total_mass e^{-(width/n)^2 |xi|^2 / 2}.
// Refuses unresolved mollifiers (width/index < 4h).
std::vector<double> interaction_symbol(const InteractionSpec& spec, const GridSpec& grid);

// w * |u|^2 computed spectrally (or +/- |u|^2 in cubic mode); the result is
// real-valued up to roundoff: ||Im|| <= 1e-12 ||u||_inf^2.
ComplexField hartree_term(const ComplexField& u, const InteractionSpec& interaction,
                          const GridSpec& grid);

// du/dt = -i (-Laplace u + V u + (w * |u|^2) u).
ComplexField rhs(const ComplexField& u, const ModelSpec& model);

// E(u) = ||grad u||_2^2 + int V |u|^2 + 1/2 int (w * |u|^2) |u|^2
// (cubic mode: 1/2 int (+/-) |u|^4).
double energy(const ComplexField& u, const ModelSpec& model);

double mass(const ComplexField& u); // ||u||_2

} // namespace hartree

#endif
