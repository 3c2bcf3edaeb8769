#include "hartree/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace hartree {

namespace {

inline void axis_indices(std::size_t flat, int d, int n, int k[3]) {
    k[2] = k[1] = k[0] = 0;
    for (int axis = d - 1; axis >= 0; --axis) {
        k[axis] = static_cast<int>(flat % n);
        flat /= n;
    }
}

} // namespace

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::gaussian_well(double depth, double width) {
    PotentialSpec spec;
    spec.family = Family::gaussian_well;
    spec.depth = depth;
    spec.width = width;
    return spec;
}

PotentialSpec PotentialSpec::smooth_lattice(double depth, double kappa) {
    PotentialSpec spec;
    spec.family = Family::smooth_lattice;
    spec.depth = depth;
    spec.lattice_wavevector = kappa;
    return spec;
}

InteractionSpec InteractionSpec::none() { return InteractionSpec{}; }

InteractionSpec InteractionSpec::gaussian(double total_mass, double width) {
    InteractionSpec spec;
    spec.family = Family::gaussian;
    spec.total_mass = total_mass;
    spec.width = width;
    return spec;
}

InteractionSpec InteractionSpec::mollified_gaussian(double total_mass, double width, int index) {
    InteractionSpec spec;
    spec.family = Family::mollified_gaussian;
    spec.total_mass = total_mass;
    spec.width = width;
    spec.mollifier_index = index;
    return spec;
}

InteractionSpec InteractionSpec::cubic(double sign) {
    InteractionSpec spec;
    spec.family = Family::cubic;
    spec.cubic_sign = (sign < 0.0) ? -1.0 : 1.0;
    return spec;
}

double InteractionSpec::l1_mass() const {
    if (family == Family::none) return 0.0;
    if (family == Family::cubic) return 1.0; // formal ||delta||_1
    return std::abs(total_mass);
}

ModelSpec make_model(const GridSpec& grid, const PotentialSpec& potential,
                     const InteractionSpec& interaction, int sobolev_index) {
    int k = sobolev_index;
    if (k <= 0) {
        // Smallest even number strictly above d/2.
        k = 2;
        while (2 * k <= grid.dimension) k += 2;
    }
    if (k % 2 != 0 || 2 * k <= grid.dimension)
        throw std::invalid_argument("make_model: sobolev index must be even and > d/2");
    if (potential.family == PotentialSpec::Family::gaussian_well && !(potential.width > 0.0))
        throw std::invalid_argument("make_model: potential width must be positive");
    return ModelSpec{grid, potential, interaction, k};
}

std::vector<double> potential_values(const PotentialSpec& spec, const GridSpec& grid) {
    const int d = grid.dimension;
    const int n = grid.points_per_axis;
    std::vector<double> values(grid.total_points(), 0.0);
    if (spec.family == PotentialSpec::Family::zero || spec.depth == 0.0)
        return values;
    if (spec.family == PotentialSpec::Family::gaussian_well && !(spec.width > 0.0))
        throw std::invalid_argument("potential: width must be positive");

    const auto x = grid.axis_coordinates();
    int k[3];
    for (std::size_t i = 0; i < values.size(); ++i) {
        axis_indices(i, d, n, k);
        if (spec.family == PotentialSpec::Family::gaussian_well) {
            double r2 = 0.0;
            for (int axis = 0; axis < d; ++axis)
                r2 += x[k[axis]] * x[k[axis]];
            values[i] = spec.depth * std::exp(-r2 / (2.0 * spec.width * spec.width));
        } else { // smooth_lattice
            double sum = 0.0;
            for (int axis = 0; axis < d; ++axis)
                sum += std::cos(spec.lattice_wavevector * x[k[axis]]);
            values[i] = spec.depth * sum;
        }
    }
    return values;
}

ComplexField realize_potential(const PotentialSpec& spec, const GridSpec& grid) {
    const auto real_values = potential_values(spec, grid);
    ComplexField field{grid, std::vector<cplx>(real_values.size())};
    for (std::size_t i = 0; i < real_values.size(); ++i)
        field.values[i] = cplx(real_values[i], 0.0);
    return field;
}

std::vector<double> interaction_symbol(const InteractionSpec& spec, const GridSpec& grid) {
    if (spec.family == InteractionSpec::Family::cubic)
        throw std::invalid_argument("interaction_symbol: the cubic mode has no convolution symbol");

    const int d = grid.dimension;
    const int n = grid.points_per_axis;
    std::vector<double> symbol(grid.total_points(), 0.0);
    if (spec.is_none())
        return symbol;

    if (!(spec.width > 0.0) || spec.mollifier_index < 1)
        throw std::invalid_argument("interaction_symbol: invalid width or mollifier index");
    const double effective_width = spec.width / spec.mollifier_index;
    if (effective_width < 4.0 * grid.spacing())
        throw std::invalid_argument(
            "interaction_symbol: unresolved mollifier (width/index < 4h); refine the grid");

    const auto xi = grid.axis_wavenumbers();
    int k[3];
    for (std::size_t i = 0; i < symbol.size(); ++i) {
        axis_indices(i, d, n, k);
        double xi2 = 0.0;
        for (int axis = 0; axis < d; ++axis)
            xi2 += xi[k[axis]] * xi[k[axis]];
        symbol[i] = spec.total_mass * std::exp(-0.5 * effective_width * effective_width * xi2);
    }
    return symbol;
}

ComplexField hartree_term(const ComplexField& u, const InteractionSpec& interaction,
                          const GridSpec& grid) {
    if (interaction.is_cubic()) {
        ComplexField out{grid, std::vector<cplx>(u.values.size())};
        for (std::size_t i = 0; i < u.values.size(); ++i)
            out.values[i] = cplx(interaction.cubic_sign * std::norm(u.values[i]), 0.0);
        return out;
    }
    if (interaction.is_none())
        return ComplexField{grid, std::vector<cplx>(u.values.size(), cplx(0.0, 0.0))};

    ComplexField density{grid, std::vector<cplx>(u.values.size())};
    for (std::size_t i = 0; i < u.values.size(); ++i)
        density.values[i] = cplx(std::norm(u.values[i]), 0.0);

    SpectralField density_hat = forward_transform(density);
    const auto symbol = interaction_symbol(interaction, grid);
    for (std::size_t i = 0; i < density_hat.coefficients.size(); ++i)
        density_hat.coefficients[i] *= symbol[i];
    return inverse_transform(density_hat);
}

ComplexField rhs(const ComplexField& u, const ModelSpec& model) {
    SpectralField u_hat = forward_transform(u);
    const ComplexField kinetic = inverse_transform(apply_multiplier(u_hat, SymbolSpec::power(2.0)));
    const auto v = potential_values(model.potential, model.grid);
    const ComplexField interaction = hartree_term(u, model.interaction, model.grid);

    ComplexField out{model.grid, std::vector<cplx>(u.values.size())};
    const cplx minus_i(0.0, -1.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const cplx hu = kinetic.values[i] + v[i] * u.values[i] +
                        interaction.values[i].real() * u.values[i];
        out.values[i] = minus_i * hu;
    }
    return out;
}

double energy(const ComplexField& u, const ModelSpec& model) {
    const SpectralField u_hat = forward_transform(u);
    const double kinetic = dk_l2_norm(u_hat, 1.0); // ||grad u||_2 via |xi| weight

    const auto v = potential_values(model.potential, model.grid);
    const ComplexField interaction = hartree_term(u, model.interaction, model.grid);

    double potential_sum = 0.0, interaction_sum = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double density = std::norm(u.values[i]);
        potential_sum += v[i] * density;
        interaction_sum += interaction.values[i].real() * density;
    }
    const double hd = model.grid.cell_volume();
    return kinetic * kinetic + hd * potential_sum + 0.5 * hd * interaction_sum;
}

double mass(const ComplexField& u) {
    return lp_norm(u, 2.0);
}

} // namespace hartree
