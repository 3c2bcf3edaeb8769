// Python bindings for the main operations: gaussian sampling, split-step
// evolution with observables, the linear flow, norm helpers, the barrier
// analysis, and the closed-form tail quantities.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hartree/bootstrap.hpp"
#include "hartree/diagnostics.hpp"
#include "hartree/physics.hpp"
#include "hartree/propagator.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace py = pybind11;
using namespace hartree;

namespace {

int points_from_size(std::size_t size, int dimension) {
    const double root = std::round(std::pow(static_cast<double>(size), 1.0 / dimension));
    const int n = static_cast<int>(root);
    std::size_t total = 1;
    for (int axis = 0; axis < dimension; ++axis)
        total *= static_cast<std::size_t>(n);
    if (total != size)
        throw std::invalid_argument("array length is not points^dimension");
    return n;
}

ComplexField field_from_array(const py::array_t<std::complex<double>>& values, int dimension,
                              double half_length) {
    const auto buffer = values.request();
    const std::size_t size = static_cast<std::size_t>(buffer.size);
    const GridSpec grid = make_grid(dimension, points_from_size(size, dimension), half_length);
    ComplexField field{grid, std::vector<cplx>(size)};
    std::memcpy(field.values.data(), buffer.ptr, size * sizeof(cplx));
    return field;
}

py::array_t<std::complex<double>> array_from_field(const ComplexField& field) {
    py::array_t<std::complex<double>> out(field.values.size());
    std::memcpy(out.mutable_data(), field.values.data(), field.values.size() * sizeof(cplx));
    return out;
}

PotentialSpec potential_from_args(double depth, double width) {
    return depth == 0.0 ? PotentialSpec::zero() : PotentialSpec::gaussian_well(depth, width);
}

InteractionSpec interaction_from_args(double w_mass, double w_width, double cubic_sign) {
    if (cubic_sign != 0.0)
        return InteractionSpec::cubic(cubic_sign);
    return w_mass == 0.0 ? InteractionSpec::none() : InteractionSpec::gaussian(w_mass, w_width);
}

py::dict analysis_to_dict(const BootstrapAnalysis& a) {
    py::dict out;
    out["epsilon"] = a.epsilon;
    out["c_coeff"] = a.c_coeff;
    out["threshold"] = a.threshold;
    out["x_tilde"] = a.x_tilde;
    out["f_at_x_tilde"] = a.f_at_x_tilde;
    out["x_min"] = a.x_min;
    out["f_min"] = a.f_min;
    out["roots"] = a.roots;
    out["intervals"] = a.intervals;
    out["two_intervals"] = a.two_intervals;
    out["c0"] = a.c0;
    out["gap"] = a.gap;
    out["cardano_bisection_gap"] = a.cardano_bisection_gap;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pseudospectral Hartree-type Schrodinger simulator core";

    m.def(
        "sample_gaussian",
        [](int dimension, int points, double half_length, double amplitude, double width) {
            const GridSpec grid = make_grid(dimension, points, half_length);
            return array_from_field(sample(grid, gaussian_spec(amplitude, width)));
        },
        py::arg("dimension"), py::arg("points"), py::arg("half_length"), py::arg("amplitude"),
        py::arg("width"),
        "Sample amplitude * exp(-|x|^2 / (2 width^2)) on the periodic grid "
        "(flat row-major array of length points^dimension).");

    m.def(
        "grid_coordinates",
        [](int points, double half_length) {
            const GridSpec grid = make_grid(1, points, half_length);
            return grid.axis_coordinates();
        },
        py::arg("points"), py::arg("half_length"),
        "Per-axis sample coordinates x_m = -L + m * (2L / points).");

    m.def(
        "evolve",
        [](const py::array_t<std::complex<double>>& u0, int dimension, double half_length,
           double dt, double t_end, int stride, double potential_depth, double potential_width,
           double interaction_mass, double interaction_width, double cubic_sign,
           double boundary_mass_max, bool keep_snapshots) {
            const ComplexField initial = field_from_array(u0, dimension, half_length);
            const ModelSpec model =
                make_model(initial.grid, potential_from_args(potential_depth, potential_width),
                           interaction_from_args(interaction_mass, interaction_width, cubic_sign));
            StepPlan plan;
            plan.dt = dt;
            plan.t_end = t_end;
            plan.snapshot_stride = stride;
            EvolveOptions options;
            options.boundary_mass_max = boundary_mass_max;
            options.keep_snapshots = true;

            const Trajectory trajectory = evolve(initial, model, plan, options);

            std::vector<double> masses, sups, energies;
            masses.reserve(trajectory.snapshots.size());
            for (const ComplexField& u : trajectory.snapshots) {
                masses.push_back(mass(u));
                sups.push_back(sup_norm(u));
                energies.push_back(energy(u, model));
            }

            py::dict out;
            out["times"] = trajectory.times;
            out["mass"] = masses;
            out["sup_norm"] = sups;
            out["energy"] = energies;
            out["stop_reason"] = to_string(trajectory.stop_reason);
            out["stop_time"] = trajectory.stop_time;
            if (keep_snapshots) {
                const std::size_t rows = trajectory.snapshots.size();
                const std::size_t cols = trajectory.snapshots.empty()
                                             ? 0
                                             : trajectory.snapshots.front().values.size();
                py::array_t<std::complex<double>> snaps(
                    {static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
                for (std::size_t i = 0; i < rows; ++i)
                    std::memcpy(snaps.mutable_data() + i * cols,
                                trajectory.snapshots[i].values.data(), cols * sizeof(cplx));
                out["snapshots"] = snaps;
            }
            return out;
        },
        py::arg("u0"), py::arg("dimension"), py::arg("half_length"), py::arg("dt"),
        py::arg("t_end"), py::arg("stride") = 1, py::arg("potential_depth") = 0.0,
        py::arg("potential_width") = 1.0, py::arg("interaction_mass") = 0.0,
        py::arg("interaction_width") = 1.0, py::arg("cubic_sign") = 0.0,
        py::arg("boundary_mass_max") = std::numeric_limits<double>::infinity(),
        py::arg("keep_snapshots") = false,
        "Split-step evolution of i du/dt = -Lap u + V u + (w*|u|^2) u; returns "
        "times and observables at stride points (optionally the states).");

    m.def(
        "linear_propagate",
        [](const py::array_t<std::complex<double>>& f, double t, int dimension,
           double half_length, double potential_depth, double potential_width, double dt_hint) {
            const ComplexField field = field_from_array(f, dimension, half_length);
            const ModelSpec model =
                make_model(field.grid, potential_from_args(potential_depth, potential_width),
                           InteractionSpec::none());
            return array_from_field(linear_propagate(field, t, model, dt_hint));
        },
        py::arg("f"), py::arg("t"), py::arg("dimension"), py::arg("half_length"),
        py::arg("potential_depth") = 0.0, py::arg("potential_width") = 1.0,
        py::arg("dt_hint") = 0.01, "e^{-itH} f with H = -Laplace + V.");

    m.def(
        "norms",
        [](const py::array_t<std::complex<double>>& f, int dimension, double half_length) {
            const ComplexField field = field_from_array(f, dimension, half_length);
            py::dict out;
            out["l1"] = lp_norm(field, 1.0);
            out["l2"] = lp_norm(field, 2.0);
            out["sup"] = sup_norm(field);
            out["h2"] = sobolev_norm(field, 2.0);
            out["d2_l2"] = dk_l2_norm(forward_transform(field), 2.0);
            out["boundary_mass_fraction"] = boundary_mass_fraction(field);
            return out;
        },
        py::arg("f"), py::arg("dimension"), py::arg("half_length"),
        "L^1, L^2, sup, H^2, ||D^2 f||_2 and the boundary-mass fraction.");

    m.def(
        "analyze",
        [](double epsilon, double c_coeff) { return analysis_to_dict(analyze(epsilon, c_coeff)); },
        py::arg("epsilon"), py::arg("c_coeff"),
        "Root/interval structure of f(x) = eps + C x^3 - x on [0, inf).");

    m.def("kernel_integral", &kernel_integral, py::arg("t"), py::arg("d"),
          "I(t) = int_0^{t-1} (1+t)^{d/2} |t-s|^{-d/2} (1+s)^{-d/2} ds (d >= 3).");

    m.def("beta_l1_norm", &beta_l1_norm, py::arg("c1"), py::arg("t0"), py::arg("d"),
          "Closed-form L^1 tail mass of beta(s) = 2^{d/2+1} c1 |s|^{-d/2} on [t0, inf).");

    m.attr("__version__") = "1.0.0";
}
