#include "hartree/propagator.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace hartree {

namespace {

bool field_is_finite(const ComplexField& u) {
    for (const cplx& v : u.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

// Pointwise  u *= e^{-i dt (V + g)}  with g the real interaction field.
void apply_phase(ComplexField& u, const std::vector<double>& v,
                 const std::vector<double>& g, double dt) {
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] *= std::polar(1.0, -dt * (v[i] + g[i]));
}

struct Stepper {
    const ModelSpec& model;
    std::vector<double> v;            // realized potential
    std::vector<double> w_symbol;     // w_hat on the lattice (empty for none/cubic)
    std::vector<double> kinetic_xi2;  // |xi|^2 on the lattice
    std::vector<char> filter_keep;    // two-thirds mask (empty when filter off)

    explicit Stepper(const ModelSpec& m, bool spectral_filter) : model(m) {
        const GridSpec& grid = m.grid;
        v = potential_values(m.potential, grid);
        if (!m.interaction.is_none() && !m.interaction.is_cubic())
            w_symbol = interaction_symbol(m.interaction, grid);

        const int d = grid.dimension;
        const int n = grid.points_per_axis;
        const auto xi = grid.axis_wavenumbers();
        kinetic_xi2.resize(grid.total_points());
        if (spectral_filter)
            filter_keep.assign(grid.total_points(), 1);
        int k[3] = {0, 0, 0};
        for (std::size_t i = 0; i < kinetic_xi2.size(); ++i) {
            std::size_t rest = i;
            for (int axis = d - 1; axis >= 0; --axis) {
                k[axis] = static_cast<int>(rest % n);
                rest /= n;
            }
            double xi2 = 0.0;
            bool keep = true;
            for (int axis = 0; axis < d; ++axis) {
                xi2 += xi[k[axis]] * xi[k[axis]];
                const int j = (k[axis] < n / 2) ? k[axis] : k[axis] - n;
                if (3 * std::abs(j) > n) keep = false;
            }
            kinetic_xi2[i] = xi2;
            if (spectral_filter && !keep) filter_keep[i] = 0;
        }
    }

    // w * |u|^2 (or +/- |u|^2) as a real array.
    std::vector<double> interaction_field(const ComplexField& u) const {
        std::vector<double> g(u.values.size(), 0.0);
        if (model.interaction.is_cubic()) {
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] = model.interaction.cubic_sign * std::norm(u.values[i]);
        } else if (!model.interaction.is_none()) {
            ComplexField density{model.grid, std::vector<cplx>(u.values.size())};
            for (std::size_t i = 0; i < u.values.size(); ++i)
                density.values[i] = cplx(std::norm(u.values[i]), 0.0);
            SpectralField density_hat = forward_transform(density);
            for (std::size_t i = 0; i < density_hat.coefficients.size(); ++i)
                density_hat.coefficients[i] *= w_symbol[i];
            const ComplexField conv = inverse_transform(density_hat);
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] = conv.values[i].real();
        }
        return g;
    }

    // A(dt): exact kinetic multiplier (with optional two-thirds filter).
    void kinetic_step(ComplexField& u, double dt) const {
        SpectralField u_hat = forward_transform(u);
        for (std::size_t i = 0; i < u_hat.coefficients.size(); ++i) {
            u_hat.coefficients[i] *= std::polar(1.0, -dt * kinetic_xi2[i]);
            if (!filter_keep.empty() && !filter_keep[i])
                u_hat.coefficients[i] = 0.0;
        }
        u = inverse_transform(u_hat);
    }
};

} // namespace

long StepPlan::steps() const {
    if (!(dt != 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("StepPlan: dt must be a nonzero finite real");
    if (!((t_end - t_start) / dt > 0.0))
        throw std::invalid_argument("StepPlan: (t_end - t_start) and dt must have the same sign");
    const double raw = (t_end - t_start) / dt;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, std::abs(raw)) || rounded < 1.0)
        throw std::invalid_argument("StepPlan: (t_end - t_start)/dt must be a positive integer");
    if (snapshot_stride < 1)
        throw std::invalid_argument("StepPlan: snapshot_stride must be >= 1");
    return static_cast<long>(rounded);
}

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::completed: return "completed";
    case StopReason::boundary_guard: return "boundary_guard";
    case StopReason::nan_detected: return "nan_detected";
    }
    return "unknown";
}

ComplexField strang_step(const ComplexField& u, double dt, const ModelSpec& model) {
    if (dt == 0.0 || !std::isfinite(dt))
        throw std::invalid_argument("strang_step: dt must be nonzero and finite");
    Stepper stepper(model, false);
    ComplexField state = u;
    apply_phase(state, stepper.v, stepper.interaction_field(state), 0.5 * dt);
    stepper.kinetic_step(state, dt);
    apply_phase(state, stepper.v, stepper.interaction_field(state), 0.5 * dt);
    if (!field_is_finite(state))
        throw std::runtime_error("strang_step: non-finite state (overflow/NaN)");
    return state;
}

Trajectory evolve(const ComplexField& u0, const ModelSpec& model, const StepPlan& plan,
                  const EvolveOptions& options) {
    if (!(u0.grid == model.grid))
        throw std::invalid_argument("evolve: initial data is not on the model grid");
    const long total_steps = plan.steps();
    const int stride = plan.snapshot_stride;

    Trajectory trajectory;
    trajectory.model = model;
    trajectory.plan = plan;
    trajectory.stop_reason = StopReason::completed;
    trajectory.stop_time = plan.t_end;

    Stepper stepper(model, plan.spectral_filter);

    auto emit = [&](double t, const ComplexField& state) -> bool {
        trajectory.times.push_back(t);
        if (options.keep_snapshots)
            trajectory.snapshots.push_back(state);
        if (!field_is_finite(state)) {
            trajectory.stop_reason = StopReason::nan_detected;
            trajectory.stop_time = t;
            return false;
        }
        if (options.observer)
            options.observer(t, state);
        if (boundary_mass_fraction(state) > options.boundary_mass_max) {
            trajectory.stop_reason = StopReason::boundary_guard;
            trajectory.stop_time = t;
            return false;
        }
        return true;
    };

    if (!emit(plan.t_start, u0))
        return trajectory;

    // Consecutive Strang steps share the half-phase at the step boundary: the
    // phase substep preserves |u|, so the closing B(dt/2) of one step and the
    // opening B(dt/2) of the next have the same generator and merge into
    // B(dt).  This reuse is exact; states at stride points are produced by
    // applying the genuine closing half-phase.
    ComplexField state = u0;
    std::vector<double> g = stepper.interaction_field(state);
    apply_phase(state, stepper.v, g, 0.5 * plan.dt);

    for (long step = 1; step <= total_steps; ++step) {
        stepper.kinetic_step(state, plan.dt);
        g = stepper.interaction_field(state); // valid as closing and opening phase
        const bool record_point = (step == total_steps) || (step % stride == 0);
        if (record_point) {
            ComplexField out = state;
            apply_phase(out, stepper.v, g, 0.5 * plan.dt);
            const double t = plan.t_start + step * plan.dt;
            if (!emit(t, out) || step == total_steps)
                return trajectory;
            state = std::move(out);
            apply_phase(state, stepper.v, g, 0.5 * plan.dt);
        } else {
            apply_phase(state, stepper.v, g, plan.dt);
        }
    }
    return trajectory;
}

ComplexField linear_propagate(const ComplexField& f, double t, const ModelSpec& model,
                              double dt_hint) {
    if (t == 0.0)
        return f;
    if (model.potential.is_zero())
        return inverse_transform(apply_multiplier(forward_transform(f), SymbolSpec::free_flow(t)));

    if (!(dt_hint > 0.0))
        throw std::invalid_argument("linear_propagate: dt_hint must be positive");
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / dt_hint - 1e-12)));
    const double dt = t / steps;

    ModelSpec linear = model;
    linear.interaction = InteractionSpec::none();
    Stepper stepper(linear, false);
    const std::vector<double> no_interaction(f.values.size(), 0.0);

    ComplexField state = f;
    apply_phase(state, stepper.v, no_interaction, 0.5 * dt);
    for (long step = 1; step <= steps; ++step) {
        stepper.kinetic_step(state, dt);
        if (step < steps)
            apply_phase(state, stepper.v, no_interaction, dt);
        else
            apply_phase(state, stepper.v, no_interaction, 0.5 * dt);
    }
    if (!field_is_finite(state))
        throw std::runtime_error("linear_propagate: non-finite state");
    return state;
}

ComplexField time_derivative(const ComplexField& u, const ModelSpec& model) {
    return rhs(u, model);
}

double duhamel_residual(const Trajectory& trajectory, std::size_t t_index) {
    const auto& times = trajectory.times;
    const auto& snaps = trajectory.snapshots;
    if (snaps.size() != times.size())
        throw std::invalid_argument("duhamel_residual: trajectory was run without snapshots");
    if (t_index >= snaps.size())
        throw std::invalid_argument("duhamel_residual: snapshot index out of range");

    const ModelSpec& model = trajectory.model;
    const double t0 = times.front();
    const double t = times[t_index];
    const ComplexField& u_t = snaps[t_index];
    const double u_t_l2 = mass(u_t);

    // Empty integral: residual of the pure linear flow identity at t = t0.
    if (t_index == 0)
        return 0.0;
    if (t_index + 1 < 3)
        throw std::invalid_argument("duhamel_residual: needs at least 3 snapshots up to t");

    ComplexField reconstructed = linear_propagate(snaps.front(), t - t0, model, trajectory.plan.dt);

    if (!model.interaction.is_none()) {
        std::vector<cplx> integral(u_t.values.size(), cplx(0.0, 0.0));
        for (std::size_t i = 0; i <= t_index; ++i) {
            // Non-uniform composite trapezoid weight for node i.
            double weight = 0.0;
            if (i > 0) weight += 0.5 * (times[i] - times[i - 1]);
            if (i < t_index) weight += 0.5 * (times[i + 1] - times[i]);

            const ComplexField& u_s = snaps[i];
            const ComplexField g = hartree_term(u_s, model.interaction, model.grid);
            ComplexField integrand{model.grid, std::vector<cplx>(u_s.values.size())};
            for (std::size_t j = 0; j < u_s.values.size(); ++j)
                integrand.values[j] = g.values[j].real() * u_s.values[j];

            const ComplexField propagated =
                linear_propagate(integrand, t - times[i], model, trajectory.plan.dt);
            for (std::size_t j = 0; j < integral.size(); ++j)
                integral[j] += weight * propagated.values[j];
        }
        const cplx minus_i(0.0, -1.0);
        for (std::size_t j = 0; j < reconstructed.values.size(); ++j)
            reconstructed.values[j] += minus_i * integral[j];
    }

    double defect2 = 0.0;
    for (std::size_t j = 0; j < u_t.values.size(); ++j)
        defect2 += std::norm(u_t.values[j] - reconstructed.values[j]);
    const double defect = std::sqrt(trajectory.model.grid.cell_volume() * defect2);
    return (u_t_l2 > 0.0) ? defect / u_t_l2 : defect;
}

Trajectory subsample(const Trajectory& trajectory, int stride) {
    if (stride < 1)
        throw std::invalid_argument("subsample: stride must be >= 1");
    Trajectory out;
    out.model = trajectory.model;
    out.plan = trajectory.plan;
    out.plan.snapshot_stride = trajectory.plan.snapshot_stride * stride;
    out.stop_reason = trajectory.stop_reason;
    out.stop_time = trajectory.stop_time;
    for (std::size_t i = 0; i < trajectory.times.size(); i += stride) {
        out.times.push_back(trajectory.times[i]);
        if (!trajectory.snapshots.empty())
            out.snapshots.push_back(trajectory.snapshots[i]);
    }
    return out;
}

void write_snapshot(const std::string& path, const ComplexField& field, double time) {
    std::FILE* file = std::fopen(path.c_str(), "wb");
    if (!file)
        throw std::runtime_error("write_snapshot: cannot open " + path);

    const char magic[6] = {'H', 'P', 'R', 'O', 'P', '1'};
    const std::uint8_t dimension = static_cast<std::uint8_t>(field.grid.dimension);
    const std::uint32_t points = static_cast<std::uint32_t>(field.grid.points_per_axis);
    const double half_length = field.grid.half_length;

    bool ok = std::fwrite(magic, 1, 6, file) == 6 &&
              std::fwrite(&dimension, 1, 1, file) == 1 &&
              std::fwrite(&points, 4, 1, file) == 1 &&
              std::fwrite(&half_length, 8, 1, file) == 1 &&
              std::fwrite(&time, 8, 1, file) == 1;
    for (const cplx& v : field.values) {
        const double re = v.real(), im = v.imag();
        ok = ok && std::fwrite(&re, 8, 1, file) == 1 && std::fwrite(&im, 8, 1, file) == 1;
    }
    ok = std::fclose(file) == 0 && ok;
    if (!ok)
        throw std::runtime_error("write_snapshot: short write to " + path);
}

std::pair<ComplexField, double> read_snapshot(const std::string& path) {
    std::FILE* file = std::fopen(path.c_str(), "rb");
    if (!file)
        throw std::runtime_error("read_snapshot: cannot open " + path);

    char magic[6];
    std::uint8_t dimension = 0;
    std::uint32_t points = 0;
    double half_length = 0.0, time = 0.0;
    bool ok = std::fread(magic, 1, 6, file) == 6 && std::memcmp(magic, "HPROP1", 6) == 0 &&
              std::fread(&dimension, 1, 1, file) == 1 &&
              std::fread(&points, 4, 1, file) == 1 &&
              std::fread(&half_length, 8, 1, file) == 1 &&
              std::fread(&time, 8, 1, file) == 1;
    if (!ok) {
        std::fclose(file);
        throw std::runtime_error("read_snapshot: bad header in " + path);
    }

    GridSpec grid = make_grid(dimension, static_cast<int>(points), half_length);
    ComplexField field{grid, std::vector<cplx>(grid.total_points())};
    for (cplx& v : field.values) {
        double re = 0.0, im = 0.0;
        if (std::fread(&re, 8, 1, file) != 1 || std::fread(&im, 8, 1, file) != 1) {
            std::fclose(file);
            throw std::runtime_error("read_snapshot: truncated data in " + path);
        }
        v = cplx(re, im);
    }
    std::fclose(file);
    return {std::move(field), time};
}

} // namespace hartree
