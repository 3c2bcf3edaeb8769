#ifndef HARTREE_PROPAGATOR_HPP
#define HARTREE_PROPAGATOR_HPP

// Time evolution: second-order Strang split-step integrator for the full
// equation, the linear flow e^{-itH}, the time-derivative field du/dt, and an
// independent Duhamel-residual oracle.
//
// One Strang step is B(dt/2) A(dt) B(dt/2), where A is the exact kinetic
// multiplier e^{-i dt |xi|^2} and B the exact phase e^{-i dt (V + w*|u|^2)}.
// B is the exact flow of its substep because a pure phase leaves |u| -- and
// hence the frozen potential V + w*|u|^2 -- invariant.  Every substep is
// unitary, so the discrete mass is conserved to roundoff.

#include "hartree/physics.hpp"

#include <functional>
#include <limits>
#include <string>
#include <utility>

namespace hartree {

struct StepPlan {
    double dt = 0.01;
    double t_start = 0.0;
    double t_end = 1.0;
    int snapshot_stride = 1;
    bool spectral_filter = false; // optional two-thirds dealiasing (off by default)

    // Number of steps; throws unless (t_end - t_start)/dt is an integer to 1e-9.
    long steps() const;
};

enum class StopReason { completed, boundary_guard, nan_detected };

std::string to_string(StopReason reason);

struct Trajectory {
    std::vector<double> times;            // snapshot times (strictly increasing)
    std::vector<ComplexField> snapshots;  // fields at stride points, incl. t_start
    ModelSpec model;
    StepPlan plan;
    StopReason stop_reason = StopReason::completed;
    double stop_time = 0.0; // boundary-guard trip time / NaN time / t_end
};

ComplexField strang_step(const ComplexField& u, double dt, const ModelSpec& model);

struct EvolveOptions {
    // Abort threshold for the boundary-mass fraction, checked at stride
    // points; infinity disables the guard (scenario configs default it to 1e-6).
    double boundary_mass_max = std::numeric_limits<double>::infinity();
    bool keep_snapshots = true;
    // Called at every stride point (including t_start) with the true state.
    std::function<void(double, const ComplexField&)> observer;
};

Trajectory evolve(const ComplexField& u0, const ModelSpec& model, const StepPlan& plan,
                  const EvolveOptions& options = {});

// e^{-itH} f with H = -Laplace + V; the interaction is ignored (linear flow).
// For V = 0 this is the single exact multiplier e^{-it|xi|^2}; otherwise
// Strang with w = 0 and |step| <= dt_hint (default 0.01).
ComplexField linear_propagate(const ComplexField& f, double t, const ModelSpec& model,
                              double dt_hint = 0.01);

// du/dt along a trajectory, computed as rhs(u, model).
ComplexField time_derivative(const ComplexField& u, const ModelSpec& model);

// Relative L^2 defect of Duhamel's formula at the snapshot with index t_index:
//   || u(t) - [e^{-i(t-t0)H} u(t0) - i Quad] ||_2 / ||u(t)||_2,
// with Quad the composite trapezoid over snapshots of
// e^{-i(t-s)H} (w*|u(s)|^2) u(s).  Trapezoid matches the integrator's order.
double duhamel_residual(const Trajectory& trajectory, std::size_t t_index);

// Trajectory with every `stride`-th snapshot (always keeping the first; the
// last is kept only if it falls on the stride).  Used for refinement studies.
Trajectory subsample(const Trajectory& trajectory, int stride);

// Binary snapshot format: header {magic "HPROP1", dimension u8,
// points_per_axis u32 LE, half_length f64 LE, time f64 LE}, then interleaved
// (re, im) f64 LE in row-major order.
void write_snapshot(const std::string& path, const ComplexField& field, double time);
std::pair<ComplexField, double> read_snapshot(const std::string& path);

} // namespace hartree

#endif
