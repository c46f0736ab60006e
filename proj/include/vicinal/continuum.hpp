/// @file continuum.hpp
/// @brief Time integration of the regularized slope equation
///
///     u_t = -u^4/(eps + u^2) (u^3)_hhhh,   u(0) = u0 + eps^{1/3},
///
/// on the period-1 height grid; eps = 0 is the degenerate equation u_t = -u^2 (u^3)_hhhh.
///
/// Two steppers:
///   - explicit RK4 in u with the frozen-coefficient CFL step
///       dt = safety * spacing^4 / (8 kappa_max),  kappa_max = max 3u^6/(eps+u^2);
///   - semi-implicit in w = u^3: (I + 3 dt diag(M) D4) w_new = w_old, one cyclic
///     pentadiagonal solve per iteration. With Mobility::Lagged, M = u^6/(eps+u^2) at the
///     old state (one solve). With Mobility::Secant, M is the secant mobility of the pair
///     (w_old, w_new), iterated to a fixed point, which makes
///     sum (eps/(3u^3) + 1/u) exactly invariant under the step.

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "vicinal/cyclic_banded.hpp"
#include "vicinal/energetics.hpp"
#include "vicinal/errors.hpp"
#include "vicinal/grid.hpp"

namespace vicinal::continuum {

enum class Scheme { ExplicitRk4, SemiImplicit };
enum class Mobility { Lagged, Secant };

struct SolverState {
    double t = 0.0;
    PeriodicField u;
    double epsilon = 0.0;
    double dt = 0.0;
    std::size_t floor_events = 0;
    energetics::EnergyReport report{};
    /// Smallest value of u seen at any step so far.
    double u_min_seen = std::numeric_limits<double>::infinity();
};

struct SolverOptions {
    Scheme scheme = Scheme::SemiImplicit;
    Mobility mobility = Mobility::Lagged;
    double cfl_safety = 0.4;
    double dt_min = 1e-16;
    double dt_max = 1.0;
    /// Semi-implicit step size; zero picks min(dt_max, report_every / 10).
    double dt = 0.0;
    /// Lower clamp for u when eps = 0 (explicit) and for w (semi-implicit).
    double positivity_floor = 0.0;
    /// Reporting interval; zero or negative reports after every step.
    double report_every = 0.0;
    /// Keep the field at every report in the result.
    bool keep_snapshots = true;
    /// Secant fixed-point iteration controls. Changes below the solve resolution, 16 machine
    /// epsilon times the operator norm 1 + 48 dt max(M) / spacing^4, are also accepted once
    /// they stop shrinking by at least half per iteration.
    double picard_tolerance = 1e-12;
    std::size_t picard_max_iterations = 60;
    /// Optional early stop, checked after every step.
    std::function<bool(const SolverState&)> stop_when;
};

/// Thrown by the secant semi-implicit step when the mobility iteration does not settle.
class NotConverged : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// u0 + eps^{1/3}; rejects negative entries and non-positive eps.
PeriodicField regularize_initial(const PeriodicField& u0, double epsilon);

/// -(u^4/(eps+u^2)) diff4(u^3); mobility u^2 at eps = 0.
PeriodicField pde_rhs(const PeriodicField& u, double epsilon);

/// max_i 3 u_i^6 / (eps + u_i^2).
double max_cube_diffusivity(const PeriodicField& u, double epsilon);
/// safety * spacing^4 / (8 kappa_max), unclamped; +inf when kappa_max = 0.
double cfl_step(const PeriodicField& u, double epsilon, double safety);

/// One classical RK4 step of size dt on pde_rhs (no flooring, no checks).
PeriodicField rk4_step(const PeriodicField& u, double epsilon, double dt);

/// RK4 with the CFL step size clamped to [dt_min, dt_max] and additionally capped at
/// dt_cap. Throws StepSizeUnderflow, NonFinite.
SolverState explicit_step(const SolverState& s, const SolverOptions& opts,
                          double dt_cap = std::numeric_limits<double>::infinity());

/// Semi-implicit step of size dt. Throws SingularSystem, NonFinite, NotConverged.
SolverState semi_implicit_step(const SolverState& s, double dt, const SolverOptions& opts);

/// The operator I + 3 dt diag(mobility) D4 on the given grid.
CyclicPentadiagonal implicit_operator(const PeriodicGrid& grid, std::span<const double> mobility, double dt);

struct EvolveResult {
    /// State at every report (only when keep_snapshots).
    std::vector<SolverState> trajectory;
    std::vector<energetics::EnergyReport> reports;
    SolverState final_state;
    std::size_t steps = 0;
    bool stopped_early = false;
};

/// Regularizes the datum when eps > 0 and steps to t_end, reporting every report_every
/// and at the end. The semi-implicit path halves dt on NotConverged. Failures are rethrown
/// with the failure time.
EvolveResult evolve(const PeriodicField& u0, double epsilon, double t_end, const SolverOptions& opts);

energetics::Snapshot to_snapshot(const SolverState& s);

} // namespace vicinal::continuum
