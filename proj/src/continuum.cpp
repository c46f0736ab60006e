#include "vicinal/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vicinal/kernels.hpp"

namespace vicinal::continuum {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Secant of the conserved density g(w) = eps/(3w) + w^{-1/3}: returns M with
// g(w_new) - g(w_old) = -(w_new - w_old) / (3M). Written without the difference
// quotient so that it stays exact as w_new -> w_old, where it equals u^6/(eps+u^2).
double secant_mobility(double w_old, double w_new, double eps) {
    if (!(w_old > 0.0) || !(w_new > 0.0)) return 0.0;
    const double uo = std::cbrt(w_old);
    const double un = std::cbrt(w_new);
    const double s = eps / (3.0 * w_new * w_old) + 1.0 / (un * uo * (uo * uo + uo * un + un * un));
    return 1.0 / (3.0 * s);
}

std::vector<double> solve_with(const PeriodicGrid& grid, std::span<const double> mobility, double dt,
                               std::span<const double> rhs, double t) {
    const auto op = implicit_operator(grid, mobility, dt);
    try {
        return op.solve(rhs);
    } catch (const SingularSystem&) {
        throw SingularSystem("implicit solve failed", t);
    }
}

} // namespace

PeriodicField regularize_initial(const PeriodicField& u0, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("regularization needs epsilon > 0");
    if (u0.min() < 0.0) throw InvalidArgument("initial datum must be non-negative");
    const double shift = std::cbrt(epsilon);
    return map(u0, [shift](double v) { return v + shift; });
}

PeriodicField pde_rhs(const PeriodicField& u, double epsilon) {
    const std::size_t n = u.size();
    std::vector<double> w(n), d4w(n), out(n);
    kernels::cube(u.values(), w);
    kernels::diff4(w, u.grid().spacing(), d4w);
    kernels::pde_rhs(u.values(), d4w, epsilon, out);
    return PeriodicField(u.grid(), std::move(out));
}

double max_cube_diffusivity(const PeriodicField& u, double epsilon) {
    double k = 0.0;
    for (double v : u.values()) k = std::max(k, 3.0 * kernels::cube_mobility(v, epsilon));
    return k;
}

double cfl_step(const PeriodicField& u, double epsilon, double safety) {
    const double kappa = max_cube_diffusivity(u, epsilon);
    if (kappa == 0.0) return std::numeric_limits<double>::infinity();
    const double h = u.grid().spacing();
    return safety * (h * h) * (h * h) / (8.0 * kappa);
}

PeriodicField rk4_step(const PeriodicField& u, double epsilon, double dt) {
    const std::size_t n = u.size();
    const auto k1 = pde_rhs(u, epsilon);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    const auto k2 = pde_rhs(PeriodicField(u.grid(), tmp), epsilon);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    const auto k3 = pde_rhs(PeriodicField(u.grid(), tmp), epsilon);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
    const auto k4 = pde_rhs(PeriodicField(u.grid(), tmp), epsilon);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return PeriodicField(u.grid(), std::move(tmp));
}

SolverState explicit_step(const SolverState& s, const SolverOptions& opts, double dt_cap) {
    double dt = cfl_step(s.u, s.epsilon, opts.cfl_safety);
    dt = std::min(dt, opts.dt_max);
    if (dt < opts.dt_min) throw StepSizeUnderflow("CFL step " + std::to_string(dt) + " below dt_min", s.t);
    dt = std::min(dt, dt_cap);

    PeriodicField next = [&] {
        try {
            return rk4_step(s.u, s.epsilon, dt);
        } catch (const InvalidArgument&) {
            throw NonFinite("explicit step produced a non-finite value", s.t);
        }
    }();

    SolverState out = s;
    if (s.epsilon == 0.0 && next.min() < opts.positivity_floor) {
        std::vector<double> v(next.values().begin(), next.values().end());
        for (double& x : v)
            if (x < opts.positivity_floor) {
                x = opts.positivity_floor;
                ++out.floor_events;
            }
        next = PeriodicField(next.grid(), std::move(v));
    }
    out.u = std::move(next);
    out.t = s.t + dt;
    out.dt = dt;
    out.u_min_seen = std::min(s.u_min_seen, out.u.min());
    return out;
}

CyclicPentadiagonal implicit_operator(const PeriodicGrid& grid, std::span<const double> mobility, double dt) {
    const std::size_t n = grid.n();
    const double h = grid.spacing();
    const double inv = 1.0 / ((h * h) * (h * h));
    CyclicPentadiagonal op(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 3.0 * dt * mobility[i] * inv;
        op.at(i, -2) = c;
        op.at(i, -1) = -4.0 * c;
        op.at(i, 0) = 1.0 + 6.0 * c;
        op.at(i, 1) = -4.0 * c;
        op.at(i, 2) = c;
    }
    return op;
}

SolverState semi_implicit_step(const SolverState& s, double dt, const SolverOptions& opts) {
    if (!(dt > 0.0)) throw InvalidArgument("semi-implicit step needs dt > 0");
    const std::size_t n = s.u.size();
    const double eps = s.epsilon;
    const auto& grid = s.u.grid();

    std::vector<double> w_old(n), mob(n);
    kernels::cube(s.u.values(), w_old);
    for (std::size_t i = 0; i < n; ++i) mob[i] = kernels::cube_mobility(s.u[i], eps);

    // When diff4 annihilates w_old it is the exact solution; skipping the solve keeps it free of rounding.
    std::vector<double> d4(n);
    kernels::diff4(w_old, grid.spacing(), d4);
    if (std::all_of(d4.begin(), d4.end(), [](double v) { return v == 0.0; })) {
        SolverState out = s;
        out.t = s.t + dt;
        out.dt = dt;
        out.u_min_seen = std::min(s.u_min_seen, s.u.min());
        return out;
    }

    std::vector<double> w = solve_with(grid, mob, dt, w_old, s.t);

    if (opts.mobility == Mobility::Secant) {
        bool converged = false;
        double prev_change = std::numeric_limits<double>::infinity();
        for (std::size_t it = 0; it < opts.picard_max_iterations; ++it) {
            if (!all_finite(w)) break;
            for (std::size_t i = 0; i < n; ++i) mob[i] = secant_mobility(w_old[i], w[i], eps);
            auto next = solve_with(grid, mob, dt, w_old, s.t);
            double change = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                change = std::max(change, std::abs(next[i] - w[i]));
                scale = std::max(scale, std::abs(next[i]));
            }
            w = std::move(next);
            // Below the resolution of the solve the iteration is accepted once it stops contracting.
            const double h4 = std::pow(grid.spacing(), 4);
            const double op_norm = 1.0 + 48.0 * dt * *std::max_element(mob.begin(), mob.end()) / h4;
            const double noise = 16.0 * std::numeric_limits<double>::epsilon() * op_norm;
            if (change <= opts.picard_tolerance * scale || (change <= noise * scale && change >= 0.5 * prev_change)) {
                converged = true;
                break;
            }
            prev_change = change;
        }
        if (!converged) throw NotConverged("secant mobility iteration did not converge", s.t);
    }

    if (!all_finite(w)) throw NonFinite("semi-implicit step produced a non-finite value", s.t);

    SolverState out = s;
    const double f = eps == 0.0 ? opts.positivity_floor : 0.0;
    const double w_floor = std::max(0.0, f * f * f);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] < w_floor) {
            w[i] = w_floor;
            ++out.floor_events;
        }
        u[i] = std::cbrt(w[i]);
    }
    out.u = PeriodicField(grid, std::move(u));
    out.t = s.t + dt;
    out.dt = dt;
    out.u_min_seen = std::min(s.u_min_seen, out.u.min());
    return out;
}

energetics::Snapshot to_snapshot(const SolverState& s) { return energetics::Snapshot{s.t, s.u}; }

EvolveResult evolve(const PeriodicField& u0, double epsilon, double t_end, const SolverOptions& opts) {
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
    if (!(opts.dt_min < opts.dt_max)) throw InvalidArgument("dt_min must be smaller than dt_max");
    if (u0.min() < 0.0) throw InvalidArgument("initial datum must be non-negative");

    PeriodicField start = epsilon > 0.0 ? regularize_initial(u0, epsilon) : u0;
    SolverState s{0.0, start, epsilon, 0.0, 0, energetics::energy_report(start, epsilon, 0.0, 0.0), start.min()};

    EvolveResult result{{}, {s.report}, s, 0, false};
    if (opts.keep_snapshots) result.trajectory.push_back(s);

    const double every = opts.report_every;
    std::size_t k_report = 1;
    // A report time within rounding of t_end is t_end itself, so the last report is not duplicated.
    auto next_report = [&] {
        if (every <= 0.0) return t_end;
        const double r = static_cast<double>(k_report) * every;
        return t_end - r <= 1e-9 * every ? t_end : r;
    };
    double dt_semi = opts.dt > 0.0 ? opts.dt : std::min(opts.dt_max, (every > 0.0 ? every : t_end) / 10.0);

    auto emit = [&](SolverState& st) {
        auto rep = energetics::energy_report(st.u, epsilon, st.t, st.dt);
        const auto& prev = result.reports.back();
        rep.energy_monotone = rep.E <= prev.E + 1e-8 * (1.0 + prev.E);
        st.report = rep;
        result.reports.push_back(rep);
        if (opts.keep_snapshots) result.trajectory.push_back(st);
    };

    while (s.t < t_end) {
        const double target = next_report();
        const double cap = target - s.t;
        if (opts.scheme == Scheme::ExplicitRk4) {
            s = explicit_step(s, opts, cap);
        } else {
            double h = std::min(dt_semi, cap);
            for (;;) {
                try {
                    s = semi_implicit_step(s, h, opts);
                    break;
                } catch (const NotConverged&) {
                    h *= 0.5;
                    dt_semi = std::min(dt_semi, h);
                    if (h < opts.dt_min) throw StepSizeUnderflow("semi-implicit step size underflow", s.t);
                }
            }
        }
        if (std::abs(s.t - target) <= 1e-12 * std::max(1.0, std::abs(target))) s.t = target;
        ++result.steps;

        const bool at_report = every <= 0.0 || s.t >= target;
        if (at_report) {
            emit(s);
            while (every > 0.0 && static_cast<double>(k_report) * every <= s.t * (1.0 + 1e-12)) ++k_report;
        }
        if (opts.stop_when && opts.stop_when(s)) {
            if (!at_report) emit(s);
            result.stopped_early = true;
            break;
        }
    }
    result.final_state = s;
    return result;
}

} // namespace vicinal::continuum
