/// @file energetics.hpp
/// @brief Lyapunov functionals, conserved quantities and the a-priori estimates of the
/// slope equation, evaluated as diagnostics on grid fields.
///
/// With w = u^3 on the height grid:
///   F     = 1/2 int u^2
///   E     = 1/6 int (w_hh)^2
///   D     = int (u^2 w_hhhh)^2
///   D_eps = int u^6/(eps+u^2) (w_hhhh)^2
///   F_eps = eps int ln|u| + F
///   m     = int 1/u,   m_reg = int eps/(3u^3) + 1/u
/// All derivatives use diff2/diff4 and all integrals the periodic rectangle rule.

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vicinal/grid.hpp"

namespace vicinal::energetics {

struct EnergyReport {
    double t = 0.0;
    double F = 0.0;
    double E = 0.0;
    double D = 0.0;
    double F_eps = 0.0;
    double m = 0.0;
    double m_reg = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double dt = 0.0;
    /// Regularized dissipation rate; equals D at eps = 0. Not part of the series file.
    double D_eps = 0.0;
    /// E did not increase since the previous report (within 1e-8 (1 + E)). Set by the solver.
    bool energy_monotone = true;
};

struct BoundVerdict {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double margin = 0.0;
};

/// satisfied <=> lhs <= rhs + 1e-12 (1 + |rhs|).
BoundVerdict make_verdict(std::string name, double lhs, double rhs);

/// When some u <= 0 the fields m, m_reg and F_eps are +infinity.
EnergyReport energy_report(const PeriodicField& u, double epsilon, double t = 0.0, double dt = 0.0);

/// Only E = 1/6 int (diff2 u^3)^2.
double dissipation_energy(const PeriodicField& u);

/// eps / (18^{1/3} E0^{1/3} C_m0).
double positivity_lower_bound(double E0, double C_m0, double epsilon);

/// E(T) <= F0 / (6T).
BoundVerdict decay_bound_check(const EnergyReport& report_at_T, double F0);

struct DissipationResiduals {
    double r1 = 0.0; ///< E(T) + int D_eps dt - E(0)
    double r2 = 0.0; ///< F_eps(T) + 6 int E dt - F_eps(0)
};

/// Time integrals by the trapezoid rule over report times. Needs at least two reports.
DissipationResiduals dissipation_residuals(std::span<const EnergyReport> reports, double epsilon);

struct Snapshot {
    double t = 0.0;
    PeriodicField u;
};

/// Space-time measure of {u < delta}, each snapshot weighted by the interval to the next
/// one, against C_m0 * T * delta with T the span of the snapshot times.
BoundVerdict small_set_measure(std::span<const Snapshot> trajectory, double delta, double C_m0);

/// (u(h) - u_min) / |h - h*|^{3/2} against 2/3 ||diff2 u||_2 (1 + spacing^{1/2}).
BoundVerdict min_deviation_check(const PeriodicField& u);

/// Empirical Hoelder constant sup |w(t2,h) - w(t1,h)| / |t2 - t1|^{1/4}, w = u^3.
double holder_modulus(std::span<const Snapshot> snapshots);

/// 1 / int(1/u0).
double steady_state_prediction(const PeriodicField& u0);

/// | int (diff2 u^3)^2 - 9 int u^4 (diff2 u)^2 |.
double biharmonic_identity_residual(const PeriodicField& u);

/// | 6 E(u) - int u * u^2 diff4(u^3) |, the discrete Euler identity for the degree-6 functional.
double euler_identity_residual(const PeriodicField& u);

} // namespace vicinal::energetics
