/// @file formulations.hpp
/// @brief Four equivalent descriptions of a monotone surface and their evolution laws.
///
/// For a positive slope u(alpha) on the height grid:
///   phi(alpha)  step position, phi_alpha = 1/u, winding L = int 1/u per height period;
///   h(x)        height as a function of position, the inverse of phi, winding 1 per length L;
///   rho(x)      slope as a function of position, rho(x) = u(h(x)).
/// Evolution laws (all with zero integration constants):
///   phi_t = (phi_alpha^{-3})_{alpha alpha alpha}
///   h_t   = -3/2 ((h_x^2)_xx / h_x)_x
///   rho_t = -3/2 ((rho^2)_xx / rho)_xx
/// Each right-hand side is a difference of periodic quantities, so the discrete mean of
/// the evolved field is invariant.

#pragma once

#include <cstddef>
#include <vector>

#include "vicinal/grid.hpp"

namespace vicinal::formulations {

struct SurfaceBundle {
    PeriodicField u;
    WindingField phi;
    WindingField h;
    PeriodicField rho;
    double L = 1.0;
};

/// phi by cumulative trapezoid of 1/u from x_anchor, h by monotone cubic Hermite inversion
/// of phi onto the position grid (n nodes on [0, L)), rho = u(h) by linear interpolation.
/// Throws InvalidArgument for non-positive u.
SurfaceBundle slope_to_bundle(const PeriodicField& u, double x_anchor = 0.0);

/// u_i = 2 spacing / (phi_{i+1} - phi_{i-1}).
PeriodicField bundle_to_slope(const WindingField& phi);
PeriodicField bundle_to_slope(const SurfaceBundle& b);

enum class Kind { Height, Rho, Phi };

/// Right-hand sides on the node values. Throw InvalidArgument on a non-positive slope.
std::vector<double> phi_rhs(const WindingField& phi);
std::vector<double> height_rhs(const WindingField& h);
std::vector<double> rho_rhs(const PeriodicField& rho);

/// Dispatch on the matching field of the bundle.
std::vector<double> formulation_rhs(Kind kind, const SurfaceBundle& b);

struct CrossCheckOptions {
    /// Fraction of the smallest explicit RK4 limit spacing^4 / (8 kappa) over all equations.
    double cfl_safety = 0.9;
    /// Also evolve the h- and rho-equations.
    bool include_position_forms = true;
    double x_anchor = 0.0;
};

struct CrossCheckReport {
    /// max |u from the u-equation - u recovered from the phi-equation| at t_end.
    double discrepancy = 0.0;
    /// Relative drift of the discrete means over the run.
    double phi_mean_drift = 0.0;
    double h_mean_drift = 0.0;
    double rho_mean_drift = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
};

/// Evolves the u-equation (eps = 0) and the phi-equation side by side with classical RK4
/// and a shared step. Solver failures are rethrown naming the failing equation.
CrossCheckReport cross_check_evolution(const PeriodicField& u0, double t_end, const CrossCheckOptions& opts = {});

} // namespace vicinal::formulations
