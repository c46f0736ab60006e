/// @file kernels.hpp
/// @brief Data-parallel inner loops shared by the grid, solver and energetics code.
///
/// Every kernel exists twice:
///   - `kernels::serial::*` is the plain reference loop, kept for testing and
///     benchmarking only;
///   - `kernels::*` is the OpenMP version used by the library.
///
/// All periodic stencils index modulo n. Pointwise kernels produce results that are
/// bitwise identical to the serial reference. Reductions use fixed-size blocks whose
/// partial sums are combined in block order, so the result does not depend on the
/// number of threads.

#pragma once

#include <cstddef>
#include <span>

namespace vicinal::kernels {

/// Loops shorter than this run on the calling thread.
inline constexpr std::size_t kParallelMinSize = 4096;

/// Block length of the deterministic blocked summation.
inline constexpr std::size_t kSumBlock = 1024;

namespace serial {

void diff2(std::span<const double> f, double spacing, std::span<double> out);
void diff4(std::span<const double> f, double spacing, std::span<double> out);
void cube(std::span<const double> u, std::span<double> out);
/// out_i = -(u_i^4 / (eps + u_i^2)) * d4w_i, with mobility u_i^2 at eps = 0.
void pde_rhs(std::span<const double> u, std::span<const double> d4w, double eps, std::span<double> out);
double sum(std::span<const double> f);
double sum_squares(std::span<const double> f);
double dot(std::span<const double> f, std::span<const double> g);

} // namespace serial

void diff2(std::span<const double> f, double spacing, std::span<double> out);
void diff4(std::span<const double> f, double spacing, std::span<double> out);
void cube(std::span<const double> u, std::span<double> out);
void pde_rhs(std::span<const double> u, std::span<const double> d4w, double eps, std::span<double> out);
double sum(std::span<const double> f);
double sum_squares(std::span<const double> f);
double dot(std::span<const double> f, std::span<const double> g);

/// Mobility of the regularized equation in the cube variable, u^6/(eps+u^2); u^4 at eps = 0.
inline double cube_mobility(double u, double eps) {
    const double u2 = u * u;
    if (eps == 0.0) return u2 * u2;
    return u2 * u2 * u2 / (eps + u2);
}

/// Mobility of the regularized equation in u, u^4/(eps+u^2); u^2 at eps = 0.
inline double slope_mobility(double u, double eps) {
    const double u2 = u * u;
    if (eps == 0.0) return u2;
    return u2 * u2 / (eps + u2);
}

} // namespace vicinal::kernels
