#include "vicinal/kernels.hpp"

#include <cassert>
#include <vector>

namespace vicinal::kernels {

namespace {

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

// Grouped so that constants are annihilated exactly: (f- + f+) - 2f.
inline double stencil2(double fm1, double f0, double fp1) {
    return (fm1 + fp1) - 2.0 * f0;
}

// a - 4b + 6f written as (a - 2f) - 4(b - 2f), exact zero on constants.
inline double stencil4(double fm2, double fm1, double f0, double fp1, double fp2) {
    const double twice = 2.0 * f0;
    return ((fm2 + fp2) - twice) - 4.0 * ((fm1 + fp1) - twice);
}

inline double rhs_point(double u, double d4w, double eps) {
    return -slope_mobility(u, eps) * d4w;
}

template <class Body>
void for_boundary(std::size_t n, std::size_t width, Body&& body) {
    for (std::size_t i = 0; i < width && i < n; ++i) body(i);
    for (std::size_t i = (n > width ? n - width : 0); i < n; ++i)
        if (i >= width) body(i);
}

} // namespace

namespace serial {

void diff2(std::span<const double> f, double spacing, std::span<double> out) {
    assert(out.size() == f.size());
    const std::size_t n = f.size();
    const double inv = 1.0 / (spacing * spacing);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        out[i] = stencil2(f[wrap(s - 1, n)], f[i], f[wrap(s + 1, n)]) * inv;
    }
}

void diff4(std::span<const double> f, double spacing, std::span<double> out) {
    assert(out.size() == f.size());
    const std::size_t n = f.size();
    const double h2 = spacing * spacing;
    const double inv = 1.0 / (h2 * h2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        out[i] = stencil4(f[wrap(s - 2, n)], f[wrap(s - 1, n)], f[i], f[wrap(s + 1, n)],
                          f[wrap(s + 2, n)]) * inv;
    }
}

void cube(std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * u[i] * u[i];
}

void pde_rhs(std::span<const double> u, std::span<const double> d4w, double eps, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = rhs_point(u[i], d4w[i], eps);
}

double sum(std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s;
}

double sum_squares(std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return s;
}

double dot(std::span<const double> f, std::span<const double> g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s;
}

} // namespace serial

void diff2(std::span<const double> f, double spacing, std::span<double> out) {
    assert(out.size() == f.size());
    const std::size_t n = f.size();
    const double inv = 1.0 / (spacing * spacing);
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;

#pragma omp parallel for schedule(static) if (n >= kParallelMinSize)
    for (std::ptrdiff_t i = 1; i < last; ++i)
        out[i] = stencil2(f[i - 1], f[i], f[i + 1]) * inv;

    for_boundary(n, 1, [&](std::size_t i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        out[i] = stencil2(f[wrap(s - 1, n)], f[i], f[wrap(s + 1, n)]) * inv;
    });
}

void diff4(std::span<const double> f, double spacing, std::span<double> out) {
    assert(out.size() == f.size());
    const std::size_t n = f.size();
    const double h2 = spacing * spacing;
    const double inv = 1.0 / (h2 * h2);
    const auto last = static_cast<std::ptrdiff_t>(n) - 2;

#pragma omp parallel for schedule(static) if (n >= kParallelMinSize)
    for (std::ptrdiff_t i = 2; i < last; ++i)
        out[i] = stencil4(f[i - 2], f[i - 1], f[i], f[i + 1], f[i + 2]) * inv;

    for_boundary(n, 2, [&](std::size_t i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        out[i] = stencil4(f[wrap(s - 2, n)], f[wrap(s - 1, n)], f[i], f[wrap(s + 1, n)],
                          f[wrap(s + 2, n)]) * inv;
    });
}

void cube(std::span<const double> u, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static) if (u.size() >= kParallelMinSize)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = u[i] * u[i] * u[i];
}

void pde_rhs(std::span<const double> u, std::span<const double> d4w, double eps, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static) if (u.size() >= kParallelMinSize)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = rhs_point(u[i], d4w[i], eps);
}

namespace {

template <class Term>
double blocked_sum(std::size_t n, Term&& term) {
    const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
    if (blocks <= 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += term(i);
        return s;
    }
    std::vector<double> partial(blocks, 0.0);
    const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (n >= kParallelMinSize)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
        const std::size_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

} // namespace

double sum(std::span<const double> f) {
    return blocked_sum(f.size(), [&](std::size_t i) { return f[i]; });
}

double sum_squares(std::span<const double> f) {
    return blocked_sum(f.size(), [&](std::size_t i) { return f[i] * f[i]; });
}

double dot(std::span<const double> f, std::span<const double> g) {
    assert(f.size() == g.size());
    return blocked_sum(f.size(), [&](std::size_t i) { return f[i] * g[i]; });
}

} // namespace vicinal::kernels
