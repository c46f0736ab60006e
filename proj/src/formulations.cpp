#include "vicinal/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "vicinal/continuum.hpp"
#include "vicinal/errors.hpp"

namespace vicinal::formulations {

namespace {

using Rhs = std::function<std::vector<double>(const std::vector<double>&)>;

void require_positive_slope(double s, const char* what) {
    if (!(s > 0.0)) throw InvalidArgument(std::string("slope-positivity violation in ") + what);
}

// Cubic Hermite on [x0, x1] with end values y0, y1 and end slopes m0, m1.
double hermite(double x, double x0, double x1, double y0, double y1, double m0, double m1) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * m1;
}

std::vector<double> rk4(const std::vector<double>& y, double dt, const Rhs& f) {
    const std::size_t n = y.size();
    const auto k1 = f(y);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const auto k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const auto k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    const auto k4 = f(tmp);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double relative_drift(double before, double after, double scale) {
    return std::abs(after - before) / std::max(std::abs(before), scale);
}

// Rethrows any failure of one equation with its name attached.
template <class F>
auto named(const char* equation, double t, F&& f) {
    try {
        return f();
    } catch (const NumericalFailure& e) {
        throw NonFinite(std::string(equation) + ": " + e.what(), t);
    } catch (const InvalidArgument& e) {
        throw NonFinite(std::string(equation) + ": " + e.what(), t);
    }
}

void check_finite(const std::vector<double>& v, const char* equation, double t) {
    for (double x : v)
        if (!std::isfinite(x)) throw NonFinite(std::string(equation) + ": non-finite value", t);
}

} // namespace

SurfaceBundle slope_to_bundle(const PeriodicField& u, double x_anchor) {
    if (!(u.min() > 0.0)) throw InvalidArgument("slope-positivity violation: u must be positive");
    const auto& ga = u.grid();
    const std::size_t n = ga.n();
    const double da = ga.spacing();

    // phi on nodes 0..n, the last one closing the period.
    std::vector<double> phi(n + 1);
    phi[0] = x_anchor;
    for (std::size_t i = 0; i < n; ++i) phi[i + 1] = phi[i] + 0.5 * da * (1.0 / u[i] + 1.0 / u.at(static_cast<std::ptrdiff_t>(i) + 1));
    const double L = phi[n] - phi[0];
    auto phi_field = WindingField::from_values(ga, std::span<const double>(phi.data(), n), L);

    const auto gx = make_grid(n, L);
    std::vector<double> h(n), rho(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = gx.node(j);
        const double periods = std::floor((x - phi[0]) / L);
        const double y = x - periods * L;
        auto k = static_cast<std::size_t>(std::upper_bound(phi.begin(), phi.end(), y) - phi.begin());
        k = std::clamp<std::size_t>(k, 1, n) - 1;
        const double x0 = phi[k];
        const double x1 = phi[k + 1];
        const double secant = da / (x1 - x0);
        double m0 = u[k];
        double m1 = u.at(static_cast<std::ptrdiff_t>(k) + 1);
        const double a = m0 / secant;
        const double b = m1 / secant;
        const double r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            m0 *= tau;
            m1 *= tau;
        }
        const double alpha = hermite(y, x0, x1, ga.node(k), ga.node(k) + da, m0, m1);
        h[j] = alpha + periods;
        rho[j] = interpolate(u, h[j]);
    }
    return SurfaceBundle{u, phi_field, WindingField::from_values(gx, h, 1.0), PeriodicField(gx, std::move(rho)), L};
}

PeriodicField bundle_to_slope(const WindingField& phi) {
    const auto& g = phi.grid();
    const std::size_t n = g.n();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        const double d = phi.forward_slope(k) + phi.forward_slope(k - 1);
        require_positive_slope(d, "bundle_to_slope");
        u[i] = 2.0 / d;
    }
    return PeriodicField(g, std::move(u));
}

PeriodicField bundle_to_slope(const SurfaceBundle& b) { return bundle_to_slope(b.phi); }

std::vector<double> phi_rhs(const WindingField& phi) {
    const std::size_t n = phi.grid().n();
    const double d = phi.grid().spacing();
    // q[j] sits on the half node j + 1/2.
    std::vector<double> q(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = phi.forward_slope(static_cast<std::ptrdiff_t>(j));
        require_positive_slope(p, "phi-equation");
        q[j] = 1.0 / (p * p * p);
    }
    const double inv = 1.0 / (d * d * d);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q1 = q[(i + 1) % n], q0 = q[i], qm1 = q[(i + n - 1) % n], qm2 = q[(i + n - 2) % n];
        out[i] = ((q1 - qm2) - 3.0 * (q0 - qm1)) * inv;
    }
    return out;
}

std::vector<double> height_rhs(const WindingField& h) {
    const std::size_t n = h.grid().n();
    const double d = h.grid().spacing();
    std::vector<double> s(n), s2(n), r(n);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = h.forward_slope(static_cast<std::ptrdiff_t>(j));
        require_positive_slope(s[j], "height equation");
        s2[j] = s[j] * s[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double lap = ((s2[(j + 1) % n] + s2[(j + n - 1) % n]) - 2.0 * s2[j]) / (d * d);
        r[j] = lap / s[j];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -1.5 * (r[i] - r[(i + n - 1) % n]) / d;
    return out;
}

std::vector<double> rho_rhs(const PeriodicField& rho) {
    const std::size_t n = rho.size();
    const double d = rho.grid().spacing();
    std::vector<double> sq(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        require_positive_slope(rho[i], "rho-equation");
        sq[i] = rho[i] * rho[i];
    }
    for (std::size_t i = 0; i < n; ++i) r[i] = ((sq[(i + 1) % n] + sq[(i + n - 1) % n]) - 2.0 * sq[i]) / (d * d) / rho[i];
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -1.5 * ((r[(i + 1) % n] + r[(i + n - 1) % n]) - 2.0 * r[i]) / (d * d);
    return out;
}

std::vector<double> formulation_rhs(Kind kind, const SurfaceBundle& b) {
    switch (kind) {
    case Kind::Height: return height_rhs(b.h);
    case Kind::Rho: return rho_rhs(b.rho);
    case Kind::Phi: return phi_rhs(b.phi);
    }
    throw InvalidArgument("unknown formulation");
}

CrossCheckReport cross_check_evolution(const PeriodicField& u0, double t_end, const CrossCheckOptions& opts) {
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    if (!(opts.cfl_safety > 0.0)) throw InvalidArgument("cfl_safety must be positive");
    const auto b = slope_to_bundle(u0, opts.x_anchor);
    const auto& ga = u0.grid();
    const auto& gx = b.h.grid();

    const double da4 = std::pow(ga.spacing(), 4);
    const double dx4 = std::pow(gx.spacing(), 4);
    double kappa_phi = 0.0;
    for (std::size_t j = 0; j < ga.n(); ++j) kappa_phi = std::max(kappa_phi, 3.0 / std::pow(b.phi.forward_slope(static_cast<std::ptrdiff_t>(j)), 4));
    double limit = std::min(da4 / (8.0 * continuum::max_cube_diffusivity(u0, 0.0)), da4 / (8.0 * kappa_phi));
    if (opts.include_position_forms) limit = std::min(limit, dx4 / (8.0 * 3.0));
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / (opts.cfl_safety * limit)));
    const double dt = t_end / static_cast<double>(steps);

    auto u = u0;
    auto phi_p = std::vector<double>(b.phi.periodic_part().begin(), b.phi.periodic_part().end());
    auto h_p = std::vector<double>(b.h.periodic_part().begin(), b.h.periodic_part().end());
    auto rho = std::vector<double>(b.rho.values().begin(), b.rho.values().end());
    const double phi0 = mean_of(phi_p), h0 = mean_of(h_p), rho0 = mean_of(rho);

    const Rhs f_phi = [&](const std::vector<double>& p) { return phi_rhs(WindingField(ga, p, b.L)); };
    const Rhs f_h = [&](const std::vector<double>& p) { return height_rhs(WindingField(gx, p, 1.0)); };
    const Rhs f_rho = [&](const std::vector<double>& r) { return rho_rhs(PeriodicField(gx, r)); };

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        u = named("u-equation", t, [&] { return continuum::rk4_step(u, 0.0, dt); });
        phi_p = named("phi-equation", t, [&] { return rk4(phi_p, dt, f_phi); });
        check_finite(phi_p, "phi-equation", t);
        if (opts.include_position_forms) {
            h_p = named("height equation", t, [&] { return rk4(h_p, dt, f_h); });
            check_finite(h_p, "height equation", t);
            rho = named("rho-equation", t, [&] { return rk4(rho, dt, f_rho); });
            check_finite(rho, "rho-equation", t);
        }
    }

    CrossCheckReport r;
    r.dt = dt;
    r.steps = steps;
    r.discrepancy = max_abs_difference(u, bundle_to_slope(WindingField(ga, phi_p, b.L)));
    // Mean of the full phi and h differs from the periodic part by a constant.
    r.phi_mean_drift = relative_drift(phi0 + 0.5 * b.L, mean_of(phi_p) + 0.5 * b.L, b.L);
    if (opts.include_position_forms) {
        r.h_mean_drift = relative_drift(h0 + 0.5, mean_of(h_p) + 0.5, 1.0);
        r.rho_mean_drift = relative_drift(rho0, mean_of(rho), 1.0 / b.L);
    }
    return r;
}

} // namespace vicinal::formulations
