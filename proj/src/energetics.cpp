#include "vicinal/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vicinal/errors.hpp"
#include "vicinal/kernels.hpp"

namespace vicinal::energetics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PeriodicField cubed(const PeriodicField& u) {
    std::vector<double> w(u.size());
    kernels::cube(u.values(), w);
    return PeriodicField(u.grid(), std::move(w));
}

} // namespace

BoundVerdict make_verdict(std::string name, double lhs, double rhs) {
    BoundVerdict v;
    v.name = std::move(name);
    v.lhs = lhs;
    v.rhs = rhs;
    v.satisfied = lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
    v.margin = rhs - lhs;
    return v;
}

double dissipation_energy(const PeriodicField& u) {
    const auto d2 = diff2(cubed(u));
    return kernels::sum_squares(d2.values()) * u.grid().spacing() / 6.0;
}

EnergyReport energy_report(const PeriodicField& u, double epsilon, double t, double dt) {
    const double h = u.grid().spacing();
    const std::size_t n = u.size();
    const auto w = cubed(u);
    const auto d2 = diff2(w);
    const auto d4 = diff4(w);

    EnergyReport r;
    r.t = t;
    r.dt = dt;
    r.F = 0.5 * kernels::sum_squares(u.values()) * h;
    r.E = kernels::sum_squares(d2.values()) * h / 6.0;

    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[i];
        a[i] = ui * ui * d4[i];
        b[i] = kernels::cube_mobility(ui, epsilon) * d4[i] * d4[i];
    }
    r.D = kernels::sum_squares(a) * h;
    r.D_eps = kernels::sum(b) * h;
    r.u_min = u.min();
    r.u_max = u.max();

    if (r.u_min <= 0.0) {
        r.m = r.m_reg = r.F_eps = kInf;
        return r;
    }
    std::vector<double> inv(n), reg(n), logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[i];
        inv[i] = 1.0 / ui;
        reg[i] = epsilon / (3.0 * ui * ui * ui) + 1.0 / ui;
        logs[i] = std::log(ui);
    }
    r.m = kernels::sum(inv) * h;
    r.m_reg = kernels::sum(reg) * h;
    r.F_eps = epsilon * kernels::sum(logs) * h + r.F;
    return r;
}

double positivity_lower_bound(double E0, double C_m0, double epsilon) {
    if (!(E0 > 0.0) || !(C_m0 > 0.0) || !(epsilon > 0.0))
        throw InvalidArgument("positivity bound needs positive E0, C_m0 and epsilon");
    return epsilon / (std::cbrt(18.0) * std::cbrt(E0) * C_m0);
}

BoundVerdict decay_bound_check(const EnergyReport& report_at_T, double F0) {
    const double T = report_at_T.t;
    const double rhs = T > 0.0 ? F0 / (6.0 * T) : kInf;
    return make_verdict("algebraic decay E(T) <= F(0)/(6T)", report_at_T.E, rhs);
}

DissipationResiduals dissipation_residuals(std::span<const EnergyReport> reports, double epsilon) {
    if (reports.size() < 2) throw InsufficientData("insufficient data: dissipation residuals need >= 2 reports");
    double int_d = 0.0;
    double int_e = 0.0;
    for (std::size_t k = 1; k < reports.size(); ++k) {
        const double dt = reports[k].t - reports[k - 1].t;
        const double d0 = epsilon > 0.0 ? reports[k - 1].D_eps : reports[k - 1].D;
        const double d1 = epsilon > 0.0 ? reports[k].D_eps : reports[k].D;
        int_d += 0.5 * dt * (d0 + d1);
        int_e += 0.5 * dt * (reports[k - 1].E + reports[k].E);
    }
    const auto& first = reports.front();
    const auto& last = reports.back();
    DissipationResiduals r;
    r.r1 = last.E + int_d - first.E;
    r.r2 = last.F_eps + 6.0 * int_e - first.F_eps;
    return r;
}

BoundVerdict small_set_measure(std::span<const Snapshot> trajectory, double delta, double C_m0) {
    if (trajectory.empty()) throw InsufficientData("insufficient data: empty trajectory");
    double measure = 0.0;
    for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
        const auto& u = trajectory[k].u;
        const double dt = trajectory[k + 1].t - trajectory[k].t;
        std::size_t count = 0;
        for (double v : u.values())
            if (v < delta) ++count;
        measure += dt * u.grid().spacing() * static_cast<double>(count);
    }
    const double T = trajectory.back().t - trajectory.front().t;
    return make_verdict("small-set measure |{u < delta}| <= C_m0 T delta", measure, C_m0 * T * delta);
}

BoundVerdict min_deviation_check(const PeriodicField& u) {
    const auto vals = u.values();
    const auto star = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    const double u_min = vals[star];
    const double L = u.grid().length();
    const double h = u.grid().spacing();
    double lhs = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i == star) continue;
        double d = std::abs(u.grid().node(i) - u.grid().node(star));
        d = std::min(d, L - d);
        lhs = std::max(lhs, (vals[i] - u_min) / std::pow(d, 1.5));
    }
    const auto d2 = diff2(u);
    const double norm = std::sqrt(kernels::sum_squares(d2.values()) * h);
    const double rhs = 2.0 / 3.0 * norm * (1.0 + std::sqrt(h));
    return make_verdict("minimum deviation (u - u_min) <= 2/3 |u_hh| |h - h*|^{3/2}", lhs, rhs);
}

double holder_modulus(std::span<const Snapshot> snapshots) {
    if (snapshots.size() < 3) throw InsufficientData("insufficient snapshots: Hoelder modulus needs >= 3");
    std::vector<PeriodicField> w;
    w.reserve(snapshots.size());
    for (const auto& s : snapshots) w.push_back(cubed(s.u));
    double c = 0.0;
    for (std::size_t i = 0; i < snapshots.size(); ++i)
        for (std::size_t j = i + 1; j < snapshots.size(); ++j) {
            const double dt = std::abs(snapshots[j].t - snapshots[i].t);
            if (dt == 0.0) continue;
            c = std::max(c, max_abs_difference(w[i], w[j]) / std::pow(dt, 0.25));
        }
    return c;
}

double steady_state_prediction(const PeriodicField& u0) {
    if (u0.min() <= 0.0) throw InvalidArgument("steady state prediction needs a strictly positive datum");
    return 1.0 / integrate(map(u0, [](double v) { return 1.0 / v; }));
}

double biharmonic_identity_residual(const PeriodicField& u) {
    const double h = u.grid().spacing();
    const auto lhs = kernels::sum_squares(diff2(cubed(u)).values()) * h;
    const auto d2u = diff2(u);
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double u2 = u[i] * u[i];
        t[i] = u2 * u2 * d2u[i] * d2u[i];
    }
    return std::abs(lhs - 9.0 * kernels::sum(t) * h);
}

double euler_identity_residual(const PeriodicField& u) {
    const double h = u.grid().spacing();
    const auto w = cubed(u);
    const auto d4 = diff4(w);
    const double six_e = kernels::sum_squares(diff2(w).values()) * h;
    return std::abs(six_e - kernels::dot(w.values(), d4.values()) * h);
}

} // namespace vicinal::energetics
