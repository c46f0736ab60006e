#include "vicinal/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "vicinal/continuum.hpp"
#include "vicinal/energetics.hpp"
#include "vicinal/formulations.hpp"
#include "vicinal/harness/experiments.hpp"
#include "vicinal/harness/initial.hpp"
#include "vicinal/step_chain.hpp"

namespace vicinal::harness {

namespace {

using continuum::EvolveResult;
using energetics::EnergyReport;

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct RecordedRun {
    std::string name;
    double epsilon = 0.0;
    bool smooth_positive = true;
    std::vector<EnergyReport> reports;
};

constexpr int kDecayId = 5;
constexpr int kConservationId = 8;

struct Suite {
    bool quick = false;
    int only = 0;
    std::ostream* log = nullptr;
    std::vector<RecordedRun> runs;
    std::vector<CriterionResult> results;

    void record(const std::string& name, double eps, const EvolveResult& r, bool smooth_positive = true) {
        runs.push_back(RecordedRun{name, eps, smooth_positive, r.reports});
    }

    bool wanted(int id) const { return only == 0 || only == id || only == kDecayId || only == kConservationId; }

    void check(int id, const std::string& name, bool long_run, const std::function<Outcome()>& body) {
        if (!wanted(id)) return;
        CriterionResult res;
        res.id = id;
        res.name = name;
        if (quick && long_run) {
            res.skipped = true;
            res.detail = "skipped in quick mode";
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto o = body();
                res.passed = o.passed;
                res.detail = o.detail;
            } catch (const std::exception& e) {
                res.passed = false;
                res.detail = std::string("error: ") + e.what();
            }
            res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        if (log && (only == 0 || only == id)) *log << format_line(res) << std::endl;
        results.push_back(std::move(res));
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Adaptive Simpson quadrature, used as an independent check on m0.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

InitialCondition sine_cubed(double A, double M) {
    InitialCondition ic;
    ic.type = InitialCondition::Type::SineCubed;
    ic.A = A;
    ic.M = M;
    return ic;
}

InitialCondition degenerate_sine() {
    InitialCondition ic;
    ic.type = InitialCondition::Type::DegenerateSine;
    return ic;
}

continuum::SolverOptions semi_implicit(double dt, double report_every, bool keep = false) {
    continuum::SolverOptions o;
    o.scheme = continuum::Scheme::SemiImplicit;
    o.mobility = continuum::Mobility::Secant;
    o.dt = dt;
    o.report_every = report_every;
    o.keep_snapshots = keep;
    return o;
}

std::vector<energetics::Snapshot> snapshots_of(const EvolveResult& r) {
    std::vector<energetics::Snapshot> s;
    for (const auto& st : r.trajectory) s.push_back(continuum::to_snapshot(st));
    return s;
}

double max_drift(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

std::string format_line(const CriterionResult& r) {
    char id[8];
    std::snprintf(id, sizeof id, "AC%02d", r.id);
    const char* status = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    return std::string(id) + " " + status + "  " + r.name + ": " + r.detail;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.skipped || r.passed; });
}

std::vector<CriterionResult> run_acceptance(bool quick, std::ostream* log, int only) {
    using std::numbers::pi;
    Suite suite;
    suite.quick = quick;
    suite.only = only;
    suite.log = log;

    const auto smooth = sine_cubed(0.1, 1.0);

    suite.check(1, "equilibrium exactness", false, [&] {
        double worst = 0.0;
        const auto grid = make_grid(64);
        const auto u0 = PeriodicField::constant(grid, 1.3);

        continuum::SolverOptions ex;
        ex.scheme = continuum::Scheme::ExplicitRk4;
        continuum::SolverState s{0.0, u0, 0.0, 0.0, 0, {}, u0.min()};
        for (int k = 0; k < 1000; ++k) s = continuum::explicit_step(s, ex);
        worst = std::max(worst, max_abs_difference(s.u, u0));

        for (auto mob : {continuum::Mobility::Lagged, continuum::Mobility::Secant}) {
            auto o = semi_implicit(1e-6, 0.0);
            o.mobility = mob;
            const auto start = continuum::regularize_initial(u0, 1e-3);
            continuum::SolverState si{0.0, start, 1e-3, 0.0, 0, {}, start.min()};
            for (int k = 0; k < 1000; ++k) si = continuum::semi_implicit_step(si, 1e-6, o);
            worst = std::max(worst, max_abs_difference(si.u, start));
        }

        const std::size_t N = 16;
        const double a4 = std::pow(1.0 / N, 4);
        steps::IntegrationControls ctl;
        ctl.dt_initial = ctl.dt_max = 0.1 * a4;
        ctl.max_steps = 1000;
        for (const steps::VelocityModel& m : {steps::VelocityModel{steps::Adl{}}, steps::VelocityModel{steps::Dl{1.0}},
                                              steps::VelocityModel{steps::Bcf{0.5}}}) {
            const auto c0 = steps::StepConfiguration::uniform(N);
            const auto tr = steps::integrate_steps(c0, m, 1000 * ctl.dt_max, ctl);
            worst = std::max(worst, max_drift(tr.final_state().positions(), c0.positions()));
        }
        return Outcome{worst <= 1e-12, "max sup-norm drift over 1000 steps " + sci(worst) + " (limit 1e-12)"};
    });

    suite.check(2, "discrete energy dissipation of the step chain", false, [&] {
        const std::size_t N = 32;
        const double a = 1.0 / N;
        const auto c0 = perturbed_uniform_steps(N, 0.3, 7);
        try {
            const auto tr = steps::integrate_steps(c0, steps::Adl{}, 10.0 * std::pow(a, 4));
            double worst = -1.0;
            bool ok = true;
            for (std::size_t k = 1; k < tr.energy_series.size(); ++k) {
                const double inc = tr.energy_series[k] - tr.energy_series[k - 1];
                worst = std::max(worst, inc / (1.0 + tr.energy_series[k - 1]));
                ok = ok && inc <= 1e-10 * (1.0 + tr.energy_series[k - 1]);
            }
            return Outcome{ok, std::to_string(tr.energy_series.size() - 1) + " accepted steps, largest relative increase " +
                                   sci(worst) + ", no collision"};
        } catch (const CollisionDetected& e) {
            return Outcome{false, std::string("collision: ") + e.what()};
        }
    });

    // Shared by the two dissipation equalities.
    std::vector<energetics::DissipationResiduals> residuals;
    double E_start = 0.0;
    auto dissipation_runs = [&] {
        if (!residuals.empty()) return;
        const auto u0 = sample_initial(smooth, make_grid(128));
        for (double dt : {2e-8, 1e-8, 5e-9}) {
            const auto r = continuum::evolve(u0, 1e-3, 2e-4, semi_implicit(dt, 0.0));
            suite.record("dissipation dt=" + sci(dt), 1e-3, r);
            residuals.push_back(energetics::dissipation_residuals(r.reports, 1e-3));
            E_start = r.reports.front().E;
        }
    };
    auto refinement = [&](auto pick, const char* label) {
        dissipation_runs();
        const double q1 = std::abs(pick(residuals[0])), q2 = std::abs(pick(residuals[1])), q3 = std::abs(pick(residuals[2]));
        const bool ok = q1 / q2 >= 1.5 && q2 / q3 >= 1.5 && q3 <= 1e-4 * E_start;
        return Outcome{ok, std::string("|") + label + "| at dt = 2e-8, 1e-8, 5e-9: " + sci(q1) + ", " + sci(q2) + ", " + sci(q3) +
                               "; ratios " + sci(q1 / q2) + ", " + sci(q2 / q3) + "; limit 1e-4 E(0) = " + sci(1e-4 * E_start)};
    };
    suite.check(3, "first dissipation equality", true, [&] {
        return refinement([](const auto& d) { return d.r1; }, "r1");
    });
    suite.check(4, "second dissipation equality", true, [&] {
        return refinement([](const auto& d) { return d.r2; }, "r2");
    });

    // Degenerate-sine runs shared by the positivity and small-set criteria.
    std::vector<std::pair<double, EvolveResult>> degenerate;
    const auto deg = degenerate_sine();
    const auto deg_u0 = sample_initial(deg, make_grid(256));
    const double deg_E0 = energetics::dissipation_energy(deg_u0);
    const double deg_C = initial_m0(deg) + 1.0;
    auto degenerate_runs = [&] {
        if (!degenerate.empty()) return;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            auto r = continuum::evolve(deg_u0, eps, 1e-3, semi_implicit(1e-6, 1e-5, true));
            suite.record("degenerate sine eps=" + sci(eps), eps, r, false);
            degenerate.emplace_back(eps, std::move(r));
        }
    };

    suite.check(6, "positivity lower bound", true, [&] {
        degenerate_runs();
        bool ok = true;
        std::string detail;
        for (const auto& [eps, r] : degenerate) {
            const double bound = energetics::positivity_lower_bound(deg_E0, deg_C, eps);
            const double m = r.final_state.u_min_seen;
            ok = ok && m >= bound;
            detail += "eps=" + sci(eps) + ": min u " + sci(m) + " >= " + sci(bound) + "; ";
        }
        return Outcome{ok, detail};
    });

    suite.check(7, "small-set measure bound", true, [&] {
        degenerate_runs();
        bool ok = true;
        double worst = 0.0;
        for (const auto& [eps, r] : degenerate) {
            const auto snaps = snapshots_of(r);
            for (double delta : {0.02, 0.05, 0.1}) {
                const auto v = energetics::small_set_measure(snaps, delta, deg_C);
                ok = ok && v.satisfied;
                worst = std::max(worst, v.lhs / v.rhs);
            }
        }
        return Outcome{ok, "9 (eps, delta) pairs, largest measure / (C_m0 T delta) = " + sci(worst)};
    });

    suite.check(9, "long-time limit", false, [&] {
        const auto f = [](double h) { return 1.0 / std::cbrt(1.0 + 0.1 * std::sin(2.0 * pi * h)); };
        const double m0 = adaptive_simpson(f, 0.0, 1.0, 1e-14);
        const auto u0 = sample_initial(smooth, make_grid(128));
        auto o = semi_implicit(1e-6, 1e-4);
        const auto r = longtime(u0, 0.0, 0.05, 1e-6, o);
        suite.record("long-time eps=0", 0.0, r.run);
        const double err = std::abs(r.limit - 1.0 / m0);
        return Outcome{r.reached_tolerance && err <= 1e-4,
                       "stopped at t=" + sci(r.t_stop) + ", limit " + sci(r.limit) + ", 1/m0 " + sci(1.0 / m0) + ", error " + sci(err)};
    });

    suite.check(10, "biharmonic identity convergence", false, [&] {
        auto res = [](std::size_t n) {
            const auto u = PeriodicField::sample(make_grid(n), [](double h) { return 1.1 + std::cos(2.0 * std::numbers::pi * h); });
            return energetics::biharmonic_identity_residual(u);
        };
        const double r1 = res(128), r2 = res(256);
        const double ratio = r1 / r2;
        return Outcome{ratio >= 3.0 && ratio <= 5.0, "residuals " + sci(r1) + " -> " + sci(r2) + ", ratio " + sci(ratio)};
    });

    suite.check(11, "minimum deviation bound", false, [&] {
        int ok = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto v = energetics::min_deviation_check(random_phase_field(make_grid(256), seed));
            ok += v.satisfied ? 1 : 0;
            worst = std::max(worst, v.lhs / v.rhs);
        }
        return Outcome{ok == 20, std::to_string(ok) + "/20 fields satisfy the bound, largest lhs/rhs " + sci(worst)};
    });

    suite.check(12, "Hoelder modulus stability", true, [&] {
        auto constant = [&](std::size_t n, double dt) {
            const auto r = continuum::evolve(sample_initial(smooth, make_grid(n)), 1e-3, 2e-4, semi_implicit(dt, 1e-5, true));
            suite.record("Hoelder n=" + std::to_string(n) + " dt=" + sci(dt), 1e-3, r);
            return energetics::holder_modulus(snapshots_of(r));
        };
        const double base = constant(128, 1e-7), half_dt = constant(128, 5e-8), fine = constant(256, 1e-7);
        auto within = [](double a, double b) { return a / b < 2.0 && b / a < 2.0; };
        return Outcome{within(base, half_dt) && within(base, fine),
                       "C = " + sci(base) + " (base), " + sci(half_dt) + " (dt/2), " + sci(fine) + " (2n)"};
    });

    suite.check(13, "cross-formulation equivalence", true, [&] {
        const InitialCondition ic = sine_cubed(0.05, 1.0);
        formulations::CrossCheckOptions o;
        const auto a = formulations::cross_check_evolution(sample_initial(ic, make_grid(128)), 5e-7, o);
        const auto b = formulations::cross_check_evolution(sample_initial(ic, make_grid(256)), 5e-7, o);
        const double ratio = a.discrepancy / b.discrepancy;
        const double drift = std::max({a.phi_mean_drift, a.h_mean_drift, a.rho_mean_drift, b.phi_mean_drift,
                                       b.h_mean_drift, b.rho_mean_drift});
        return Outcome{ratio >= 3.0 && drift < 1e-8, "discrepancy " + sci(a.discrepancy) + " -> " + sci(b.discrepancy) +
                                                         ", ratio " + sci(ratio) + "; largest mean drift " + sci(drift)};
    });

    suite.check(14, "discrete-to-continuum convergence", true, [&] {
        const std::vector<std::size_t> Ns{32, 64, 128};
        const auto r = step_vs_pde(smooth, Ns, 1e-5);
        return Outcome{r.strictly_decreasing,
                       "sup errors N=32,64,128: " + sci(r.error[0]) + ", " + sci(r.error[1]) + ", " + sci(r.error[2])};
    });

    suite.check(15, "oracle spot values", false, [&] {
        const double E = energetics::dissipation_energy(sample_initial(smooth, make_grid(256)));
        const double E_ref = std::pow(2.0 * pi, 4) / 1200.0;
        const double F2 = steps::step_energy(steps::StepConfiguration(1.0, {0.0, 0.25}));
        const double Fu = steps::step_energy(steps::StepConfiguration::uniform(32));
        const bool ok = std::abs(E - E_ref) <= 0.01 * E_ref && std::abs(F2 - 10.0 / 9.0) <= 1e-12 && std::abs(Fu - 0.5) <= 1e-12;
        return Outcome{ok, "E " + sci(E) + " vs " + sci(E_ref) + "; two-step F_N - 10/9 = " + sci(F2 - 10.0 / 9.0) +
                               "; uniform F_N - 1/2 = " + sci(Fu - 0.5)};
    });

    suite.check(kDecayId, "algebraic decay envelope", false, [&] {
        std::size_t count = 0;
        double worst = -std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const auto& run : suite.runs) {
            const double F0 = run.reports.front().F;
            for (std::size_t k = 1; k < run.reports.size(); ++k) {
                const auto v = energetics::decay_bound_check(run.reports[k], F0);
                ok = ok && v.satisfied && v.margin >= 0.0;
                worst = std::max(worst, v.lhs / v.rhs);
                ++count;
            }
        }
        if (count == 0) return Outcome{false, "no reports recorded"};
        return Outcome{ok, std::to_string(count) + " reports over " + std::to_string(suite.runs.size()) +
                               " runs, largest E(T) 6T / F(0) = " + sci(worst)};
    });

    suite.check(kConservationId, "conservation", false, [&] {
        bool ok = true;
        double worst_eps = 0.0, worst_zero = 0.0;
        std::size_t n_eps = 0, n_zero = 0;
        for (const auto& run : suite.runs) {
            const auto& a = run.reports.front();
            const auto& b = run.reports.back();
            const double rel = std::abs(b.m_reg - a.m_reg) / a.m_reg;
            if (run.epsilon > 0.0) {
                const double per_time = rel / (b.t - a.t);
                worst_eps = std::max(worst_eps, per_time);
                ok = ok && per_time < 1e-6;
                ++n_eps;
            } else if (run.smooth_positive) {
                worst_zero = std::max(worst_zero, rel);
                ok = ok && rel < 1e-5;
                ++n_zero;
            }
        }
        if (n_eps + n_zero == 0) return Outcome{false, "no runs recorded"};
        return Outcome{ok, std::to_string(n_eps) + " eps > 0 runs, worst m_reg drift per unit time " + sci(worst_eps) + "; " +
                               std::to_string(n_zero) + " eps = 0 runs, worst int 1/u drift " + sci(worst_zero)};
    });

    if (only != 0)
        std::erase_if(suite.results, [only](const auto& r) { return r.id != only; });
    std::sort(suite.results.begin(), suite.results.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
    return suite.results;
}

} // namespace vicinal::harness
