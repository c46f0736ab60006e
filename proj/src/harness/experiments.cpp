#include "vicinal/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "vicinal/formulations.hpp"
#include "vicinal/harness/acceptance.hpp"
#include "vicinal/harness/initial.hpp"
#include "vicinal/harness/io.hpp"

#ifndef VICINAL_VERSION
#define VICINAL_VERSION "unknown"
#endif

namespace vicinal::harness {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_change(double before, double after) { return std::abs(after - before) / std::abs(before); }

json verdict_json(const energetics::BoundVerdict& v) {
    return json{{"name", v.name}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"satisfied", v.satisfied}, {"margin", v.margin}};
}

energetics::BoundVerdict flag_verdict(std::string name, bool ok, double lhs = kNaN, double rhs = kNaN) {
    energetics::BoundVerdict v;
    v.name = std::move(name);
    v.lhs = lhs;
    v.rhs = rhs;
    v.satisfied = ok;
    v.margin = rhs - lhs;
    return v;
}

std::string numbered(const std::string& stem, std::size_t k, OutputFormat f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04zu", k);
    return stem + buf + extension(f);
}

// Energy row for a step train, read through its slope profile u_i = a / w_i.
energetics::EnergyReport step_report(const steps::StepConfiguration& c, double t, double dt) {
    const auto s = steps::to_slopes(c);
    energetics::EnergyReport r;
    if (s.size() >= PeriodicGrid::kMinCells) {
        const PeriodicField u(make_grid(s.size()), std::vector<double>(s.values().begin(), s.values().end()));
        r = energetics::energy_report(u, 0.0, t, dt);
    } else {
        r.t = t;
        r.dt = dt;
        r.E = r.D = r.D_eps = kNaN;
        r.m = r.m_reg = c.period();
        r.u_min = *std::min_element(s.values().begin(), s.values().end());
        r.u_max = *std::max_element(s.values().begin(), s.values().end());
    }
    r.F = r.F_eps = steps::step_energy(c);
    return r;
}

struct Written {
    std::vector<energetics::BoundVerdict> verdicts;
    json summary;
};

Written run_steps(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto c0 = initial_steps(cfg.initial);
    steps::IntegrationControls ctl;
    ctl.record_interval = cfg.report_every;
    const auto traj = steps::integrate_steps(c0, cfg.model, cfg.t_end, ctl);

    std::vector<energetics::EnergyReport> reports;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const double dt = k == 0 ? 0.0 : traj.state_times[k] - traj.state_times[k - 1];
        reports.push_back(step_report(traj.states[k], traj.state_times[k], dt));
    }
    art.series = write_series(reports, cfg.out_dir / ("series" + extension(cfg.format)), cfg.format);

    const std::size_t N = c0.size();
    if (N >= PeriodicGrid::kMinCells) {
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            if (k % cfg.snapshot_every != 0 && k + 1 != traj.states.size()) continue;
            const auto s = steps::to_slopes(traj.states[k]);
            const PeriodicField u(make_grid(N), std::vector<double>(s.values().begin(), s.values().end()));
            art.snapshots.push_back(write_snapshot(traj.state_times[k], u, 0.0, cfg.out_dir / numbered("snapshot", k, cfg.format), cfg.format));
        }
    }

    double worst = 0.0, bound = 0.0;
    for (std::size_t k = 1; k < traj.energy_series.size(); ++k) {
        const double inc = traj.energy_series[k] - traj.energy_series[k - 1];
        const double tol = ctl.energy_tolerance * (1.0 + traj.energy_series[k - 1]);
        if (inc - tol > worst - bound || k == 1) {
            worst = inc;
            bound = tol;
        }
    }
    Written w;
    w.verdicts.push_back(energetics::make_verdict("step energy non-increasing per accepted step (worst increase)", worst, bound));
    w.summary = {{"accepted_steps", traj.times.size() > 0 ? traj.times.size() - 1 : 0},
                 {"rejected_steps", traj.rejected_steps},
                 {"F_initial", traj.energy_series.front()},
                 {"F_final", traj.energy_series.back()}};
    return w;
}

Written run_continuum(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto grid = make_grid(cfg.n);
    const auto u0 = sample_initial(cfg.initial, grid);
    const double eps = cfg.epsilon.front();
    const auto res = continuum::evolve(u0, eps, cfg.t_end, solver_options(cfg));

    art.series = write_series(res.reports, cfg.out_dir / ("series" + extension(cfg.format)), cfg.format);
    const auto& tr = res.trajectory;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (k % cfg.snapshot_every != 0 && k + 1 != tr.size()) continue;
        art.snapshots.push_back(write_snapshot(tr[k].t, tr[k].u, eps, cfg.out_dir / numbered("snapshot", k, cfg.format), cfg.format));
    }

    Written w;
    w.verdicts = run_verdicts(res, eps, energetics::dissipation_energy(u0), initial_m0(cfg.initial));
    const auto& first = res.reports.front();
    const auto& last = res.reports.back();
    bool monotone = true;
    for (const auto& r : res.reports) monotone = monotone && r.energy_monotone;
    w.summary = {{"steps", res.steps},
                 {"floor_events", res.final_state.floor_events},
                 {"u_min_seen", res.final_state.u_min_seen},
                 {"energy_monotone", monotone},
                 {"m_reg_relative_drift", relative_change(first.m_reg, last.m_reg)}};
    if (res.reports.size() >= 2) {
        const auto d = energetics::dissipation_residuals(res.reports, eps);
        w.summary["r1"] = d.r1;
        w.summary["r2"] = d.r2;
    }
    return w;
}

Written run_sweep(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto rows = eps_sweep(cfg.initial, cfg.epsilon, cfg.t_end, cfg.n, solver_options(cfg));
    std::vector<std::vector<double>> table;
    Written w;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        table.push_back({r.epsilon, r.u_min_seen, r.lower_bound, r.satisfied ? 1.0 : 0.0, r.r1, r.r2, r.m_reg_drift});
        write_series(r.run.reports, cfg.out_dir / numbered("series_eps", k, cfg.format), cfg.format);
        if (r.epsilon > 0.0)
            w.verdicts.push_back(energetics::make_verdict("positivity lower bound at eps=" + format_double(r.epsilon),
                                                          r.lower_bound, r.u_min_seen));
    }
    art.series = write_table({"epsilon", "u_min_seen", "lower_bound", "satisfied", "r1", "r2", "m_reg_drift"}, table,
                             cfg.out_dir / ("sweep" + extension(cfg.format)), cfg.format);
    w.summary = {{"members", rows.size()}};
    return w;
}

Written run_step_vs_pde(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto r = step_vs_pde(cfg.initial, cfg.steps_list, cfg.t_end);
    std::vector<std::vector<double>> table;
    for (std::size_t k = 0; k < r.N.size(); ++k) table.push_back({static_cast<double>(r.N[k]), r.error[k]});
    art.series = write_table({"N", "sup_error"}, table, cfg.out_dir / ("step_vs_pde" + extension(cfg.format)), cfg.format);
    Written w;
    w.verdicts.push_back(flag_verdict("step-ODE to PDE error strictly decreasing in N", r.strictly_decreasing));
    w.summary = {{"N", r.N}, {"error", r.error}};
    return w;
}

Written run_refine(const ExperimentConfig& cfg, RunArtifacts& art) {
    const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.report_every / 10.0;
    const auto r = refine(cfg.initial, cfg.epsilon.front(), cfg.t_end, cfg.n, dt, solver_options(cfg));
    std::vector<std::vector<double>> table = {
        {0.0, r.space_differences[0], r.space_differences[1], r.space_order},
        {1.0, r.time_differences[0], r.time_differences[1], r.time_order},
    };
    art.series = write_table({"axis", "difference_coarse", "difference_fine", "observed_order"}, table,
                             cfg.out_dir / ("refine" + extension(cfg.format)), cfg.format);
    Written w;
    w.summary = {{"space_order", r.space_order}, {"time_order", r.time_order},
                 {"axis_legend", "0 = grid n, 2n, 4n; 1 = dt, dt/2, dt/4"}};
    return w;
}

Written run_longtime(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto u0 = sample_initial(cfg.initial, make_grid(cfg.n));
    const auto r = longtime(u0, cfg.epsilon.front(), cfg.t_end, cfg.stop_tolerance, solver_options(cfg));
    art.series = write_series(r.run.reports, cfg.out_dir / ("series" + extension(cfg.format)), cfg.format);
    art.snapshots.push_back(write_snapshot(r.run.final_state.t, r.run.final_state.u, cfg.epsilon.front(),
                                           cfg.out_dir / ("snapshot_final" + extension(cfg.format)), cfg.format));
    Written w;
    w.verdicts.push_back(flag_verdict("stopping tolerance reached before t_end", r.reached_tolerance));
    w.verdicts.push_back(energetics::make_verdict("|limit - steady state prediction| <= 1e-4", r.abs_error, 1e-4));
    w.summary = {{"limit", r.limit}, {"prediction", r.prediction}, {"abs_error", r.abs_error},
                 {"t_stop", r.t_stop}, {"conserved_relative_drift", r.m_drift}};
    return w;
}

Written run_crosscheck(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto u0 = sample_initial(cfg.initial, make_grid(cfg.n));
    formulations::CrossCheckOptions o;
    o.cfl_safety = std::min(cfg.cfl_safety, 0.9);
    const auto r = formulations::cross_check_evolution(u0, cfg.t_end, o);
    art.series = write_table({"discrepancy", "phi_mean_drift", "h_mean_drift", "rho_mean_drift", "dt", "steps"},
                             {{r.discrepancy, r.phi_mean_drift, r.h_mean_drift, r.rho_mean_drift, r.dt,
                               static_cast<double>(r.steps)}},
                             cfg.out_dir / ("crosscheck" + extension(cfg.format)), cfg.format);
    Written w;
    w.verdicts.push_back(energetics::make_verdict("phi mean drift < 1e-8", r.phi_mean_drift, 1e-8));
    w.verdicts.push_back(energetics::make_verdict("h mean drift < 1e-8", r.h_mean_drift, 1e-8));
    w.verdicts.push_back(energetics::make_verdict("rho mean drift < 1e-8", r.rho_mean_drift, 1e-8));
    w.summary = {{"discrepancy", r.discrepancy}, {"steps", r.steps}, {"dt", r.dt}};
    return w;
}

Written run_check_all(const ExperimentConfig& cfg, RunArtifacts& art) {
    const auto results = run_acceptance(cfg.quick);
    Written w;
    std::vector<std::vector<double>> table;
    for (const auto& r : results) {
        if (!r.skipped) w.verdicts.push_back(flag_verdict("AC" + std::to_string(r.id) + " " + r.name, r.passed));
        table.push_back({static_cast<double>(r.id), r.skipped ? -1.0 : (r.passed ? 1.0 : 0.0), r.seconds});
    }
    art.series = write_table({"criterion", "status", "seconds"}, table, cfg.out_dir / ("acceptance" + extension(cfg.format)),
                             cfg.format);
    json lines = json::array();
    for (const auto& r : results) lines.push_back(format_line(r));
    w.summary = {{"lines", lines}, {"status_legend", "1 pass, 0 fail, -1 skipped"}};
    return w;
}

} // namespace

continuum::SolverOptions solver_options(const ExperimentConfig& cfg) {
    continuum::SolverOptions o;
    o.scheme = cfg.scheme;
    o.mobility = cfg.mobility;
    o.cfl_safety = cfg.cfl_safety;
    o.dt = cfg.dt;
    o.report_every = cfg.report_every;
    o.positivity_floor = cfg.positivity_floor;
    return o;
}

std::vector<energetics::BoundVerdict> run_verdicts(const continuum::EvolveResult& r, double epsilon, double E0, double m0) {
    std::vector<energetics::BoundVerdict> v;
    const double F0 = r.reports.front().F;
    for (std::size_t k = 1; k < r.reports.size(); ++k) {
        auto d = energetics::decay_bound_check(r.reports[k], F0);
        d.name += " at t=" + format_double(r.reports[k].t);
        v.push_back(std::move(d));
    }
    if (epsilon > 0.0 && E0 > 0.0 && std::isfinite(m0)) {
        const double bound = energetics::positivity_lower_bound(E0, m0 + 1.0, epsilon);
        v.push_back(energetics::make_verdict("positivity lower bound min u >= eps/(18^{1/3} E0^{1/3} C_m0)", bound,
                                             r.final_state.u_min_seen));
    }
    return v;
}

std::vector<SweepRow> eps_sweep(const InitialCondition& ic, std::span<const double> epsilons, double t_end, std::size_t n,
                                const continuum::SolverOptions& opts) {
    const auto u0 = sample_initial(ic, make_grid(n));
    const double E0 = energetics::dissipation_energy(u0);
    const double m0 = initial_m0(ic);
    std::vector<SweepRow> rows;
    for (double eps : epsilons) {
        auto res = continuum::evolve(u0, eps, t_end, opts);
        const double bound = eps > 0.0 && E0 > 0.0 ? energetics::positivity_lower_bound(E0, m0 + 1.0, eps) : 0.0;
        const double u_min = res.final_state.u_min_seen;
        double r1 = kNaN, r2 = kNaN;
        if (res.reports.size() >= 2) {
            const auto d = energetics::dissipation_residuals(res.reports, eps);
            r1 = d.r1;
            r2 = d.r2;
        }
        const double drift = relative_change(res.reports.front().m_reg, res.reports.back().m_reg);
        rows.push_back(SweepRow{eps, u_min, bound, u_min >= bound, r1, r2, drift, std::move(res)});
    }
    return rows;
}

StepVsPdeResult step_vs_pde(const InitialCondition& ic, std::span<const std::size_t> Ns, double t_end,
                            const StepVsPdeOptions& opts) {
    for (auto N : Ns)
        if (N < 4 || opts.reference_n % N != 0)
            throw InvalidArgument("every step count must be at least 4 and divide the reference grid size");
    continuum::SolverOptions so;
    so.scheme = continuum::Scheme::SemiImplicit;
    so.mobility = continuum::Mobility::Secant;
    so.dt = opts.reference_dt;
    so.report_every = t_end;
    so.keep_snapshots = false;
    const auto ref = continuum::evolve(sample_initial(ic, make_grid(opts.reference_n)), 0.0, t_end, so).final_state.u;

    StepVsPdeResult out;
    for (auto N : Ns) {
        std::vector<double> s(N);
        for (std::size_t i = 0; i < N; ++i) s[i] = initial_value(ic, static_cast<double>(i) / static_cast<double>(N));
        const auto c0 = steps::from_slopes(steps::SlopeVector(std::move(s)), 0.0);
        const auto traj = steps::integrate_steps(c0, steps::Adl{}, t_end, opts.controls);
        const auto uN = steps::to_slopes(traj.final_state());
        const std::size_t stride = opts.reference_n / N;
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) err = std::max(err, std::abs(uN.values()[i] - ref[i * stride]));
        out.N.push_back(N);
        out.error.push_back(err);
    }
    out.strictly_decreasing = true;
    for (std::size_t k = 1; k < out.error.size(); ++k)
        out.strictly_decreasing = out.strictly_decreasing && out.error[k] < out.error[k - 1];
    return out;
}

RefineResult refine(const InitialCondition& ic, double epsilon, double t_end, std::size_t n, double dt,
                    const continuum::SolverOptions& opts) {
    auto o = opts;
    o.keep_snapshots = false;
    o.report_every = t_end;
    auto final_u = [&](std::size_t nn, double step) {
        o.dt = step;
        return continuum::evolve(sample_initial(ic, make_grid(nn)), epsilon, t_end, o).final_state.u;
    };
    auto coarse_difference = [](const PeriodicField& a, const PeriodicField& b) {
        const std::size_t stride = b.size() / a.size();
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i * stride]));
        return d;
    };
    RefineResult r;
    const auto s1 = final_u(n, dt), s2 = final_u(2 * n, dt), s4 = final_u(4 * n, dt);
    r.space_differences = {coarse_difference(s1, s2), coarse_difference(s2, s4)};
    const auto t2 = final_u(n, dt / 2), t4 = final_u(n, dt / 4);
    r.time_differences = {max_abs_difference(s1, t2), max_abs_difference(t2, t4)};
    r.space_order = std::log2(r.space_differences[0] / r.space_differences[1]);
    r.time_order = std::log2(r.time_differences[0] / r.time_differences[1]);
    return r;
}

LongtimeResult longtime(const PeriodicField& u0, double epsilon, double t_end, double tolerance,
                        const continuum::SolverOptions& opts) {
    auto o = opts;
    o.keep_snapshots = false;
    o.stop_when = [tolerance](const continuum::SolverState& s) {
        const auto v = s.u.values();
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double dev = 0.0;
        for (double x : v) dev = std::max(dev, std::abs(x - mean));
        return dev < tolerance * mean;
    };
    auto run = continuum::evolve(u0, epsilon, t_end, o);
    const auto& fin = run.final_state.u;
    double limit = 0.0;
    for (double x : fin.values()) limit += x;
    limit /= static_cast<double>(fin.size());

    // The conserved density pins the constant state: 1/u* for eps = 0, otherwise the root
    // of eps/(3u^3) + 1/u = m_reg(0), found by Newton from the eps = 0 value.
    const double m = run.reports.front().m_reg;
    double pred = 1.0 / m;
    if (epsilon > 0.0)
        for (int it = 0; it < 100; ++it) {
            const double g = epsilon / (3.0 * pred * pred * pred) + 1.0 / pred - m;
            const double dg = -epsilon / (pred * pred * pred * pred) - 1.0 / (pred * pred);
            const double next = pred - g / dg;
            if (std::abs(next - pred) <= 1e-15 * pred) break;
            pred = next;
        }
    LongtimeResult r{limit, pred, std::abs(limit - pred), run.final_state.t, run.stopped_early,
                     relative_change(run.reports.front().m_reg, run.reports.back().m_reg), std::move(run)};
    return r;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunArtifacts art;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());

    Written w;
    switch (cfg.kind) {
    case ExperimentKind::Run:
        w = cfg.initial.type == InitialCondition::Type::StepsUniformPerturbed ? run_steps(cfg, art) : run_continuum(cfg, art);
        break;
    case ExperimentKind::EpsSweep: w = run_sweep(cfg, art); break;
    case ExperimentKind::StepVsPde: w = run_step_vs_pde(cfg, art); break;
    case ExperimentKind::Refine: w = run_refine(cfg, art); break;
    case ExperimentKind::Longtime: w = run_longtime(cfg, art); break;
    case ExperimentKind::Crosscheck: w = run_crosscheck(cfg, art); break;
    case ExperimentKind::CheckAll: w = run_check_all(cfg, art); break;
    }
    art.verdict_list = std::move(w.verdicts);
    art.summary = std::move(w.summary);
    for (const auto& v : art.verdict_list) art.all_satisfied = art.all_satisfied && v.satisfied;

    json vj = json::array();
    for (const auto& v : art.verdict_list) vj.push_back(verdict_json(v));
    art.verdicts = cfg.out_dir / "verdicts.json";
    write_json(json{{"all_satisfied", art.all_satisfied}, {"verdicts", vj}}, art.verdicts);

    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json files = json::array();
    for (const auto& p : art.snapshots) files.push_back(p.string());
    art.metadata = cfg.out_dir / "metadata.json";
    write_json(json{{"config", to_json(cfg)},
                    {"code_version", VICINAL_VERSION},
                    {"wall_seconds", art.wall_seconds},
                    {"series", art.series.string()},
                    {"snapshots", files},
                    {"small_set_measure_note", "space-time measures weight each report by the interval to the next report"},
                    {"summary", art.summary}},
               art.metadata);
    return art;
}

} // namespace vicinal::harness
