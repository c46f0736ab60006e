#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vicinal/continuum.hpp"
#include "vicinal/energetics.hpp"
#include "vicinal/harness/config.hpp"

namespace vicinal::harness {

struct RunArtifacts {
    std::filesystem::path series;
    std::vector<std::filesystem::path> snapshots;
    std::filesystem::path verdicts;
    std::filesystem::path metadata;
    std::vector<energetics::BoundVerdict> verdict_list;
    bool all_satisfied = true;
    /// Kind-specific results, also stored in the metadata file.
    nlohmann::json summary;
    double wall_seconds = 0.0;
};

/// Dispatches on cfg.kind and writes everything under cfg.out_dir.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

continuum::SolverOptions solver_options(const ExperimentConfig& cfg);

/// Value of a continuum initial condition at height h.
double initial_value(const InitialCondition& ic, double h);

/// Verdicts for one continuum run: the decay envelope at every report, and when eps > 0
/// the positivity bound with E0 = E(u0) of the unregularized datum and C_m0 = m0 + 1.
std::vector<energetics::BoundVerdict> run_verdicts(const continuum::EvolveResult& r, double epsilon, double E0,
                                                   double m0);

struct SweepRow {
    double epsilon = 0.0;
    double u_min_seen = 0.0;
    double lower_bound = 0.0;
    bool satisfied = false;
    double r1 = 0.0;
    double r2 = 0.0;
    double m_reg_drift = 0.0;
    continuum::EvolveResult run;
};
std::vector<SweepRow> eps_sweep(const InitialCondition& ic, std::span<const double> epsilons, double t_end,
                                std::size_t n, const continuum::SolverOptions& opts);

struct StepVsPdeOptions {
    std::size_t reference_n = 512;
    double reference_dt = 1e-8;
    steps::IntegrationControls controls{};
};
struct StepVsPdeResult {
    std::vector<std::size_t> N;
    std::vector<double> error;
    bool strictly_decreasing = false;
};
/// Samples u0 at heights i/N, integrates the slope ODE through the ADL step chain, and
/// compares with a fine semi-implicit PDE solution (eps = 0) at the step heights.
StepVsPdeResult step_vs_pde(const InitialCondition& ic, std::span<const std::size_t> Ns, double t_end,
                            const StepVsPdeOptions& opts = {});

struct RefineResult {
    std::vector<double> space_differences; ///< max |u_n - u_2n|, max |u_2n - u_4n|
    std::vector<double> time_differences;  ///< same for dt, dt/2, dt/4
    double space_order = 0.0;
    double time_order = 0.0;
};
RefineResult refine(const InitialCondition& ic, double epsilon, double t_end, std::size_t n, double dt,
                    const continuum::SolverOptions& opts);

struct LongtimeResult {
    double limit = 0.0;
    double prediction = 0.0;
    double abs_error = 0.0;
    double t_stop = 0.0;
    bool reached_tolerance = false;
    double m_drift = 0.0;
    continuum::EvolveResult run;
};
/// Runs until ||u - mean u||_inf < tolerance * mean u or t_end; compares mean u with 1/m.
LongtimeResult longtime(const PeriodicField& u0, double epsilon, double t_end, double tolerance,
                        const continuum::SolverOptions& opts);

} // namespace vicinal::harness
