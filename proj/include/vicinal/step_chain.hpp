/// @file step_chain.hpp
/// @brief Discrete step dynamics on one period of a vicinal surface.
///
/// N steps x_0 < ... < x_{N-1} of height a = 1/N, periodic with period L:
/// x_{i+N} = x_i + L. Terrace i lies between steps i and i+1; terrace N-1 is the
/// wrap-around terrace of width x_0 + L - x_{N-1}.
///
/// The interaction energy is F_N = 1/2 sum a^3 / w_i^2 and the chemical potential
/// mu_i = a^2/w_i^3 - a^2/w_{i-1}^3.

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace vicinal::steps {

class StepConfiguration {
public:
    /// Rejects non-increasing positions or a non-positive wrap-around terrace.
    StepConfiguration(double period, std::vector<double> positions);

    /// Equally spaced train x_i = offset + i*L/N.
    static StepConfiguration uniform(std::size_t n_steps, double period = 1.0, double offset = 0.0);

    std::size_t size() const noexcept { return positions_.size(); }
    double period() const noexcept { return period_; }
    double step_height() const noexcept { return 1.0 / static_cast<double>(positions_.size()); }
    std::span<const double> positions() const noexcept { return positions_; }

private:
    double period_;
    std::vector<double> positions_;
};

class SlopeVector {
public:
    /// Rejects non-positive slopes. Step height is 1/N.
    explicit SlopeVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double step_height() const noexcept { return 1.0 / static_cast<double>(values_.size()); }
    std::span<const double> values() const noexcept { return values_; }
    /// Sum of a/u_i, the period the slopes reconstruct.
    double period() const;

private:
    std::vector<double> values_;
};

struct Adl {};
struct Dl {
    double dk = 1.0; ///< D/k; the prefactor is dk/a^2.
};
struct Bcf {
    double dk; ///< D/k.
};
using VelocityModel = std::variant<Adl, Dl, Bcf>;

std::vector<double> terrace_widths(const StepConfiguration& c);
double step_energy(const StepConfiguration& c);
std::vector<double> chemical_potential(const StepConfiguration& c);
std::vector<double> velocities(const StepConfiguration& c, const VelocityModel& model);

/// du_i/dt = -(u_i^2 / a^4) * (5-point fourth difference of u^3 centred at i).
std::vector<double> slope_rhs(const SlopeVector& s);

SlopeVector to_slopes(const StepConfiguration& c);
/// Positions x_0 = x1, x_{i+1} = x_i + a/u_i; the period is sum a/u_i.
StepConfiguration from_slopes(const SlopeVector& s, double x1);

/// Rigid translation by `shift`, re-wrapped into [0, L) with the index order rotated
/// so that positions stay increasing.
StepConfiguration translated(const StepConfiguration& c, double shift);

struct IntegrationControls {
    double rtol = 1e-8;
    double atol = 1e-12;
    /// Zero selects 0.1 a^4 / max(1, max|mu|).
    double dt_initial = 0.0;
    double dt_min = 1e-300;
    double dt_max = std::numeric_limits<double>::infinity();
    /// Fraction of L below which a terrace counts as collided.
    double collision_floor = 1e-8;
    /// Allowed energy increase per accepted step, relative to 1 + F_N.
    double energy_tolerance = 1e-10;
    /// Configurations are stored every `record_interval` time units (and at the ends);
    /// zero stores every accepted step.
    double record_interval = 0.0;
    std::size_t max_steps = std::numeric_limits<std::size_t>::max();
};

struct StepTrajectory {
    /// One entry per accepted step, starting with t = 0.
    std::vector<double> times;
    std::vector<double> energy_series;
    /// Stored configurations and their times.
    std::vector<double> state_times;
    std::vector<StepConfiguration> states;
    std::size_t rejected_steps = 0;

    const StepConfiguration& final_state() const { return states.back(); }
};

/// Adaptive RK4 (step doubling error estimate, PI step-size control).
/// Throws CollisionDetected when a terrace falls below the floor and the step size
/// cannot be reduced further, StepSizeUnderflow when dt drops below dt_min.
StepTrajectory integrate_steps(const StepConfiguration& c0, const VelocityModel& model, double t_end,
                               const IntegrationControls& controls = {});

} // namespace vicinal::steps
