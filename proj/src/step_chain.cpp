#include "vicinal/step_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vicinal/errors.hpp"

namespace vicinal::steps {

namespace {

std::size_t prev(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }
std::size_t next(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }

void widths_of(std::span<const double> x, double period, std::span<double> w) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) w[i] = x[i + 1] - x[i];
    w[n - 1] = x[0] + period - x[n - 1];
}

void potential_of(std::span<const double> w, double a, std::span<double> mu) {
    const std::size_t n = w.size();
    const double a2 = a * a;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        const double wp = w[prev(i, n)];
        mu[i] = a2 / (wi * wi * wi) - a2 / (wp * wp * wp);
    }
}

struct VelocityKernel {
    std::span<const double> w;
    std::span<const double> mu;
    double a;
    std::span<double> v;

    void operator()(const Adl&) const {
        const std::size_t n = mu.size();
        const double inv = 1.0 / (a * a);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = ((mu[next(i, n)] - mu[i]) - (mu[i] - mu[prev(i, n)])) * inv;
    }
    void operator()(const Dl& m) const {
        const std::size_t n = mu.size();
        const double pre = m.dk / (a * a);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t p = prev(i, n);
            v[i] = pre * ((mu[next(i, n)] - mu[i]) / w[i] - (mu[i] - mu[p]) / w[p]);
        }
    }
    void operator()(const Bcf& m) const {
        const std::size_t n = mu.size();
        const double pre = m.dk / (a * a);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t p = prev(i, n);
            v[i] = pre * ((mu[next(i, n)] - mu[i]) / (w[i] + m.dk) - (mu[i] - mu[p]) / (w[p] + m.dk));
        }
    }
};

void validate_model(const VelocityModel& model) {
    if (const auto* b = std::get_if<Bcf>(&model); b && !(b->dk > 0.0))
        throw InvalidArgument("BCF model requires D/k > 0");
    if (const auto* d = std::get_if<Dl>(&model); d && !(d->dk > 0.0))
        throw InvalidArgument("DL model requires D/k > 0");
}

/// Right-hand side on raw positions; returns false when a terrace is not positive.
class PositionRhs {
public:
    PositionRhs(std::size_t n, double period, VelocityModel model)
        : period_(period), a_(1.0 / static_cast<double>(n)), model_(model), w_(n), mu_(n) {}

    bool operator()(std::span<const double> x, std::span<double> v) {
        widths_of(x, period_, w_);
        for (double wi : w_)
            if (!(wi > 0.0)) return false;
        potential_of(w_, a_, mu_);
        std::visit(VelocityKernel{w_, mu_, a_, v}, model_);
        return true;
    }

private:
    double period_;
    double a_;
    VelocityModel model_;
    std::vector<double> w_;
    std::vector<double> mu_;
};

double energy_of(std::span<const double> x, double period, std::vector<double>& scratch) {
    widths_of(x, period, scratch);
    const double a = 1.0 / static_cast<double>(x.size());
    double s = 0.0;
    for (double wi : scratch) s += a * a * a / (wi * wi);
    return 0.5 * s;
}

/// One classical RK4 step; false if any stage leaves the admissible set.
bool rk4(PositionRhs& rhs, std::span<const double> x, double dt, std::span<double> out) {
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    if (!rhs(x, k1)) return false;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    if (!rhs(tmp, k2)) return false;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    if (!rhs(tmp, k3)) return false;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    if (!rhs(tmp, k4)) return false;
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return true;
}

} // namespace

StepConfiguration::StepConfiguration(double period, std::vector<double> positions)
    : period_(period), positions_(std::move(positions)) {
    if (positions_.empty()) throw InvalidArgument("step configuration needs at least one step");
    if (!(period_ > 0.0) || !std::isfinite(period_)) throw InvalidArgument("period must be positive");
    for (double x : positions_)
        if (!std::isfinite(x)) throw InvalidArgument("non-finite step position");
    for (std::size_t i = 0; i + 1 < positions_.size(); ++i)
        if (!(positions_[i + 1] > positions_[i]))
            throw InvalidArgument("step positions must be strictly increasing (index " + std::to_string(i) + ")");
    if (!(positions_.front() + period_ > positions_.back()))
        throw InvalidArgument("wrap-around terrace must have positive width");
}

StepConfiguration StepConfiguration::uniform(std::size_t n_steps, double period, double offset) {
    std::vector<double> x(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i)
        x[i] = offset + static_cast<double>(i) * period / static_cast<double>(n_steps);
    return StepConfiguration(period, std::move(x));
}

SlopeVector::SlopeVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("slope vector needs at least one entry");
    for (double u : values_)
        if (!(u > 0.0) || !std::isfinite(u)) throw InvalidArgument("slopes must be positive and finite");
}

double SlopeVector::period() const {
    const double a = step_height();
    double s = 0.0;
    for (double u : values_) s += a / u;
    return s;
}

std::vector<double> terrace_widths(const StepConfiguration& c) {
    std::vector<double> w(c.size());
    widths_of(c.positions(), c.period(), w);
    return w;
}

double step_energy(const StepConfiguration& c) {
    std::vector<double> scratch(c.size());
    return energy_of(c.positions(), c.period(), scratch);
}

std::vector<double> chemical_potential(const StepConfiguration& c) {
    const auto w = terrace_widths(c);
    std::vector<double> mu(c.size());
    potential_of(w, c.step_height(), mu);
    return mu;
}

std::vector<double> velocities(const StepConfiguration& c, const VelocityModel& model) {
    validate_model(model);
    const auto w = terrace_widths(c);
    std::vector<double> mu(c.size()), v(c.size());
    potential_of(w, c.step_height(), mu);
    std::visit(VelocityKernel{w, mu, c.step_height(), v}, model);
    return v;
}

std::vector<double> slope_rhs(const SlopeVector& s) {
    const auto u = s.values();
    const std::size_t n = u.size();
    const double a = s.step_height();
    const double inv = 1.0 / (a * a * a * a);
    std::vector<double> w(n), out(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = u[i] * u[i] * u[i];
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m1 = prev(i, n), m2 = prev(m1, n), p1 = next(i, n), p2 = next(p1, n);
        const double twice = 2.0 * w[i];
        const double d4 = ((w[m2] + w[p2]) - twice) - 4.0 * ((w[m1] + w[p1]) - twice);
        out[i] = -u[i] * u[i] * d4 * inv;
    }
    return out;
}

SlopeVector to_slopes(const StepConfiguration& c) {
    auto w = terrace_widths(c);
    const double a = c.step_height();
    for (double& wi : w) wi = a / wi;
    return SlopeVector(std::move(w));
}

StepConfiguration from_slopes(const SlopeVector& s, double x1) {
    const auto u = s.values();
    const double a = s.step_height();
    std::vector<double> x(u.size());
    x[0] = x1;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) x[i + 1] = x[i] + a / u[i];
    return StepConfiguration(s.period(), std::move(x));
}

StepConfiguration translated(const StepConfiguration& c, double shift) {
    const double L = c.period();
    const std::size_t n = c.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fmod(c.positions()[i] + shift, L);
        if (v < 0.0) v += L;
        x[i] = v;
    }
    const auto first = static_cast<std::ptrdiff_t>(std::min_element(x.begin(), x.end()) - x.begin());
    std::rotate(x.begin(), x.begin() + first, x.end());
    return StepConfiguration(L, std::move(x));
}

StepTrajectory integrate_steps(const StepConfiguration& c0, const VelocityModel& model, double t_end,
                               const IntegrationControls& controls) {
    validate_model(model);
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");

    const std::size_t n = c0.size();
    const double L = c0.period();
    const double a = c0.step_height();
    const double floor = controls.collision_floor * L;
    PositionRhs rhs(n, L, model);

    std::vector<double> x(c0.positions().begin(), c0.positions().end());
    std::vector<double> full(n), half(n), two_half(n), scratch(n);

    double dt = controls.dt_initial;
    if (!(dt > 0.0)) {
        double mu_max = 0.0;
        for (double m : chemical_potential(c0)) mu_max = std::max(mu_max, std::abs(m));
        dt = 0.1 * a * a * a * a / std::max(1.0, mu_max);
    }
    dt = std::min(dt, controls.dt_max);

    StepTrajectory traj;
    double t = 0.0;
    double energy = energy_of(x, L, scratch);
    traj.times.push_back(t);
    traj.energy_series.push_back(energy);
    traj.state_times.push_back(t);
    traj.states.push_back(c0);
    double next_record = controls.record_interval;

    double err_prev = 1.0;
    std::size_t accepted = 0;
    bool collision_pending = false;

    while (t < t_end && accepted < controls.max_steps) {
        const double remaining = t_end - t;
        const double h = std::min(dt, remaining);
        if (h < controls.dt_min && h < remaining) {
            if (collision_pending) throw CollisionDetected("terrace width fell below collision floor", t);
            throw StepSizeUnderflow("step size " + std::to_string(h) + " below dt_min", t);
        }

        bool ok = rk4(rhs, x, h, full) && rk4(rhs, x, 0.5 * h, half) && rk4(rhs, half, 0.5 * h, two_half);
        double err = 0.0;
        bool floor_hit = false;
        double new_energy = 0.0;
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) {
                const double scale = controls.atol + controls.rtol * std::max(std::abs(x[i]), std::abs(two_half[i]));
                err = std::max(err, std::abs(two_half[i] - full[i]) / 15.0 / scale);
            }
            widths_of(two_half, L, scratch);
            floor_hit = *std::min_element(scratch.begin(), scratch.end()) < floor;
            new_energy = energy_of(two_half, L, scratch);
        }
        const bool energy_ok = ok && new_energy <= energy + controls.energy_tolerance * (1.0 + energy);
        collision_pending = !ok || floor_hit;

        if (ok && !floor_hit && energy_ok && err <= 1.0) {
            x.swap(two_half);
            t = (h == remaining) ? t_end : t + h;
            energy = new_energy;
            ++accepted;
            traj.times.push_back(t);
            traj.energy_series.push_back(energy);
            if (controls.record_interval <= 0.0 || t >= next_record || t == t_end) {
                traj.state_times.push_back(t);
                traj.states.emplace_back(L, x);
                while (controls.record_interval > 0.0 && next_record <= t) next_record += controls.record_interval;
            }
            const double e = std::max(err, 1e-10);
            const double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            err_prev = e;
            dt = std::min(controls.dt_max, h * std::clamp(fac, 0.2, 5.0));
        } else {
            ++traj.rejected_steps;
            double fac = 0.5;
            if (ok && !floor_hit && energy_ok) fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
            dt = h * fac;
        }
    }
    if (traj.state_times.back() != t) {
        traj.state_times.push_back(t);
        traj.states.emplace_back(L, x);
    }
    return traj;
}

} // namespace vicinal::steps
