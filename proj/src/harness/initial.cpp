#include "vicinal/harness/initial.hpp"

#include <cmath>
#include <numbers>

#include "vicinal/harness/experiments.hpp"

namespace vicinal::harness {

Xorshift64Star::Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? 0x9E3779B97F4A7C15ULL : seed) {}

std::uint64_t Xorshift64Star::next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
}

double Xorshift64Star::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double initial_value(const InitialCondition& ic, double h) {
    using std::numbers::pi;
    switch (ic.type) {
    case InitialCondition::Type::Constant: return ic.c;
    case InitialCondition::Type::SineCubed: return std::cbrt(ic.M + ic.A * std::sin(2.0 * pi * h));
    case InitialCondition::Type::DegenerateSine: {
        const double s = std::sin(pi * h);
        return std::cbrt(s * s);
    }
    case InitialCondition::Type::StepsUniformPerturbed: break;
    }
    throw InvalidArgument("step-train initial conditions have no continuum profile");
}

PeriodicField sample_initial(const InitialCondition& ic, const PeriodicGrid& grid) {
    return PeriodicField::sample(grid, [&](double h) { return initial_value(ic, h); });
}

double initial_m0(const InitialCondition& ic) {
    using std::numbers::pi;
    switch (ic.type) {
    case InitialCondition::Type::Constant: return 1.0 / ic.c;
    case InitialCondition::Type::DegenerateSine:
        // int_0^1 |sin(pi h)|^{-2/3} dh = B(1/2, 1/6) / pi
        return std::sqrt(pi) * std::tgamma(1.0 / 6.0) / (pi * std::tgamma(2.0 / 3.0));
    case InitialCondition::Type::SineCubed: {
        constexpr std::size_t n = 1 << 16;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += 1.0 / initial_value(ic, static_cast<double>(i) / n);
        return s / n;
    }
    case InitialCondition::Type::StepsUniformPerturbed: break;
    }
    throw InvalidArgument("step-train initial conditions have no continuum profile");
}

steps::StepConfiguration perturbed_uniform_steps(std::size_t N, double amplitude, std::uint64_t seed, double period) {
    if (N < 4) throw InvalidArgument("a step train needs at least 4 steps");
    if (!(amplitude >= 0.0 && amplitude < 1.0)) throw InvalidArgument("perturbation amplitude must lie in [0, 1)");
    Xorshift64Star rng(seed);
    std::vector<double> x(N);
    for (std::size_t i = 0; i < N; ++i)
        x[i] = (static_cast<double>(i) + amplitude * (rng.uniform() - 0.5)) * period / static_cast<double>(N);
    return steps::StepConfiguration(period, std::move(x));
}

steps::StepConfiguration initial_steps(const InitialCondition& ic) {
    if (ic.type != InitialCondition::Type::StepsUniformPerturbed)
        throw InvalidArgument("initial condition is not a step train");
    return perturbed_uniform_steps(ic.N, ic.amplitude, ic.seed);
}

PeriodicField random_phase_field(const PeriodicGrid& grid, std::uint64_t seed) {
    using std::numbers::pi;
    Xorshift64Star rng(seed);
    double phase[4];
    for (double& p : phase) p = 2.0 * pi * rng.uniform();
    return PeriodicField::sample(grid, [&](double h) {
        double v = 2.0;
        for (int k = 1; k <= 4; ++k) v += 0.5 / (k * k) * std::cos(2.0 * pi * k * h + phase[k - 1]);
        return v;
    });
}

} // namespace vicinal::harness
