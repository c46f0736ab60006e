#pragma once

#include <cstdint>

#include "vicinal/grid.hpp"
#include "vicinal/harness/config.hpp"
#include "vicinal/step_chain.hpp"

namespace vicinal::harness {

/// xorshift64* (Vigna 2014): state ^= state >> 12; state ^= state << 25; state ^= state >> 27;
/// output state * 0x2545F4914F6CDD1D. A zero seed is replaced by 0x9E3779B97F4A7C15.
/// uniform() takes the top 53 bits, giving a double in [0, 1).
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed);
    std::uint64_t next();
    double uniform();

private:
    std::uint64_t state_;
};

/// Samples a continuum datum on the grid. Step-train initials are rejected.
PeriodicField sample_initial(const InitialCondition& ic, const PeriodicGrid& grid);

/// m0 = int_0^1 1/u0 dh: closed form for constant and degenerate_sine, a 2^16-point
/// periodic rectangle rule for sine_cubed (spectrally accurate for that datum).
double initial_m0(const InitialCondition& ic);

/// x_i = (i + amplitude (xi_i - 1/2)) L / N with xi_i from Xorshift64Star(seed).
steps::StepConfiguration perturbed_uniform_steps(std::size_t N, double amplitude, std::uint64_t seed, double period = 1.0);
steps::StepConfiguration initial_steps(const InitialCondition& ic);

/// 2 + sum_{k=1..4} (0.5 / k^2) cos(2 pi k h + phase_k), phases uniform in [0, 2 pi).
PeriodicField random_phase_field(const PeriodicGrid& grid, std::uint64_t seed);

} // namespace vicinal::harness
