#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "vicinal/energetics.hpp"
#include "vicinal/errors.hpp"
#include "vicinal/harness/initial.hpp"

using namespace vicinal;
using namespace vicinal::energetics;
using std::numbers::pi;

namespace {

PeriodicField sine_cubed(std::size_t n, double A) {
    return PeriodicField::sample(make_grid(n), [A](double h) { return std::cbrt(1.0 + A * std::sin(2 * pi * h)); });
}

EnergyReport report_at(double t, double E, double D, double F_eps) {
    EnergyReport r;
    r.t = t;
    r.E = E;
    r.D = D;
    r.D_eps = D;
    r.F_eps = F_eps;
    return r;
}

} // namespace

TEST_SUITE("energetics") {

TEST_CASE("functionals of a constant slope") {
    const auto r = energy_report(PeriodicField::constant(make_grid(32), 2.0), 0.0, 0.5, 1e-3);
    CHECK(r.F == doctest::Approx(2.0));
    CHECK(r.E == 0.0);
    CHECK(r.D == 0.0);
    CHECK(r.m == doctest::Approx(0.5));
    CHECK(r.m_reg == doctest::Approx(0.5));
    CHECK(r.u_min == 2.0);
    CHECK(r.u_max == 2.0);
    CHECK(r.t == 0.5);
    CHECK(r.dt == 1e-3);

    const double c = 1.7, eps = 1e-3;
    const auto q = energy_report(PeriodicField::constant(make_grid(16), c), eps);
    CHECK(q.F_eps == doctest::Approx(eps * std::log(c) + c * c / 2).epsilon(1e-14));
    CHECK(q.m_reg == doctest::Approx(eps / (3 * c * c * c) + 1 / c).epsilon(1e-14));
}

TEST_CASE("non-positive slopes give infinite singular functionals") {
    std::vector<double> v(16, 1.0);
    v[3] = 0.0;
    const auto r = energy_report(PeriodicField(make_grid(16), v), 1e-3);
    CHECK(std::isinf(r.m));
    CHECK(std::isinf(r.m_reg));
    CHECK(std::isinf(r.F_eps));
    CHECK(std::isfinite(r.E));
}

TEST_CASE("dissipation energy converges to the analytic value") {
    // u^3 = 1 + A sin(2 pi h): E = A^2 (2 pi)^4 / 12
    const double A = 0.1, exact = A * A * std::pow(2 * pi, 4) / 12;
    CHECK(exact == doctest::Approx(1.2987878804533658).epsilon(1e-14));
    double prev = 0.0;
    for (std::size_t n : {32, 64, 128}) {
        const double err = std::abs(dissipation_energy(sine_cubed(n, A)) - exact);
        const double d = std::pow(2 * pi / n, 2);
        CHECK(err <= exact * d / 3);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
        prev = err;
    }
    CHECK(energy_report(sine_cubed(64, A), 0.0).E == dissipation_energy(sine_cubed(64, A)));
}

TEST_CASE("positivity lower bound") {
    CHECK(positivity_lower_bound(1.0 / 18.0, 1.0, 1e-3) == doctest::Approx(1e-3).epsilon(1e-13));
    CHECK(positivity_lower_bound(1.0 / 18.0, 2.0, 1e-3) == doctest::Approx(5e-4).epsilon(1e-13));
    CHECK(positivity_lower_bound(8.0 / 18.0, 1.0, 1e-2) == doctest::Approx(5e-3).epsilon(1e-13));
    CHECK_THROWS_AS(positivity_lower_bound(0.0, 1.0, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(positivity_lower_bound(1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("verdicts") {
    CHECK(make_verdict("a", 1.0, 1.0).satisfied);
    CHECK(make_verdict("a", 1.0 + 1e-13, 1.0).satisfied);
    CHECK_FALSE(make_verdict("a", 1.1, 1.0).satisfied);
    CHECK(make_verdict("a", 0.5, 1.0).margin == doctest::Approx(0.5));

    const auto v0 = decay_bound_check(report_at(0.0, 5.0, 0.0, 0.0), 1.0);
    CHECK(std::isinf(v0.rhs));
    CHECK(v0.satisfied);
    const auto v1 = decay_bound_check(report_at(2.0, 0.05, 0.0, 0.0), 1.2);
    CHECK(v1.rhs == doctest::Approx(0.1));
    CHECK(v1.satisfied);
    CHECK_FALSE(decay_bound_check(report_at(2.0, 0.2, 0.0, 0.0), 1.2).satisfied);
}

TEST_CASE("dissipation residuals") {
    const std::vector<EnergyReport> one{report_at(0.0, 1.0, 0.0, 0.0)};
    CHECK_THROWS_WITH(dissipation_residuals(one, 0.0), doctest::Contains("insufficient"));

    const std::vector<EnergyReport> flat{report_at(0.0, 0.0, 0.0, 2.0), report_at(1.0, 0.0, 0.0, 2.0)};
    const auto z = dissipation_residuals(flat, 0.0);
    CHECK(z.r1 == 0.0);
    CHECK(z.r2 == 0.0);

    // E = e^{-t}, D = e^{-t}: trapezoid of D over [0, 1] on two points is (1 + e^{-1})/2.
    const double e1 = std::exp(-1.0);
    const std::vector<EnergyReport> ex{report_at(0.0, 1.0, 1.0, 3.0), report_at(1.0, e1, e1, 2.0)};
    const auto r = dissipation_residuals(ex, 0.0);
    CHECK(r.r1 == doctest::Approx(e1 + (1 + e1) / 2 - 1.0).epsilon(1e-14));
    CHECK(r.r2 == doctest::Approx(2.0 + 6 * (1 + e1) / 2 - 3.0).epsilon(1e-14));
}

TEST_CASE("small set measure") {
    const auto g = make_grid(32);
    const std::vector<Snapshot> c{{0.0, PeriodicField::constant(g, 2.0)}, {1.0, PeriodicField::constant(g, 2.0)}};
    const auto v = small_set_measure(c, 1.0, 3.0);
    CHECK(v.lhs == 0.0);
    CHECK(v.rhs == doctest::Approx(3.0));
    CHECK(v.satisfied);
    CHECK(small_set_measure(c, 0.5, 3.0).rhs == doctest::Approx(1.5));

    // Half the nodes below delta during [0, 2).
    std::vector<double> half(32, 2.0);
    for (std::size_t i = 0; i < 16; ++i) half[i] = 0.01;
    const std::vector<Snapshot> s{{0.0, PeriodicField(g, half)}, {2.0, PeriodicField(g, half)}};
    CHECK(small_set_measure(s, 0.1, 1.0).lhs == doctest::Approx(1.0));
    CHECK_THROWS_AS(small_set_measure(std::vector<Snapshot>{}, 0.1, 1.0), InsufficientData);
}

TEST_CASE("deviation from the minimum") {
    const auto g = make_grid(128);
    const auto c = min_deviation_check(PeriodicField::constant(g, 1.3));
    CHECK(c.lhs == 0.0);
    CHECK(c.satisfied);
    const auto v = min_deviation_check(PeriodicField::sample(g, [](double h) { return 1.1 + std::cos(2 * pi * h); }));
    CHECK(v.satisfied);
    CHECK(v.lhs > 0.0);
}

TEST_CASE("Hoelder modulus") {
    const auto g = make_grid(16);
    const auto c = PeriodicField::constant(g, 1.0);
    const std::vector<Snapshot> same{{0.0, c}, {1e-3, c}, {2e-3, c}};
    CHECK(holder_modulus(same) == 0.0);
    CHECK_THROWS_AS(holder_modulus(std::vector<Snapshot>{{0.0, c}, {1.0, c}}), InsufficientData);

    // w = u^3 grows by 0.5 at one node between t = 0 and t = 1/16; |dt|^{1/4} = 1/2.
    const auto bumped = PeriodicField::constant(g, std::cbrt(1.5));
    const std::vector<Snapshot> jump{{0.0, c}, {1.0 / 16, bumped}, {2.0 / 16, bumped}};
    CHECK(holder_modulus(jump) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steady state prediction") {
    CHECK(steady_state_prediction(PeriodicField::constant(make_grid(16), 2.5)) == doctest::Approx(2.5));
    CHECK(steady_state_prediction(sine_cubed(4096, 0.1)) == doctest::Approx(0.99888469801351648).epsilon(1e-12));

    std::vector<double> v(16, 1.0);
    v[0] = 0.0;
    CHECK_THROWS_AS(steady_state_prediction(PeriodicField(make_grid(16), v)), InvalidArgument);

    harness::InitialCondition deg;
    deg.type = harness::InitialCondition::Type::DegenerateSine;
    CHECK(harness::initial_m0(deg) == doctest::Approx(2.3191905339278567).epsilon(1e-14));
}

TEST_CASE("biharmonic and Euler identities") {
    CHECK(biharmonic_identity_residual(PeriodicField::constant(make_grid(32), 1.4)) == 0.0);
    // Exact by summation by parts; only rounding in the fourth difference remains.
    for (std::size_t n : {32, 128, 512}) CHECK(euler_identity_residual(sine_cubed(n, 0.3)) <= 1e-14 * std::pow(n, 4.0));
    double prev = 0.0;
    for (std::size_t n : {256, 512, 1024}) {
        const double r = biharmonic_identity_residual(sine_cubed(n, 0.3));
        if (prev > 0.0) CHECK(prev / r > 3.5);
        prev = r;
    }
}

}
