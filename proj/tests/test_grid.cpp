#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vicinal/errors.hpp"
#include "vicinal/grid.hpp"

using namespace vicinal;
using std::numbers::pi;

namespace {

// Dense periodic stencil matrix applied by brute force; independent of the library loops.
std::vector<double> dense_apply(const std::vector<double>& stencil, const std::vector<double>& f, double scale) {
    const auto n = static_cast<std::ptrdiff_t>(f.size());
    const auto half = static_cast<std::ptrdiff_t>(stencil.size() / 2);
    std::vector<std::vector<double>> m(f.size(), std::vector<double>(f.size(), 0.0));
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t k = -half; k <= half; ++k) m[i][((i + k) % n + n) % n] += stencil[k + half] * scale;
    std::vector<double> out(f.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = 0; j < n; ++j) out[i] += m[i][j] * f[j];
    return out;
}

} // namespace

TEST_SUITE("grid") {

TEST_CASE("make_grid spacing and validation") {
    CHECK(make_grid(64, 1.0).spacing() == 0.015625);
    CHECK(make_grid(8, 2.0).spacing() == 0.25);
    CHECK_THROWS_WITH_AS(make_grid(4, 1.0), doctest::Contains("grid too small"), InvalidArgument);
    CHECK_THROWS_AS(make_grid(16, 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(16, -1.0), InvalidArgument);
    const auto g = make_grid(7 * 13, 3.0);
    CHECK(std::abs(g.spacing() * g.n() - g.length()) <= 4e-16 * g.length());
}

TEST_CASE("field construction rejects bad input") {
    const auto g = make_grid(8);
    CHECK_THROWS_AS(PeriodicField(g, std::vector<double>(7, 1.0)), InvalidArgument);
    std::vector<double> bad(8, 1.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(PeriodicField(g, bad), InvalidArgument);
}

TEST_CASE("periodic indexing") {
    const auto f = PeriodicField::sample(make_grid(8), [](double h) { return h; });
    CHECK(f.at(-1) == f[7]);
    CHECK(f.at(8) == f[0]);
    CHECK(f.at(17) == f[1]);
}

TEST_CASE("diff2 on constants, impulses and a sine") {
    const auto g = make_grid(16);
    for (const auto field = diff2(PeriodicField::constant(g, 3.7)); double v : field.values()) CHECK(v == 0.0);

    std::vector<double> imp(16, 0.0);
    imp[5] = 1.0;
    const auto d = diff2(PeriodicField(g, imp));
    const double s = 1.0 / (g.spacing() * g.spacing());
    CHECK(d[4] == doctest::Approx(s));
    CHECK(d[5] == doctest::Approx(-2 * s));
    CHECK(d[6] == doctest::Approx(s));
    CHECK(d[0] == 0.0);

    const auto g64 = make_grid(64);
    const auto f = PeriodicField::sample(g64, [](double h) { return std::sin(2 * pi * h); });
    const auto d2 = diff2(f);
    const double bound = std::pow(2 * pi * g64.spacing(), 2) / 12.0 + 1e-12;
    for (std::size_t i = 0; i < 64; ++i) {
        const double exact = -std::pow(2 * pi, 2) * f[i];
        CHECK(std::abs(d2[i] - exact) <= bound * std::pow(2 * pi, 2) + 1e-9);
    }
}

TEST_CASE("diff4 matches the dense stencil and the composition of diff2") {
    const auto g = make_grid(12, 1.5);
    std::vector<double> v(12);
    for (std::size_t i = 0; i < 12; ++i) v[i] = std::cos(0.7 * i) + 0.1 * i * i;
    const PeriodicField f(g, v);
    const double h4 = std::pow(g.spacing(), 4);
    const auto oracle = dense_apply({1, -4, 6, -4, 1}, v, 1.0 / h4);
    const auto d4 = diff4(f);
    const auto dd = diff2(diff2(f));
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(d4[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
        CHECK(dd[i] == doctest::Approx(oracle[i]).epsilon(1e-10));
    }
    for (const auto field = diff4(PeriodicField::constant(g, 2.5)); double x : field.values()) CHECK(x == 0.0);
}

TEST_CASE("integrate") {
    CHECK(integrate(PeriodicField::constant(make_grid(10), 2.5)) == doctest::Approx(2.5));
    for (std::size_t n : {8, 13, 64}) {
        CHECK(std::abs(integrate(PeriodicField::sample(make_grid(n), [](double h) { return std::sin(2 * pi * h); }))) < 1e-15);
        const auto s2 = PeriodicField::sample(make_grid(n), [](double h) { return std::pow(std::sin(2 * pi * h), 2); });
        CHECK(integrate(s2) == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("resample and interpolate") {
    const auto c = PeriodicField::constant(make_grid(16), 1.25);
    for (const auto field = resample(c, 40); double v : field.values()) CHECK(v == doctest::Approx(1.25));

    const auto f = PeriodicField::sample(make_grid(32), [](double h) { return std::sin(2 * pi * h); });
    const auto same = resample(f, 32);
    for (std::size_t i = 0; i < 32; ++i) CHECK(same[i] == f[i]);

    const auto r = resample(f, 64);
    const double bound = std::pow(2 * pi / 32, 2) / 8;
    for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(r[i] - std::sin(2 * pi * r.grid().node(i))) <= bound);

    CHECK(interpolate(f, 1.0 + f.grid().node(3)) == doctest::Approx(f[3]));
    CHECK(interpolate(f, -f.grid().spacing()) == doctest::Approx(f[31]));
}

TEST_CASE("winding field") {
    const auto g = make_grid(8, 2.0);
    std::vector<double> v(8);
    for (std::size_t i = 0; i < 8; ++i) v[i] = 0.5 * g.node(i) + 0.01 * std::sin(pi * g.node(i));
    const auto w = WindingField::from_values(g, v, 1.0);
    for (std::size_t i = 0; i < 8; ++i) CHECK(w.value(static_cast<std::ptrdiff_t>(i)) == doctest::Approx(v[i]));
    CHECK(w.value(8) == doctest::Approx(v[0] + 1.0));
    CHECK(w.value(-1) == doctest::Approx(v[7] - 1.0));
    CHECK(w.forward_slope(7) == doctest::Approx((v[0] + 1.0 - v[7]) / g.spacing()));

    const auto lin = WindingField::from_values(g, std::vector<double>{0, .125, .25, .375, .5, .625, .75, .875}, 1.0);
    for (double p : lin.periodic_part()) CHECK(std::abs(p) < 1e-15);
    for (std::ptrdiff_t i = -3; i < 10; ++i) CHECK(lin.forward_slope(i) == doctest::Approx(0.5));
}

TEST_CASE("pointwise helpers") {
    const auto g = make_grid(8);
    const auto f = PeriodicField::sample(g, [](double h) { return 1.0 + h; });
    const auto sq = multiply(f, f);
    CHECK(sq[3] == doctest::Approx(f[3] * f[3]));
    CHECK(max_abs_difference(f, map(f, [](double x) { return x + 0.5; })) == doctest::Approx(0.5));
    const auto s = shifted(f, 2);
    CHECK(s[2] == f[0]);
    CHECK(s[0] == f[6]);
    CHECK_THROWS_AS(multiply(f, PeriodicField::constant(make_grid(9), 1.0)), InvalidArgument);
}

}
