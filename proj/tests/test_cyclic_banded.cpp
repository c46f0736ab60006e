#include <doctest.h>

#include <cmath>
#include <vector>

#include "vicinal/continuum.hpp"
#include "vicinal/cyclic_banded.hpp"
#include "vicinal/errors.hpp"
#include "vicinal/harness/initial.hpp"

using namespace vicinal;

namespace {

std::vector<std::vector<double>> dense_of(const CyclicPentadiagonal& a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (int k = -2; k <= 2; ++k) m[i][(i + n + k) % n] += a.at(i, k);
    return m;
}

// Gauss-Jordan with partial pivoting on a full copy; the test-side reference solver.
std::vector<double> reference_solve(std::vector<std::vector<double>> m, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        std::swap(m[c], m[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= m[i][i];
    return b;
}

CyclicPentadiagonal random_matrix(std::size_t n, std::uint64_t seed, double diag_boost) {
    harness::Xorshift64Star rng(seed);
    CyclicPentadiagonal a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = -2; k <= 2; ++k) a.at(i, k) = rng.uniform() - 0.5 + (k == 0 ? diag_boost : 0.0);
    return a;
}

} // namespace

TEST_SUITE("cyclic_banded") {

TEST_CASE("size validation") { CHECK_THROWS_AS(CyclicPentadiagonal(7), InvalidArgument); }

TEST_CASE("apply matches the dense matrix") {
    const auto a = random_matrix(11, 3, 0.0);
    const auto m = dense_of(a);
    std::vector<double> x(11);
    for (std::size_t i = 0; i < 11; ++i) x[i] = std::sin(1.0 + i);
    const auto y = a.apply(x);
    for (std::size_t i = 0; i < 11; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 11; ++j) s += m[i][j] * x[j];
        CHECK(y[i] == doctest::Approx(s).epsilon(1e-13));
    }
}

TEST_CASE("solve agrees with a dense reference on random systems") {
    for (std::size_t n : {8, 9, 17, 64, 200}) {
        for (double boost : {0.0, 3.0}) {
            const auto a = random_matrix(n, 100 + n, boost);
            std::vector<double> b(n);
            for (std::size_t i = 0; i < n; ++i) b[i] = std::cos(0.3 * i);
            const auto x = a.solve(b);
            const auto ref = reference_solve(dense_of(a), b);
            double scale = 0.0;
            for (double v : ref) scale = std::max(scale, std::abs(v));
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) <= 1e-9 * (1.0 + scale));
        }
    }
}

TEST_CASE("large systems use the banded path") {
    const std::size_t n = 5000;
    const auto a = random_matrix(n, 9, 3.0);
    std::vector<double> b(n, 1.0);
    const auto x = a.solve(b);
    CHECK(a.residual(x, b) <= 1e-12 * (a.norm_inf() * 1.0 + 1.0) * 10);
}

TEST_CASE("singular systems are reported") {
    CyclicPentadiagonal zero(10);
    std::vector<double> b(10, 1.0);
    CHECK_THROWS_AS(zero.solve(b), SingularSystem);
    // Every row sums to zero, so constants span the kernel.
    CyclicPentadiagonal lap(600);
    for (std::size_t i = 0; i < 600; ++i) {
        lap.at(i, -1) = 1.0;
        lap.at(i, 0) = -2.0;
        lap.at(i, 1) = 1.0;
    }
    CHECK_THROWS_AS(lap.solve(std::vector<double>(600, 1.0)), SingularSystem);
}

TEST_CASE("non-cyclic banded LU") {
    const std::size_t n = 12;
    harness::Xorshift64Star rng(4);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (int k = -2; k <= 2; ++k) {
            const auto j = static_cast<std::ptrdiff_t>(i) + k;
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) m[i][j] = rng.uniform() - 0.5;
        }
    detail::BandedLu lu(n, [&](std::size_t i, int k) { return m[i][static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + k)]; });
    REQUIRE(lu.ok());
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = 1.0 + i;
    auto x = b;
    lu.solve_in_place(x);
    const auto ref = reference_solve(m, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-9));
}

TEST_CASE("implicit operator residual meets the solver contract at moderate steps") {
    const auto g = make_grid(128);
    const auto u = PeriodicField::sample(g, [](double h) { return std::cbrt(1.0 + 0.1 * std::sin(6.283185307179586 * h)); });
    std::vector<double> mob(128), w(128);
    for (std::size_t i = 0; i < 128; ++i) {
        mob[i] = std::pow(u[i], 4);
        w[i] = u[i] * u[i] * u[i];
    }
    double wmax = 0.0;
    for (double v : w) wmax = std::max(wmax, std::abs(v));
    for (double dt : {1e-10, 1e-9, 1e-8}) {
        const auto op = continuum::implicit_operator(g, mob, dt);
        const auto x = op.solve(w);
        CHECK(op.residual(x, w) <= 1e-12 * wmax);
    }
}

}
