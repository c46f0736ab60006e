#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace vicinal {

/// Cyclic pentadiagonal matrix: row i has entries at columns (i + k) mod n, k = -2..2.
class CyclicPentadiagonal {
public:
    explicit CyclicPentadiagonal(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    /// Coefficient of column (i + offset) mod n in row i, offset in [-2, 2].
    double& at(std::size_t row, int offset) { return diag_[static_cast<std::size_t>(offset + 2)][row]; }
    double at(std::size_t row, int offset) const { return diag_[static_cast<std::size_t>(offset + 2)][row]; }

    std::vector<double> apply(std::span<const double> x) const;

    /// Direct solve. The primary path eliminates the banded (n-2)x(n-2) leading block with
    /// partial pivoting and closes the two periodic border unknowns through a 2x2 Schur
    /// complement. If that path meets a zero pivot or a poor residual, systems with
    /// n <= kDenseFallbackMax are refactored densely. Throws SingularSystem otherwise.
    std::vector<double> solve(std::span<const double> rhs) const;

    /// ||A x - b||_inf.
    double residual(std::span<const double> x, std::span<const double> b) const;

    /// ||A||_inf.
    double norm_inf() const;

    static constexpr std::size_t kDenseFallbackMax = 512;

private:
    std::size_t n_;
    std::array<std::vector<double>, 5> diag_;
};

namespace detail {

/// Banded LU with partial pivoting for a non-cyclic band with two sub- and two
/// super-diagonals. Exposed for testing.
class BandedLu {
public:
    /// `band(i, k)` gives the entry at column i + k, k = -2..2 (entries outside the
    /// matrix are ignored).
    template <class Band>
    BandedLu(std::size_t n, Band&& band) : n_(n), rows_(n * kWidth, 0.0), pivots_(n) {
        for (std::size_t i = 0; i < n; ++i)
            for (int k = -2; k <= 2; ++k) {
                const auto col = static_cast<std::ptrdiff_t>(i) + k;
                if (col < 0 || col >= static_cast<std::ptrdiff_t>(n)) continue;
                entry(i, static_cast<std::size_t>(col)) = band(i, k);
            }
        factor();
    }

    bool ok() const noexcept { return ok_; }
    void solve_in_place(std::span<double> b) const;

private:
    // Row i stores columns [i - 2, i + 4] (lower band, upper band plus pivot fill).
    static constexpr std::size_t kWidth = 7;

    double& entry(std::size_t row, std::size_t col) { return rows_[row * kWidth + (col + 2 - row)]; }
    double entry(std::size_t row, std::size_t col) const { return rows_[row * kWidth + (col + 2 - row)]; }

    void factor();

    std::size_t n_;
    std::vector<double> rows_;
    std::vector<std::size_t> pivots_;
    bool ok_ = true;
};

/// Dense LU with partial pivoting; returns false on an exactly singular pivot.
bool dense_solve(std::vector<double> a, std::size_t n, std::span<double> b);

} // namespace detail

} // namespace vicinal
