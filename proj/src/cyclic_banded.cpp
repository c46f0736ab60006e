#include "vicinal/cyclic_banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vicinal/errors.hpp"

namespace vicinal {

namespace detail {

void BandedLu::factor() {
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t last_row = std::min(k + 2, n_ - 1);
        std::size_t p = k;
        double best = std::abs(entry(k, k));
        for (std::size_t r = k + 1; r <= last_row; ++r)
            if (std::abs(entry(r, k)) > best) {
                best = std::abs(entry(r, k));
                p = r;
            }
        pivots_[k] = p;
        if (best == 0.0) {
            ok_ = false;
            return;
        }
        const std::size_t last_col = std::min(k + 4, n_ - 1);
        if (p != k)
            for (std::size_t c = k; c <= last_col; ++c) std::swap(entry(k, c), entry(p, c));
        const double pivot = entry(k, k);
        for (std::size_t r = k + 1; r <= last_row; ++r) {
            const double l = entry(r, k) / pivot;
            entry(r, k) = l;
            if (l == 0.0) continue;
            for (std::size_t c = k + 1; c <= last_col; ++c) entry(r, c) -= l * entry(k, c);
        }
    }
}

void BandedLu::solve_in_place(std::span<double> b) const {
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t p = pivots_[k];
        if (p != k) std::swap(b[k], b[p]);
        const std::size_t last_row = std::min(k + 2, n_ - 1);
        for (std::size_t r = k + 1; r <= last_row; ++r) b[r] -= entry(r, k) * b[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
        double s = b[k];
        const std::size_t last_col = std::min(k + 4, n_ - 1);
        for (std::size_t c = k + 1; c <= last_col; ++c) s -= entry(k, c) * b[c];
        b[k] = s / entry(k, k);
    }
}

bool dense_solve(std::vector<double> a, std::size_t n, std::span<double> b) {
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r * n + k]) > std::abs(a[p * n + k])) p = r;
        if (a[p * n + k] == 0.0) return false;
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
            std::swap(b[k], b[p]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double l = a[r * n + k] / a[k * n + k];
            if (l == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) a[r * n + c] -= l * a[k * n + c];
            b[r] -= l * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a[k * n + c] * b[c];
        b[k] = s / a[k * n + k];
    }
    return true;
}

} // namespace detail

CyclicPentadiagonal::CyclicPentadiagonal(std::size_t n) : n_(n) {
    if (n < 8) throw InvalidArgument("cyclic pentadiagonal system needs n >= 8");
    for (auto& d : diag_) d.assign(n, 0.0);
}

std::vector<double> CyclicPentadiagonal::apply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k) {
            const std::size_t col = (i + n_ + static_cast<std::size_t>(k + 2) - 2) % n_;
            s += at(i, k) * x[col];
        }
        y[i] = s;
    }
    return y;
}

double CyclicPentadiagonal::residual(std::span<const double> x, std::span<const double> b) const {
    const auto ax = apply(x);
    double r = 0.0;
    for (std::size_t i = 0; i < n_; ++i) r = std::max(r, std::abs(ax[i] - b[i]));
    return r;
}

double CyclicPentadiagonal::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k) s += std::abs(at(i, k));
        m = std::max(m, s);
    }
    return m;
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

std::vector<double> CyclicPentadiagonal::solve(std::span<const double> rhs) const {
    const std::size_t n = n_;
    const std::size_t m = n - 2;
    // Entry (row, col) of the full cyclic matrix.
    auto entry = [&](std::size_t row, std::size_t col) {
        const std::size_t off = (col + n - row) % n;
        if (off <= 2) return at(row, static_cast<int>(off));
        if (off >= n - 2) return at(row, static_cast<int>(off) - static_cast<int>(n));
        return 0.0;
    };

    std::vector<double> x(n, 0.0);
    bool ok = false;

    detail::BandedLu lu(m, [&](std::size_t i, int k) { return at(i, k); });
    if (lu.ok()) {
        std::vector<double> y(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(m));
        lu.solve_in_place(y);
        std::array<std::vector<double>, 2> z;
        for (std::size_t j = 0; j < 2; ++j) {
            z[j].resize(m);
            for (std::size_t i = 0; i < m; ++i) z[j][i] = entry(i, m + j);
            lu.solve_in_place(z[j]);
        }
        double s[2][2];
        double r2[2];
        for (std::size_t j = 0; j < 2; ++j) {
            r2[j] = rhs[m + j];
            for (std::size_t l = 0; l < 2; ++l) s[j][l] = entry(m + j, m + l);
            for (std::size_t i = 0; i < m; ++i) {
                const double d = entry(m + j, i);
                if (d == 0.0) continue;
                r2[j] -= d * y[i];
                for (std::size_t l = 0; l < 2; ++l) s[j][l] -= d * z[l][i];
            }
        }
        const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        if (det != 0.0 && std::isfinite(det)) {
            const double xb0 = (r2[0] * s[1][1] - s[0][1] * r2[1]) / det;
            const double xb1 = (s[0][0] * r2[1] - s[1][0] * r2[0]) / det;
            for (std::size_t i = 0; i < m; ++i) x[i] = y[i] - z[0][i] * xb0 - z[1][i] * xb1;
            x[m] = xb0;
            x[m + 1] = xb1;
            ok = true;
        }
    }

    const double eps = std::numeric_limits<double>::epsilon();
    auto acceptable = [&](std::span<const double> sol) {
        for (double v : sol)
            if (!std::isfinite(v)) return false;
        const double scale = norm_inf() * max_abs(sol);
        // A solution this large relative to the data means the matrix is singular to working precision.
        if (scale * eps > max_abs(rhs)) return false;
        return residual(sol, rhs) <= 64.0 * eps * (scale + max_abs(rhs));
    };

    if (ok && acceptable(x)) return x;

    if (n <= kDenseFallbackMax) {
        std::vector<double> dense(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (int k = -2; k <= 2; ++k) {
                const std::size_t col = (i + n + static_cast<std::size_t>(k + 2) - 2) % n;
                dense[i * n + col] += at(i, k);
            }
        std::vector<double> b(rhs.begin(), rhs.end());
        if (detail::dense_solve(std::move(dense), n, b) && acceptable(b)) return b;
    }
    throw SingularSystem("cyclic pentadiagonal solve failed", std::numeric_limits<double>::quiet_NaN());
}

} // namespace vicinal
