#include "vicinal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vicinal/errors.hpp"
#include "vicinal/kernels.hpp"

namespace vicinal {

PeriodicGrid make_grid(std::size_t n, double length) {
    if (n < PeriodicGrid::kMinCells)
        throw InvalidArgument("grid too small: n=" + std::to_string(n) + " < 8");
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidArgument("grid length must be positive and finite");
    return PeriodicGrid(n, length);
}

PeriodicField::PeriodicField(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n())
        throw InvalidArgument("field size " + std::to_string(values_.size()) + " does not match grid n=" +
                              std::to_string(grid_.n()));
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidArgument("field contains a non-finite value");
}

PeriodicField PeriodicField::sample(PeriodicGrid grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) v[i] = f(grid.node(i));
    return PeriodicField(grid, std::move(v));
}

PeriodicField PeriodicField::constant(PeriodicGrid grid, double c) {
    return PeriodicField(grid, std::vector<double>(grid.n(), c));
}

double PeriodicField::at(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(values_.size());
    return values_[static_cast<std::size_t>(((i % n) + n) % n)];
}

double PeriodicField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PeriodicField::max() const { return *std::max_element(values_.begin(), values_.end()); }

WindingField::WindingField(PeriodicGrid grid, std::vector<double> periodic, double winding)
    : grid_(grid), periodic_(std::move(periodic)), winding_(winding) {
    if (periodic_.size() != grid_.n()) throw InvalidArgument("winding field size does not match grid");
    if (!std::isfinite(winding_)) throw InvalidArgument("winding must be finite");
    for (double v : periodic_)
        if (!std::isfinite(v)) throw InvalidArgument("winding field contains a non-finite value");
}

WindingField WindingField::from_values(PeriodicGrid grid, std::span<const double> values, double winding) {
    if (values.size() != grid.n()) throw InvalidArgument("winding field size does not match grid");
    std::vector<double> p(values.size());
    const double n = static_cast<double>(grid.n());
    for (std::size_t i = 0; i < values.size(); ++i) p[i] = values[i] - winding * (static_cast<double>(i) / n);
    return WindingField(grid, std::move(p), winding);
}

double WindingField::value(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(periodic_.size());
    const std::ptrdiff_t r = ((i % n) + n) % n;
    const std::ptrdiff_t wraps = (i - r) / n;
    return periodic_[static_cast<std::size_t>(r)] + winding_ * (static_cast<double>(r) / static_cast<double>(n)) +
           winding_ * static_cast<double>(wraps);
}

std::vector<double> WindingField::values() const {
    std::vector<double> v(periodic_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(static_cast<std::ptrdiff_t>(i));
    return v;
}

double WindingField::forward_slope(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(periodic_.size());
    const auto r0 = static_cast<std::size_t>(((i % n) + n) % n);
    const auto r1 = static_cast<std::size_t>((((i + 1) % n) + n) % n);
    return (periodic_[r1] - periodic_[r0]) / grid_.spacing() + winding_ / grid_.length();
}

PeriodicField diff2(const PeriodicField& f) {
    std::vector<double> out(f.size());
    kernels::diff2(f.values(), f.grid().spacing(), out);
    return PeriodicField(f.grid(), std::move(out));
}

PeriodicField diff4(const PeriodicField& f) {
    std::vector<double> out(f.size());
    kernels::diff4(f.values(), f.grid().spacing(), out);
    return PeriodicField(f.grid(), std::move(out));
}

double integrate(const PeriodicField& f) { return kernels::sum(f.values()) * f.grid().spacing(); }

double interpolate(const PeriodicField& f, double x) {
    const double s = x / f.grid().spacing();
    const double fl = std::floor(s);
    const double frac = s - fl;
    const auto i = static_cast<std::ptrdiff_t>(fl);
    return (1.0 - frac) * f.at(i) + frac * f.at(i + 1);
}

PeriodicField resample(const PeriodicField& f, std::size_t n_new) {
    const PeriodicGrid g = make_grid(n_new, f.grid().length());
    if (n_new == f.size()) return f;
    return PeriodicField::sample(g, [&](double x) { return interpolate(f, x); });
}

PeriodicField map(const PeriodicField& f, const std::function<double(double)>& op) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(f[i]);
    return PeriodicField(f.grid(), std::move(v));
}

PeriodicField multiply(const PeriodicField& f, const PeriodicField& g) {
    if (!(f.grid() == g.grid())) throw InvalidArgument("fields live on different grids");
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * g[i];
    return PeriodicField(f.grid(), std::move(v));
}

double max_abs_difference(const PeriodicField& f, const PeriodicField& g) {
    if (f.size() != g.size()) throw InvalidArgument("fields have different sizes");
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
    return m;
}

PeriodicField shifted(const PeriodicField& f, std::ptrdiff_t shift) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.at(static_cast<std::ptrdiff_t>(i) - shift);
    return PeriodicField(f.grid(), std::move(v));
}

} // namespace vicinal
