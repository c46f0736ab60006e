/// @file grid.hpp
/// @brief Uniform periodic grids and the fields that live on them.
///
/// Samples sit on nodes x_i = i * spacing, i = 0..n-1. A PeriodicField is periodic
/// with the grid length; a WindingField gains a fixed increment per period and is
/// stored as its periodic part plus that increment.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vicinal {

class PeriodicGrid {
public:
    /// Smallest grid that still carries the 5-point stencil without self-overlap.
    static constexpr std::size_t kMinCells = 8;

    std::size_t n() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return spacing_; }
    double node(std::size_t i) const noexcept { return static_cast<double>(i) * spacing_; }

    friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

private:
    friend PeriodicGrid make_grid(std::size_t n, double length);
    PeriodicGrid(std::size_t n, double length) : n_(n), length_(length), spacing_(length / static_cast<double>(n)) {}

    std::size_t n_;
    double length_;
    double spacing_;
};

/// Throws InvalidArgument("grid too small") for n < 8 and rejects non-positive lengths.
PeriodicGrid make_grid(std::size_t n, double length = 1.0);

class PeriodicField {
public:
    /// Validates size and finiteness.
    PeriodicField(PeriodicGrid grid, std::vector<double> values);

    /// Samples f at every node.
    static PeriodicField sample(PeriodicGrid grid, const std::function<double(double)>& f);
    static PeriodicField constant(PeriodicGrid grid, double c);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Value at any integer index, extended periodically.
    double at(std::ptrdiff_t i) const noexcept;

    double min() const;
    double max() const;

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

class WindingField {
public:
    /// `periodic` is the array values[i] - winding * i / n.
    WindingField(PeriodicGrid grid, std::vector<double> periodic, double winding);

    /// Builds from full node values v_0..v_{n-1}; the periodic part is v_i - winding*i/n.
    static WindingField from_values(PeriodicGrid grid, std::span<const double> values, double winding);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    double winding() const noexcept { return winding_; }
    std::span<const double> periodic_part() const noexcept { return periodic_; }

    /// Value at any integer index: value(i + n) = value(i) + winding.
    double value(std::ptrdiff_t i) const noexcept;
    std::vector<double> values() const;

    /// Forward difference (value(i+1) - value(i)) / spacing, evaluated from the periodic
    /// part plus the exact mean slope winding / length.
    double forward_slope(std::ptrdiff_t i) const noexcept;

private:
    PeriodicGrid grid_;
    std::vector<double> periodic_;
    double winding_;
};

/// Central 3-point second difference.
PeriodicField diff2(const PeriodicField& f);
/// Central 5-point fourth difference; equals diff2(diff2(f)) algebraically.
PeriodicField diff4(const PeriodicField& f);
/// Periodic rectangle rule, sum(values) * spacing.
double integrate(const PeriodicField& f);
/// Linear interpolation of the periodic extension onto a grid of n_new cells of the same length.
PeriodicField resample(const PeriodicField& f, std::size_t n_new);
/// Linear interpolation of the periodic extension at an arbitrary coordinate.
double interpolate(const PeriodicField& f, double x);

/// Pointwise helpers used all over the place.
PeriodicField map(const PeriodicField& f, const std::function<double(double)>& op);
PeriodicField multiply(const PeriodicField& f, const PeriodicField& g);
double max_abs_difference(const PeriodicField& f, const PeriodicField& g);

/// Cyclic shift: result[i] = f[i - shift].
PeriodicField shifted(const PeriodicField& f, std::ptrdiff_t shift);

} // namespace vicinal
