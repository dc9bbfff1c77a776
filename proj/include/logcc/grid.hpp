#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "logcc/errors.hpp"

namespace logcc {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Points in R^1 or R^2; the second coordinate is ignored in 1D.
using Point = std::array<double, 2>;

struct Axis {
    double lo = -1.0;
    double hi = 1.0;
    int points = 3;

    double spacing() const { return (hi - lo) / (points - 1); }
    /// Node coordinate. Symmetric axes give x[i] == -x[n-1-i] exactly.
    double coord(int i) const;
    bool operator==(const Axis&) const = default;
};

class Grid {
public:
    Grid() = default;
    Grid(double lo, double hi, int points);
    Grid(const Axis& a0, const Axis& a1);
    explicit Grid(std::vector<Axis> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    const Axis& axis(int k) const { return axes_[k]; }
    int points(int k) const { return axes_[k].points; }
    double spacing(int k) const { return axes_[k].spacing(); }
    double coord(int k, int i) const { return axes_[k].coord(i); }
    std::size_t size() const;

    std::size_t index(int i0, int i1 = 0) const {
        return dim() == 1 ? static_cast<std::size_t>(i0)
                          : static_cast<std::size_t>(i0) * axes_[1].points + i1;
    }
    std::array<int, 2> multi_index(std::size_t idx) const;
    Point node(std::size_t idx) const;

    /// lo == -hi on every axis
    bool even() const;
    /// Same point counts, bounds negated and swapped.
    Grid mirrored() const;
    bool contains(const Point& x) const;
    double cell_volume() const;
    /// Trapezoid weight of node idx.
    double weight(std::size_t idx) const;
    bool on_boundary(std::size_t idx) const;
    /// Index of the node mirrored through the origin (even grids).
    std::size_t reflect(std::size_t idx) const;

    bool operator==(const Grid&) const = default;

private:
    std::vector<Axis> axes_;
};

/// Values of a function R^n -> R u {+inf} at the nodes of a grid (row-major).
class ExtendedGridFunction {
public:
    ExtendedGridFunction() = default;
    ExtendedGridFunction(Grid grid, std::vector<double> values,
                         std::optional<bool> convexity_certificate = std::nullopt);

    static ExtendedGridFunction sample(const Grid& grid, const std::function<double(const Point&)>& fn);
    static ExtendedGridFunction constant(const Grid& grid, double value);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& data() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double at(int i0, int i1 = 0) const { return values_[grid_.index(i0, i1)]; }
    std::size_t size() const { return values_.size(); }
    std::optional<bool> convexity_certificate() const { return certificate_; }

    bool has_finite() const;
    /// Largest |value| over finite nodes (0 when none).
    double scale() const;
    double min_finite() const;

    /// Multilinear interpolation.
    double evaluate(const Point& x) const;

    /// Copy with the convexity certificate computed.
    ExtendedGridFunction certified() const;

private:
    Grid grid_;
    std::vector<double> values_;
    std::optional<bool> certificate_;
};

class AffineEnvelope;

/// f = exp(-phi).
class LogConcaveFunction {
public:
    LogConcaveFunction() = default;
    explicit LogConcaveFunction(ExtendedGridFunction potential,
                                std::shared_ptr<const AffineEnvelope> envelope = nullptr);

    static LogConcaveFunction from_potential(const Grid& grid, const std::function<double(const Point&)>& phi);

    const ExtendedGridFunction& potential() const { return potential_; }
    const Grid& grid() const { return potential_.grid(); }
    std::size_t size() const { return potential_.size(); }

    double value(std::size_t i) const;
    double operator()(const Point& x) const;
    double max_value() const;

    std::vector<std::size_t> support() const;
    /// Support nodes with a grid neighbour outside the support or on the box boundary.
    std::vector<std::size_t> support_boundary() const;
    bool essentially_continuous() const { return essentially_continuous_; }

    /// Trapezoid quadrature on the grid.
    double integral() const;
    /// Exact integral of the piecewise-affine potential when the function came from
    /// a 1D Alexandrov construction; otherwise the trapezoid value.
    double exact_integral() const;
    const AffineEnvelope* envelope() const { return envelope_.get(); }

private:
    ExtendedGridFunction potential_;
    std::shared_ptr<const AffineEnvelope> envelope_;
    bool essentially_continuous_ = false;
};

double evaluate(const ExtendedGridFunction& f, const Point& x);

/// Trapezoid rule for the integral of exp(-phi) over the grid box.
double integrate_exp_neg(const ExtendedGridFunction& phi);

struct GradientField {
    std::vector<std::size_t> nodes;
    std::vector<Point> gradients;
};

/// Central differences inside the effective domain, one-sided next to +inf or the box edge.
GradientField gradient_map(const ExtendedGridFunction& phi);

/// Perimeter of {f > t}.
double superlevel_perimeter(const LogConcaveFunction& f, double t);

/// exp(-min phi on the box boundary) times the boundary measure of the box.
double tail_bound(const ExtendedGridFunction& phi);

double default_convex_tolerance(const ExtendedGridFunction& f);
double default_ec_tolerance(const LogConcaveFunction& f);

/// Second differences along every axis line >= -tol, and no +inf between finite nodes.
bool is_discretely_convex(const ExtendedGridFunction& f, double tol);

}  // namespace logcc
