#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "logcc/grid.hpp"

namespace logcc {

struct Atom {
    Point x{0.0, 0.0};
    double w = 0.0;
};

/// Finite sum of weighted point masses in R^1 or R^2.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    /// Weights must be finite and > 0. When `even` is set the atoms are checked for
    /// (x, w) <-> (-x, w) pairing and PreconditionError is thrown if that fails.
    DiscreteMeasure(int dim, std::vector<Atom> atoms, bool even = false);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool even() const { return even_; }
    double total_mass() const { return mass_; }

    DiscreteMeasure scaled(double c) const;

private:
    int dim_ = 1;
    std::vector<Atom> atoms_;
    bool even_ = false;
    double mass_ = 0.0;
};

/// Default tolerance for matching x with -x: 1e-9 * (1 + max |x|).
double default_pairing_tolerance(const std::vector<Atom>& atoms);
/// Every atom has a partner at -x with the same weight (relative 1e-9).
bool is_even_paired(const std::vector<Atom>& atoms, double tol);

/// Pushforward of f dx under the discrete gradient of -log f: one atom per support node,
/// weight f(x) times the trapezoid weight. Atoms whose weight underflows are dropped.
DiscreteMeasure surface_area_measure(const LogConcaveFunction& f);

/// h_f^(1-p) dS_f with h_f interpolated from `hf` at the atom locations.
DiscreteMeasure lp_surface_area_measure(const DiscreteMeasure& sf, const ExtendedGridFunction& hf, double p);
/// h_f is computed on the adapted dual grid of f.
DiscreteMeasure lp_surface_area_measure(const LogConcaveFunction& f, double p);

/// S_{f,p} of a 1D function that carries its piecewise-affine potential: one atom per
/// active line at its slope, weighted by the cell mass times offset^(1-p).
DiscreteMeasure exact_lp_surface_area_measure(const LogConcaveFunction& f, double p);

/// Sum of rho(y_i) w_i; +inf if rho is +inf at any atom.
double integrate_against(const std::function<double(const Point&)>& rho, const DiscreteMeasure& m);
/// rho interpolated on its grid; DomainError if an atom lies outside the box.
double integrate_against(const ExtendedGridFunction& rho, const DiscreteMeasure& m);

/// Bin masses on cells centred at the nodes of `bins` with its spacing, right-open,
/// plus whatever falls outside all cells.
struct Histogram {
    Grid bins;
    std::vector<double> mass;
    double overflow = 0.0;
};

Histogram histogram(const DiscreteMeasure& m, const Grid& bins);

/// Bins with spacing h and centres at integer multiples of h covering [-r, r].
Grid aligned_bins(double r, double h, int dim = 1);

struct MeasureDistance {
    double l1 = 0.0;
    /// Wasserstein-1 between the unnormalized CDFs (1D only).
    std::optional<double> w1;
};

MeasureDistance measure_distance(const DiscreteMeasure& m1, const DiscreteMeasure& m2, const Grid& bins);

/// W1 in 1D from the atoms directly: integral of |F1 - F2|.
double wasserstein1(const DiscreteMeasure& m1, const DiscreteMeasure& m2);

}  // namespace logcc
