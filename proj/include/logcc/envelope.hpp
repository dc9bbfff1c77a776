#pragma once

#include <vector>

namespace logcc {

/// phi(x) = max_i (x*slope[i] - offset[i]) restricted to [lo, hi] (+inf outside).
/// Slopes must be strictly increasing; lines with offset +inf are ignored.
class AffineEnvelope {
public:
    AffineEnvelope(std::vector<double> slopes, std::vector<double> offsets, double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool empty() const { return active_.empty(); }

    double operator()(double x) const;
    /// Exact integral of exp(-phi) over [lo, hi].
    double integral() const { return integral_; }
    /// Integral of exp(-phi) over the region where line i is the maximum (one entry per input line).
    const std::vector<double>& cell_masses() const { return masses_; }

    /// Lines that attain the maximum somewhere in [lo, hi], in increasing slope order.
    const std::vector<int>& active() const { return active_; }
    /// Region of active()[k] is [breaks()[k], breaks()[k+1]].
    const std::vector<double>& breaks() const { return breaks_; }

    const std::vector<double>& slopes() const { return slopes_; }
    const std::vector<double>& offsets() const { return offsets_; }

private:
    std::vector<double> slopes_, offsets_;
    double lo_, hi_;
    std::vector<int> active_;
    std::vector<double> breaks_;
    std::vector<double> masses_;
    double integral_ = 0.0;
};

/// Integral of exp(c - x*s) for x in [u, v].
double exp_affine_integral(double c, double s, double u, double v);

}  // namespace logcc
