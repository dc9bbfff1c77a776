#pragma once

#include <vector>

#include "logcc/grid.hpp"
#include "logcc/measures.hpp"

namespace logcc {

/// t_k = 2^-k for k = 3..10.
std::vector<double> default_schedule();

struct VariationReport {
    std::vector<double> t_schedule;
    /// (I(t) - I(0)) / t with I(t) the integral of the combination at t.
    std::vector<double> difference_quotients;
    /// (log I(t) - log I(0)) / t.
    std::vector<double> log_quotients;
    double base_integral = 0.0;
    double extrapolated_delta = 0.0;
    double predicted = 0.0;
    double relative_gap = 0.0;
    bool diverged = false;
    /// log quotients nondecreasing along the (decreasing) schedule, up to tolerance
    bool log_quotients_monotone = true;
};

inline constexpr double gap_floor = 1e-8;

/// Richardson-extrapolated one-sided derivative at t = 0 of the integral of f *_p (t.g),
/// with the predicted value filled from the matching formula.
VariationReport first_variation_report(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                       std::vector<double> schedule = {});
VariationReport lp_first_variation_report(const LogConcaveFunction& f, const LogConcaveFunction& g, double p,
                                          std::vector<double> schedule = {});

double first_variation_estimate(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                std::vector<double> schedule = {});

/// Integral of h_g against S_f; may be +inf.
double first_variation_predicted(const LogConcaveFunction& f, const LogConcaveFunction& g);
/// (1/p) times the integral of h_g^p h_f^(1-p) against S_f.
double lp_first_variation_predicted(const LogConcaveFunction& f, const LogConcaveFunction& g, double p);

struct CoareaReport {
    double lhs = 0.0;
    double rhs_grad = 0.0;
    double rhs_boundary = 0.0;
    int levels = 0;
    double relative_error = 0.0;
    bool consistent = false;
};

/// Integral over levels of the superlevel perimeter against total variation plus the
/// boundary jump term. `tol` is relative to max(lhs, 1e-12).
CoareaReport coarea_check(const LogConcaveFunction& f, int levels, double tol = 0.02);

struct SubdifferentialReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// log int f - log int g >= (1 / int f) int (h_f - h_g) dS_f, up to tol.
SubdifferentialReport subdifferential_check(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                            double tol = 1e-6);

/// F(psi) = -log int exp(-psi^*) over the mirrored grid of psi.
double convex_functional(const ExtendedGridFunction& psi);

enum class CheckStatus { ok, inconclusive };

struct PointwiseDerivativeReport {
    CheckStatus status = CheckStatus::inconclusive;
    std::vector<double> t_schedule;
    std::vector<double> quotients;
    double derivative = 0.0;
    double predicted = 0.0;
    double relative_error = 0.0;
    /// dual node where (psi)^* is attained at x0
    Point maximizer{0.0, 0.0};
};

/// Finite differences of (psi + t alpha)^*(x0) against -alpha(maximizer).
PointwiseDerivativeReport pointwise_derivative_check(const ExtendedGridFunction& psi, const ExtendedGridFunction& alpha,
                                                     const Point& x0, std::vector<double> schedule = {});

/// Linear extrapolation to t = 0 through the two smallest t.
double richardson(const std::vector<double>& t, const std::vector<double>& q);

}  // namespace logcc
