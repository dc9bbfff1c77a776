#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "logcc/grid.hpp"
#include "logcc/measures.hpp"

namespace logcc {

struct SolverConfig {
    double p = 1.0;
    /// Constraint level; empty means automatic (see solve_lp_minkowski).
    std::optional<double> a;
    /// Even primal grid on which f is reported; its box bounds the constraint integral.
    Grid grid = Grid(-8, 8, 1001);
    double step = 1.0;
    int max_iters = 2000;
    /// Stop when the discrete KKT residual sum |mu - c S_{f,p}| / mass falls below this.
    double grad_tol = 1e-7;
    double feas_tol = 1e-9;
    int max_escalations = 20;
};

enum class SolverStatus { converged, stalled, max_iterations };

struct SolverResult {
    /// Support function on the mirrored grid (even, convex).
    ExtendedGridFunction psi;
    LogConcaveFunction f;
    double c = 0.0;
    double a = 0.0;
    std::vector<double> objective_trace;
    std::vector<double> feasibility_trace;
    std::vector<double> kkt_trace;
    double kkt_residual = 0.0;
    /// Binned L1 distance between c S_{f,p} and mu over mass(mu). In 1D S_{f,p} is taken exactly
    /// from the piecewise-affine potential of f; sampled_mismatch uses the grid gradient map.
    double measure_mismatch = 0.0;
    double sampled_mismatch = 0.0;
    int iterations = 0;
    int escalations = 0;
    SolverStatus status = SolverStatus::stalled;
    /// symmetrization and biconjugation never raised the objective, biconjugation kept the integral
    bool projections_ok = true;
    /// psi at the atoms of mu (atom order of the merged measure) and those atoms
    std::vector<Atom> atoms;
    std::vector<double> psi_atoms;
};

std::string to_string(SolverStatus s);

/// Minimizes sum_i w_i psi(y_i)^p subject to int exp(-psi^*) = a over even convex psi, so that
/// at the optimum mu = c S_{f,p} with f = exp(-psi^*). Automatic a: mass(mu) for p = 1,
/// max(e, mass(mu)) for p < 1, doubled while psi(0) <= tol.
SolverResult solve_lp_minkowski(const DiscreteMeasure& mu, const SolverConfig& config);

/// sum psi(y_i)^p w_i with psi interpolated; +inf if psi is +inf at an atom.
double objective(const ExtendedGridFunction& psi, const DiscreteMeasure& mu, double p);

/// Smallest eigenvalue of the second-moment matrix over its trace.
double second_moment_ratio(const DiscreteMeasure& mu);

/// Binned L1 of c S_{f,p} against mu over mass(mu), bins of width `h` centred at multiples of h.
/// Uses the exact measure when f carries an envelope unless `sampled` is set.
double measure_mismatch(const LogConcaveFunction& f, const DiscreteMeasure& mu, double p, double c, double h,
                        bool sampled = false);

struct ConstraintGradientReport {
    double finite_difference = 0.0;
    double predicted = 0.0;
    double relative_error = 0.0;
};

/// Two-sided derivative at 0 of int exp(-(psi + t v)^*) against int v dS_f, f = exp(-psi^*).
ConstraintGradientReport constraint_gradient_check(const ExtendedGridFunction& psi, const ExtendedGridFunction& v);

struct MAResidual {
    ExtendedGridFunction field;
    /// sum |residual| / sum |right-hand side| over interior nodes
    double relative_l1 = 0.0;
    double l1 = 0.0;
    std::size_t interior = 0;
    std::size_t excluded = 0;
    /// residual too large for a classical solution
    bool flagged = false;
};

enum class GradientScheme { forward, central };

/// Node-wise c g(grad phi) det(D^2 phi) - h^(1-p) e^{-phi} with h = <x, grad phi> - phi.
/// The SolverResult overload uses c = 1 / result.c.
MAResidual ma_residual(const LogConcaveFunction& f, double c, const std::function<double(const Point&)>& density,
                       double p, GradientScheme scheme = GradientScheme::forward);
MAResidual ma_residual(const SolverResult& result, const std::function<double(const Point&)>& density, double p,
                       GradientScheme scheme = GradientScheme::forward);

}  // namespace logcc
