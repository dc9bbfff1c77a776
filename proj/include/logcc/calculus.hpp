#pragma once

#include "logcc/grid.hpp"

namespace logcc {

/// Mirrored primal grid extended by whole cells until every finite-difference slope of phi
/// lies inside the window. Past a per-axis point cap (16x in 1D, 2x in 2D) the window is
/// kept and the spacing coarsened instead.
Grid adapted_dual(const ExtendedGridFunction& phi);
Grid adapted_dual(const ExtendedGridFunction& phi, const ExtendedGridFunction& psi);

/// h_f = (-log f)^* on the dual grid.
ExtendedGridFunction support_function(const LogConcaveFunction& f, const Grid& dual);
ExtendedGridFunction support_function(const LogConcaveFunction& f);

/// A[psi] = exp(-psi^*) sampled on `primal`. In 1D psi is continued linearly beyond its
/// window with the slopes of its end hull edges, so A[|y|] is exactly the indicator of
/// [-1, 1]; the result carries the exact piecewise-affine potential for integration.
LogConcaveFunction alexandrov(const ExtendedGridFunction& psi, const Grid& primal);
LogConcaveFunction alexandrov(const ExtendedGridFunction& psi);

/// (f * g)(x) = sup_y f(y) g(x - y) via alexandrov(h_f + h_g), sampled on `out`.
LogConcaveFunction sup_convolution(const LogConcaveFunction& f, const LogConcaveFunction& g, const Grid& out);
LogConcaveFunction sup_convolution(const LogConcaveFunction& f, const LogConcaveFunction& g);

/// (t.f)(x) = f(x/t)^t on f's grid (zero where x/t leaves the box).
LogConcaveFunction scale(double t, const LogConcaveFunction& f);

/// Node-wise (h_f^p + t h_g^p)^(1/p); for p = 1 simply h_f + t h_g.
ExtendedGridFunction lp_mean(const ExtendedGridFunction& hf, const ExtendedGridFunction& hg, double t, double p);

/// alexandrov((h_f^p + t h_g^p)^(1/p)) on f's grid.
LogConcaveFunction lp_combination(const LogConcaveFunction& f, const LogConcaveFunction& g, double t, double p,
                                  const Grid& dual);
LogConcaveFunction lp_combination(const LogConcaveFunction& f, const LogConcaveFunction& g, double t, double p);

bool is_essentially_continuous(const LogConcaveFunction& f, double tol);
bool is_essentially_continuous(const LogConcaveFunction& f);

}  // namespace logcc
