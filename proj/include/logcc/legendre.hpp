#pragma once

#include <span>
#include <vector>

#include "logcc/grid.hpp"

namespace logcc {

/// Result of a discrete Legendre-Fenchel transform.
struct Transform {
    ExtendedGridFunction conjugate;
    /// Flat primal index of the maximizer, per dual node.
    std::vector<std::size_t> argmax;
    /// Maximizer on the primal box boundary (conjugate possibly truncated there).
    std::vector<char> boundary;
};

/// out[j] = max_i (x[i]*y[j] - phi[i]) over finite phi[i]; x and y ascending.
/// Ties go to the smaller i. Throws PreconditionError if every phi[i] is +inf.
void conjugate_line(std::span<const double> x, std::span<const double> phi, std::span<const double> y,
                    double* out, int* argmax);

Transform lft_1d(const ExtendedGridFunction& phi, const Grid& dual);
/// n-dimensional transform by axis-wise factorization.
Transform lft(const ExtendedGridFunction& phi, const Grid& dual);
/// Dual grid = primal grid mirrored.
Transform lft(const ExtendedGridFunction& phi);

/// Second conjugate back on psi's grid. In 1D the dual window [dual.lo, dual.hi] is used
/// as a continuum of slopes (lower convex envelope with clamped end slopes); in 2D the
/// discrete dual grid is used.
ExtendedGridFunction biconjugate(const ExtendedGridFunction& psi, const Grid& dual);
ExtendedGridFunction biconjugate(const ExtendedGridFunction& psi);

/// Lower convex envelope at arbitrary sorted positions x, with slopes clamped to [ymin, ymax].
/// Infinite inputs are filled. Used by biconjugate and the solver.
std::vector<double> windowed_envelope(std::span<const double> x, std::span<const double> psi, double ymin,
                                      double ymax);

struct ArgmaxReport {
    double max_discrepancy = 0.0;
    std::size_t checked = 0;
    std::size_t flagged = 0;
};

/// Compares the transform's maximizer with the gradient of the conjugate at unflagged dual nodes.
ArgmaxReport argmax_consistency_check(const ExtendedGridFunction& phi, const Grid& dual);

}  // namespace logcc
