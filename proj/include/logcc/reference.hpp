#pragma once

#include "logcc/grid.hpp"
#include "logcc/legendre.hpp"

/// Serial brute-force implementations used as test oracles and benchmark baselines.
namespace logcc::reference {

/// Direct O(NM) maximization over all finite primal nodes; ties to the smaller index.
Transform brute_force_lft(const ExtendedGridFunction& phi, const Grid& dual);

/// Discrete double transform primal -> dual -> primal by brute force.
ExtendedGridFunction brute_force_biconjugate(const ExtendedGridFunction& psi, const Grid& dual);

/// Potential of (f * g)(x) = sup_y f(y) g(x - y) on out, by direct search over the nodes
/// of either grid with the other function interpolated (zero outside its box).
ExtendedGridFunction direct_sup_convolution(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                            const Grid& out);

}  // namespace logcc::reference
