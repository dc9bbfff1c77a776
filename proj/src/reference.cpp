#include "logcc/reference.hpp"

#include <algorithm>

namespace logcc::reference {

Transform brute_force_lft(const ExtendedGridFunction& phi, const Grid& dual)
{
    const Grid& g = phi.grid();
    if (g.dim() != dual.dim()) throw PreconditionError("primal and dual grids differ in dimension");
    if (!phi.has_finite()) throw PreconditionError("empty effective domain");
    std::vector<double> out(dual.size());
    std::vector<std::size_t> arg(dual.size());
    std::vector<char> flags(dual.size());
    for (std::size_t j = 0; j < dual.size(); ++j) {
        const Point y = dual.node(j);
        double best = -inf;
        std::size_t bi = 0;
        bool first = true;
        if (g.dim() == 1) {
            for (int i = 0; i < g.points(0); ++i) {
                if (!(phi[i] < inf)) continue;
                const double v = g.coord(0, i) * y[0] - phi[i];
                if (first || v > best) {
                    best = v;
                    bi = i;
                    first = false;
                }
            }
        } else {
            for (int i1 = 0; i1 < g.points(1); ++i1)
                for (int i0 = 0; i0 < g.points(0); ++i0) {
                    const double p = phi.at(i0, i1);
                    if (!(p < inf)) continue;
                    const double v = g.coord(1, i1) * y[1] + (g.coord(0, i0) * y[0] - p);
                    if (first || v > best) {
                        best = v;
                        bi = g.index(i0, i1);
                        first = false;
                    }
                }
        }
        out[j] = best;
        arg[j] = bi;
        flags[j] = g.on_boundary(bi);
    }
    return Transform{ExtendedGridFunction(dual, std::move(out)), std::move(arg), std::move(flags)};
}

ExtendedGridFunction brute_force_biconjugate(const ExtendedGridFunction& psi, const Grid& dual)
{
    auto once = brute_force_lft(psi, dual);
    return brute_force_lft(once.conjugate, psi.grid()).conjugate;
}

ExtendedGridFunction direct_sup_convolution(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                            const Grid& out)
{
    const Grid& fg = f.grid();
    const Grid& gg = g.grid();
    std::vector<double> v(out.size(), inf);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Point x = out.node(k);
        for (std::size_t i = 0; i < fg.size(); ++i) {
            const double pf = f.potential()[i];
            if (!(pf < inf)) continue;
            const Point y = fg.node(i);
            const Point z{x[0] - y[0], x[1] - y[1]};
            if (!gg.contains(z)) continue;
            v[k] = std::min(v[k], pf + g.potential().evaluate(z));
        }
        // and with the roles swapped, so both breakpoint sets are searched
        for (std::size_t i = 0; i < gg.size(); ++i) {
            const double pg = g.potential()[i];
            if (!(pg < inf)) continue;
            const Point z = gg.node(i);
            const Point y{x[0] - z[0], x[1] - z[1]};
            if (!fg.contains(y)) continue;
            v[k] = std::min(v[k], f.potential().evaluate(y) + pg);
        }
    }
    return ExtendedGridFunction(out, std::move(v));
}

}  // namespace logcc::reference
