#include "logcc/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "logcc/envelope.hpp"
#include "logcc/legendre.hpp"

namespace logcc {

namespace {

// Largest |difference quotient| of phi along axis k over finite neighbours.
double max_slope(const ExtendedGridFunction& phi, int k)
{
    const Grid& g = phi.grid();
    const double h = g.spacing(k);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        auto mi = g.multi_index(i);
        if (mi[k] + 1 >= g.points(k)) continue;
        auto mj = mi;
        ++mj[k];
        const double a = phi[i], b = phi[g.index(mj[0], mj[1])];
        if (a < inf && b < inf) s = std::max(s, std::abs(b - a) / h);
    }
    return s;
}

// Slopes of the first and last lower-hull edges of (y, psi).
std::pair<double, double> end_slopes(const std::vector<double>& y, const std::vector<double>& psi)
{
    std::vector<int> hull;
    for (int i = 0; i < static_cast<int>(y.size()); ++i) {
        if (!(psi[i] < inf)) continue;
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            const double cr = (y[b] - y[a]) * (psi[i] - psi[a]) - (psi[b] - psi[a]) * (y[i] - y[a]);
            if (cr > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    if (hull.size() < 2) return {-inf, inf};
    auto slope = [&](int a, int b) { return (psi[b] - psi[a]) / (y[b] - y[a]); };
    return {slope(hull[0], hull[1]), slope(hull[hull.size() - 2], hull.back())};
}

// Per-axis ceiling on dual points: cheap in 1D, kept modest in 2D.
int point_cap(int dim, int points) { return dim == 1 ? 16 * points : 2 * points; }

Axis capped_axis(double lo, double hi, double h, int dim, int base_points)
{
    int n = static_cast<int>(std::ceil((hi - lo) / h - 1e-9)) + 1;
    const int cap = point_cap(dim, base_points);
    if (n > cap) n = cap;
    if (base_points % 2 == 1 && n % 2 == 0) ++n;
    return Axis{lo, hi, std::max(n, 3)};
}

}  // namespace

Grid adapted_dual(const ExtendedGridFunction& phi)
{
    const Grid& g = phi.grid();
    std::vector<Axis> axes;
    for (int k = 0; k < g.dim(); ++k) {
        const Axis& a = g.axis(k);
        const double h = a.spacing(), s = max_slope(phi, k);
        // whole primal cells are added on each side until the steepest slope fits
        const int left = static_cast<int>(std::ceil(std::max(0.0, s - a.hi) / h));
        const int right = static_cast<int>(std::ceil(std::max(0.0, s + a.lo) / h));
        const int ext = std::max(left, right);
        const double lo = -a.hi - ext * h, hi = -a.lo + ext * h;
        if (a.points + 2 * ext <= point_cap(g.dim(), a.points)) axes.push_back(Axis{lo, hi, a.points + 2 * ext});
        else axes.push_back(capped_axis(lo, hi, h, g.dim(), a.points));
    }
    return Grid(std::move(axes));
}

Grid adapted_dual(const ExtendedGridFunction& phi, const ExtendedGridFunction& psi)
{
    Grid a = adapted_dual(phi), b = adapted_dual(psi);
    if (a.dim() != b.dim()) throw PreconditionError("functions differ in dimension");
    if (a == b) return a;
    std::vector<Axis> axes;
    for (int k = 0; k < a.dim(); ++k) {
        const Axis &p = a.axis(k), &q = b.axis(k);
        if (p.lo <= q.lo && p.hi >= q.hi && p.spacing() <= q.spacing()) axes.push_back(p);
        else if (q.lo <= p.lo && q.hi >= p.hi && q.spacing() <= p.spacing()) axes.push_back(q);
        else
            axes.push_back(capped_axis(std::min(p.lo, q.lo), std::max(p.hi, q.hi), std::min(p.spacing(), q.spacing()),
                                       a.dim(), std::max(phi.grid().points(k), psi.grid().points(k))));
    }
    return Grid(std::move(axes));
}

ExtendedGridFunction support_function(const LogConcaveFunction& f, const Grid& dual)
{
    return lft(f.potential(), dual).conjugate;
}

ExtendedGridFunction support_function(const LogConcaveFunction& f)
{
    return support_function(f, adapted_dual(f.potential()));
}

LogConcaveFunction alexandrov(const ExtendedGridFunction& psi, const Grid& primal)
{
    auto t = lft(psi, primal);
    if (primal.dim() != 1) return LogConcaveFunction(ExtendedGridFunction(primal, t.conjugate.data()));

    const Axis& d = psi.grid().axis(0);
    std::vector<double> y(d.points), off(d.points);
    for (int j = 0; j < d.points; ++j) {
        y[j] = d.coord(j);
        off[j] = psi[j];
    }
    auto [sl, sr] = end_slopes(y, off);
    const double tol = 1e-9 * (1.0 + std::max(std::isfinite(sl) ? std::abs(sl) : 0.0,
                                              std::isfinite(sr) ? std::abs(sr) : 0.0));
    std::vector<double> v = t.conjugate.data();
    for (int i = 0; i < primal.points(0); ++i) {
        const double x = primal.coord(0, i);
        if (x < sl - tol || x > sr + tol) v[i] = inf;
    }
    const double lo = std::max(primal.axis(0).lo, sl), hi = std::min(primal.axis(0).hi, sr);
    std::shared_ptr<const AffineEnvelope> env;
    if (lo <= hi) env = std::make_shared<AffineEnvelope>(std::move(y), std::move(off), lo, hi);
    else env = std::make_shared<AffineEnvelope>(std::vector<double>{}, std::vector<double>{}, lo, lo);
    return LogConcaveFunction(ExtendedGridFunction(primal, std::move(v)), std::move(env));
}

LogConcaveFunction alexandrov(const ExtendedGridFunction& psi) { return alexandrov(psi, psi.grid().mirrored()); }

LogConcaveFunction sup_convolution(const LogConcaveFunction& f, const LogConcaveFunction& g, const Grid& out)
{
    const Grid dual = adapted_dual(f.potential(), g.potential());
    auto hf = support_function(f, dual);
    auto hg = support_function(g, dual);
    return alexandrov(lp_mean(hf, hg, 1.0, 1.0), out);
}

LogConcaveFunction sup_convolution(const LogConcaveFunction& f, const LogConcaveFunction& g)
{
    return sup_convolution(f, g, f.grid());
}

LogConcaveFunction scale(double t, const LogConcaveFunction& f)
{
    if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("scale needs t > 0");
    const Grid& g = f.grid();
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        Point x = g.node(i);
        x[0] /= t;
        x[1] /= t;
        if (t == 1.0) v[i] = f.potential()[i];
        else v[i] = g.contains(x) ? t * f.potential().evaluate(x) : inf;
    }
    std::shared_ptr<const AffineEnvelope> env;
    if (const AffineEnvelope* e = f.envelope()) {
        std::vector<double> off = e->offsets();
        for (double& o : off) o *= t;
        const double lo = std::max(g.axis(0).lo, t * e->lo()), hi = std::min(g.axis(0).hi, t * e->hi());
        if (lo <= hi) env = std::make_shared<AffineEnvelope>(e->slopes(), std::move(off), lo, hi);
    }
    return LogConcaveFunction(ExtendedGridFunction(g, std::move(v)), std::move(env));
}

ExtendedGridFunction lp_mean(const ExtendedGridFunction& hf, const ExtendedGridFunction& hg, double t, double p)
{
    if (!(hf.grid() == hg.grid())) throw PreconditionError("support functions live on different grids");
    if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
    if (!(t >= 0.0)) throw PreconditionError("t must be >= 0");
    std::vector<double> out(hf.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
    if (p == 1.0) {
#pragma omp parallel for
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[i] = (hf[i] == inf || (t > 0.0 && hg[i] == inf)) ? inf : hf[i] + (t > 0.0 ? t * hg[i] : 0.0);
        return ExtendedGridFunction(hf.grid(), std::move(out));
    }
    const double tol_f = 1e-9 * std::max(1.0, hf.scale()), tol_g = 1e-9 * std::max(1.0, hg.scale());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (hf[i] < -tol_f || hg[i] < -tol_g)
            throw PreconditionError("support function negative on the dual window; Lp combination needs h >= 0");
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (hf[i] == inf || (t > 0.0 && hg[i] == inf)) {
            out[i] = inf;
            continue;
        }
        const double a = std::max(hf[i], 0.0), b = std::max(hg[i], 0.0);
        out[i] = t > 0.0 ? std::pow(std::pow(a, p) + t * std::pow(b, p), 1.0 / p) : a;
    }
    return ExtendedGridFunction(hf.grid(), std::move(out));
}

LogConcaveFunction lp_combination(const LogConcaveFunction& f, const LogConcaveFunction& g, double t, double p,
                                  const Grid& dual)
{
    auto hf = support_function(f, dual);
    auto hg = support_function(g, dual);
    return alexandrov(lp_mean(hf, hg, t, p), f.grid());
}

LogConcaveFunction lp_combination(const LogConcaveFunction& f, const LogConcaveFunction& g, double t, double p)
{
    return lp_combination(f, g, t, p, adapted_dual(f.potential(), g.potential()));
}

bool is_essentially_continuous(const LogConcaveFunction& f, double tol)
{
    for (std::size_t i : f.support_boundary())
        if (!(f.value(i) < tol)) return false;
    return true;
}

bool is_essentially_continuous(const LogConcaveFunction& f) { return f.essentially_continuous(); }

}  // namespace logcc
