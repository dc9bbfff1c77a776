#include "logcc/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace logcc {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

std::vector<double> axis_coords(const Axis& a)
{
    std::vector<double> c(a.points);
    for (int i = 0; i < a.points; ++i) c[i] = a.coord(i);
    return c;
}

}  // namespace

void conjugate_line(std::span<const double> x, std::span<const double> phi, std::span<const double> y,
                    double* out, int* argmax)
{
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(y.size());
    std::vector<int> fin;
    fin.reserve(n);
    double pmax = 0.0, xmax = 0.0, ymax = 0.0;
    for (int i = 0; i < n; ++i) {
        xmax = std::max(xmax, std::abs(x[i]));
        if (phi[i] < inf) {
            fin.push_back(i);
            pmax = std::max(pmax, std::abs(phi[i]));
        }
    }
    if (fin.empty()) throw PreconditionError("empty effective domain");
    for (int j = 0; j < m; ++j) ymax = std::max(ymax, std::abs(y[j]));

    std::vector<int> hull;
    hull.reserve(fin.size());
    for (int i : fin) {
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            const double cr = (x[b] - x[a]) * (phi[i] - phi[a]) - (phi[b] - phi[a]) * (x[i] - x[a]);
            if (cr > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    const int H = static_cast<int>(hull.size());

    // Points that can tie with the hull after rounding: the hull vertices and anything
    // within a few ulps of a hull chord.
    const double tol = 16.0 * eps * (xmax * ymax + pmax) + std::numeric_limits<double>::min();
    std::vector<int> cand;
    std::vector<int> pos(H);
    cand.reserve(fin.size());
    int hk = 0;
    for (int i : fin) {
        if (i == hull[hk]) {
            pos[hk] = static_cast<int>(cand.size());
            cand.push_back(i);
            ++hk;
            continue;
        }
        const int a = hull[hk - 1], b = hull[hk];
        const double chord = phi[a] + (phi[b] - phi[a]) * ((x[i] - x[a]) / (x[b] - x[a]));
        if (phi[i] - chord <= tol) cand.push_back(i);
    }

    auto val = [&](int i, double yy) { return x[i] * yy - phi[i]; };
    int k = 0;
    for (int j = 0; j < m; ++j) {
        const double yy = y[j];
        while (k + 1 < H && val(hull[k + 1], yy) > val(hull[k], yy)) ++k;
        const double ref = val(hull[k], yy);
        int lo = std::max(k - 1, 0), hi = std::min(k + 1, H - 1);
        while (hi + 1 < H && val(hull[hi + 1], yy) >= ref - tol) ++hi;
        while (lo > 0 && val(hull[lo - 1], yy) >= ref - tol) --lo;
        int best = cand[pos[lo]];
        double bv = val(best, yy);
        for (int c = pos[lo] + 1; c <= pos[hi]; ++c) {
            const double v = val(cand[c], yy);
            if (v > bv) {
                bv = v;
                best = cand[c];
            }
        }
        out[j] = bv;
        argmax[j] = best;
    }
}

Transform lft_1d(const ExtendedGridFunction& phi, const Grid& dual)
{
    if (phi.grid().dim() != 1 || dual.dim() != 1) throw PreconditionError("lft_1d needs 1D grids");
    const Axis& ax = phi.grid().axis(0);
    auto x = axis_coords(ax);
    auto y = axis_coords(dual.axis(0));
    std::vector<double> v(y.size());
    std::vector<int> arg(y.size());
    conjugate_line(x, phi.values(), y, v.data(), arg.data());
    Transform t{ExtendedGridFunction(dual, std::move(v), true), {}, {}};
    t.argmax.resize(y.size());
    t.boundary.resize(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        t.argmax[j] = static_cast<std::size_t>(arg[j]);
        t.boundary[j] = arg[j] == 0 || arg[j] == ax.points - 1;
    }
    return t;
}

Transform lft(const ExtendedGridFunction& phi, const Grid& dual)
{
    const Grid& g = phi.grid();
    if (g.dim() != dual.dim()) throw PreconditionError("primal and dual grids differ in dimension");
    if (g.dim() == 1) return lft_1d(phi, dual);
    if (!phi.has_finite()) throw PreconditionError("empty effective domain");

    const int n0 = g.points(0), n1 = g.points(1);
    const int m0 = dual.points(0), m1 = dual.points(1);
    const auto x0 = axis_coords(g.axis(0)), x1 = axis_coords(g.axis(1));
    const auto y0 = axis_coords(dual.axis(0)), y1 = axis_coords(dual.axis(1));

    // pass 1: along axis 0 for every fixed x1 -> inner(j0, i1)
    std::vector<double> inner(static_cast<std::size_t>(m0) * n1);
    std::vector<int> arg0(static_cast<std::size_t>(m0) * n1);
#pragma omp parallel
    {
        std::vector<double> line(n0), res(m0);
        std::vector<int> ares(m0);
#pragma omp for schedule(static)
        for (int i1 = 0; i1 < n1; ++i1) {
            bool any = false;
            for (int i0 = 0; i0 < n0; ++i0) {
                line[i0] = phi.at(i0, i1);
                any = any || line[i0] < inf;
            }
            if (any) conjugate_line(x0, line, y0, res.data(), ares.data());
            for (int j0 = 0; j0 < m0; ++j0) {
                inner[static_cast<std::size_t>(j0) * n1 + i1] = any ? res[j0] : -inf;
                arg0[static_cast<std::size_t>(j0) * n1 + i1] = any ? ares[j0] : -1;
            }
        }
    }

    // pass 2: along axis 1 for every fixed y0, on -inner
    std::vector<double> out(dual.size());
    std::vector<std::size_t> argmax(dual.size());
    std::vector<char> flags(dual.size());
#pragma omp parallel
    {
        std::vector<double> line(n1), res(m1);
        std::vector<int> ares(m1);
#pragma omp for schedule(static)
        for (int j0 = 0; j0 < m0; ++j0) {
            for (int i1 = 0; i1 < n1; ++i1) line[i1] = -inner[static_cast<std::size_t>(j0) * n1 + i1];
            conjugate_line(x1, line, y1, res.data(), ares.data());
            for (int j1 = 0; j1 < m1; ++j1) {
                const std::size_t d = dual.index(j0, j1);
                const int i1 = ares[j1];
                const int i0 = arg0[static_cast<std::size_t>(j0) * n1 + i1];
                out[d] = res[j1];
                argmax[d] = g.index(i0, i1);
                flags[d] = i0 == 0 || i0 == n0 - 1 || i1 == 0 || i1 == n1 - 1;
            }
        }
    }
    return Transform{ExtendedGridFunction(dual, std::move(out), true), std::move(argmax), std::move(flags)};
}

Transform lft(const ExtendedGridFunction& phi) { return lft(phi, phi.grid().mirrored()); }

std::vector<double> windowed_envelope(std::span<const double> x, std::span<const double> psi, double ymin,
                                      double ymax)
{
    const int n = static_cast<int>(x.size());
    std::vector<int> fin;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        if (psi[i] < inf) {
            fin.push_back(i);
            scale = std::max(scale, std::abs(psi[i]));
        }
    if (fin.empty()) throw PreconditionError("empty effective domain");

    auto slope = [&](int a, int b) { return (psi[b] - psi[a]) / (x[b] - x[a]); };
    double smax = 0.0;
    for (std::size_t k = 0; k + 1 < fin.size(); ++k) smax = std::max(smax, std::abs(slope(fin[k], fin[k + 1])));
    const double stol = 1e-10 * (1.0 + smax);
    const double vtol = 1e-12 * (1.0 + scale);

    std::vector<int> hull;
    for (int i : fin) {
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            if (slope(b, i) > slope(a, b) + stol) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    const int H = static_cast<int>(hull.size());

    int klo = H - 1, khi = 0;
    for (int k = 0; k + 1 < H; ++k)
        if (slope(hull[k], hull[k + 1]) > ymin + stol) {
            klo = k;
            break;
        }
    for (int k = H - 1; k > 0; --k)
        if (slope(hull[k - 1], hull[k]) < ymax - stol) {
            khi = k;
            break;
        }
    khi = std::max(khi, klo);

    std::vector<double> out(n);
    const int a0 = hull[klo], b0 = hull[khi];
    int k = klo;
    for (int i = 0; i < n; ++i) {
        if (i <= a0) {
            out[i] = i == a0 ? psi[a0] : psi[a0] + ymin * (x[i] - x[a0]);
            continue;
        }
        if (i >= b0) {
            out[i] = i == b0 ? psi[b0] : psi[b0] + ymax * (x[i] - x[b0]);
            continue;
        }
        while (hull[k + 1] < i) ++k;
        if (hull[k + 1] == i) {
            out[i] = psi[i];
            continue;
        }
        const int a = hull[k], b = hull[k + 1];
        const double chord = psi[a] + (psi[b] - psi[a]) * ((x[i] - x[a]) / (x[b] - x[a]));
        out[i] = psi[i] <= chord + vtol ? psi[i] : chord;
    }
    return out;
}

ExtendedGridFunction biconjugate(const ExtendedGridFunction& psi, const Grid& dual)
{
    const Grid& g = psi.grid();
    if (g.dim() != dual.dim()) throw PreconditionError("primal and dual grids differ in dimension");
    if (g.dim() == 1) {
        auto x = axis_coords(g.axis(0));
        auto v = windowed_envelope(x, psi.values(), dual.axis(0).lo, dual.axis(0).hi);
        return ExtendedGridFunction(g, std::move(v), true);
    }
    auto once = lft(psi, dual);
    auto twice = lft(once.conjugate, g);
    return ExtendedGridFunction(g, twice.conjugate.data(), true);
}

ExtendedGridFunction biconjugate(const ExtendedGridFunction& psi) { return biconjugate(psi, psi.grid().mirrored()); }

ArgmaxReport argmax_consistency_check(const ExtendedGridFunction& phi, const Grid& dual)
{
    auto t = lft(phi, dual);
    auto grad = gradient_map(t.conjugate);
    ArgmaxReport r;
    for (std::size_t k = 0; k < grad.nodes.size(); ++k) {
        const std::size_t j = grad.nodes[k];
        if (t.boundary[j]) {
            ++r.flagged;
            continue;
        }
        const Point x = phi.grid().node(t.argmax[j]);
        double d = 0.0;
        for (int a = 0; a < dual.dim(); ++a) d += (x[a] - grad.gradients[k][a]) * (x[a] - grad.gradients[k][a]);
        r.max_discrepancy = std::max(r.max_discrepancy, std::sqrt(d));
        ++r.checked;
    }
    return r;
}

}  // namespace logcc
