#include "logcc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "logcc/calculus.hpp"
#include "logcc/envelope.hpp"

namespace logcc {

namespace {

bool potential_is_even(const ExtendedGridFunction& phi)
{
    const Grid& g = phi.grid();
    if (!g.even()) return false;
    const double tol = 1e-12 * std::max(1.0, phi.scale());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double a = phi[i], b = phi[g.reflect(i)];
        if ((a == inf) != (b == inf)) return false;
        if (a < inf && std::abs(a - b) > tol) return false;
    }
    return true;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms, bool even)
    : dim_(dim), atoms_(std::move(atoms)), even_(even)
{
    if (dim != 1 && dim != 2) throw PreconditionError("measures live in dimension 1 or 2");
    for (const Atom& a : atoms_) {
        if (!(a.w > 0.0) || !std::isfinite(a.w)) throw PreconditionError("atom weights must be finite and positive");
        if (!std::isfinite(a.x[0]) || !std::isfinite(a.x[1])) throw PreconditionError("atom location not finite");
        if (dim == 1 && a.x[1] != 0.0) throw PreconditionError("1D atom with a second coordinate");
        mass_ += a.w;
    }
    if (even_ && !is_even_paired(atoms_, default_pairing_tolerance(atoms_)))
        throw PreconditionError("measure flagged even but atoms do not pair with their reflections");
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const
{
    if (!(c > 0.0)) throw PreconditionError("measure scale must be positive");
    std::vector<Atom> a = atoms_;
    for (Atom& x : a) x.w *= c;
    return DiscreteMeasure(dim_, std::move(a), even_);
}

double default_pairing_tolerance(const std::vector<Atom>& atoms)
{
    double r = 0.0;
    for (const Atom& a : atoms) r = std::max({r, std::abs(a.x[0]), std::abs(a.x[1])});
    return 1e-9 * (1.0 + r);
}

bool is_even_paired(const std::vector<Atom>& atoms, double tol)
{
    // match each atom with an unused reflected atom inside the tolerance box
    std::vector<Atom> b = atoms;
    for (Atom& x : b) x.x = {-x.x[0], -x.x[1]};
    std::sort(b.begin(), b.end(), [](const Atom& u, const Atom& v) { return u.x[0] < v.x[0]; });
    std::vector<char> used(b.size(), 0);
    for (const Atom& a : atoms) {
        auto it = std::lower_bound(b.begin(), b.end(), a.x[0] - tol,
                                   [](const Atom& u, double x) { return u.x[0] < x; });
        bool found = false;
        for (; it != b.end() && it->x[0] <= a.x[0] + tol; ++it) {
            const std::size_t k = static_cast<std::size_t>(it - b.begin());
            if (used[k] || std::abs(it->x[1] - a.x[1]) > tol) continue;
            if (std::abs(it->w - a.w) > 1e-9 * std::max(it->w, a.w)) continue;
            used[k] = 1;
            found = true;
            break;
        }
        if (!found) return false;
    }
    return true;
}

DiscreteMeasure surface_area_measure(const LogConcaveFunction& f)
{
    const Grid& g = f.grid();
    auto gm = gradient_map(f.potential());
    std::vector<Atom> atoms(gm.nodes.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(atoms.size());
#pragma omp parallel for
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        Point y = gm.gradients[k];
        if (g.dim() == 1) y[1] = 0.0;
        atoms[k] = Atom{y, f.value(gm.nodes[k]) * g.weight(gm.nodes[k])};
    }
    std::erase_if(atoms, [](const Atom& a) { return !(a.w > 0.0); });
    if (atoms.empty()) throw PreconditionError("surface area measure of a function with zero integral");
    return DiscreteMeasure(g.dim(), std::move(atoms), potential_is_even(f.potential()));
}

DiscreteMeasure lp_surface_area_measure(const DiscreteMeasure& sf, const ExtendedGridFunction& hf, double p)
{
    if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
    if (hf.grid().dim() != sf.dim()) throw PreconditionError("support function and measure differ in dimension");
    const double htol = 1e-9 * std::max(1.0, hf.scale());
    const double wtol = 1e-12 * sf.total_mass();
    std::vector<Atom> out;
    out.reserve(sf.size());
    for (const Atom& a : sf.atoms()) {
        const double h = hf.evaluate(a.x);
        if (h == inf) {
            if (a.w > wtol) throw PreconditionError("support function is +inf at an atom of positive weight");
            continue;
        }
        if (p == 1.0) {
            out.push_back(a);
            continue;
        }
        if (h < -htol) throw PreconditionError("support function negative at an atom; S_{f,p} needs h_f >= 0");
        if (h <= htol) continue;
        const double w = a.w * std::pow(h, 1.0 - p);
        if (w > 0.0) out.push_back(Atom{a.x, w});
    }
    return DiscreteMeasure(sf.dim(), std::move(out), sf.even());
}

DiscreteMeasure lp_surface_area_measure(const LogConcaveFunction& f, double p)
{
    return lp_surface_area_measure(surface_area_measure(f), support_function(f), p);
}

DiscreteMeasure exact_lp_surface_area_measure(const LogConcaveFunction& f, double p)
{
    if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
    const AffineEnvelope* e = f.envelope();
    if (f.grid().dim() != 1 || !e) throw PreconditionError("exact measure needs a 1D function with an envelope");
    std::vector<Atom> atoms;
    for (int i : e->active()) {
        double w = e->cell_masses()[i];
        if (p < 1.0) {
            const double h = e->offsets()[i];
            if (h < -1e-9 * std::max(1.0, std::abs(h))) throw PreconditionError("support function negative at an atom");
            w *= std::pow(std::max(h, 0.0), 1.0 - p);
        }
        if (w > 0.0) atoms.push_back(Atom{Point{e->slopes()[i], 0.0}, w});
    }
    if (atoms.empty()) throw PreconditionError("surface area measure of a function with zero integral");
    const bool even = is_even_paired(atoms, default_pairing_tolerance(atoms));
    return DiscreteMeasure(1, std::move(atoms), even);
}

double integrate_against(const std::function<double(const Point&)>& rho, const DiscreteMeasure& m)
{
    double s = 0.0;
    for (const Atom& a : m.atoms()) {
        const double r = rho(a.x);
        if (r == inf) return inf;
        s += r * a.w;
    }
    return s;
}

double integrate_against(const ExtendedGridFunction& rho, const DiscreteMeasure& m)
{
    if (rho.grid().dim() != m.dim()) throw PreconditionError("integrand and measure differ in dimension");
    return integrate_against([&rho](const Point& x) { return rho.evaluate(x); }, m);
}

Histogram histogram(const DiscreteMeasure& m, const Grid& bins)
{
    if (bins.dim() != m.dim()) throw PreconditionError("bins and measure differ in dimension");
    Histogram h{bins, std::vector<double>(bins.size(), 0.0), 0.0};
    for (const Atom& a : m.atoms()) {
        std::array<int, 2> idx{0, 0};
        bool inside = true;
        for (int k = 0; k < bins.dim(); ++k) {
            const Axis& ax = bins.axis(k);
            const double u = std::floor((a.x[k] - ax.lo) / ax.spacing() + 0.5);
            if (u < 0 || u >= ax.points) inside = false;
            else idx[k] = static_cast<int>(u);
        }
        if (inside) h.mass[bins.index(idx[0], idx[1])] += a.w;
        else h.overflow += a.w;
    }
    return h;
}

Grid aligned_bins(double r, double h, int dim)
{
    if (!(r > 0.0 && h > 0.0)) throw PreconditionError("bins need positive radius and width");
    const int m = static_cast<int>(std::ceil(r / h - 1e-9));
    const Axis a{-m * h, m * h, 2 * m + 1};
    return dim == 1 ? Grid(std::vector<Axis>{a}) : Grid(a, a);
}

double wasserstein1(const DiscreteMeasure& m1, const DiscreteMeasure& m2)
{
    if (m1.dim() != 1 || m2.dim() != 1) throw PreconditionError("wasserstein1 is implemented in 1D only");
    std::vector<std::pair<double, double>> ev;
    for (const Atom& a : m1.atoms()) ev.emplace_back(a.x[0], a.w);
    for (const Atom& a : m2.atoms()) ev.emplace_back(a.x[0], -a.w);
    std::sort(ev.begin(), ev.end());
    double F = 0.0, s = 0.0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
        F += ev[k].second;
        if (k + 1 < ev.size()) s += std::abs(F) * (ev[k + 1].first - ev[k].first);
    }
    return s;
}

MeasureDistance measure_distance(const DiscreteMeasure& m1, const DiscreteMeasure& m2, const Grid& bins)
{
    if (m1.dim() != m2.dim()) throw PreconditionError("measures differ in dimension");
    const Histogram a = histogram(m1, bins), b = histogram(m2, bins);
    MeasureDistance d;
    for (std::size_t k = 0; k < a.mass.size(); ++k) d.l1 += std::abs(a.mass[k] - b.mass[k]);
    d.l1 += std::abs(a.overflow - b.overflow);
    if (m1.dim() == 1) d.w1 = wasserstein1(m1, m2);
    return d;
}

}  // namespace logcc
