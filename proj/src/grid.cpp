#include "logcc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "logcc/contour.hpp"
#include "logcc/envelope.hpp"

namespace logcc {

double Axis::coord(int i) const
{
    if (i <= 0) return lo;
    if (i >= points - 1) return hi;
    const int n = points - 1;
    return (lo * (n - i) + hi * i) / n;
}

Grid::Grid(double lo, double hi, int points) : Grid(std::vector<Axis>{Axis{lo, hi, points}}) {}

Grid::Grid(const Axis& a0, const Axis& a1) : Grid(std::vector<Axis>{a0, a1}) {}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes))
{
    if (axes_.size() != 1 && axes_.size() != 2)
        throw PreconditionError("grid dimension must be 1 or 2");
    for (const Axis& a : axes_) {
        if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi))
            throw PreconditionError("grid bounds must satisfy lo < hi");
        if (a.points < 3)
            throw PreconditionError("grid needs at least 3 points per axis");
    }
}

std::size_t Grid::size() const
{
    std::size_t n = 1;
    for (const Axis& a : axes_) n *= static_cast<std::size_t>(a.points);
    return axes_.empty() ? 0 : n;
}

std::array<int, 2> Grid::multi_index(std::size_t idx) const
{
    if (dim() == 1) return {static_cast<int>(idx), 0};
    const auto n1 = static_cast<std::size_t>(axes_[1].points);
    return {static_cast<int>(idx / n1), static_cast<int>(idx % n1)};
}

Point Grid::node(std::size_t idx) const
{
    auto [i0, i1] = multi_index(idx);
    if (dim() == 1) return {axes_[0].coord(i0), 0.0};
    return {axes_[0].coord(i0), axes_[1].coord(i1)};
}

bool Grid::even() const
{
    if (axes_.empty()) return false;
    for (const Axis& a : axes_)
        if (a.lo != -a.hi) return false;
    return true;
}

Grid Grid::mirrored() const
{
    std::vector<Axis> ax = axes_;
    for (Axis& a : ax) a = Axis{-a.hi, -a.lo, a.points};
    return Grid(std::move(ax));
}

bool Grid::contains(const Point& x) const
{
    for (int k = 0; k < dim(); ++k)
        if (!(x[k] >= axes_[k].lo && x[k] <= axes_[k].hi)) return false;
    return true;
}

double Grid::cell_volume() const
{
    double v = 1.0;
    for (const Axis& a : axes_) v *= a.spacing();
    return v;
}

double Grid::weight(std::size_t idx) const
{
    auto mi = multi_index(idx);
    double w = 1.0;
    for (int k = 0; k < dim(); ++k) {
        double h = axes_[k].spacing();
        if (mi[k] == 0 || mi[k] == axes_[k].points - 1) h *= 0.5;
        w *= h;
    }
    return w;
}

bool Grid::on_boundary(std::size_t idx) const
{
    auto mi = multi_index(idx);
    for (int k = 0; k < dim(); ++k)
        if (mi[k] == 0 || mi[k] == axes_[k].points - 1) return true;
    return false;
}

std::size_t Grid::reflect(std::size_t idx) const
{
    auto mi = multi_index(idx);
    if (dim() == 1) return static_cast<std::size_t>(axes_[0].points - 1 - mi[0]);
    return index(axes_[0].points - 1 - mi[0], axes_[1].points - 1 - mi[1]);
}

// ---------------------------------------------------------------------------

ExtendedGridFunction::ExtendedGridFunction(Grid grid, std::vector<double> values,
                                           std::optional<bool> convexity_certificate)
    : grid_(std::move(grid)), values_(std::move(values)), certificate_(convexity_certificate)
{
    if (values_.size() != grid_.size())
        throw PreconditionError("value count " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
    for (double v : values_)
        if (std::isnan(v) || v == -inf)
            throw PreconditionError("grid function values must be finite or +inf");
}

ExtendedGridFunction ExtendedGridFunction::sample(const Grid& grid,
                                                  const std::function<double(const Point&)>& fn)
{
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
    return ExtendedGridFunction(grid, std::move(v));
}

ExtendedGridFunction ExtendedGridFunction::constant(const Grid& grid, double value)
{
    return ExtendedGridFunction(grid, std::vector<double>(grid.size(), value));
}

bool ExtendedGridFunction::has_finite() const
{
    return std::any_of(values_.begin(), values_.end(), [](double v) { return v < inf; });
}

double ExtendedGridFunction::scale() const
{
    double s = 0.0;
    for (double v : values_)
        if (v < inf) s = std::max(s, std::abs(v));
    return s;
}

double ExtendedGridFunction::min_finite() const
{
    double m = inf;
    for (double v : values_) m = std::min(m, v);
    return m;
}

namespace {

// Cell index and fractional offset along one axis; snaps to nodes.
void locate(const Axis& a, double x, int& i, double& w)
{
    const double s = (x - a.lo) / a.spacing();
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9) {
        i = static_cast<int>(r);
        w = 0.0;
    } else {
        i = static_cast<int>(std::floor(s));
        w = s - i;
    }
    if (i >= a.points - 1) {
        i = a.points - 2;
        w = 1.0;
    }
    if (i < 0) {
        i = 0;
        w = 0.0;
    }
}

double mix(double a, double b, double w)
{
    if (w == 0.0) return a;
    if (w == 1.0) return b;
    if (a == inf || b == inf) return inf;
    return (1.0 - w) * a + w * b;
}

}  // namespace

double ExtendedGridFunction::evaluate(const Point& xin) const
{
    // points a rounding error outside the box are pulled back onto it
    Point x = xin;
    for (int k = 0; k < grid_.dim(); ++k) {
        const Axis& a = grid_.axis(k);
        const double slack = 1e-9 * a.spacing();
        if (x[k] < a.lo && x[k] >= a.lo - slack) x[k] = a.lo;
        if (x[k] > a.hi && x[k] <= a.hi + slack) x[k] = a.hi;
    }
    if (!grid_.contains(x)) throw DomainError("evaluation point outside the grid box");
    int i0, i1;
    double w0, w1;
    locate(grid_.axis(0), x[0], i0, w0);
    if (grid_.dim() == 1) return mix(values_[i0], values_[i0 + 1], w0);
    locate(grid_.axis(1), x[1], i1, w1);
    if (w0 == 0.0 && w1 == 0.0) return at(i0, i1);
    if (w0 == 0.0) return mix(at(i0, i1), at(i0, i1 + 1), w1);
    if (w1 == 0.0) return mix(at(i0, i1), at(i0 + 1, i1), w0);
    if (at(i0, i1) == inf || at(i0 + 1, i1) == inf || at(i0, i1 + 1) == inf || at(i0 + 1, i1 + 1) == inf)
        return inf;
    return mix(mix(at(i0, i1), at(i0 + 1, i1), w0), mix(at(i0, i1 + 1), at(i0 + 1, i1 + 1), w0), w1);
}

ExtendedGridFunction ExtendedGridFunction::certified() const
{
    return ExtendedGridFunction(grid_, values_, is_discretely_convex(*this, default_convex_tolerance(*this)));
}

double evaluate(const ExtendedGridFunction& f, const Point& x) { return f.evaluate(x); }

double default_convex_tolerance(const ExtendedGridFunction& f) { return 1e-9 * std::max(1.0, f.scale()); }

bool is_discretely_convex(const ExtendedGridFunction& f, double tol)
{
    const Grid& g = f.grid();
    for (int ax = 0; ax < g.dim(); ++ax) {
        const int n = g.points(ax);
        const int lines = g.dim() == 1 ? 1 : g.points(1 - ax);
        for (int l = 0; l < lines; ++l) {
            auto at = [&](int i) {
                if (g.dim() == 1) return f[static_cast<std::size_t>(i)];
                return ax == 0 ? f.at(i, l) : f.at(l, i);
            };
            int state = 0;  // 0 before the domain, 1 inside, 2 after
            for (int i = 0; i < n; ++i) {
                const bool fin = at(i) < inf;
                if (fin && state == 2) return false;
                if (fin) state = 1;
                else if (state == 1) state = 2;
            }
            for (int i = 1; i + 1 < n; ++i) {
                double a = at(i - 1), b = at(i), c = at(i + 1);
                if (a < inf && b < inf && c < inf && a - 2.0 * b + c < -tol) return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

LogConcaveFunction::LogConcaveFunction(ExtendedGridFunction potential,
                                       std::shared_ptr<const AffineEnvelope> envelope)
    : potential_(std::move(potential)), envelope_(std::move(envelope))
{
    const double tol = default_ec_tolerance(*this);
    essentially_continuous_ = true;
    for (std::size_t i : support_boundary())
        if (!(value(i) < tol)) essentially_continuous_ = false;
}

LogConcaveFunction LogConcaveFunction::from_potential(const Grid& grid,
                                                      const std::function<double(const Point&)>& phi)
{
    return LogConcaveFunction(ExtendedGridFunction::sample(grid, phi));
}

double LogConcaveFunction::value(std::size_t i) const { return std::exp(-potential_[i]); }

double LogConcaveFunction::operator()(const Point& x) const { return std::exp(-potential_.evaluate(x)); }

double LogConcaveFunction::max_value() const { return std::exp(-potential_.min_finite()); }

std::vector<std::size_t> LogConcaveFunction::support() const
{
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < size(); ++i)
        if (potential_[i] < inf) s.push_back(i);
    return s;
}

std::vector<std::size_t> LogConcaveFunction::support_boundary() const
{
    const Grid& g = grid();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(potential_[i] < inf)) continue;
        if (g.on_boundary(i)) {
            out.push_back(i);
            continue;
        }
        auto mi = g.multi_index(i);
        bool edge = false;
        for (int k = 0; k < g.dim() && !edge; ++k)
            for (int d : {-1, 1}) {
                auto mj = mi;
                mj[k] += d;
                if (!(potential_[g.index(mj[0], mj[1])] < inf)) edge = true;
            }
        if (edge) out.push_back(i);
    }
    return out;
}

double LogConcaveFunction::integral() const { return integrate_exp_neg(potential_); }

double LogConcaveFunction::exact_integral() const
{
    return envelope_ ? envelope_->integral() : integral();
}

double default_ec_tolerance(const LogConcaveFunction& f)
{
    return 1e-8 * (f.potential().has_finite() ? f.max_value() : 1.0);
}

double integrate_exp_neg(const ExtendedGridFunction& phi)
{
    const Grid& g = phi.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (phi[i] < inf) s += g.weight(i) * std::exp(-phi[i]);
    return s;
}

GradientField gradient_map(const ExtendedGridFunction& phi)
{
    const Grid& g = phi.grid();
    GradientField out;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(phi[i] < inf)) continue;
        auto mi = g.multi_index(i);
        Point grad{0.0, 0.0};
        bool ok = true;
        for (int k = 0; k < g.dim(); ++k) {
            const double h = g.spacing(k);
            auto neighbour = [&](int d) {
                auto mj = mi;
                mj[k] += d;
                if (mj[k] < 0 || mj[k] >= g.points(k)) return inf;
                return phi[g.index(mj[0], mj[1])];
            };
            const double l = neighbour(-1), r = neighbour(1);
            if (l < inf && r < inf) grad[k] = (r - l) / (2.0 * h);
            else if (r < inf) grad[k] = (r - phi[i]) / h;
            else if (l < inf) grad[k] = (phi[i] - l) / h;
            else ok = false;
        }
        if (ok) {
            out.nodes.push_back(i);
            out.gradients.push_back(grad);
        }
    }
    return out;
}

double superlevel_perimeter(const LogConcaveFunction& f, double t)
{
    if (!(t > 0.0)) throw PreconditionError("superlevel_perimeter needs t > 0");
    const Grid& g = f.grid();
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.value(i);
    if (g.dim() == 1) {
        const std::size_t n = v.size();
        int count = (v[0] > t) + (v[n - 1] > t);
        for (std::size_t i = 0; i + 1 < n; ++i) count += (v[i] > t) != (v[i + 1] > t);
        return count;
    }
    auto cross = level_crossings(g, v, t, 0.0);
    std::vector<Point> pts;
    pts.reserve(cross.size());
    for (const Crossing& c : cross) pts.push_back(c.x);
    return hull_perimeter(pts);
}

double tail_bound(const ExtendedGridFunction& phi)
{
    const Grid& g = phi.grid();
    double m = inf;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (g.on_boundary(i)) m = std::min(m, phi[i]);
    double surface = 2.0;
    if (g.dim() == 2)
        surface = 2.0 * ((g.axis(0).hi - g.axis(0).lo) + (g.axis(1).hi - g.axis(1).lo));
    return std::exp(-m) * surface;
}

}  // namespace logcc
