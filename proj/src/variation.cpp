#include "logcc/variation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "logcc/calculus.hpp"
#include "logcc/contour.hpp"
#include "logcc/legendre.hpp"

namespace logcc {

namespace {

void check_schedule(std::vector<double>& t)
{
    if (t.empty()) t = default_schedule();
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(t[k] > 0.0) || !std::isfinite(t[k])) throw PreconditionError("schedule entries must be positive");
        if (k > 0 && !(t[k] < t[k - 1])) throw PreconditionError("schedule must be strictly decreasing");
    }
}

// Growth like 1/t shows up as a log2 slope near 1 per halving; finite limits give ~0.
bool looks_divergent(const std::vector<double>& t, const std::vector<double>& q)
{
    const std::size_t n = q.size();
    if (n < 3) return false;
    for (std::size_t k = n - 2; k < n; ++k) {
        if (!(q[k] > 0.0 && q[k - 1] > 0.0)) return false;
        const double rate = std::log2(q[k] / q[k - 1]) / std::log2(t[k - 1] / t[k]);
        if (!(rate > 0.5)) return false;
    }
    return true;
}

VariationReport variation_core(const LogConcaveFunction& f, const LogConcaveFunction& g, double p,
                               std::vector<double> schedule)
{
    check_schedule(schedule);
    if (f.grid().dim() != g.grid().dim()) throw PreconditionError("functions differ in dimension");
    const Grid dual = adapted_dual(f.potential(), g.potential());
    const auto hf = support_function(f, dual), hg = support_function(g, dual);
    const Grid& primal = f.grid();

    VariationReport r;
    r.t_schedule = schedule;
    r.base_integral = alexandrov(lp_mean(hf, hg, 0.0, p), primal).exact_integral();
    if (!(r.base_integral > 0.0)) throw PreconditionError("first variation needs a positive integral");

    const std::size_t n = schedule.size();
    std::vector<double> I(n);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
        try {
            I[k] = alexandrov(lp_mean(hf, hg, schedule[k], p), primal).exact_integral();
        } catch (...) {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    for (std::size_t k = 0; k < n; ++k) {
        r.difference_quotients.push_back((I[k] - r.base_integral) / schedule[k]);
        r.log_quotients.push_back((std::log(I[k]) - std::log(r.base_integral)) / schedule[k]);
    }
    double scale = 0.0;
    for (double v : r.log_quotients) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 1; k < n; ++k)
        if (r.log_quotients[k] < r.log_quotients[k - 1] - 1e-8 * (1.0 + scale)) r.log_quotients_monotone = false;

    r.diverged = looks_divergent(schedule, r.difference_quotients);
    r.extrapolated_delta = r.diverged ? inf : richardson(schedule, r.difference_quotients);
    return r;
}

double relative_gap(double estimate, double predicted)
{
    if (estimate == inf && predicted == inf) return 0.0;
    if (estimate == inf || predicted == inf) return inf;
    return std::abs(estimate - predicted) / std::max(std::abs(predicted), gap_floor);
}

double conjugate_at(const ExtendedGridFunction& psi, const ExtendedGridFunction* alpha, double t, const Point& x,
                    std::size_t* arg, double* second)
{
    const Grid& g = psi.grid();
    double best = -inf, next = -inf;
    std::size_t bi = 0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        double v = psi[j];
        if (alpha && t > 0.0) v = (*alpha)[j] == inf ? inf : v + t * (*alpha)[j];
        if (!(v < inf)) continue;
        const Point y = g.node(j);
        const double val = (g.dim() == 2 ? x[1] * y[1] + (x[0] * y[0] - v) : x[0] * y[0] - v);
        if (val > best) {
            next = best;
            best = val;
            bi = j;
        } else if (val > next) {
            next = val;
        }
    }
    if (arg) *arg = bi;
    if (second) *second = next;
    return best;
}

}  // namespace

std::vector<double> default_schedule()
{
    std::vector<double> t;
    for (int k = 3; k <= 10; ++k) t.push_back(std::ldexp(1.0, -k));
    return t;
}

double richardson(const std::vector<double>& t, const std::vector<double>& q)
{
    if (t.empty() || t.size() != q.size()) throw PreconditionError("richardson needs matching nonempty data");
    const std::size_t n = t.size();
    if (n == 1) return q[0];
    const double t1 = t[n - 2], t2 = t[n - 1];
    return (t1 * q[n - 1] - t2 * q[n - 2]) / (t1 - t2);
}

VariationReport first_variation_report(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                       std::vector<double> schedule)
{
    VariationReport r = variation_core(f, g, 1.0, std::move(schedule));
    r.predicted = first_variation_predicted(f, g);
    r.relative_gap = relative_gap(r.extrapolated_delta, r.predicted);
    return r;
}

VariationReport lp_first_variation_report(const LogConcaveFunction& f, const LogConcaveFunction& g, double p,
                                          std::vector<double> schedule)
{
    VariationReport r = variation_core(f, g, p, std::move(schedule));
    r.predicted = lp_first_variation_predicted(f, g, p);
    r.relative_gap = relative_gap(r.extrapolated_delta, r.predicted);
    return r;
}

double first_variation_estimate(const LogConcaveFunction& f, const LogConcaveFunction& g, std::vector<double> schedule)
{
    return variation_core(f, g, 1.0, std::move(schedule)).extrapolated_delta;
}

double first_variation_predicted(const LogConcaveFunction& f, const LogConcaveFunction& g)
{
    const Grid dual = adapted_dual(f.potential(), g.potential());
    return integrate_against(support_function(g, dual), surface_area_measure(f));
}

double lp_first_variation_predicted(const LogConcaveFunction& f, const LogConcaveFunction& g, double p)
{
    if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
    if (p == 1.0) return first_variation_predicted(f, g);
    const Grid dual = adapted_dual(f.potential(), g.potential());
    const auto hf = support_function(f, dual), hg = support_function(g, dual);
    const double tf = 1e-9 * std::max(1.0, hf.scale()), tg = 1e-9 * std::max(1.0, hg.scale());
    auto rho = [&](const Point& y) {
        const double a = hf.evaluate(y), b = hg.evaluate(y);
        if (a < -tf || b < -tg) throw PreconditionError("support function negative at an atom");
        if (a == inf || b == inf) return inf;
        return std::pow(std::max(b, 0.0), p) * std::pow(std::max(a, 0.0), 1.0 - p) / p;
    };
    return integrate_against(rho, surface_area_measure(f));
}

CoareaReport coarea_check(const LogConcaveFunction& f, int levels, double tol)
{
    if (levels < 1) throw PreconditionError("coarea_check needs at least one level");
    const Grid& g = f.grid();
    const std::vector<std::size_t> supp = f.support();
    if (supp.empty()) throw PreconditionError("coarea_check needs a nonempty support");

    CoareaReport r;
    r.levels = levels;
    const double M = f.max_value();
    std::vector<double> per(levels);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < levels; ++k) per[k] = superlevel_perimeter(f, (k + 0.5) * M / levels);
    for (double v : per) r.lhs += v * M / levels;

    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.value(i);
    const auto& phi = f.potential();
    const auto boundary = f.support_boundary();
    if (g.dim() == 1) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (phi[i] < inf && phi[i + 1] < inf) r.rhs_grad += std::abs(v[i + 1] - v[i]);
        for (std::size_t i : boundary) r.rhs_boundary += v[i];
    } else {
        const double h0 = g.spacing(0), h1 = g.spacing(1);
        for (int a = 0; a + 1 < g.points(0); ++a)
            for (int b = 0; b + 1 < g.points(1); ++b) {
                const std::size_t i00 = g.index(a, b), i10 = g.index(a + 1, b), i01 = g.index(a, b + 1),
                                  i11 = g.index(a + 1, b + 1);
                if (!(phi[i00] < inf && phi[i10] < inf && phi[i01] < inf && phi[i11] < inf)) continue;
                const double d0 = (v[i10] + v[i11] - v[i00] - v[i01]) / (2 * h0);
                const double d1 = (v[i01] + v[i11] - v[i00] - v[i10]) / (2 * h1);
                r.rhs_grad += std::hypot(d0, d1) * h0 * h1;
            }
        std::vector<Point> pts;
        std::vector<double> vals;
        for (std::size_t i : boundary) {
            pts.push_back(g.node(i));
            vals.push_back(v[i]);
        }
        r.rhs_boundary = hull_line_integral(pts, vals);
    }
    r.relative_error = std::abs(r.lhs - r.rhs_grad - r.rhs_boundary) / std::max(r.lhs, 1e-12);
    r.consistent = r.relative_error <= tol;
    return r;
}

SubdifferentialReport subdifferential_check(const LogConcaveFunction& f, const LogConcaveFunction& g, double tol)
{
    if (!f.essentially_continuous()) throw PreconditionError("subdifferential_check needs f essentially continuous");
    const double If = f.integral(), Ig = g.integral();
    if (!(If > 0.0 && Ig > 0.0)) throw PreconditionError("subdifferential_check needs positive integrals");
    const Grid dual = adapted_dual(f.potential(), g.potential());
    const auto hf = support_function(f, dual), hg = support_function(g, dual);
    SubdifferentialReport r;
    r.lhs = std::log(If) - std::log(Ig);
    const double s = integrate_against(
        [&](const Point& y) {
            const double b = hg.evaluate(y);
            return b == inf ? -inf : hf.evaluate(y) - b;
        },
        surface_area_measure(f));
    r.rhs = s / If;
    r.holds = r.lhs >= r.rhs - tol * (1.0 + std::abs(r.lhs) + (std::isfinite(r.rhs) ? std::abs(r.rhs) : 0.0));
    return r;
}

double convex_functional(const ExtendedGridFunction& psi)
{
    const double I = alexandrov(psi).exact_integral();
    return I > 0.0 ? -std::log(I) : inf;
}

PointwiseDerivativeReport pointwise_derivative_check(const ExtendedGridFunction& psi, const ExtendedGridFunction& alpha,
                                                     const Point& x0, std::vector<double> schedule)
{
    check_schedule(schedule);
    if (!(psi.grid() == alpha.grid())) throw PreconditionError("psi and alpha live on different grids");
    if (!psi.has_finite()) throw PreconditionError("psi has no finite value");
    for (double a : alpha.data())
        if (a == -inf) throw PreconditionError("alpha must be bounded below");

    PointwiseDerivativeReport r;
    r.t_schedule = schedule;
    std::size_t arg = 0;
    double second = -inf;
    const double base = conjugate_at(psi, nullptr, 0.0, x0, &arg, &second);
    r.maximizer = psi.grid().node(arg);
    // a near tie means x0 sits on a kink of the conjugate
    const bool tie = second > base - 1e-12 * (1.0 + std::abs(base));
    if (psi.grid().on_boundary(arg) || tie || !(alpha[arg] < inf)) return r;

    for (double t : schedule) r.quotients.push_back((conjugate_at(psi, &alpha, t, x0, nullptr, nullptr) - base) / t);
    r.derivative = richardson(schedule, r.quotients);
    r.predicted = -alpha[arg];
    r.relative_error = std::abs(r.derivative - r.predicted) / std::max(std::abs(r.predicted), gap_floor);
    r.status = CheckStatus::ok;
    return r;
}

}  // namespace logcc
