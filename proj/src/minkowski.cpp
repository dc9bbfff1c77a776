#include "logcc/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "logcc/calculus.hpp"
#include "logcc/envelope.hpp"
#include "logcc/legendre.hpp"

namespace logcc {

namespace {

bool lex_less(const Point& a, const Point& b) { return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1]; }

struct Problem {
    int dim = 1;
    double p = 1.0;
    double a = 1.0;
    Grid X;
    std::vector<Point> y;
    std::vector<double> w;
    std::vector<std::size_t> mirror;
    std::vector<double> ys;  // first coordinates, 1D
    double mass = 0.0;
};

struct State {
    std::vector<double> psi;
    double G = 0.0;
    std::vector<double> m;
    std::shared_ptr<const AffineEnvelope> env;
    std::vector<double> phi;  // 2D: potential at the nodes of X
};

Problem make_problem(const DiscreteMeasure& mu, const SolverConfig& cfg)
{
    Problem P;
    P.dim = mu.dim();
    P.p = cfg.p;
    P.X = cfg.grid;
    std::vector<Atom> atoms = mu.atoms();
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return lex_less(a.x, b.x); });
    for (const Atom& at : atoms) {
        if (!P.y.empty() && P.y.back() == at.x) P.w.back() += at.w;
        else {
            P.y.push_back(at.x);
            P.w.push_back(at.w);
        }
    }
    const std::size_t n = P.y.size();
    // k-th smallest location pairs with the k-th smallest negated location
    std::vector<std::size_t> by_neg(n);
    for (std::size_t k = 0; k < n; ++k) by_neg[k] = k;
    std::sort(by_neg.begin(), by_neg.end(), [&](std::size_t i, std::size_t j) {
        return lex_less(Point{-P.y[i][0], -P.y[i][1]}, Point{-P.y[j][0], -P.y[j][1]});
    });
    P.mirror.resize(n);
    for (std::size_t k = 0; k < n; ++k) P.mirror[k] = by_neg[k];
    for (double v : P.w) P.mass += v;
    for (const Point& q : P.y) P.ys.push_back(q[0]);
    return P;
}

double objective_values(const Problem& P, const std::vector<double>& psi)
{
    double s = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) s += P.w[k] * (P.p == 1.0 ? psi[k] : std::pow(psi[k], P.p));
    return s;
}

void symmetrize(const Problem& P, std::vector<double>& v)
{
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::size_t j = P.mirror[k];
        out[k] = k <= j ? (v[k] + v[j]) / 2 : (v[j] + v[k]) / 2;
    }
    v = std::move(out);
}

void potential_2d(const Problem& P, const std::vector<double>& psi, std::vector<double>& phi,
                  std::vector<std::size_t>* arg)
{
    const Grid& X = P.X;
    phi.assign(X.size(), -inf);
    if (arg) arg->assign(X.size(), 0);
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(X.size());
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < N; ++i) {
        const Point x = X.node(i);
        double best = -inf;
        std::size_t bj = 0;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            const double v = x[1] * P.y[j][1] + (x[0] * P.y[j][0] - psi[j]);
            if (v > best) {
                best = v;
                bj = j;
            }
        }
        phi[i] = best;
        if (arg) (*arg)[i] = bj;
    }
}

State evaluate(const Problem& P, std::vector<double> psi)
{
    State s;
    s.psi = std::move(psi);
    if (P.dim == 1) {
        auto env = std::make_shared<AffineEnvelope>(P.ys, s.psi, P.X.axis(0).lo, P.X.axis(0).hi);
        s.G = env->integral();
        s.m = env->cell_masses();
        s.env = std::move(env);
        return s;
    }
    std::vector<std::size_t> arg;
    potential_2d(P, s.psi, s.phi, &arg);
    s.m.assign(s.psi.size(), 0.0);
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
        const double mass = P.X.weight(i) * std::exp(-s.phi[i]);
        s.m[arg[i]] += mass;
        s.G += mass;
    }
    return s;
}

std::vector<double> convexify(const Problem& P, const std::vector<double>& psi)
{
    if (P.dim == 1) return windowed_envelope(P.ys, psi, P.X.axis(0).lo, P.X.axis(0).hi);
    std::vector<double> phi;
    potential_2d(P, psi, phi, nullptr);
    std::vector<double> out(psi.size());
    const std::ptrdiff_t M = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for
    for (std::ptrdiff_t j = 0; j < M; ++j) {
        double best = -inf;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const Point x = P.X.node(i);
            best = std::max(best, x[1] * P.y[j][1] + (x[0] * P.y[j][0] - phi[i]));
        }
        out[j] = std::min(psi[j], best);
    }
    return out;
}

// psi + (log a - log G): the shift rule makes the integral equal a.
State normalize(const Problem& P, std::vector<double> psi)
{
    State s = evaluate(P, psi);
    if (!(s.G > 0.0)) throw PreconditionError("constraint integral vanished");
    const double shift = std::log(P.a) - std::log(s.G);
    for (double& v : psi) v += shift;
    return evaluate(P, std::move(psi));
}

std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                           std::vector<double> rhs)
{
    const std::size_t n = diag.size();
    for (std::size_t k = 1; k < n; ++k) {
        const double f = lower[k] / diag[k - 1];
        diag[k] -= f * upper[k - 1];
        rhs[k] -= f * rhs[k - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
    return x;
}

// Solves P d = -g with P = (lambda/G)(L + diag m) + ridge, L the graph Laplacian of the
// cell boundaries weighted by f(boundary)/dy.
std::vector<double> precondition(const Problem& P, const State& s, double lambda, const std::vector<double>& g)
{
    const std::size_t n = g.size();
    const double k = lambda / s.G;
    std::vector<double> diag(n), lower(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = k * s.m[i];
    if (P.dim == 1) {
        const double lo = P.X.axis(0).lo, hi = P.X.axis(0).hi;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dy = P.ys[i + 1] - P.ys[i];
            const double b = std::clamp((s.psi[i + 1] - s.psi[i]) / dy, lo, hi);
            const double wgt = k * std::exp(-(*s.env)(b)) / dy;
            diag[i] += wgt;
            diag[i + 1] += wgt;
            upper[i] = -wgt;
            lower[i + 1] = -wgt;
        }
    }
    double dmax = 0.0;
    for (double d : diag) dmax = std::max(dmax, d);
    const double ridge = 1e-12 * dmax + 1e-300;
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] += ridge;
        rhs[i] = -g[i];
    }
    return thomas(std::move(lower), std::move(diag), std::move(upper), std::move(rhs));
}

struct KKT {
    double c = 0.0;
    double residual = 0.0;
};

KKT kkt(const Problem& P, const State& s)
{
    KKT r;
    double sp = 0.0;
    std::vector<double> q(s.psi.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        q[k] = P.p == 1.0 ? s.m[k] : std::pow(std::max(s.psi[k], 0.0), 1.0 - P.p) * s.m[k];
        sp += q[k];
    }
    r.c = P.mass / sp;
    for (std::size_t k = 0; k < q.size(); ++k) r.residual += std::abs(P.w[k] - r.c * q[k]);
    r.residual /= P.mass;
    return r;
}

double psi_at_origin(const Problem& P, const std::vector<double>& psi)
{
    if (P.dim == 1) {
        const auto& y = P.ys;
        auto it = std::lower_bound(y.begin(), y.end(), 0.0);
        if (it == y.end()) return psi.back();
        const std::size_t j = static_cast<std::size_t>(it - y.begin());
        if (y[j] == 0.0 || j == 0) return psi[j];
        const double t = -y[j - 1] / (y[j] - y[j - 1]);
        return (1 - t) * psi[j - 1] + t * psi[j];
    }
    return *std::min_element(psi.begin(), psi.end());
}

struct Run {
    State state;
    SolverResult trace;
};

Run run_once(const Problem& P, const SolverConfig& cfg)
{
    Run out;
    SolverResult& R = out.trace;
    std::vector<double> init(P.y.size());
    for (std::size_t k = 0; k < init.size(); ++k) init[k] = 0.5 * (P.y[k][0] * P.y[k][0] + P.y[k][1] * P.y[k][1]);
    init = convexify(P, init);
    symmetrize(P, init);
    State s = normalize(P, std::move(init));
    if (P.p < 1.0 && *std::min_element(s.psi.begin(), s.psi.end()) <= 0.0) {
        out.state = std::move(s);
        R.status = SolverStatus::stalled;
        return out;
    }
    double J = objective_values(P, s.psi);
    double alpha0 = cfg.step;
    R.status = SolverStatus::max_iterations;

    for (int it = 0;; ++it) {
        const KKT K = kkt(P, s);
        R.objective_trace.push_back(J);
        R.feasibility_trace.push_back(std::abs(s.G - P.a) / P.a);
        R.kkt_trace.push_back(K.residual);
        R.iterations = it;
        if (K.residual < cfg.grad_tol) {
            R.status = SolverStatus::converged;
            break;
        }
        if (it >= cfg.max_iters) break;

        double lambda = 0.0;
        const std::size_t n = s.psi.size();
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double dj = P.p == 1.0 ? P.w[k] : P.p * P.w[k] * std::pow(s.psi[k], P.p - 1.0);
            g[k] = dj;
            lambda += dj;
        }
        for (std::size_t k = 0; k < n; ++k) g[k] -= lambda * s.m[k] / s.G;
        std::vector<double> d = precondition(P, s, lambda, g);
        symmetrize(P, d);
        double slope = 0.0;
        for (std::size_t k = 0; k < n; ++k) slope += g[k] * d[k];
        if (!(slope < 0.0)) {
            R.status = SolverStatus::stalled;
            break;
        }

        bool accepted = false;
        for (double alpha = alpha0; alpha > 1e-14; alpha *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t k = 0; k < n; ++k) trial[k] = s.psi[k] + alpha * d[k];
            symmetrize(P, trial);
            std::vector<double> hull = convexify(P, trial);
            symmetrize(P, hull);
            if (P.p == 1.0 || *std::min_element(hull.begin(), hull.end()) >= 0.0) {
                const State before = evaluate(P, trial), after = evaluate(P, hull);
                if (objective_values(P, hull) > objective_values(P, trial) + 1e-12 * (1.0 + std::abs(J)) ||
                    std::abs(after.G - before.G) > 1e-10 * before.G)
                    R.projections_ok = false;
            }
            State next = normalize(P, std::move(hull));
            if (P.p < 1.0 && *std::min_element(next.psi.begin(), next.psi.end()) <= 0.0) continue;
            const double Jn = objective_values(P, next.psi);
            if (Jn <= J + 1e-4 * alpha * slope) {
                s = std::move(next);
                J = Jn;
                alpha0 = std::min(cfg.step, 2.0 * alpha);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            R.status = SolverStatus::stalled;
            break;
        }
    }
    out.state = std::move(s);
    return out;
}

}  // namespace

std::string to_string(SolverStatus s)
{
    switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::stalled: return "stalled";
    case SolverStatus::max_iterations: return "max_iterations";
    }
    return "unknown";
}

double second_moment_ratio(const DiscreteMeasure& mu)
{
    double a = 0.0, b = 0.0, c = 0.0;
    for (const Atom& at : mu.atoms()) {
        a += at.w * at.x[0] * at.x[0];
        b += at.w * at.x[0] * at.x[1];
        c += at.w * at.x[1] * at.x[1];
    }
    const double tr = a + c;
    if (!(tr > 0.0)) return 0.0;
    if (mu.dim() == 1) return 1.0;
    const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) / 4 + b * b));
    return ((a + c) / 2 - disc) / tr;
}

double objective(const ExtendedGridFunction& psi, const DiscreteMeasure& mu, double p)
{
    if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
    const double tol = 1e-9 * std::max(1.0, psi.scale());
    double s = 0.0;
    for (const Atom& at : mu.atoms()) {
        const double v = psi.evaluate(at.x);
        if (v == inf) return inf;
        if (v < -tol) throw PreconditionError("objective needs psi >= 0 at the atoms");
        s += at.w * std::pow(std::max(v, 0.0), p);
    }
    return s;
}

double measure_mismatch(const LogConcaveFunction& f, const DiscreteMeasure& mu, double p, double c, double h,
                        bool sampled)
{
    DiscreteMeasure s = !sampled && f.envelope() && f.grid().dim() == 1 ? exact_lp_surface_area_measure(f, p)
                                                                         : surface_area_measure(f);
    if (p < 1.0 && (sampled || !f.envelope() || f.grid().dim() != 1))
        s = lp_surface_area_measure(s, support_function(f), p);
    double r = h;
    for (const DiscreteMeasure* m : {static_cast<const DiscreteMeasure*>(&s), &mu})
        for (const Atom& at : m->atoms()) r = std::max({r, std::abs(at.x[0]), std::abs(at.x[1])});
    const Grid bins = aligned_bins(r + h, h, mu.dim());
    return measure_distance(s.scaled(c), mu, bins).l1 / mu.total_mass();
}

SolverResult solve_lp_minkowski(const DiscreteMeasure& input, const SolverConfig& cfg)
{
    if (input.size() == 0) throw PreconditionError("empty measure");
    // atoms below 1e-12 of the mass are dropped
    std::vector<Atom> kept;
    for (const Atom& a : input.atoms())
        if (a.w > 1e-12 * input.total_mass()) kept.push_back(a);
    const DiscreteMeasure mu(input.dim(), std::move(kept), false);
    if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
    if (!cfg.grid.even()) throw PreconditionError("solver grid must be symmetric");
    if (cfg.grid.dim() != mu.dim()) throw PreconditionError("measure and grid differ in dimension");
    if (mu.size() == 0) throw PreconditionError("empty measure");
    if (!is_even_paired(mu.atoms(), default_pairing_tolerance(mu.atoms())))
        throw PreconditionError("measure is not even");
    if (second_moment_ratio(mu) < 1e-10) throw PreconditionError("measure is supported on a hyperplane");
    if (cfg.a && !(*cfg.a > 0.0)) throw PreconditionError("constraint level must be positive");

    Problem P = make_problem(mu, cfg);
    P.a = cfg.a ? *cfg.a : (cfg.p == 1.0 ? P.mass : std::max(std::numbers::e, P.mass));

    Run run;
    int escalations = 0;
    for (;;) {
        run = run_once(P, cfg);
        if (cfg.p == 1.0 || cfg.a) break;
        const double scale = std::max(1.0, *std::max_element(run.state.psi.begin(), run.state.psi.end()));
        const double at0 = psi_at_origin(P, run.state.psi);
        const bool low = at0 <= 1e-8 * scale || (run.trace.status != SolverStatus::converged && at0 < 1e-3 * scale);
        if (!low || escalations >= cfg.max_escalations) break;
        P.a *= 2.0;
        ++escalations;
    }

    SolverResult R = std::move(run.trace);
    const State& s = run.state;
    R.a = P.a;
    R.escalations = escalations;
    R.psi_atoms = s.psi;
    for (std::size_t k = 0; k < P.y.size(); ++k) R.atoms.push_back(Atom{P.y[k], P.w[k]});
    const KKT K = kkt(P, s);
    R.c = K.c;
    R.kkt_residual = K.residual;

    const Grid& X = P.X;
    const Grid Y = X.mirrored();
    if (P.dim == 1) {
        std::vector<double> phi(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) phi[i] = (*s.env)(X.coord(0, static_cast<int>(i)));
        R.f = LogConcaveFunction(ExtendedGridFunction(X, std::move(phi)), s.env);
        // psi(y) = sup over the box of x y - phi(x), attained at a breakpoint or an end
        std::vector<double> xs = s.env->breaks();
        std::vector<double> px(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) px[k] = (*s.env)(xs[k]);
        std::vector<double> py(Y.size());
        for (std::size_t j = 0; j < Y.size(); ++j) {
            const double y = Y.coord(0, static_cast<int>(j));
            double best = -inf;
            for (std::size_t k = 0; k < xs.size(); ++k) best = std::max(best, xs[k] * y - px[k]);
            py[j] = best;
        }
        R.psi = ExtendedGridFunction(Y, std::move(py));
    } else {
        R.f = LogConcaveFunction(ExtendedGridFunction(X, s.phi));
        R.psi = lft(R.f.potential(), Y).conjugate;
    }
    R.measure_mismatch = measure_mismatch(R.f, mu, cfg.p, R.c, X.spacing(0));
    R.sampled_mismatch = measure_mismatch(R.f, mu, cfg.p, R.c, X.spacing(0), true);
    return R;
}

ConstraintGradientReport constraint_gradient_check(const ExtendedGridFunction& psi, const ExtendedGridFunction& v)
{
    if (!(psi.grid() == v.grid())) throw PreconditionError("psi and v live on different grids");
    double vmax = 0.0;
    for (double x : v.data()) {
        if (!std::isfinite(x)) throw PreconditionError("test function must be bounded");
        vmax = std::max(vmax, std::abs(x));
    }
    auto G = [&](double t) {
        std::vector<double> q(psi.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = psi[i] == inf ? inf : psi[i] + t * v[i];
        return alexandrov(ExtendedGridFunction(psi.grid(), std::move(q))).exact_integral();
    };
    const double t1 = 1e-3 / std::max(1.0, vmax), t2 = t1 / 2;
    const double d1 = (G(t1) - G(-t1)) / (2 * t1), d2 = (G(t2) - G(-t2)) / (2 * t2);
    ConstraintGradientReport r;
    r.finite_difference = (4 * d2 - d1) / 3;
    r.predicted = integrate_against(v, surface_area_measure(alexandrov(psi)));
    r.relative_error = std::abs(r.finite_difference - r.predicted) / std::max(std::abs(r.predicted), 1e-8);
    return r;
}

MAResidual ma_residual(const LogConcaveFunction& f, double c, const std::function<double(const Point&)>& density,
                       double p, GradientScheme scheme)
{
    const Grid& g = f.grid();
    const auto& phi = f.potential();
    std::vector<double> field(g.size(), inf);
    MAResidual r;
    double num = 0.0, den = 0.0;
    auto at = [&](int i0, int i1) { return phi[g.index(i0, i1)]; };
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const auto mi = g.multi_index(idx);
        bool ok = true;
        for (int k = 0; k < g.dim(); ++k)
            if (mi[k] < 1 || mi[k] + 2 >= g.points(k)) ok = false;
        if (!ok) continue;
        Point grad{0.0, 0.0};
        double hess[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        const int i0 = mi[0], i1 = mi[1];
        const double v = phi[idx];
        bool finite = v < inf;
        for (int k = 0; k < g.dim() && finite; ++k) {
            const double h = g.spacing(k);
            const int d0 = k == 0, d1 = k == 1;
            const double l = at(i0 - d0, i1 - d1), rr = at(i0 + d0, i1 + d1);
            finite = l < inf && rr < inf;
            grad[k] = scheme == GradientScheme::forward ? (rr - v) / h : (rr - l) / (2 * h);
            hess[k][k] = (rr - 2 * v + l) / (h * h);
        }
        if (finite && g.dim() == 2) {
            const double a = at(i0 + 1, i1 + 1), b = at(i0 + 1, i1 - 1), cc = at(i0 - 1, i1 + 1), d = at(i0 - 1, i1 - 1);
            finite = a < inf && b < inf && cc < inf && d < inf;
            hess[0][1] = hess[1][0] = (a - b - cc + d) / (4 * g.spacing(0) * g.spacing(1));
        }
        if (!finite) continue;
        const Point x = g.node(idx);
        const double det = g.dim() == 1 ? hess[0][0] : hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        const double hval = x[0] * grad[0] + x[1] * grad[1] - v;
        const double rhs = (p == 1.0 ? 1.0 : std::pow(std::max(hval, 0.0), 1.0 - p)) * std::exp(-v);
        const double res = c * density(grad) * det - rhs;
        if (!std::isfinite(res)) {
            ++r.excluded;
            continue;
        }
        field[idx] = res;
        ++r.interior;
        const double w = g.weight(idx);
        num += std::abs(res) * w;
        den += std::abs(rhs) * w;
    }
    r.l1 = num;
    r.relative_l1 = den > 0.0 ? num / den : inf;
    r.flagged = !(r.relative_l1 < 0.1);
    r.field = ExtendedGridFunction(g, std::move(field));
    return r;
}

MAResidual ma_residual(const SolverResult& result, const std::function<double(const Point&)>& density, double p,
                       GradientScheme scheme)
{
    return ma_residual(result.f, 1.0 / result.c, density, p, scheme);
}

}  // namespace logcc
