#include <doctest.h>

#include <cmath>
#include <numbers>

#include "logcc/calculus.hpp"
#include "logcc/minkowski.hpp"

using namespace logcc;

namespace {

const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);

DiscreteMeasure two_deltas(double w = 1.0)
{
    return DiscreteMeasure(1, {Atom{Point{-1.0, 0.0}, w}, Atom{Point{1.0, 0.0}, w}}, true);
}

// histogram of mu collapsed back onto the bin centres
DiscreteMeasure binned(const DiscreteMeasure& mu, const Grid& bins)
{
    auto h = histogram(mu, bins);
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < bins.size(); ++k)
        if (h.mass[k] > 0.0) atoms.push_back(Atom{bins.node(k), h.mass[k]});
    return DiscreteMeasure(mu.dim(), std::move(atoms));
}

LogConcaveFunction gaussian(const Grid& g, double shift = 0.0)
{
    return LogConcaveFunction::from_potential(g, [shift](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]) - shift; });
}

void check_trace(const SolverResult& r, double feas_tol)
{
    REQUIRE(!r.objective_trace.empty());
    for (double v : r.feasibility_trace) CHECK(v < feas_tol);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
        CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-9 * std::abs(r.objective_trace[k - 1]));
    CHECK(r.projections_ok);
}

}  // namespace

TEST_SUITE("minkowski")
{
    TEST_CASE("two deltas recover the Laplace density")
    {
        auto r = solve_lp_minkowski(two_deltas(), SolverConfig{});
        CHECK(r.status == SolverStatus::converged);
        CHECK(r.c == doctest::Approx(1.0).epsilon(0.05));
        const Grid& g = r.f.grid();
        double err = 0.0;
        for (int i = 0; i < g.points(0); ++i) {
            const double x = g.coord(0, i);
            if (std::abs(x) <= 4.0) err = std::max(err, std::abs(r.f.potential()[i] - std::abs(x)));
        }
        CHECK(err < 0.05);
        CHECK(r.measure_mismatch < 1e-6);
        check_trace(r, 1e-6);
        // psi even, nonnegative, positive at the origin
        const auto& psi = r.psi;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            CHECK(psi[i] >= -1e-9);
            CHECK(psi[i] == doctest::Approx(psi[psi.size() - 1 - i]).epsilon(1e-9));
        }
        CHECK(psi.evaluate(Point{0.0, 0.0}) > 0.0);
    }

    TEST_CASE("binned Gaussian measure round trip")
    {
        const Grid g(-8, 8, 1001);
        auto mu = binned(surface_area_measure(gaussian(g)), aligned_bins(9.0, g.spacing(0), 1));
        auto r = solve_lp_minkowski(mu, SolverConfig{});
        CHECK(r.status == SolverStatus::converged);
        CHECK(r.measure_mismatch < 0.05);
        CHECK(r.sampled_mismatch < 0.05);
        CHECK(r.c == doctest::Approx(1.0).epsilon(0.01));
        for (int i = 0; i < g.points(0); ++i) {
            const double x = g.coord(0, i);
            if (std::abs(x) <= 3.0) CHECK(r.f.value(i) == doctest::Approx(std::exp(-0.5 * x * x)).epsilon(0.02));
        }
        check_trace(r, 1e-6);
    }

    TEST_CASE("p = 0.5 round trip on the measure")
    {
        const Grid g(-8, 8, 1001);
        auto f0 = gaussian(g, 1.0);
        auto mu = lp_surface_area_measure(f0, 0.5);
        SolverConfig cfg;
        cfg.p = 0.5;
        auto r = solve_lp_minkowski(mu, cfg);
        CHECK(r.status == SolverStatus::converged);
        CHECK(r.c > 0.0);
        CHECK(r.a >= std::numbers::e);
        CHECK(r.measure_mismatch < 0.05);
        CHECK(r.kkt_residual < cfg.grad_tol);
        CHECK(r.f.exact_integral() == doctest::Approx(r.a).epsilon(1e-9));
        CHECK(r.psi.evaluate(Point{0.0, 0.0}) > 0.0);
        check_trace(r, 1e-6);
    }

    TEST_CASE("explicit constraint level")
    {
        SolverConfig cfg;
        cfg.a = 5.0;
        auto r = solve_lp_minkowski(two_deltas(), cfg);
        CHECK(r.a == 5.0);
        CHECK(r.f.exact_integral() == doctest::Approx(5.0).epsilon(1e-9));
        // e^{-|x|} scaled to mass 5
        const double shift = r.f.potential()[r.f.grid().points(0) / 2];
        CHECK(shift == doctest::Approx(-std::log(2.5)).epsilon(1e-3));
    }

    TEST_CASE("small 2D solve")
    {
        std::vector<Atom> atoms;
        const double s = std::sqrt(0.5);
        for (Point y : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}, Point{s, s}, Point{-s, -s}, Point{s, -s},
                        Point{-s, s}})
            atoms.push_back(Atom{y, 1.0});
        SolverConfig cfg;
        cfg.grid = Grid(std::vector<Axis>{Axis{-6, 6, 61}, Axis{-6, 6, 61}});
        cfg.max_iters = 400;
        auto r = solve_lp_minkowski(DiscreteMeasure(2, atoms, true), cfg);
        CHECK(r.status != SolverStatus::max_iterations);
        CHECK(r.c > 0.0);
        for (double v : r.feasibility_trace) CHECK(v < 1e-6);
        for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
            CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-9 * std::abs(r.objective_trace[k - 1]));
        // symmetric under the dihedral group: psi on the atoms is constant
        for (double v : r.psi_atoms) CHECK(v == doctest::Approx(r.psi_atoms.front()).epsilon(1e-3));
    }

    TEST_CASE("objective")
    {
        const Grid y(-4, 4, 801);
        auto mu = two_deltas();
        CHECK(objective(ExtendedGridFunction(y, std::vector<double>(y.size(), 1.0)), mu, 1.0) == doctest::Approx(2.0));
        auto sq = ExtendedGridFunction::sample(y, [](const Point& p) { return p[0] * p[0]; });
        CHECK(objective(sq, mu, 0.5) == doctest::Approx(2.0));

        // the witness log a + |y|/2 is feasible and bounds the optimum from above
        const double a = 3.0;
        auto prob = two_deltas(0.5);
        auto witness = ExtendedGridFunction::sample(y, [a](const Point& p) { return std::log(a) + 0.5 * std::abs(p[0]); });
        CHECK(objective(witness, prob, 1.0) == doctest::Approx(std::log(a) + 0.5));
        CHECK(alexandrov(witness).exact_integral() >= a * (1 - 1e-12));
        SolverConfig cfg;
        cfg.a = a;
        auto r = solve_lp_minkowski(prob, cfg);
        CHECK(r.objective_trace.back() <= objective(witness, prob, 1.0) + 1e-12);

        std::vector<double> v(y.size(), 1.0);
        v[y.points(0) - 1] = inf;
        CHECK(objective(ExtendedGridFunction(y, v), DiscreteMeasure(1, {Atom{Point{4.0, 0.0}, 1.0}}), 1.0) == inf);
    }

    TEST_CASE("precondition errors")
    {
        CHECK_THROWS_AS(solve_lp_minkowski(DiscreteMeasure(1, {Atom{Point{1.0, 0.0}, 1.0}}), SolverConfig{}),
                        PreconditionError);
        CHECK_THROWS_AS(
            solve_lp_minkowski(DiscreteMeasure(1, {Atom{Point{-1.0, 0.0}, 1.0}, Atom{Point{1.0, 0.0}, 2.0}}), SolverConfig{}),
            PreconditionError);
        SolverConfig flat;
        flat.grid = Grid(std::vector<Axis>{Axis{-4, 4, 41}, Axis{-4, 4, 41}});
        auto line = DiscreteMeasure(2, {Atom{Point{-1, 0}, 1}, Atom{Point{1, 0}, 1}}, true);
        CHECK(second_moment_ratio(line) < 1e-10);
        CHECK_THROWS_AS(solve_lp_minkowski(line, flat), PreconditionError);
        SolverConfig bad;
        bad.p = 1.5;
        CHECK_THROWS_AS(solve_lp_minkowski(two_deltas(), bad), PreconditionError);
        bad.p = 1.0;
        bad.grid = Grid(-4, 8, 101);
        CHECK_THROWS_AS(solve_lp_minkowski(two_deltas(), bad), PreconditionError);
    }

    TEST_CASE("constraint gradient")
    {
        const Grid y(-10, 10, 1001);
        auto psi = ExtendedGridFunction::sample(y, [](const Point& p) { return 0.5 * p[0] * p[0]; });
        auto one = ExtendedGridFunction(y, std::vector<double>(y.size(), 1.0));
        auto r1 = constraint_gradient_check(psi, one);
        CHECK(r1.finite_difference == doctest::Approx(sqrt2pi).epsilon(0.01));
        CHECK(r1.relative_error < 0.01);

        auto odd = ExtendedGridFunction::sample(y, [](const Point& p) { return std::tanh(p[0]); });
        auto r2 = constraint_gradient_check(psi, odd);
        CHECK(std::abs(r2.finite_difference) < 1e-8);
        CHECK(std::abs(r2.predicted) < 1e-8);

        auto bump = ExtendedGridFunction::sample(y, [](const Point& p) {
            const double d = std::abs(p[0]) - 2.0;
            return std::abs(d) < 0.5 ? std::pow(std::cos(std::numbers::pi * d), 2) : 0.0;
        });
        auto r3 = constraint_gradient_check(psi, bump);
        CHECK(r3.relative_error < 0.02);
    }

    TEST_CASE("Monge-Ampere residual")
    {
        auto gauss_density = [](const Point& y) { return std::exp(-0.5 * y[0] * y[0]); };
        double prev = inf;
        for (int n : {1001, 2001, 4001}) {
            auto m = ma_residual(gaussian(Grid(-6, 6, n)), 1.0, gauss_density, 1.0);
            CHECK(m.relative_l1 < 1e-2);
            CHECK(!m.flagged);
            CHECK(m.relative_l1 < 0.6 * prev);
            prev = m.relative_l1;
        }

        const Grid g(-4, 4, 401);
        auto box = LogConcaveFunction::from_potential(g, [](const Point& x) { return std::abs(x[0]) <= 1.0 ? 0.0 : inf; });
        CHECK(ma_residual(box, 1.0, gauss_density, 1.0).flagged);

        // p = 0.5 round trip, density of mu against dy
        auto mu_density = [](const Point& y) {
            return std::numbers::e * std::exp(-0.5 * y[0] * y[0]) * std::sqrt(0.5 * y[0] * y[0] + 1.0);
        };
        prev = inf;
        for (int n : {501, 1001, 2001}) {
            const Grid gn(-8, 8, n);
            SolverConfig cfg;
            cfg.p = 0.5;
            cfg.grid = gn;
            auto r = solve_lp_minkowski(lp_surface_area_measure(gaussian(gn, 1.0), 0.5), cfg);
            const double res = ma_residual(r, mu_density, 0.5).relative_l1;
            CHECK(res < prev);
            prev = res;
        }
    }
}
