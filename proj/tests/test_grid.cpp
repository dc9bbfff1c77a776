#include <doctest.h>

#include <cmath>
#include <numbers>

#include "logcc/contour.hpp"
#include "logcc/grid.hpp"

using namespace logcc;

namespace {

const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);

ExtendedGridFunction half_square(const Grid& g)
{
    return ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
}

ExtendedGridFunction interval_indicator(const Grid& g, double r)
{
    return ExtendedGridFunction::sample(g, [r](const Point& x) { return std::abs(x[0]) <= r + 1e-12 ? 0.0 : inf; });
}

}  // namespace

TEST_SUITE("grid")
{
    TEST_CASE("construction rejects bad grids")
    {
        CHECK_THROWS_AS(Grid(1.0, -1.0, 11), PreconditionError);
        CHECK_THROWS_AS(Grid(-1.0, 1.0, 2), PreconditionError);
        CHECK_THROWS_AS(ExtendedGridFunction(Grid(-1, 1, 3), {0.0, std::nan(""), 1.0}), PreconditionError);
        CHECK_THROWS_AS(ExtendedGridFunction(Grid(-1, 1, 3), {0.0, -inf, 1.0}), PreconditionError);
        CHECK_THROWS_AS(ExtendedGridFunction(Grid(-1, 1, 3), {0.0, 1.0}), PreconditionError);
    }

    TEST_CASE("symmetric coordinates")
    {
        Grid g(-8, 8, 1001);
        CHECK(g.even());
        for (int i = 0; i < 1001; ++i) CHECK(g.coord(0, i) == -g.coord(0, 1000 - i));
        CHECK(g.coord(0, 500) == 0.0);
        CHECK(g.coord(0, 0) == -8.0);
        CHECK(g.coord(0, 1000) == 8.0);
        Grid m = Grid(-1, 3, 5).mirrored();
        CHECK(m.axis(0).lo == -3.0);
        CHECK(m.axis(0).hi == 1.0);
    }

    TEST_CASE("evaluate")
    {
        Grid g(-8, 8, 1001);
        auto q = half_square(g);
        // x = 1 falls between nodes on this grid; the error is bounded by h^2/8 * phi''
        CHECK(std::abs(q.evaluate({1.0, 0}) - 0.5) <= g.spacing(0) * g.spacing(0) / 8 + 1e-15);
        CHECK(q.evaluate({2.0, 0}) == 2.0);

        auto half = ExtendedGridFunction::sample(g, [](const Point& x) { return x[0] > 0 ? inf : 0.0; });
        CHECK(half.evaluate({0.008, 0}) == inf);
        CHECK(half.evaluate({-0.008, 0}) == 0.0);

        auto absx = ExtendedGridFunction::sample(g, [](const Point& x) { return std::abs(x[0]); });
        CHECK(std::abs(absx.evaluate({0.5004, 0}) - 0.5004) <= g.spacing(0));

        CHECK_THROWS_AS(q.evaluate({8.5, 0}), DomainError);

        Grid g2(Axis{-1, 1, 21}, Axis{-2, 2, 41});
        auto lin = ExtendedGridFunction::sample(g2, [](const Point& x) { return 2 * x[0] - x[1] + 3; });
        CHECK(lin.evaluate({0.33, -1.17}) == doctest::Approx(2 * 0.33 + 1.17 + 3).epsilon(1e-12));
    }

    TEST_CASE("integrate_exp_neg")
    {
        Grid g(-8, 8, 1001);
        CHECK(std::abs(integrate_exp_neg(half_square(g)) - sqrt2pi) < 1e-4);

        auto ind = interval_indicator(g, 1.0);
        CHECK(std::abs(integrate_exp_neg(ind) - 2.0) <= g.spacing(0));

        CHECK(integrate_exp_neg(ExtendedGridFunction::constant(g, inf)) == 0.0);

        Grid g2(Axis{-6, 6, 121}, Axis{-6, 6, 121});
        CHECK(integrate_exp_neg(half_square(g2)) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-6));
    }

    TEST_CASE("quadrature positivity")
    {
        Grid g(-3, 3, 31);
        for (int k = 0; k < 10; ++k) {
            auto f = ExtendedGridFunction::sample(g, [k](const Point& x) {
                return std::sin(3.0 * x[0] + k) > 0.3 ? inf : 40.0 * std::cos(x[0] * k);
            });
            const double I = integrate_exp_neg(f);
            CHECK(I >= 0.0);
            CHECK((I == 0.0) == !f.has_finite());
        }
    }

    TEST_CASE("refinement convergence for the truncated Gaussian")
    {
        // box [-2, 2]; reference from the error function
        const double exact = sqrt2pi * std::erf(2.0 / std::sqrt(2.0));
        double prev = inf;
        for (int n : {11, 21, 41, 81}) {
            Grid g(-2, 2, n);
            const double err = std::abs(integrate_exp_neg(half_square(g)) - exact);
            CHECK(err * 2.0 <= prev);
            prev = err;
        }
    }

    TEST_CASE("gradient_map")
    {
        Grid g(-8, 8, 1001);
        auto q = half_square(g);
        auto gm = gradient_map(q);
        CHECK(gm.nodes.size() == 1001);
        const std::size_t at2 = 625;  // x = 2
        CHECK(g.coord(0, at2) == 2.0);
        CHECK(std::abs(gm.gradients[at2][0] - 2.0) <= g.spacing(0) * g.spacing(0));

        auto absx = ExtendedGridFunction::sample(g, [](const Point& x) { return std::abs(x[0]); });
        auto ga = gradient_map(absx);
        const std::size_t at3 = 688;  // x = 3.008
        CHECK(g.coord(0, at3) == doctest::Approx(3.008));
        CHECK(ga.gradients[at3][0] == doctest::Approx(1.0).epsilon(1e-12));

        Grid g2(-2, 2, 401);
        auto ind = interval_indicator(g2, 1.0);
        auto gi = gradient_map(ind);
        for (std::size_t k = 0; k < gi.nodes.size(); ++k) CHECK(gi.gradients[k][0] == 0.0);
        CHECK(gi.nodes.front() == 100);
        CHECK(gi.nodes.back() == 300);
    }

    TEST_CASE("gradient exact on quadratics")
    {
        Grid g(Axis{-2, 2, 41}, Axis{-3, 3, 61});
        // A = [[2, 0.5], [0.5, 1]]
        auto q = ExtendedGridFunction::sample(g, [](const Point& x) {
            return 0.5 * (2 * x[0] * x[0] + x[0] * x[1] + x[1] * x[1]);
        });
        auto gm = gradient_map(q);
        for (std::size_t k = 0; k < gm.nodes.size(); ++k) {
            if (g.on_boundary(gm.nodes[k])) continue;
            const Point x = g.node(gm.nodes[k]);
            CHECK(gm.gradients[k][0] == doctest::Approx(2 * x[0] + 0.5 * x[1]).epsilon(1e-9).scale(1));
            CHECK(gm.gradients[k][1] == doctest::Approx(0.5 * x[0] + x[1]).epsilon(1e-9).scale(1));
        }
    }

    TEST_CASE("superlevel_perimeter")
    {
        Grid g(-8, 8, 1001);
        LogConcaveFunction gauss(half_square(g));
        CHECK(superlevel_perimeter(gauss, 0.5) == 2.0);
        CHECK(superlevel_perimeter(gauss, 1.0) == 0.0);
        CHECK(superlevel_perimeter(gauss, 2.0) == 0.0);
        CHECK_THROWS_AS(superlevel_perimeter(gauss, 0.0), PreconditionError);

        Grid g2(Axis{-1.5, 1.5, 401}, Axis{-1.5, 1.5, 401});
        LogConcaveFunction disc(ExtendedGridFunction::sample(
            g2, [](const Point& x) { return x[0] * x[0] + x[1] * x[1] <= 1.0 ? 0.0 : inf; }));
        CHECK(std::abs(superlevel_perimeter(disc, 0.5) / (2 * std::numbers::pi) - 1.0) < 0.02);
        CHECK(superlevel_perimeter(disc, 1.0) == 0.0);
    }

    TEST_CASE("marching squares on a smooth level set")
    {
        Grid g(Axis{-2, 2, 161}, Axis{-2, 2, 161});
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point x = g.node(i);
            v[i] = std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
        }
        // {f > e^{-1/2}} is the unit disc
        const double t = std::exp(-0.5);
        const double raw = polyline_length(marching_squares(g, v, t));
        CHECK(raw == doctest::Approx(2 * std::numbers::pi).epsilon(1e-3));
        CHECK(hull_perimeter({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}) == doctest::Approx(4.0));
    }

    TEST_CASE("support boundary and essential continuity")
    {
        Grid g(-2, 2, 401);
        LogConcaveFunction ind(interval_indicator(g, 1.0));
        auto b = ind.support_boundary();
        REQUIRE(b.size() == 2);
        CHECK(g.coord(0, static_cast<int>(b[0])) == -1.0);
        CHECK(!ind.essentially_continuous());
        LogConcaveFunction gauss(half_square(Grid(-8, 8, 101)));
        CHECK(gauss.essentially_continuous());
        CHECK(tail_bound(gauss.potential()) == doctest::Approx(2 * std::exp(-32.0)));
    }

    TEST_CASE("discrete convexity")
    {
        Grid g(-2, 2, 41);
        CHECK(is_discretely_convex(half_square(g), 1e-12));
        auto w = ExtendedGridFunction::sample(g, [](const Point& x) { return std::min(std::abs(x[0] - 1), std::abs(x[0] + 1)); });
        CHECK(!is_discretely_convex(w, 1e-12));
        auto hole = ExtendedGridFunction::sample(g, [](const Point& x) { return std::abs(x[0]) < 0.3 ? inf : 0.0; });
        CHECK(!is_discretely_convex(hole, 1e-12));
        CHECK(half_square(g).certified().convexity_certificate() == std::optional<bool>(true));
    }
}
