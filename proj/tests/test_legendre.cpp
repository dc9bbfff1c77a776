#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "logcc/legendre.hpp"
#include "logcc/reference.hpp"

using namespace logcc;

namespace {

ExtendedGridFunction random_function(std::mt19937_64& rng, const Grid& g, bool with_holes)
{
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<int> coin(0, 9);
    std::vector<double> v(g.size());
    for (double& x : v) x = (with_holes && coin(rng) == 0) ? inf : u(rng);
    v[g.size() / 2] = u(rng);
    return ExtendedGridFunction(g, std::move(v));
}

/// Random convex function: cumulative sums of sorted random slopes.
ExtendedGridFunction random_convex_1d(std::mt19937_64& rng, const Grid& g)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const int n = g.points(0);
    std::vector<double> s(n - 1);
    for (double& x : s) x = u(rng);
    std::sort(s.begin(), s.end());
    std::vector<double> v(n);
    v[0] = u(rng);
    for (int i = 1; i < n; ++i) v[i] = v[i - 1] + s[i - 1] * g.spacing(0);
    return ExtendedGridFunction(g, std::move(v));
}

void require_identical(const Transform& a, const Transform& b, bool check_argmax)
{
    REQUIRE(a.conjugate.size() == b.conjugate.size());
    std::size_t bad = 0;
    for (std::size_t j = 0; j < a.conjugate.size(); ++j) {
        if (a.conjugate[j] != b.conjugate[j]) ++bad;
        if (check_argmax && a.argmax[j] != b.argmax[j]) ++bad;
    }
    CHECK(bad == 0);
}

}  // namespace

TEST_SUITE("legendre")
{
    TEST_CASE("lft_1d examples")
    {
        Grid g(-8, 8, 1001);
        auto q = ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * x[0] * x[0]; });
        Grid dual(-4, 4, 801);
        auto t = lft_1d(q, dual);
        CHECK(dual.coord(0, 500) == 1.0);
        CHECK(std::abs(t.conjugate[500] - 0.5) < 1e-4);
        CHECK(!t.boundary[500]);
        require_identical(t, reference::brute_force_lft(q, dual), true);

        Grid g2(-2, 2, 401);
        auto ind = ExtendedGridFunction::sample(g2, [](const Point& x) { return std::abs(x[0]) <= 1 ? 0.0 : inf; });
        Grid d2(-4, 4, 401);
        auto ti = lft_1d(ind, d2);
        CHECK(d2.coord(0, 300) == 2.0);
        CHECK(ti.conjugate[300] == 2.0);
        CHECK(g2.coord(0, static_cast<int>(ti.argmax[300])) == 1.0);

        auto absx = ExtendedGridFunction::sample(g2, [](const Point& x) { return std::abs(x[0]); });
        auto ta = lft_1d(absx, d2);
        CHECK(d2.coord(0, 225) == 0.5);
        CHECK(ta.conjugate[225] == 0.0);
        CHECK(ta.boundary[300]);
        CHECK(!ta.boundary[225]);
    }

    TEST_CASE("empty effective domain")
    {
        Grid g(-1, 1, 11);
        auto e = ExtendedGridFunction::constant(g, inf);
        try {
            lft_1d(e, g);
            FAIL("expected an exception");
        } catch (const PreconditionError& err) {
            CHECK(std::string(err.what()) == "empty effective domain");
        }
        Grid g2(Axis{-1, 1, 5}, Axis{-1, 1, 5});
        CHECK_THROWS_AS(lft(ExtendedGridFunction::constant(g2, inf), g2), PreconditionError);
    }

    TEST_CASE("2D examples")
    {
        Grid g(Axis{-5, 5, 101}, Axis{-5, 5, 101});
        auto q = ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
        Grid dual(Axis{-2, 2, 41}, Axis{-2, 2, 41});
        auto t = lft(q, dual);
        const std::size_t j = dual.index(30, 30);
        CHECK(dual.node(j)[0] == 1.0);
        CHECK(std::abs(t.conjugate[j] - 1.0) < 1e-3);

        Grid gs(Axis{-2, 2, 41}, Axis{-2, 2, 41});
        auto sq = ExtendedGridFunction::sample(gs, [](const Point& x) {
            return std::abs(x[0]) <= 1 + 1e-12 && std::abs(x[1]) <= 1 + 1e-12 ? 0.0 : inf;
        });
        Grid ds(Axis{-3, 3, 61}, Axis{-3, 3, 61});
        auto ts = lft(sq, ds);
        const std::size_t k = ds.index(40, 50);
        CHECK(ds.node(k)[0] == 1.0);
        CHECK(ds.node(k)[1] == 2.0);
        CHECK(ts.conjugate[k] == 3.0);
    }

    TEST_CASE("factorized transform equals brute force")
    {
        std::mt19937_64 rng(7);
        Grid g(Axis{-1, 1, 21}, Axis{-1.5, 1, 21});
        Grid dual(Axis{-3, 2, 21}, Axis{-1, 4, 21});
        for (int rep = 0; rep < 5; ++rep) {
            auto f = random_function(rng, g, rep % 2 == 1);
            require_identical(lft(f, dual), reference::brute_force_lft(f, dual), false);
        }
    }

    TEST_CASE("1D random instances equal brute force")
    {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> npts(3, 201);
        for (int rep = 0; rep < 200; ++rep) {
            Grid g(-1.0 - rep % 3, 1.0 + rep % 5, npts(rng));
            Grid dual(-4, 3, npts(rng));
            ExtendedGridFunction f = rep % 3 == 0 ? random_convex_1d(rng, g) : random_function(rng, g, rep % 2 == 0);
            auto fast = lft_1d(f, dual);
            auto slow = reference::brute_force_lft(f, dual);
            require_identical(fast, slow, true);
            for (std::size_t j = 0; j < dual.size(); ++j) CHECK(fast.boundary[j] == slow.boundary[j]);
        }
    }

    TEST_CASE("collinear data ties go to the smaller index")
    {
        Grid g(-1, 1, 21);
        auto lin = ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * x[0]; });
        Grid dual(-1, 1, 5);  // y = 0.5 ties every node
        auto t = lft_1d(lin, dual);
        CHECK(t.argmax[3] == 0);
        require_identical(t, reference::brute_force_lft(lin, dual), true);
    }

    TEST_CASE("order reversal, Fenchel-Young, shift rule")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            Grid g(-2, 2, 81);
            auto phi = random_convex_1d(rng, g);
            std::vector<double> big(phi.data());
            for (double& v : big) v += u(rng);
            ExtendedGridFunction psi(g, big);
            auto tp = lft(phi), tq = lft(psi);
            for (std::size_t j = 0; j < tp.conjugate.size(); ++j) CHECK(tq.conjugate[j] <= tp.conjugate[j]);

            const Grid& dual = tp.conjugate.grid();
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                for (std::size_t j = 0; j < dual.size(); ++j)
                    worst = std::min(worst, phi[i] + tp.conjugate[j] - g.node(i)[0] * dual.node(j)[0]);
            CHECK(worst >= -1e-12);

            const double c = 0.75;
            std::vector<double> sh(phi.data());
            for (double& v : sh) v += c;
            auto ts = lft(ExtendedGridFunction(g, sh));
            for (std::size_t j = 0; j < dual.size(); ++j)
                CHECK(ts.conjugate[j] == doctest::Approx(tp.conjugate[j] - c).epsilon(1e-13).scale(1));
        }
    }

    TEST_CASE("biconjugate examples")
    {
        Grid g(-4, 4, 401);
        auto q = ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * x[0] * x[0]; });
        auto b = biconjugate(q);
        auto brute = reference::brute_force_biconjugate(q, g.mirrored());
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            CHECK(std::abs(b[i] - q[i]) < 1e-4);
            CHECK(std::abs(brute[i] - q[i]) < 1e-4);
            CHECK(brute[i] <= b[i] + 1e-12);
        }
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(b[i] == q[i]);

        auto w = ExtendedGridFunction::sample(g, [](const Point& x) { return std::min(std::abs(x[0] - 1), std::abs(x[0] + 1)); });
        auto bw = biconjugate(w);
        CHECK(bw[200] == 0.0);
        CHECK(bw[300] == w[300]);
        auto bb = biconjugate(bw);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(bb[i] == bw[i]);
    }

    TEST_CASE("biconjugate is the largest convex minorant")
    {
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 50; ++rep) {
            Grid g(-2, 2, 3 + rep * 4);
            auto psi = random_function(rng, g, rep % 2 == 0);
            auto b = biconjugate(psi);
            CHECK(is_discretely_convex(b, default_convex_tolerance(b)));
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(b[i] <= psi[i] + 1e-12);
            auto bb = biconjugate(b);
            std::size_t diff = 0;
            for (std::size_t i = 0; i < g.size(); ++i) diff += bb[i] != b[i];
            CHECK(diff == 0);
            // no convex function between b and psi is larger: compare with the discrete double transform
            auto brute = reference::brute_force_biconjugate(psi, Grid(-2, 2, 4001));
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(brute[i] <= b[i] + 1e-9);

            auto cv = random_convex_1d(rng, g);
            auto bc = biconjugate(cv, Grid(-3, 3, 5));
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(bc[i] == cv[i]);
        }
    }

    TEST_CASE("2D biconjugate")
    {
        Grid g(Axis{-2, 2, 21}, Axis{-2, 2, 21});
        auto q = ExtendedGridFunction::sample(g, [](const Point& x) {
            return std::abs(x[0]) + 0.5 * x[1] * x[1] - std::cos(3 * x[0] * x[1]);
        });
        Grid dual(Axis{-5, 5, 81}, Axis{-5, 5, 81});
        auto b = biconjugate(q, dual);
        CHECK(is_discretely_convex(b, 1e-9));
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(b[i] <= q[i] + 1e-12);
        auto bb = biconjugate(b, dual);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(bb[i] == doctest::Approx(b[i]).epsilon(1e-12).scale(1));
    }

    TEST_CASE("argmax consistency")
    {
        Grid g(-4, 4, 401);
        auto q = ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * x[0] * x[0]; });
        Grid dual(-2, 2, 201);
        auto r = argmax_consistency_check(q, dual);
        CHECK(r.checked > 0);
        CHECK(r.max_discrepancy <= dual.spacing(0));
        auto t = lft(q, dual);
        CHECK(g.coord(0, static_cast<int>(t.argmax[150])) == 1.0);

        Grid g2(-2, 2, 401);
        auto ind = ExtendedGridFunction::sample(g2, [](const Point& x) { return std::abs(x[0]) <= 1 ? 0.0 : inf; });
        auto ti = lft(ind, Grid(-4, 4, 401));
        CHECK(g2.coord(0, static_cast<int>(ti.argmax[300])) == 1.0);

        std::mt19937_64 rng(9);
        for (int rep = 0; rep < 10; ++rep) {
            Grid gp(-1, 1, 51);
            auto pl = random_convex_1d(rng, gp);
            Grid dp(-2.5, 2.5, 51);
            auto rp = argmax_consistency_check(pl, dp);
            CHECK(rp.max_discrepancy <= dp.spacing(0));
        }
    }
}
