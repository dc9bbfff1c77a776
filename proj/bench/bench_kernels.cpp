#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include <omp.h>

#include "logcc/calculus.hpp"
#include "logcc/legendre.hpp"
#include "logcc/measures.hpp"
#include "logcc/minkowski.hpp"
#include "logcc/reference.hpp"
#include "logcc/variation.hpp"

using namespace logcc;

namespace {

// best of `reps` wall-clock runs
double best_of(int reps, const std::function<void()>& fn)
{
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

bool same(const ExtendedGridFunction& a, const ExtendedGridFunction& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

void row(const std::string& kernel, const std::string& size, double serial, double parallel, bool identical)
{
    std::printf("%-28s %-14s %10.4f %10.4f %8.2fx  %s\n", kernel.c_str(), size.c_str(), serial, parallel,
                serial / parallel, identical ? "identical" : "DIFFERENT");
}

// runs fn with one thread, then with all threads
template <class F>
void compare(const std::string& kernel, const std::string& size, int reps, F fn)
{
    const int all = omp_get_max_threads();
    omp_set_num_threads(1);
    decltype(fn()) a;
    const double s = best_of(reps, [&] { a = fn(); });
    omp_set_num_threads(all);
    decltype(fn()) b;
    const double p = best_of(reps, [&] { b = fn(); });
    row(kernel, size, s, p, same(a, b));
}

}  // namespace

int main(int argc, char** argv)
{
    const int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
    std::printf("threads available: %d\n", omp_get_max_threads());
    std::printf("%-28s %-14s %10s %10s %9s  %s\n", "kernel", "size", "serial s", "parallel s", "speedup", "result");

    for (int n : {201 * scale, 401 * scale}) {
        const Grid g(Axis{-6, 6, n}, Axis{-6, 6, n});
        auto phi = ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
        compare("lft 2D (axis lines)", std::to_string(n) + "^2", 3, [&] { return lft(phi).conjugate; });
    }
    {
        const int n = 41;
        const Grid g(Axis{-3, 3, n}, Axis{-3, 3, n});
        auto phi = ExtendedGridFunction::sample(g, [](const Point& x) { return std::abs(x[0]) + x[1] * x[1]; });
        ExtendedGridFunction fast, slow;
        const double tf = best_of(3, [&] { fast = lft(phi).conjugate; });
        const double ts = best_of(3, [&] { slow = reference::brute_force_lft(phi, g.mirrored()).conjugate; });
        row("lft 2D vs brute force", "41^2", ts, tf, same(fast, slow));
    }
    {
        const int n = 2001 * scale;
        const Grid g(Axis{-8, 8, n}, Axis{-8, 8, 3});
        auto h = ExtendedGridFunction::sample(g, [](const Point& y) { return 0.5 * y[0] * y[0] + 1.0; });
        compare("lp_mean p=0.5", std::to_string(n * 3), 5, [&] { return lp_mean(h, h, 0.5, 0.5); });
    }
    {
        const int n = 601 * scale;
        const Grid g(Axis{-6, 6, n}, Axis{-6, 6, n});
        auto f = LogConcaveFunction::from_potential(g, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
        compare("surface_area_measure", std::to_string(n) + "^2", 3, [&] {
            auto m = surface_area_measure(f);
            std::vector<double> w;
            for (const Atom& a : m.atoms()) w.push_back(a.w);
            return ExtendedGridFunction(Grid(-1, 1, static_cast<int>(w.size())), w);
        });
    }
    {
        const Grid g(-10, 10, 1001 * scale);
        auto f = LogConcaveFunction::from_potential(g, [](const Point& x) { return 0.5 * x[0] * x[0]; });
        compare("first variation schedule", std::to_string(1001 * scale), 2, [&] {
            auto r = first_variation_report(f, f);
            return ExtendedGridFunction(Grid(-1, 1, static_cast<int>(r.difference_quotients.size())), r.difference_quotients);
        });
    }
    {
        std::vector<Atom> atoms;
        for (int k = 0; k < 16; ++k) {
            const double t = 2 * std::acos(-1.0) * k / 16;
            atoms.push_back(Atom{Point{std::cos(t), std::sin(t)}, 1.0});
        }
        SolverConfig cfg;
        cfg.grid = Grid(Axis{-6, 6, 61}, Axis{-6, 6, 61});
        cfg.max_iters = 200;
        DiscreteMeasure mu(2, atoms, true);
        compare("2D Minkowski solve", "61^2", 1, [&] { return solve_lp_minkowski(mu, cfg).f.potential(); });
    }
    return 0;
}
