#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "logcc/calculus.hpp"
#include "logcc/io.hpp"
#include "logcc/legendre.hpp"
#include "logcc/minkowski.hpp"
#include "logcc/variation.hpp"

namespace logcc::cli {

namespace {

using nlohmann::json;

class Nonconvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json num(double v)
{
    if (v == inf) return "inf";
    if (v == -inf) return "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

json nums(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::string stem(const std::string& path)
{
    const auto dot = path.rfind('.'), slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

void write_json(const std::string& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

// two-column plot data, rows with non-finite values skipped
void write_plot(const std::string& path, const std::string& header, const std::vector<double>& x,
                const std::vector<double>& y)
{
    std::string s = "# " + header + "\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::isfinite(x[i]) && std::isfinite(y[i])) s += io::format_double(x[i]) + " " + io::format_double(y[i]) + "\n";
    io::write_text(path, s);
}

void plot_function(const std::string& path, const std::string& header, const ExtendedGridFunction& f)
{
    if (f.grid().dim() != 1) return;
    std::vector<double> x(f.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = f.grid().coord(0, static_cast<int>(i));
    write_plot(path, header, x, f.data());
}

Grid grid_from(const std::vector<double>& bounds, const std::vector<int>& points)
{
    if (bounds.size() != 2 * points.size() || points.empty() || points.size() > 2)
        throw PreconditionError("need one lo hi pair per point count (1 or 2 axes)");
    std::vector<Axis> axes;
    for (std::size_t k = 0; k < points.size(); ++k) axes.push_back(Axis{bounds[2 * k], bounds[2 * k + 1], points[k]});
    return Grid(std::move(axes));
}

// lo hi n per axis
Grid grid_from_triples(const std::vector<double>& v)
{
    if (v.size() != 3 && v.size() != 6) throw PreconditionError("--grid takes lo hi n per axis");
    std::vector<Axis> axes;
    for (std::size_t k = 0; k < v.size(); k += 3) {
        const double n = v[k + 2];
        if (n != std::floor(n)) throw PreconditionError("grid point count must be an integer");
        axes.push_back(Axis{v[k], v[k + 1], static_cast<int>(n)});
    }
    return Grid(std::move(axes));
}

Grid dual_or_default(const ExtendedGridFunction& phi, const std::vector<double>& bounds, const std::vector<int>& points)
{
    if (bounds.empty() && points.empty()) return phi.grid().mirrored();
    if (points.empty()) {
        std::vector<int> p;
        for (int k = 0; k < phi.grid().dim(); ++k) p.push_back(phi.grid().points(k));
        return grid_from(bounds, p);
    }
    if (bounds.empty()) {
        const Grid m = phi.grid().mirrored();
        std::vector<double> b;
        for (int k = 0; k < m.dim(); ++k) {
            b.push_back(m.axis(k).lo);
            b.push_back(m.axis(k).hi);
        }
        return grid_from(b, points);
    }
    return grid_from(bounds, points);
}

LogConcaveFunction read_function(const std::string& path) { return LogConcaveFunction(io::read_grid_function(path)); }

json variation_json(const VariationReport& r, bool ec)
{
    return json{{"t_schedule", nums(r.t_schedule)},
                {"difference_quotients", nums(r.difference_quotients)},
                {"log_quotients", nums(r.log_quotients)},
                {"base_integral", num(r.base_integral)},
                {"estimate", num(r.extrapolated_delta)},
                {"predicted", num(r.predicted)},
                {"relative_gap", num(r.relative_gap)},
                {"diverged", r.diverged},
                {"log_quotients_monotone", r.log_quotients_monotone},
                {"essentially_continuous", ec}};
}

struct Options {
    std::string in, out, f, g, measure, result, density, a = "AUTO", scheme = "forward";
    std::vector<double> dual_bounds, grid, schedule;
    std::vector<int> dual_points;
    double t = 1.0, p = 1.0, tol = -1.0, c = 1.0, bins = 0.0, step = 1.0, grad_tol = 1e-7;
    int levels = 200, max_iters = 2000;
};

}  // namespace

void apply_thread_limit()
{
    const char* s = std::getenv("LOGCC_THREADS");
    if (!s) return;
    char* end = nullptr;
    const long n = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && n > 0 && n <= 4096) omp_set_num_threads(static_cast<int>(n));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Log-concave function calculus and the even Lp Minkowski solver", "logcc"};
    app.set_config("--config", "", "TOML or INI file with the same keys as the flags");
    app.require_subcommand(1);
    Options o;
    std::function<void()> action;

    auto sub = [&](const char* name, const char* desc) { return app.add_subcommand(name, desc); };
    auto dual_flags = [&](CLI::App* s) {
        s->add_option("--dual-bounds", o.dual_bounds, "lo hi per axis (default: primal box mirrored)")->expected(2, 4);
        s->add_option("--dual-points", o.dual_points, "points per axis")->expected(1, 2);
    };

    auto* lft_cmd = sub("lft", "Legendre transform of a potential with boundary flags");
    lft_cmd->add_option("--in", o.in, "potential file")->required();
    lft_cmd->add_option("--out", o.out, "conjugate file")->required();
    dual_flags(lft_cmd);
    lft_cmd->callback([&] {
        action = [&] {
            auto phi = io::read_grid_function(o.in);
            auto t = lft(phi, dual_or_default(phi, o.dual_bounds, o.dual_points));
            io::write_grid_function(o.out, t.conjugate);
            json flags{{"boundary", json::array()}, {"argmax", t.argmax}};
            std::size_t flagged = 0;
            for (char b : t.boundary) {
                flags["boundary"].push_back(b != 0);
                flagged += b != 0;
            }
            write_json(stem(o.out) + ".flags.json", flags);
            plot_function(stem(o.out) + ".dat", "y conjugate", t.conjugate);
            out << "flagged " << flagged << " of " << t.boundary.size() << " dual nodes\n";
        };
    });

    auto* biconj_cmd = sub("biconj", "second conjugate (convex envelope) on the input grid");
    biconj_cmd->add_option("--in", o.in, "function file")->required();
    biconj_cmd->add_option("--out", o.out, "output file")->required();
    dual_flags(biconj_cmd);
    biconj_cmd->callback([&] {
        action = [&] {
            auto psi = io::read_grid_function(o.in);
            auto b = biconjugate(psi, dual_or_default(psi, o.dual_bounds, o.dual_points));
            io::write_grid_function(o.out, b);
            plot_function(stem(o.out) + ".dat", "x biconjugate", b);
        };
    });

    auto* sup_cmd = sub("supconv", "sup-convolution of two log-concave functions");
    sup_cmd->add_option("--f", o.f, "potential of f")->required();
    sup_cmd->add_option("--g", o.g, "potential of g")->required();
    sup_cmd->add_option("--out", o.out, "potential of the result on the grid of f")->required();
    sup_cmd->callback([&] {
        action = [&] {
            auto r = sup_convolution(read_function(o.f), read_function(o.g));
            io::write_grid_function(o.out, r.potential());
            std::vector<double> v(r.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = r.value(i);
            plot_function(stem(o.out) + ".dat", "x value", ExtendedGridFunction(r.grid(), std::move(v)));
            out << "integral " << io::format_double(r.exact_integral()) << "\n";
        };
    });

    auto* lp_cmd = sub("lp-comb", "Lp combination f *_p (t.g)");
    lp_cmd->add_option("--f", o.f, "potential of f")->required();
    lp_cmd->add_option("--g", o.g, "potential of g")->required();
    lp_cmd->add_option("--t", o.t, "weight of g (>= 0)");
    lp_cmd->add_option("--p", o.p, "exponent in (0, 1]");
    lp_cmd->add_option("--out", o.out, "potential of the result on the grid of f")->required();
    lp_cmd->callback([&] {
        action = [&] {
            auto r = lp_combination(read_function(o.f), read_function(o.g), o.t, o.p);
            io::write_grid_function(o.out, r.potential());
            std::vector<double> v(r.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = r.value(i);
            plot_function(stem(o.out) + ".dat", "x value", ExtendedGridFunction(r.grid(), std::move(v)));
            out << "integral " << io::format_double(r.exact_integral()) << "\n";
        };
    });

    auto* sm_cmd = sub("surface-measure", "S_f (or S_{f,p}) as a measure file");
    sm_cmd->add_option("--f", o.f, "potential of f")->required();
    sm_cmd->add_option("--p", o.p, "exponent in (0, 1]");
    sm_cmd->add_option("--bins", o.bins, "histogram bin width for the plot file (default: grid spacing)");
    sm_cmd->add_option("--out", o.out, "measure CSV")->required();
    sm_cmd->callback([&] {
        action = [&] {
            auto f = read_function(o.f);
            auto m = o.p == 1.0 ? surface_area_measure(f) : lp_surface_area_measure(f, o.p);
            io::write_measure(o.out, m);
            if (m.dim() == 1) {
                const double h = o.bins > 0.0 ? o.bins : f.grid().spacing(0);
                double r = h;
                for (const Atom& a : m.atoms()) r = std::max(r, std::abs(a.x[0]));
                auto hist = histogram(m, aligned_bins(r + h, h, 1));
                std::vector<double> x(hist.mass.size()), d(hist.mass.size());
                for (std::size_t k = 0; k < x.size(); ++k) {
                    x[k] = hist.bins.coord(0, static_cast<int>(k));
                    d[k] = hist.mass[k] / h;
                }
                write_plot(stem(o.out) + ".dat", "y density", x, d);
            }
            out << "atoms " << m.size() << " mass " << io::format_double(m.total_mass()) << "\n";
        };
    });

    auto* fv_cmd = sub("first-variation", "finite-difference first variation against its prediction");
    fv_cmd->add_option("--f", o.f, "potential of f")->required();
    fv_cmd->add_option("--g", o.g, "potential of g")->required();
    fv_cmd->add_option("--p", o.p, "exponent in (0, 1]");
    fv_cmd->add_option("--schedule", o.schedule, "decreasing step sizes t");
    fv_cmd->add_option("--out", o.out, "report JSON")->required();
    fv_cmd->callback([&] {
        action = [&] {
            auto f = read_function(o.f), g = read_function(o.g);
            auto r = o.p == 1.0 ? first_variation_report(f, g, o.schedule) : lp_first_variation_report(f, g, o.p, o.schedule);
            auto j = variation_json(r, is_essentially_continuous(f));
            j["p"] = o.p;
            write_json(o.out, j);
            write_plot(stem(o.out) + ".dat", "t quotient", r.t_schedule, r.difference_quotients);
            out << "estimate " << io::format_double(r.extrapolated_delta) << " predicted "
                << io::format_double(r.predicted) << " relative_gap " << io::format_double(r.relative_gap) << "\n";
        };
    });

    auto* co_cmd = sub("coarea", "co-area decomposition of the total variation");
    co_cmd->add_option("--f", o.f, "potential of f")->required();
    co_cmd->add_option("--levels", o.levels, "number of levels");
    co_cmd->add_option("--tol", o.tol, "relative tolerance (default 0.02)");
    co_cmd->add_option("--out", o.out, "report JSON")->required();
    co_cmd->callback([&] {
        action = [&] {
            auto r = coarea_check(read_function(o.f), o.levels, o.tol > 0.0 ? o.tol : 0.02);
            write_json(o.out, json{{"lhs", num(r.lhs)},
                                   {"rhs_grad", num(r.rhs_grad)},
                                   {"rhs_boundary", num(r.rhs_boundary)},
                                   {"levels", r.levels},
                                   {"relative_error", num(r.relative_error)},
                                   {"consistent", r.consistent}});
            out << "lhs " << io::format_double(r.lhs) << " grad " << io::format_double(r.rhs_grad) << " boundary "
                << io::format_double(r.rhs_boundary) << "\n";
        };
    });

    auto* sd_cmd = sub("subdiff", "subdifferential inequality for a pair of functions");
    sd_cmd->add_option("--f", o.f, "potential of f (essentially continuous)")->required();
    sd_cmd->add_option("--g", o.g, "potential of g")->required();
    sd_cmd->add_option("--tol", o.tol, "slack (default 1e-6)");
    sd_cmd->add_option("--out", o.out, "report JSON")->required();
    sd_cmd->callback([&] {
        action = [&] {
            auto r = subdifferential_check(read_function(o.f), read_function(o.g), o.tol > 0.0 ? o.tol : 1e-6);
            write_json(o.out, json{{"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"holds", r.holds}});
            out << (r.holds ? "holds" : "violated") << "\n";
        };
    });

    auto* mk_cmd = sub("minkowski", "even Lp Minkowski problem for a measure");
    mk_cmd->add_option("--measure", o.measure, "measure CSV")->required();
    mk_cmd->add_option("--p", o.p, "exponent in (0, 1]");
    mk_cmd->add_option("--a", o.a, "constraint level or AUTO");
    mk_cmd->add_option("--grid", o.grid, "lo hi n per axis (default -8 8 1001)")->expected(3, 6);
    mk_cmd->add_option("--max-iters", o.max_iters, "iteration limit");
    mk_cmd->add_option("--grad-tol", o.grad_tol, "KKT residual tolerance");
    mk_cmd->add_option("--step", o.step, "initial step size");
    mk_cmd->add_option("--out", o.out, "result JSON")->required();
    mk_cmd->callback([&] {
        action = [&] {
            auto mu = io::read_measure(o.measure);
            SolverConfig cfg;
            cfg.p = o.p;
            if (o.a != "AUTO" && o.a != "auto") cfg.a = io::parse_double(o.a, 1, 1);
            if (!o.grid.empty()) cfg.grid = grid_from_triples(o.grid);
            else if (mu.dim() == 2) cfg.grid = Grid(Axis{-6, 6, 121}, Axis{-6, 6, 121});
            cfg.max_iters = o.max_iters;
            cfg.grad_tol = o.grad_tol;
            cfg.step = o.step;
            auto r = solve_lp_minkowski(mu, cfg);
            json j{{"p", cfg.p},
                   {"a", num(r.a)},
                   {"c", num(r.c)},
                   {"status", to_string(r.status)},
                   {"iterations", r.iterations},
                   {"escalations", r.escalations},
                   {"kkt_residual", num(r.kkt_residual)},
                   {"measure_mismatch", num(r.measure_mismatch)},
                   {"sampled_mismatch", num(r.sampled_mismatch)},
                   {"projections_ok", r.projections_ok},
                   {"objective_trace", nums(r.objective_trace)},
                   {"feasibility_trace", nums(r.feasibility_trace)},
                   {"kkt_trace", nums(r.kkt_trace)},
                   {"psi", io::to_json(r.psi)},
                   {"potential", io::to_json(r.f.potential())}};
            write_json(o.out, j);
            std::vector<double> it(r.objective_trace.size());
            for (std::size_t k = 0; k < it.size(); ++k) it[k] = static_cast<double>(k);
            write_plot(stem(o.out) + ".dat", "iteration objective", it, r.objective_trace);
            out << "status " << to_string(r.status) << " c " << io::format_double(r.c) << " measure_mismatch "
                << io::format_double(r.measure_mismatch) << "\n";
            if (r.status != SolverStatus::converged) throw Nonconvergence("solver did not converge: " + to_string(r.status));
        };
    });

    auto* ma_cmd = sub("ma-residual", "Monge-Ampere residual of a potential against a density");
    ma_cmd->add_option("--result", o.result, "minkowski result JSON (uses its potential and 1/c)");
    ma_cmd->add_option("--f", o.f, "potential of f");
    ma_cmd->add_option("--c", o.c, "constant in front of the density term");
    ma_cmd->add_option("--density", o.density, "density values g(y) on a grid")->required();
    ma_cmd->add_option("--p", o.p, "exponent in (0, 1]");
    ma_cmd->add_option("--scheme", o.scheme, "gradient stencil: forward or central");
    ma_cmd->add_option("--out", o.out, "report JSON")->required();
    ma_cmd->callback([&] {
        action = [&] {
            if (o.result.empty() == o.f.empty()) throw PreconditionError("give exactly one of --result and --f");
            LogConcaveFunction f;
            double c = o.c;
            if (!o.result.empty()) {
                json j;
                const std::string text = io::read_text(o.result);
                try {
                    j = json::parse(text);
                    f = LogConcaveFunction(io::grid_function_from_value(j.at("potential")));
                    c = 1.0 / j.at("c").get<double>();
                } catch (const json::exception& e) {
                    throw ParseError(std::string("bad result file: ") + e.what(), 1, 1);
                }
            } else {
                f = read_function(o.f);
            }
            if (o.scheme != "forward" && o.scheme != "central") throw PreconditionError("scheme must be forward or central");
            const auto g = io::read_grid_function(o.density);
            auto density = [&g](const Point& y) { return g.grid().contains(y) ? g.evaluate(y) : 0.0; };
            auto r = ma_residual(f, c, density, o.p, o.scheme == "forward" ? GradientScheme::forward : GradientScheme::central);
            write_json(o.out, json{{"relative_l1", num(r.relative_l1)},
                                   {"l1", num(r.l1)},
                                   {"interior", r.interior},
                                   {"excluded", r.excluded},
                                   {"flagged", r.flagged},
                                   {"field", io::to_json(r.field)}});
            plot_function(stem(o.out) + ".dat", "x residual", r.field);
            out << "relative_l1 " << io::format_double(r.relative_l1) << (r.flagged ? " flagged" : "") << "\n";
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }

    try {
        if (action) action();
        return exit_ok;
    } catch (const Nonconvergence& e) {
        err << "error: " << e.what() << "\n";
        return exit_nonconvergence;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
}

}  // namespace logcc::cli
