#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <omp.h>

#include <json.hpp>

#include "cli.hpp"
#include "logcc/io.hpp"

using namespace logcc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(std::vector<std::string> args)
{
    args.insert(args.begin(), "logcc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir()
{
    const fs::path d = fs::path(LOGCC_TEST_TMP) / "cli";
    fs::create_directories(d);
    return d;
}

std::string file(const std::string& name) { return (workdir() / name).string(); }

nlohmann::json load(const std::string& path) { return nlohmann::json::parse(io::read_text(path)); }

void write_inputs()
{
    const Grid g(-8, 8, 1001), w(-10, 10, 1001);
    io::write_grid_function(file("quad.json"), ExtendedGridFunction::sample(g, [](const Point& x) { return 0.5 * x[0] * x[0]; }));
    io::write_grid_function(file("gauss.json"), ExtendedGridFunction::sample(w, [](const Point& x) { return 0.5 * x[0] * x[0]; }));
    io::write_grid_function(file("ball.json"),
                            ExtendedGridFunction::sample(w, [](const Point& x) { return std::abs(x[0]) <= 1.0 + 1e-12 ? 0.0 : inf; }));
    io::write_grid_function(file("density.json"),
                            ExtendedGridFunction::sample(w, [](const Point& y) { return std::exp(-0.5 * y[0] * y[0]); }));
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("lft writes the conjugate, flags and plot data")
    {
        write_inputs();
        auto r = call({"lft", "--in", file("quad.json"), "--dual-bounds", "-4", "4", "--dual-points", "801", "--out",
                       file("conj.json")});
        REQUIRE(r.code == cli::exit_ok);
        auto conj = io::read_grid_function(file("conj.json"));
        CHECK(conj.grid().points(0) == 801);
        CHECK(conj.evaluate(Point{1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-4));
        auto flags = load(file("conj.flags.json"));
        CHECK(flags["boundary"].size() == 801);
        CHECK(flags["boundary"][400] == false);
        CHECK(fs::exists(file("conj.dat")));
    }

    TEST_CASE("first variation of a Gaussian against a ball")
    {
        write_inputs();
        auto r = call({"first-variation", "--f", file("gauss.json"), "--g", file("ball.json"), "--out", file("report.json")});
        REQUIRE(r.code == cli::exit_ok);
        auto j = load(file("report.json"));
        CHECK(j["relative_gap"].get<double>() < 0.02);
        CHECK(j["essentially_continuous"] == true);
        CHECK(fs::exists(file("report.dat")));
    }

    TEST_CASE("surface measure feeds the solver")
    {
        write_inputs();
        REQUIRE(call({"surface-measure", "--f", file("quad.json"), "--out", file("sf_gauss.csv")}).code == cli::exit_ok);
        CHECK(fs::exists(file("sf_gauss.dat")));
        auto r = call({"minkowski", "--measure", file("sf_gauss.csv"), "--p", "1", "--out", file("res.json")});
        REQUIRE(r.code == cli::exit_ok);
        auto j = load(file("res.json"));
        CHECK(j["measure_mismatch"].get<double>() < 0.05);
        CHECK(j["status"] == "converged");
        CHECK(j["c"].get<double>() == doctest::Approx(1.0).epsilon(0.01));
        CHECK(fs::exists(file("res.dat")));

        auto m = call({"ma-residual", "--result", file("res.json"), "--density", file("density.json"), "--out",
                       file("ma.json")});
        REQUIRE(m.code == cli::exit_ok);
        CHECK(load(file("ma.json"))["relative_l1"].get<double>() < 0.05);

        CHECK(call({"minkowski", "--measure", file("sf_gauss.csv"), "--max-iters", "1", "--out", file("res1.json")}).code ==
              cli::exit_nonconvergence);
    }

    TEST_CASE("remaining subcommands")
    {
        write_inputs();
        CHECK(call({"biconj", "--in", file("quad.json"), "--out", file("bi.csv")}).code == cli::exit_ok);
        CHECK(io::read_grid_function(file("bi.csv")).grid().points(0) == 1001);
        CHECK(call({"supconv", "--f", file("gauss.json"), "--g", file("gauss.json"), "--out", file("sup.json")}).code ==
              cli::exit_ok);
        CHECK(call({"lp-comb", "--f", file("gauss.json"), "--g", file("ball.json"), "--t", "0.5", "--p", "1", "--out",
                    file("lp.json")})
                  .code == cli::exit_ok);
        CHECK(call({"coarea", "--f", file("ball.json"), "--out", file("co.json")}).code == cli::exit_ok);
        auto co = load(file("co.json"));
        CHECK(co["rhs_boundary"].get<double>() == doctest::Approx(2.0).epsilon(0.02));
        CHECK(call({"subdiff", "--f", file("gauss.json"), "--g", file("ball.json"), "--out", file("sd.json")}).code ==
              cli::exit_ok);
        CHECK(load(file("sd.json"))["holds"] == true);
    }

    TEST_CASE("errors map to exit codes")
    {
        write_inputs();
        io::write_text(file("bad.json"), "{\"dim\": 1,\n \"bounds\": [[-1, 1]], \"shape\": [3], \"values\": [1, 2,, 3]}\n");
        auto r = call({"lft", "--in", file("bad.json"), "--out", file("x.json")});
        CHECK(r.code == cli::exit_error);
        CHECK(r.err.find("line 2") != std::string::npos);

        io::write_text(file("odd.csv"), "# dim=1,even=false\nx1,weight\n1,1\n-1,2\n");
        CHECK(call({"minkowski", "--measure", file("odd.csv"), "--out", file("x.json")}).code == cli::exit_error);
        CHECK(call({"lft", "--in", file("missing.json"), "--out", file("x.json")}).code == cli::exit_error);
        CHECK(call({"nonsense"}).code == cli::exit_error);
        CHECK(call({}).code == cli::exit_error);
        CHECK(call({"lp-comb", "--f", file("gauss.json"), "--g", file("gauss.json"), "--p", "2", "--out", file("x.json")})
                  .code == cli::exit_error);
        auto h = call({"--help"});
        CHECK(h.code == cli::exit_ok);
        CHECK(h.out.find("minkowski") != std::string::npos);
    }

    TEST_CASE("config file and determinism")
    {
        write_inputs();
        io::write_text(file("lft.ini"), "[lft]\nin=" + file("quad.json") + "\nout=" + file("cfg.json") + "\n");
        REQUIRE(call({"--config", file("lft.ini"), "lft"}).code == cli::exit_ok);
        REQUIRE(call({"lft", "--in", file("quad.json"), "--out", file("cfg2.json")}).code == cli::exit_ok);
        CHECK(io::read_text(file("cfg.json")) == io::read_text(file("cfg2.json")));
    }

    TEST_CASE("thread limit from the environment")
    {
        const int before = omp_get_max_threads();
        setenv("LOGCC_THREADS", "2", 1);
        cli::apply_thread_limit();
        CHECK(omp_get_max_threads() == 2);
        setenv("LOGCC_THREADS", "zero", 1);
        cli::apply_thread_limit();
        CHECK(omp_get_max_threads() == 2);
        unsetenv("LOGCC_THREADS");
        omp_set_num_threads(before);
    }
}
