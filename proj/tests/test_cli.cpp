#include <doctest.h>
#include "requforge/serialize.hpp"
#include "requforge/sweep.hpp"

#include <filesystem>
#include <sstream>

#include "requforge/cli_commands.hpp"

using namespace requforge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("requforge-test-" + std::to_string(::getpid()) +
                                                    "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cli: build then sweep passes and writes artifacts") {
    TempDir dir;
    cli::BuildArgs build;
    build.fn = "sin_sum";
    build.d = 1;
    build.r = 2.0;
    build.eps = 0.25;
    build.out = dir.file("net.json");
    build.report = dir.file("report.json");
    std::ostringstream out, err;
    REQUIRE(cli::cmd_build(build, out, err) == cli::kExitOk);
    CHECK(fs::exists(build.out));
    CHECK(fs::exists(build.report));

    // the reported grid size is the one the rule picks for the pulled-back target
    const Json rep = Json::parse(cli::read_file(build.report));
    const HolderFunction f = make_test_function("sin_sum", 1, 2.0);
    const double r_scaled = f.R * std::pow(2.0, f.r);
    CHECK(rep.at("M").get<int>() ==
          choose_M(build.eps / 2.0, f.r, r_scaled, 1, taylor_constant(f.r, 1)));

    cli::SweepArgs sweep;
    sweep.net_path = build.out;
    sweep.report_path = build.report;
    sweep.fn = "sin_sum";
    sweep.points = 2000;
    sweep.seed = 5;
    sweep.out = dir.file("sweep.csv");
    std::ostringstream sout;
    CHECK(cli::cmd_sweep(sweep, sout, err) == cli::kExitOk);
    CHECK(sout.str().find("PASS") != std::string::npos);
    const std::string csv = cli::read_file(sweep.out);
    CHECK(csv.rfind("x_1,f,phi,abs_err\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2001);
}

TEST_CASE("cli: constant target sweeps to nearly zero error") {
    TempDir dir;
    cli::BuildArgs build;
    build.fn = "const";
    build.d = 1;
    build.r = 2.0;
    build.eps = 0.5;
    build.out = dir.file("net.json");
    build.report = dir.file("report.json");
    std::ostringstream out, err;
    REQUIRE(cli::cmd_build(build, out, err) == cli::kExitOk);

    cli::SweepArgs sweep;
    sweep.net_path = build.out;
    sweep.report_path = build.report;
    sweep.fn = "const";
    sweep.points = 500;
    sweep.out = dir.file("sweep.csv");
    std::ostringstream sout;
    CHECK(cli::cmd_sweep(sweep, sout, err) == cli::kExitOk);
    // the Taylor part is exact for a constant; what remains is the window
    // machinery's shell slack, far below the eps budget
    std::istringstream parse(sout.str());
    std::string w1, w2, val;
    parse >> w1 >> w2 >> val;
    CHECK(std::stod(val) <= build.eps / 100.0);
}

TEST_CASE("cli: invalid build parameters exit with code 2") {
    TempDir dir;
    cli::BuildArgs build;
    build.fn = "sin_sum";
    build.d = 1;
    build.r = 0.5;  // below the supported smoothness
    build.eps = 0.25;
    build.out = dir.file("net.json");
    std::ostringstream out, err;
    CHECK(cli::cmd_build(build, out, err) == cli::kExitInvalid);
    CHECK_FALSE(fs::exists(build.out));

    build.r = 2.0;
    build.fn = "not-a-function";
    CHECK(cli::cmd_build(build, out, err) == cli::kExitInvalid);
}

TEST_CASE("cli: sweep edge cases") {
    TempDir dir;
    cli::BuildArgs build;
    build.fn = "linear";
    build.d = 1;
    build.r = 2.0;
    build.eps = 0.5;
    build.out = dir.file("net.json");
    build.report = dir.file("report.json");
    std::ostringstream out, err;
    REQUIRE(cli::cmd_build(build, out, err) == cli::kExitOk);

    cli::SweepArgs sweep;
    sweep.net_path = build.out;
    sweep.report_path = build.report;
    sweep.fn = "linear";
    sweep.out = dir.file("sweep.csv");

    SUBCASE("zero points yields a header-only CSV and a summary") {
        sweep.points = 0;
        std::ostringstream sout;
        CHECK(cli::cmd_sweep(sweep, sout, err) == cli::kExitOk);
        CHECK(sout.str().find("no samples") != std::string::npos);
        CHECK(cli::read_file(sweep.out) == "x_1,f,phi,abs_err\n");
    }
    SUBCASE("dimension mismatch is rejected") {
        sweep.d = 2;
        std::ostringstream sout;
        CHECK(cli::cmd_sweep(sweep, sout, err) == cli::kExitInvalid);
    }
    SUBCASE("missing files are rejected") {
        sweep.net_path = dir.file("missing.json");
        std::ostringstream sout;
        CHECK(cli::cmd_sweep(sweep, sout, err) == cli::kExitInvalid);
    }
    SUBCASE("an unmet eps reports FAIL with exit code 1") {
        // shrink the advertised budget far below what any net achieves
        Json rep = Json::parse(cli::read_file(build.report));
        rep["eps"] = 1e-15;
        cli::write_file(build.report, rep.dump(1));
        sweep.points = 200;
        std::ostringstream sout;
        CHECK(cli::cmd_sweep(sweep, sout, err) == cli::kExitFail);
        CHECK(sout.str().find("FAIL") != std::string::npos);
    }
}

TEST_CASE("cli: gadget command evaluates and reports complexity") {
    std::ostringstream out, err;
    cli::GadgetArgs g;
    g.name = "product2";
    g.probe = {"3", "-2"};
    CHECK(cli::cmd_gadget(g, out, err) == cli::kExitOk);
    CHECK(out.str().find("value: -6") != std::string::npos);
    CHECK(out.str().find("hidden_layers 1") != std::string::npos);

    std::ostringstream out2;
    cli::GadgetArgs id;
    id.name = "identity";
    id.s = 1.0;
    id.probe = {"0.5"};
    CHECK(cli::cmd_gadget(id, out2, err) == cli::kExitOk);
    CHECK(out2.str().find("value: 0.5") != std::string::npos);

    std::ostringstream out3;
    cli::GadgetArgs bump;
    bump.name = "bump";
    bump.M = 2;
    bump.d = 1;
    bump.probe = {"at-center"};
    CHECK(cli::cmd_gadget(bump, out3, err) == cli::kExitOk);
    CHECK(out3.str().find("value: 1") != std::string::npos);

    std::ostringstream out4;
    cli::GadgetArgs pd;
    pd.name = "product_d";
    pd.d = 3;
    pd.probe = {"2", "3", "4"};
    CHECK(cli::cmd_gadget(pd, out4, err) == cli::kExitOk);
    CHECK(out4.str().find("value: 24") != std::string::npos);

    std::ostringstream out5;
    cli::GadgetArgs ind;
    ind.name = "indicator";
    ind.a = {0.0};
    ind.b = {1.0};
    ind.s = 4.0;
    ind.probe = {"0.5"};
    CHECK(cli::cmd_gadget(ind, out5, err) == cli::kExitOk);
    CHECK(out5.str().find("value: 1") != std::string::npos);

    std::ostringstream out6;
    cli::GadgetArgs bad;
    bad.name = "warp-drive";
    CHECK(cli::cmd_gadget(bad, out6, err) == cli::kExitInvalid);
    CHECK(err.str().find("unknown gadget") != std::string::npos);

    std::ostringstream out7;
    cli::GadgetArgs arity;
    arity.name = "product2";
    arity.probe = {"1"};
    CHECK(cli::cmd_gadget(arity, out7, err) == cli::kExitInvalid);
}

TEST_CASE("cli: grid and constant overrides") {
    TempDir dir;
    cli::BuildArgs build;
    build.fn = "linear";
    build.d = 1;
    build.r = 2.0;
    build.eps = 0.5;
    build.out = dir.file("net.json");
    build.report = dir.file("report.json");

    SUBCASE("a coarser grid than required is rejected") {
        build.m_override = 2;
        std::ostringstream out, err;
        const int required =
            choose_M(0.25, 2.0, 1.0 * 4.0, 1, taylor_constant(2.0, 1));
        const int code = cli::cmd_build(build, out, err);
        CHECK(code == (required > 2 ? cli::kExitInvalid : cli::kExitOk));
    }
    SUBCASE("a finer grid is honored and recorded") {
        build.m_override = 7;
        std::ostringstream out, err;
        REQUIRE(cli::cmd_build(build, out, err) == cli::kExitOk);
        const Json rep = Json::parse(cli::read_file(build.report));
        CHECK(rep.at("M").get<int>() == 7);
    }
    SUBCASE("an absurdly small constant fails validation") {
        build.fn = "sin_sum";
        build.c_override = 1e-6;
        std::ostringstream out, err;
        CHECK(cli::cmd_build(build, out, err) == cli::kExitInvalid);
        CHECK(err.str().find("validation failed") != std::string::npos);
    }
}

TEST_CASE("sweep rows are independent of the thread count") {
    const HolderFunction f = make_test_function("sin_sum", 1, 2.0);
    const BuildReport rep = full_approximator(f, 0.5);
    auto run = [&](const char* threads) {
        ::setenv("REQU_FORGE_THREADS", threads, 1);
        SweepResult r = sweep_network(
            rep.network, [&](std::span<const double> x) { return f.value(x); }, 500, 9, -1.0, 1.0);
        ::unsetenv("REQU_FORGE_THREADS");
        return r;
    };
    const SweepResult seq = run("1");
    const SweepResult par = run("4");
    REQUIRE(seq.rows.size() == par.rows.size());
    for (std::size_t i = 0; i < seq.rows.size(); ++i) {
        CHECK(seq.rows[i].x == par.rows[i].x);
        CHECK(seq.rows[i].output == par.rows[i].output);
    }
    CHECK(sweep_to_csv(seq, 1) == sweep_to_csv(par, 1));
}

TEST_CASE("formatted numbers round-trip doubles exactly") {
    SplitMix rng(907);
    for (int i = 0; i < 2000; ++i) {
        double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-12.0, 12.0));
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(-6.0) == "-6");
}

TEST_CASE("cli: gadget --save writes a loadable network") {
    TempDir dir;
    std::ostringstream out, err;
    cli::GadgetArgs g;
    g.name = "product2";
    g.probe = {"2", "3"};
    g.save = dir.file("gadget.json");
    REQUIRE(cli::cmd_gadget(g, out, err) == cli::kExitOk);
    const Network net = load_network(cli::read_file(g.save));
    CHECK(net.realize({2.0, 3.0})[0] == doctest::Approx(6.0));
}

TEST_CASE("sweep thread cap honors REQU_FORGE_THREADS") {
    ::setenv("REQU_FORGE_THREADS", "3", 1);
    CHECK(sweep_thread_count() == 3);
    ::unsetenv("REQU_FORGE_THREADS");
    CHECK(sweep_thread_count() >= 1);
}

TEST_CASE("cli: sqrt command verifies the iteration-count rule") {
    std::ostringstream out, err;
    cli::SqrtArgs sq;
    sq.t = 1.0;
    sq.eps = 0.1;
    sq.points = 2000;
    CHECK(cli::cmd_sqrt(sq, out, err) == cli::kExitOk);
    CHECK(out.str().find("iterations 10") != std::string::npos);
    CHECK(out.str().find("PASS") != std::string::npos);

    cli::SqrtArgs bad;
    bad.t = 1.0;
    bad.eps = 1.5;
    std::ostringstream out2;
    CHECK(cli::cmd_sqrt(bad, out2, err) == cli::kExitInvalid);
}

TEST_CASE("cli: repeated runs produce byte-identical artifacts") {
    TempDir a, b;
    auto run = [&](const TempDir& dir) {
        cli::BuildArgs build;
        build.fn = "quadratic";
        build.d = 1;
        build.r = 2.0;
        build.eps = 0.25;
        build.out = dir.file("net.json");
        build.report = dir.file("report.json");
        std::ostringstream out, err;
        REQUIRE(cli::cmd_build(build, out, err) == cli::kExitOk);
        cli::SweepArgs sweep;
        sweep.net_path = build.out;
        sweep.report_path = build.report;
        sweep.fn = "quadratic";
        sweep.points = 1000;
        sweep.seed = 42;
        sweep.out = dir.file("sweep.csv");
        std::ostringstream sout;
        REQUIRE(cli::cmd_sweep(sweep, sout, err) == cli::kExitOk);
    };
    run(a);
    run(b);
    CHECK(cli::read_file(a.file("net.json")) == cli::read_file(b.file("net.json")));
    CHECK(cli::read_file(a.file("report.json")) == cli::read_file(b.file("report.json")));
    CHECK(cli::read_file(a.file("sweep.csv")) == cli::read_file(b.file("sweep.csv")));
}
