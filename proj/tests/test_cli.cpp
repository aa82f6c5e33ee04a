#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ringwalk/cli.hpp"
#include "ringwalk/errors.hpp"

using namespace ringwalk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ringwalk_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("angles") {
    CHECK(cli::parse_angle("0.25") == 0.25);
    CHECK(cli::parse_angle("pi") == doctest::Approx(kPi));
    CHECK(cli::parse_angle("pi/3") == doctest::Approx(kPi / 3));
    CHECK(cli::parse_angle("-2*pi/3") == doctest::Approx(-2 * kPi / 3));
    CHECK(cli::parse_angle("2pi") == doctest::Approx(2 * kPi));
    CHECK_THROWS_AS(cli::parse_angle("pie"), InvalidConfig);
    CHECK_THROWS_AS(cli::parse_angle("abc"), InvalidConfig);
}

TEST_CASE("config parsing") {
    std::istringstream in(
        "# sample\n"
        "n_half = 4\n"
        "step_a = 9/2   # trailing comment\n"
        "step_b=7\n"
        "theta1 = pi/6\n"
        "theta2 = pi/2\n"
        "junction_mode = and\n"
        "field_b = 1.5\n"
        "\n"
        "init = 0:A, 2:C:0:1\n");
    const auto cfg = cli::parse_config(in);
    CHECK(cfg.ring.half_sites == 4);
    CHECK(cfg.ring.step_a == Rational(9, 2));
    CHECK(cfg.ring.step_b == Rational(7));
    CHECK(cfg.angles.theta1 == doctest::Approx(kPi / 6));
    CHECK(cfg.junction_mode == JunctionMode::formula_and);
    CHECK(cfg.field_b == 1.5);
    REQUIRE(cfg.init.size() == 2);
    CHECK(cfg.init[1].site == 2);
    CHECK(cfg.init[1].component == 2);
    CHECK(cfg.init[1].weight == cplx(0, 1));

    std::istringstream unknown("n_half = 3\nwhatever = 2\n");
    CHECK_THROWS_AS(cli::parse_config(unknown), InvalidConfig);
    std::istringstream malformed("n_half 3\n");
    CHECK_THROWS_AS(cli::parse_config(malformed), InvalidConfig);
    std::istringstream bad_value("k_samples = many\n");
    CHECK_THROWS_AS(cli::parse_config(bad_value), InvalidConfig);

    cli::ExperimentConfig zero;
    zero.set("step_a", "0");
    CHECK_THROWS_AS(zero.validate(), InvalidConfig);

    // echo -> parse reproduces the same echo
    std::ostringstream text;
    for (const auto& [k, v] : cfg.echo()) text << k << " = " << v << '\n';
    std::istringstream again(text.str());
    CHECK(cli::parse_config(again).echo() == cfg.echo());
}

TEST_CASE("number formatting") {
    CHECK(cli::format_double(0.5) == "0.5");
    CHECK(cli::format_double(-3.0) == "-3");
    CHECK(cli::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV round trips at 17 digits") {
    const auto dir = scratch("csv");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-kPi, kPi);

    std::vector<double> ks;
    for (int i = 0; i < 7; ++i) ks.push_back(u(rng));
    SpectrumResult r;
    r.grid = MomentumGrid::sweep_k_a(ks, 0.0);
    r.points = r.grid.points();
    for (int i = 0; i < 7; ++i) {
        std::vector<double> band;
        for (int b = 0; b < 5; ++b) band.push_back(u(rng));
        band.push_back(std::nextafter(kPi, 0.0));
        band.push_back(std::numeric_limits<double>::denorm_min());
        r.bands.push_back(band);
    }
    cli::write_spectrum_csv(dir / "s.csv", r);
    CHECK(slurp(dir / "s.csv").rfind("k,branch,omega\n", 0) == 0);
    const auto rows = cli::read_spectrum_csv(dir / "s.csv");
    REQUIRE(rows.size() == 7 * 7);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].k == ks[i / 7]);
        CHECK(rows[i].branch == static_cast<int>(i % 7));
        CHECK(rows[i].omega == r.bands[i / 7][i % 7]);
    }

    std::vector<std::array<double, 4>> prob(5);
    for (auto& site : prob)
        for (double& x : site) x = std::abs(u(rng)) / 1e7;
    cli::write_distribution_csv(dir / "d.csv", prob);
    CHECK(slurp(dir / "d.csv").rfind("site,comp,prob\n", 0) == 0);
    const auto drows = cli::read_distribution_csv(dir / "d.csv");
    REQUIRE(drows.size() == 20);
    for (const auto& row : drows) CHECK(row.prob == prob[row.site][parse_component(row.comp)]);

    CHECK(slurp(dir / "d.csv").find('\r') == std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    const auto stem = (dir / "bands").string();

    SUBCASE("success writes csv, metadata and a plot script") {
        const auto o = invoke({"spectrum", "--set", "n_half=3", "--set", "k_samples=5", "-o", stem});
        CHECK(o.code == 0);
        const auto csv = slurp(stem + ".csv");
        CHECK(csv.rfind("k,branch,omega\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5 * 28);
        CHECK(fs::exists(stem + ".meta"));
        CHECK(slurp(stem + ".gp").find("bands.csv") != std::string::npos);
    }
    SUBCASE("no config prints usage") {
        const auto o = invoke({"spectrum"});
        CHECK(o.code == 1);
        CHECK(o.err.find("--config") != std::string::npos);
    }
    SUBCASE("no subcommand") { CHECK(invoke({}).code == 1); }
    SUBCASE("unknown subcommand") { CHECK(invoke({"frobnicate"}).code == 1); }
    SUBCASE("step_a = 0 names the invariant") {
        const auto o = invoke({"spectrum", "--set", "step_a=0", "-o", stem});
        CHECK(o.code == 1);
        CHECK(o.err.find("step_a must be positive") != std::string::npos);
    }
    SUBCASE("unknown key") {
        const auto o = invoke({"spectrum", "--set", "bogus=1", "-o", stem});
        CHECK(o.code == 1);
        CHECK(o.err.find("bogus") != std::string::npos);
    }
    SUBCASE("missing config file") {
        CHECK(invoke({"evolve", "--config", (dir / "nope.cfg").string()}).code == 1);
    }
    SUBCASE("unknown figure") {
        const auto o = invoke({"reproduce-figure", "99", "-d", dir.string()});
        CHECK(o.code == 1);
        CHECK(o.err.find("99") != std::string::npos);
    }
    SUBCASE("ab-shift with a field") {
        const auto o = invoke({"ab-shift", "--field", "2", "--set", "n_half=4", "--set", "k_samples=8", "-o",
                               (dir / "ab").string()});
        CHECK(o.code == 0);
        CHECK(o.out.find("rigid shift confirmed") != std::string::npos);
    }
    SUBCASE("audit of every grid kind") {
        for (const char* g : {"concentric", "moire", "swapped"}) {
            const auto o = invoke({"audit", "--set", std::string("grid=") + g, "--set", "n_outer=6", "--set",
                                   "n_inner=4", "--set", "n_half=3", "-o", (dir / g).string()});
            CHECK(o.code == 0);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical files") {
    const auto dir = scratch("repeat");
    std::ofstream(dir / "run.cfg") << "n_half = 4\nstep_a = 3\nstep_b = 2\ntheta1 = pi/4\ntheta2 = pi/4\n"
                                      "k_samples = 16\nsteps = 25\nfield_b = 0.7\n";
    for (const char* cmd : {"spectrum", "evolve", "swap", "moire"}) {
        const auto a = (dir / (std::string(cmd) + "_1")).string();
        const auto b = (dir / (std::string(cmd) + "_2")).string();
        std::vector<std::string> base{cmd, "-c", (dir / "run.cfg").string(), "--set", "n_outer=6", "--set", "n_inner=4"};
        auto first = base, second = base;
        first.insert(first.end(), {"-o", a});
        second.insert(second.end(), {"-o", b});
        REQUIRE(invoke(first).code == 0);
        REQUIRE(invoke(second).code == 0);
        CHECK(slurp(a + ".csv") == slurp(b + ".csv"));
        CHECK(!slurp(a + ".csv").empty());
    }
    fs::remove_all(dir);
}

TEST_CASE("figure table") {
    const auto ids = cli::figure_ids();
    for (const char* id : {"2", "3a", "3i", "4a", "5L", "5R", "6b", "8a", "8f", "10"}) CHECK(cli::is_figure_id(id));
    CHECK(!cli::is_figure_id("99"));
    CHECK(ids.size() == 1 + 9 + 2 + 2 + 2 + 6 + 1);

    const auto dir = scratch("fig");
    const auto files = cli::reproduce_figure("10", dir);
    CHECK(!files.empty());
    for (const auto& f : files) CHECK(fs::exists(f));
    CHECK(slurp(dir / "fig10.csv").rfind("site,comp,prob\n", 0) == 0);
    CHECK_THROWS_AS(cli::reproduce_figure("99", dir), InvalidConfig);
    fs::remove_all(dir);
}
