#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmclab/cli_report.hpp"

using namespace pmclab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = cli::run_cli(args, o, e);
    return {code, o.str(), e.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string f; std::getline(is, f, sep);) v.push_back(f);
    return v;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "pmclab_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("interval subcommand") {
    auto r = run({"interval", "--c3", "0.5"});
    CHECK(r.code == cli::kExitPass);
    CHECK(r.out == "sin²α ∈ (0.5, 0.888889)\n");
    r = run({"interval", "--c3", "-0.25"});
    CHECK(r.out == "sin²α ∈ (0.888889, 1]\n");
    r = run({"interval", "--c3", "0.95"});
    CHECK(r.out == "sin²α ∈ (0.888889, 0.95)\n");
    CHECK(run({"interval", "--c3", "0"}).code == cli::kExitDomain);
    CHECK(run({"interval"}).code == cli::kExitUsage);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitPass);
    CHECK(run({"verify"}).code == cli::kExitPass);
    CHECK(run({"verify", "--c3", "-0.25"}).code == cli::kExitPass);
    CHECK(run({"verify", "--rho-scale", "1.01", "--h", "2.5e-4"}).code == cli::kExitVerifyFail);
    CHECK(run({"verify", "--c3", "0.95", "--u-span", "0.02"}).code == cli::kExitVerifyFail);
    CHECK(run({"verify", "--tol.bogus", "1"}).code == cli::kExitUsage);
    CHECK(run({"family", "--tol.k1_zero", "1"}).code == cli::kExitUsage);
    CHECK(run({"family", "--alpha0", "0.1"}).code == cli::kExitIntegration);
    CHECK(run({"family", "--c3", "0.888888888888888888"}).code == cli::kExitDomain);
    CHECK(run({"family", "--branch", "Neg"}).code == cli::kExitDomain);
    CHECK(run({"family", "--h", "-1"}).code == cli::kExitUsage);
    CHECK(run({"family", "--h", "abc"}).code == cli::kExitUsage);
    CHECK(run({"family", "--v-count", "0"}).code == cli::kExitUsage);
    CHECK(run({"verify", "--u-span", "0.001"}).code == cli::kExitDomain);
    CHECK(cli::exit_code_for(ErrorKind::NonFiniteState) == cli::kExitIntegration);
    CHECK(cli::exit_code_for(ErrorKind::NegativeRadicand) == cli::kExitDomain);
}

TEST_CASE("family writes the grid") {
    auto r = run({"family", "--u-span", "0", "--v-count", "1"});
    REQUIRE(r.code == cli::kExitPass);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == cli::kGridCsvHeader);
    const auto f = split(ls[1]);
    CHECK(f.size() == split(cli::kGridCsvHeader).size());
    CHECK(std::stod(f[0]) == 0.0);
    CHECK(std::stod(f[10]) == doctest::Approx(std::stod(f[11])).epsilon(1e-12));
    CHECK(r.err.find("SpanExhausted") != std::string::npos);

    r = run({"family", "--u-span", "0.01", "--format", "json"});
    REQUIRE(r.code == cli::kExitPass);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("cells").size() == 21 * 5);
}

TEST_CASE("family output matches the golden file") {
    // Default configuration.
    const auto r = run({"family"});
    REQUIRE(r.code == cli::kExitPass);
    const auto got = lines(r.out);
    const auto want = lines(read_file(fs::path(PMCLAB_TEST_DATA_DIR) / "golden_family.csv"));
    REQUIRE(got.size() == want.size());
    CHECK(got[0] == want[0]);
    for (std::size_t i = 1; i < got.size(); ++i) {
        const auto g = split(got[i]);
        const auto w = split(want[i]);
        REQUIRE(g.size() == w.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = std::stod(g[k]);
            const double y = std::stod(w[k]);
            if (std::isnan(y)) {
                CHECK(std::isnan(x));
            } else {
                CHECK(std::abs(x - y) <= 1e-12 * (1.0 + std::abs(y)));
            }
        }
    }
}

TEST_CASE("verify report formats") {
    auto r = run({"verify"});
    REQUIRE(r.code == cli::kExitPass);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("verdict") == "pass");
    CHECK(j.at("residuals").size() == 16);
    CHECK(j.at("params").at("branch") == "LowPos");
    CHECK(r.err.find("verdict: pass") != std::string::npos);

    r = run({"verify", "--format", "csv"});
    const auto ls = lines(r.out);
    CHECK(ls.size() == 17);
    CHECK(ls[0] == "name,kind,max_abs,tolerance,order,pass");

    const auto path = scratch("report.json");
    r = run({"verify", "--out", path.string()});
    CHECK(r.code == cli::kExitPass);
    CHECK(r.out.find("verdict: pass") != std::string::npos);
    CHECK(nlohmann::json::parse(read_file(path)).at("verdict") == "pass");

    r = run({"verify", "--tol.codazzi_a", "0"});
    CHECK(r.code == cli::kExitVerifyFail);
    CHECK(r.err.find("verdict: fail") != std::string::npos);
}

TEST_CASE("config parsing") {
    const auto m = cli::parse_config_text("# family\nc3 = 0.3\n--h=2e-3  # step\n\n tol.k1_zero = 1e-7\n");
    CHECK(m.at("c3") == "0.3");
    CHECK(m.at("h") == "2e-3");
    CHECK(m.at("tol.k1_zero") == "1e-7");
    CHECK_THROWS_AS((void)cli::parse_config_text("c3 = 1\nc3 = 2\n"), cli::UsageError);
    CHECK_THROWS_AS((void)cli::parse_config_text("c3\n"), cli::UsageError);
    CHECK_THROWS_AS((void)cli::config_from_settings({{"colour", "red"}}, cli::OutputFormat::CSV), cli::UsageError);
    CHECK_THROWS_AS((void)cli::config_from_settings({{"window", "0.5"}}, cli::OutputFormat::CSV), cli::UsageError);

    const auto cfg = cli::config_from_settings({{"c3", "-0.25"}, {"v-count", "3"}, {"tol.k1_zero", "1e-7"}},
                                               cli::OutputFormat::JSON);
    CHECK(cfg.params.branch == Branch::Neg);
    CHECK(cfg.setup.v_count == 3);
    CHECK(cfg.setup.suite.tolerances.for_entry("k1_zero", 1e-3) == 1e-7);
    CHECK(cfg.format == cli::OutputFormat::JSON);
}

TEST_CASE("config file, environment and flag precedence") {
    const auto cfgfile = scratch("run.cfg");
    write_file(cfgfile, "u-span = 0\nv-count = 1\nc3 = -0.25\n");

    auto r = run({"family", "--config", cfgfile.string()});
    REQUIRE(r.code == cli::kExitPass);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(std::stod(split(ls[1])[2]) > 1.2);

    // Flags win over the file.
    r = run({"family", "--config", cfgfile.string(), "--c3", "0.5"});
    ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(std::stod(split(ls[1])[2]) == doctest::Approx(0.98511).epsilon(1e-4));

    ::setenv("PMCLAB_CONFIG", cfgfile.c_str(), 1);
    r = run({"family"});
    ::unsetenv("PMCLAB_CONFIG");
    CHECK(lines(r.out).size() == 2);

    write_file(cfgfile, "u-span = 0\nu-span = 1\n");
    CHECK(run({"family", "--config", cfgfile.string()}).code == cli::kExitUsage);
    CHECK(run({"family", "--config", scratch("missing.cfg").string()}).code == cli::kExitUsage);
}

TEST_CASE("convergence subcommand") {
    const auto r = run({"convergence", "--h-list", "2e-3,1e-3,5e-4"});
    REQUIRE(r.code == cli::kExitPass);
    const auto ls = lines(r.out);
    CHECK(ls[0] == "name,kind,h,value,order");
    CHECK(r.out.find("integrator_terminal_alpha") != std::string::npos);
    CHECK(run({"convergence", "--h-list", "1e-3,2e-3,4e-3"}).code == cli::kExitDomain);
    CHECK(run({"convergence", "--h-list", "1e-3,x"}).code == cli::kExitUsage);
}

TEST_CASE("sweep: curvature bound and gamma modulus") {
    cli::SweepOptions o;
    const auto rows = cli::sweep(o);
    CHECK(rows.size() == 8000);
    for (const auto& r : rows) {
        REQUIRE(r.bound_ok.has_value());
        CHECK(*r.bound_ok);
        CHECK(r.gamma_ok);
        CHECK(r.K_closed <= -2.0 + 1e-9);
        CHECK(r.K_limit_8_9 == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(std::abs(r.K_closed - r.K_gauss) <= 1e-9);
    }
    CHECK(rows.front().c3 == doctest::Approx(0.1));
    CHECK(rows.back().c3 == doctest::Approx(0.8));

    const auto r = run({"sweep"});
    CHECK(r.code == cli::kExitPass);
    CHECK(lines(r.out).size() == 8001);
    CHECK(lines(r.out)[0] == cli::kSweepCsvHeader);
    CHECK(run({"sweep", "--c3-min", "-0.1", "--c3-max", "0.1", "--steps", "3"}).code == cli::kExitDomain);
}

TEST_CASE("sweep scales exactly with b^2") {
    cli::SweepOptions one;
    one.samples = 50;
    cli::SweepOptions two = one;
    two.b = 2.0;
    const auto r1 = cli::sweep(one);
    const auto r2 = cli::sweep(two);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r2[i].sin2alpha == r1[i].sin2alpha);
        CHECK(r2[i].K_closed == 4.0 * r1[i].K_closed);
        CHECK(r2[i].K_sup == 4.0 * r1[i].K_sup);
        CHECK(r2[i].ricci_radicand == 4.0 * r1[i].ricci_radicand);
    }
}

TEST_CASE("sweep over both signs of 8 - 9 c3") {
    cli::SweepOptions o;
    o.c3_min = 0.95;
    o.c3_max = 1.2;
    o.steps = 2;
    o.samples = 20;
    const auto hp = cli::sweep(o);
    CHECK(hp.size() == 40);
    for (const auto& r : hp) {
        CHECK(r.branch == Branch::HighPos);
        CHECK(!r.bound_ok.has_value());
        CHECK(r.ricci_radicand < 0.0);
        CHECK(r.gamma_ok);
    }
    o.c3_min = -2.0;
    o.c3_max = -0.25;
    const auto neg = cli::sweep(o);
    for (const auto& r : neg) {
        CHECK(r.branch == Branch::Neg);
        CHECK(r.bound_ok.value_or(false));
    }
    // Closed end of the Neg interval is sampled.
    CHECK(neg.back().sin2alpha == 1.0);
}

TEST_CASE("number formatting") {
    CHECK(cli::format_double(0.1) == "0.10000000000000001");
    CHECK(cli::format_double(-2.0) == "-2");
    CHECK(cli::format_double(std::nan("")) == "nan");
    CHECK(cli::format_double(INFINITY) == "inf");
    CHECK(std::stod(cli::format_double(M_PI)) == M_PI);
}
