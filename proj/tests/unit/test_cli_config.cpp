#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"

using namespace fracprop;
using namespace fracprop::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path fixtures{FRACPROP_FIXTURES};

json base_config() {
    return json::parse(R"({
      "schema": 1,
      "system": {"m": 1, "n": 1, "betas": [0.5],
                 "entries": [{"i": 1, "j": 1, "terms": [{"alpha": [2], "coeff": 1.0}]}]},
      "data": {"phi": [{"modes": [{"k": [1], "re": 0.5}, {"k": [-1], "re": 0.5}]}]},
      "times": [0.0, 1.0]
    })");
}

std::string error_where(const json& j) {
    try {
        parse_config(j, fs::current_path());
    } catch (const ConfigError& e) {
        return e.where();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "fracprop-unit";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("config errors name the offending JSON pointer") {
    CHECK(error_where(base_config()).empty());

    auto j = base_config();
    j["schema"] = 2;
    CHECK(error_where(j) == "/schema");

    j = base_config();
    j["system"]["betas"] = {0.5, 0.5};
    CHECK(error_where(j) == "/system/betas");

    j = base_config();
    j["system"]["entries"][0]["terms"][0]["alpha"] = {2, 0};
    CHECK(error_where(j).rfind("/system/entries/0/terms/0", 0) == 0);

    j = base_config();
    j["times"] = {0.0, -1.0};
    CHECK(error_where(j) == "/times/1");

    j = base_config();
    j["output"] = {{"format", "xml"}};
    CHECK(error_where(j) == "/output/format");

    j = base_config();
    j["data"]["phi"][0]["modes"][0]["k"] = {1, 2};
    CHECK(error_where(j) == "/data/phi/0/modes/0/k");

    j = base_config();
    j.erase("system");
    CHECK(error_where(j) == "/system");

    j = base_config();
    j["data"]["forcing"] = {{{"field", {{"modes", json::array()}}}, {"time", {{"catalog", {{{"kind", "cubic"}}}}}}}};
    CHECK(error_where(j) == "/data/forcing/0/time/catalog/0/kind");
}

TEST_CASE("entries above the diagonal are rejected when parsing") {
    CHECK_THROWS_AS(load_config(fixtures / "invalid" / "upper_entry.json"), ConfigError);
    CHECK_THROWS_AS(load_config(fixtures / "invalid" / "malformed.json"), ConfigError);
    CHECK_THROWS_AS(load_config(fixtures / "nonexistent.json"), ConfigError);
    // out-of-range orders parse and are reported by validation instead
    const auto cfg = load_config(fixtures / "invalid" / "beta_out_of_range.json");
    CHECK_FALSE(validate_system(cfg.system, 64).valid);
}

TEST_CASE("fixtures load") {
    const auto heat = load_config(fixtures / "heat_1d.json");
    CHECK(heat.system.m() == 1);
    CHECK(heat.times.size() == 4);
    CHECK(heat.tol("oracle", 0.0) == 1e-3);
    CHECK(heat.tol("missing", 7.0) == 7.0);

    const auto pair = load_config(fixtures / "pair_2x2.json");
    CHECK(pair.format == "json");
    REQUIRE(pair.phi.size() == 2);
    CHECK(pair.phi[1].at({1}) == std::complex<double>(0.0, 0.5));

    const auto show = load_config(fixtures / "showcase_3x3.json");
    CHECK(show.system.m() == 3);
    CHECK(show.system.n() == 2);
    CHECK_FALSE(show.forcing.empty());
    CHECK(validate_system(show.system, 64).valid);
}

TEST_CASE("system and field JSON round trip") {
    const auto cfg = load_config(fixtures / "showcase_3x3.json");
    const auto sys = parse_system(system_to_json(cfg.system));
    CHECK(sys.m() == 3);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= i; ++j) CHECK(sys.entry(i, j).terms() == cfg.system.entry(i, j).terms());
    const auto f = parse_field(field_to_json(cfg.phi[0]), 2, "/");
    CHECK(f.modes == cfg.phi[0].modes);
    CHECK(f.period == cfg.phi[0].period);
}

TEST_CASE("bundle JSON round trip") {
    const auto cfg = load_config(fixtures / "pair_2x2.json");
    const auto b = solve(cfg.system, cfg.phi, cfg.forcing, cfg.times);
    const auto text = bundle_to_json(b).dump();
    const auto back = bundle_from_json(json::parse(text), 1, "bundle");
    REQUIRE(back.times == b.times);
    REQUIRE(back.fields.size() == b.fields.size());
    for (std::size_t t = 0; t < b.fields.size(); ++t) {
        for (std::size_t c = 0; c < 2; ++c) {
            for (const auto& k : b.lattice) {
                CHECK(std::abs(back.fields[t][c].at(k) - b.fields[t][c].at(k)) <= 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(bundle_from_json(json::parse(R"({"times": [0, 1], "fields": [[]]})"), 1, "b"),
                    ConfigError);
}

TEST_CASE("grid CSV round trip") {
    SpectralField f(2, 3.0);
    f.modes[{1, 0}] = 0.5;
    f.modes[{-1, 0}] = 0.5;
    f.modes[{0, 2}] = std::complex<double>(0.25, -0.1);
    f.modes[{0, -2}] = std::complex<double>(0.25, 0.1);
    const auto g = modes_to_grid(f, 8);
    const auto path = scratch("grid.csv");
    {
        std::ofstream os(path);
        write_grid_csv(os, g);
    }
    const auto back = grid_to_modes(read_grid_csv(path, 2, 3.0));
    CHECK(back.modes.size() == f.modes.size());
    for (const auto& [k, c] : f.modes) CHECK(std::abs(back.at(k) - c) < 1e-14);

    {
        std::ofstream os(path);
        os << "x1,value\n0,1\n1,oops\n";
    }
    try {
        read_grid_csv(path, 1, 2.0);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.where() == path.string() + ":3");
    }
}

TEST_CASE("bundle CSV holds the real part") {
    const auto cfg = load_config(fixtures / "heat_1d.json");
    const auto b = solve(cfg.system, cfg.phi, cfg.forcing, cfg.times);
    std::ostringstream os;
    const double imag = write_bundle_csv(os, b, 4);
    CHECK(imag < 1e-12);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,component,x1,value");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 4 * 4);
}

TEST_CASE("verification on fixtures") {
    for (const char* name : {"heat_1d.json", "pair_2x2.json", "showcase_3x3.json"}) {
        CAPTURE(name);
        const auto cfg = load_config(fixtures / name);
        for (const char* fam : {"initial", "hypotheses"}) {
            const auto rep = run_verification(cfg, std::string(fam), 1);
            CHECK(rep.passed());
            CHECK_FALSE(rep.checks.empty());
        }
    }
    const auto cfg = load_config(fixtures / "heat_1d.json");
    const auto rep = run_verification(cfg, std::string("residual"), 1);
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.checks[0].status == CheckStatus::Pass);
    const auto j = report_to_json(rep);
    REQUIRE(j.is_array());
    CHECK(j[0]["status"] == "pass");
    CHECK(j[0]["name"] == "residual");
    CHECK_THROWS_AS(run_verification(cfg, std::string("bogus"), 1), ConfigError);
}

TEST_CASE("a corrupted solution file fails the residual check") {
    auto cfg = load_config(fixtures / "pair_2x2.json");
    const auto grid = TimeGrid::graded(1.0, 64, default_grading(0.5));
    const std::vector<double> times(grid.nodes().begin(), grid.nodes().end());
    auto b = solve(cfg.system, cfg.phi, cfg.forcing, times);
    const auto good = scratch("good.json"), bad = scratch("bad.json");
    std::ofstream(good) << bundle_to_json(b).dump();
    b.fields[40][0].modes[{1}] += 0.1;
    b.fields[40][0].modes[{-1}] += 0.1;
    std::ofstream(bad) << bundle_to_json(b).dump();

    cfg.verify.solution = good;
    CHECK(run_verification(cfg, std::string("residual"), 1).passed());
    cfg.verify.solution = bad;
    CHECK_FALSE(run_verification(cfg, std::string("residual"), 1).passed());
}

TEST_CASE("worker count resolution") {
    auto cfg = load_config(fixtures / "heat_1d.json");
    cfg.workers = 3;
    CommonOptions opts;
    ::unsetenv("FRACPROP_WORKERS");
    CHECK(effective_workers(opts, cfg) == 3);
    ::setenv("FRACPROP_WORKERS", "2", 1);
    CHECK(effective_workers(opts, cfg) == 2);
    opts.workers = 5;
    CHECK(effective_workers(opts, cfg) == 5);
    ::unsetenv("FRACPROP_WORKERS");
}

TEST_CASE("leading_block") {
    const auto cfg = load_config(fixtures / "showcase_3x3.json");
    const auto b = leading_block(cfg.system, 2);
    CHECK(b.m() == 2);
    CHECK(b.n() == 2);
    CHECK(b.beta(2) == cfg.system.beta(2));
    CHECK(b.entry(2, 1).terms() == cfg.system.entry(2, 1).terms());
}

TEST_CASE("num prints round-trippable values") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(num(v)) == v);
}
