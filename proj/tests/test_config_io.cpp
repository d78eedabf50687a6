#include <doctest.h>

#include "blowup/config.hpp"
#include "blowup/io.hpp"

#include <cmath>
#include <filesystem>

using namespace blowup;

TEST_SUITE_BEGIN("config");

TEST_CASE("config round trips bit-exactly") {
    ExperimentConfig cfg;
    cfg.phi_params["alpha"] = 1.3;
    cfg.f_p = 2.7182818284590451;
    cfg.grid_n = 512;
    cfg.schedule_tol = 3.0517578125e-05;
    std::string text = cfg.to_json_text();
    ExperimentConfig back = ExperimentConfig::from_json_text(text);
    CHECK(back.canonical_json() == cfg.canonical_json());
    CHECK(back.fingerprint() == cfg.fingerprint());
    CHECK(back.to_json_text() == text);
}

TEST_CASE("fingerprints separate configs; operator key ignores solver knobs") {
    ExperimentConfig a, b;
    b.f_p = 2.6;
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(a.operator_fingerprint() == b.operator_fingerprint());  // same operator
    ExperimentConfig c;
    c.grid_n = 256;
    CHECK(a.operator_fingerprint() != c.operator_fingerprint());
}

TEST_CASE("config validation diagnostics") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{ not json"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json_text(R"({"grid":{"N":8}})"),
                         doctest::Contains("grid.N"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json_text(R"({"grid":{"gamma":0.5}})"),
                         doctest::Contains("gamma"), std::invalid_argument);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(R"({"domain":{"radius":-1.0}})"),
        std::invalid_argument);
}

TEST_CASE("derived objects from config") {
    ExperimentConfig cfg;
    cfg.phi_family = "stable";
    cfg.phi_params = {{"alpha", 0.8}};
    cfg.f_family = "power";
    cfg.f_p = 2.2;
    CHECK(cfg.make_spec().phi(4.0) == doctest::Approx(std::pow(4.0, 0.4)));
    CHECK(cfg.make_nonlinearity().f(2.0) == doctest::Approx(std::pow(2.0, 2.2)));
    cfg.f_family = "custom";
    cfg.f_expression = "t^3";
    CHECK(cfg.make_nonlinearity().f(2.0) == doctest::Approx(8.0));
    cfg.phi_family = "unknown";
    CHECK_THROWS(cfg.make_spec());
}

TEST_CASE("solution csv round trip") {
    BallDomain dom{2, 1.0};
    auto grid = RadialGrid::build(dom, 32, 2.0);
    std::vector<double> u(32), ub(32), vu(32);
    for (int i = 0; i < 32; ++i) {
        u[static_cast<std::size_t>(i)] = std::sqrt(2.0) * i;
        ub[static_cast<std::size_t>(i)] = M_PI * i + 1e-17;
        vu[static_cast<std::size_t>(i)] = 1.0 / (i + 1.0);
    }
    std::string path = std::string(BLOWUP_TEST_TMP) + "/sol.csv";
    io::write_solution_csv(path, *grid, u, ub, vu, "cafe0123cafe0123");
    auto csv = io::read_solution_csv(path);
    CHECK(csv.fingerprint == "cafe0123cafe0123");
    REQUIRE(csv.u.size() == 32);
    for (int i = 0; i < 32; ++i) {
        CHECK(csv.u[static_cast<std::size_t>(i)] == u[static_cast<std::size_t>(i)]);
        CHECK(csv.ubar[static_cast<std::size_t>(i)] == ub[static_cast<std::size_t>(i)]);
        CHECK(csv.r[static_cast<std::size_t>(i)] == grid->node(i));
    }
}

TEST_CASE("report serialization is deterministic") {
    auto rep = full_report(BernsteinSpec::stable(1.0), Nonlinearity::power(2.5));
    std::string a = io::condition_report_json(rep, "fp");
    std::string b = io::condition_report_json(rep, "fp");
    CHECK(a == b);
    CHECK(io::condition_report_table(rep).find("admissible: yes") != std::string::npos);
}

TEST_CASE("fmt17 and fnv1a64") {
    double x = 0.1 + 0.2;
    CHECK(std::stod(io::fmt17(x)) == x);  // round-trip exact
    CHECK(io::fnv1a64("abc") != io::fnv1a64("abd"));
    CHECK(io::hex64(io::fnv1a64("abc")).size() == 16);
}

TEST_SUITE_END();
