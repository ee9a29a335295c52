#include <doctest.h>

#include <cmath>
#include <string>

#include "kirchhoff/config.hpp"

using namespace kirchhoff;

TEST_CASE("key-value parsing handles comments, blanks, and whitespace") {
    const KeyValueConfig kv = KeyValueConfig::parse_string(
        "# a comment\n"
        "\n"
        "  model.a = 2.5  \n"
        "model.q=7\n"
        "initial.preset = negative-energy\n"
        "list.vals = 1.0, -2.5,3\n");
    CHECK(kv.has("model.a"));
    CHECK_FALSE(kv.has("model.b"));
    CHECK(kv.get_double("model.a", 0.0) == 2.5);
    CHECK(kv.get_int("model.q", 0) == 7);
    CHECK(kv.get_double("missing", -4.0) == -4.0);
    CHECK(kv.get_string("initial.preset", "") == "negative-energy");
    const std::vector<double> vals = kv.get_double_list("list.vals");
    REQUIRE(vals.size() == 3);
    CHECK(vals[0] == 1.0);
    CHECK(vals[1] == -2.5);
    CHECK(vals[2] == 3.0);
    CHECK(kv.get_double_list("missing").empty());
}

TEST_CASE("parse errors carry the offending line number") {
    try {
        KeyValueConfig::parse_string("model.a = 1\n\nnot a pair\n");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    const KeyValueConfig kv = KeyValueConfig::parse_string("x = 1\nmodel.a = fast\n");
    try {
        kv.get_double("model.a", 0.0);
        FAIL("expected a numeric error");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS((KeyValueConfig::parse_string("= 3\n")), ConfigError);
    CHECK_THROWS_AS((KeyValueConfig::parse_string("a = 1.5x\n").get_double("a", 0.0)), ConfigError);
    CHECK_THROWS_AS((KeyValueConfig::parse_string("a = 1.5\n").get_int("a", 0)), ConfigError);
    CHECK_THROWS_AS((KeyValueConfig::parse_string("a = 1, two\n").get_double_list("a")),
                    ConfigError);
    CHECK_THROWS_AS((KeyValueConfig::parse_string("a = 1\n").require_string("b")), ConfigError);
    CHECK_THROWS_AS((KeyValueConfig::parse_file("/nonexistent/path.cfg")), ConfigError);
}

TEST_CASE("run configuration defaults") {
    const RunConfig rc = RunConfig::from_config(KeyValueConfig::parse_string(""));
    CHECK(rc.domain.kind == DomainKind::Interval);
    CHECK(rc.domain.length_x == M_PI);
    CHECK(rc.domain.n_modes == 64);
    CHECK(rc.domain.n_quad == 130);
    CHECK(rc.model.a == 1.0);
    CHECK(rc.model.b == 1.0);
    CHECK(rc.model.q == 5.0);
    CHECK(rc.solver.t_max == 50.0);
    CHECK(rc.solver.rel_tol == 1e-8);
    CHECK(rc.initial.kind == InitialKind::Preset);
    CHECK(rc.initial.preset == "small-groundstate");
    CHECK(rc.seed == 1234);
    CHECK(rc.geometry_restarts == 6);
    CHECK(rc.bounds_samples == 2000);
}

TEST_CASE("run configuration selects each initial-datum kind") {
    SUBCASE("explicit coefficients") {
        const RunConfig rc = RunConfig::from_config(
            KeyValueConfig::parse_string("initial.coeffs = 0.5, 0, -0.25\n"));
        CHECK(rc.initial.kind == InitialKind::Coefficients);
        REQUIRE(rc.initial.coeffs.size() == 3);
        CHECK(rc.initial.coeffs[2] == -0.25);
    }
    SUBCASE("mode mix") {
        const RunConfig rc = RunConfig::from_config(
            KeyValueConfig::parse_string("initial.mode_mix = 0, 0.3, 3, -0.05\n"));
        CHECK(rc.initial.kind == InitialKind::ModeMix);
        REQUIRE(rc.initial.mode_mix.size() == 2);
        CHECK(rc.initial.mode_mix[1].first == 3);
        CHECK(rc.initial.mode_mix[1].second == -0.05);
        CHECK_THROWS_AS((RunConfig::from_config(
                            KeyValueConfig::parse_string("initial.mode_mix = 0, 0.3, 3\n"))),
                        ConfigError);
    }
    SUBCASE("scaled shape") {
        const RunConfig rc = RunConfig::from_config(KeyValueConfig::parse_string(
            "initial.energy = 2.0\ninitial.shape_mode = 2\ninitial.branch = descending\n"));
        CHECK(rc.initial.kind == InitialKind::ScaledShape);
        CHECK(rc.initial.target_energy == 2.0);
        CHECK(rc.initial.shape_mode == 2);
        CHECK_FALSE(rc.initial.ascending);
        CHECK_THROWS_AS((RunConfig::from_config(KeyValueConfig::parse_string(
                            "initial.energy = 2.0\ninitial.branch = sideways\n"))),
                        ConfigError);
    }
    SUBCASE("named preset") {
        const RunConfig rc = RunConfig::from_config(
            KeyValueConfig::parse_string("initial.preset = critical-descending\n"));
        CHECK(rc.initial.kind == InitialKind::Preset);
        CHECK(rc.initial.preset == "critical-descending");
    }
}

TEST_CASE("run configuration validates the domain and overrides") {
    CHECK_THROWS_AS((RunConfig::from_config(KeyValueConfig::parse_string("domain.kind = disk\n"))),
                    ConfigError);
    const RunConfig rc = RunConfig::from_config(KeyValueConfig::parse_string(
        "domain.kind = rectangle\ndomain.length = 2.0\ndomain.length_y = 3.0\n"
        "domain.n_modes = 16\nsolver.t_max = 5\nseed = 77\ngeometry.restarts = 2\n"));
    CHECK(rc.domain.kind == DomainKind::Rectangle);
    CHECK(rc.domain.length_x == 2.0);
    CHECK(rc.domain.length_y == 3.0);
    CHECK(rc.domain.n_modes == 16);
    CHECK(rc.solver.t_max == 5.0);
    CHECK(rc.seed == 77);
    CHECK(rc.geometry_restarts == 2);
}
