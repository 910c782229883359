#include <string>

#include "doctest.h"
#include "smlab/config.hpp"
#include "smlab/error.hpp"

using namespace smlab;

namespace {

std::string error_of(const std::string& text, const std::string& section = "", const std::string& key = "") {
    try {
        const auto cfg = ExperimentConfig::parse(text, "exp.ini");
        if (!section.empty()) (void)cfg.section(section).grid(key);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("grid syntax") {
    CHECK(parse_grid("1, 2, 4") == std::vector<double>{1.0, 2.0, 4.0});
    const auto g = parse_grid("geom(0.1, 10, 3)");
    REQUIRE(g.size() == 3);
    CHECK(g[0] == doctest::Approx(0.1));
    CHECK(g[1] == doctest::Approx(1.0));
    CHECK(g[2] == 10.0);
    CHECK(parse_grid("lin(0, 8, 5)") == std::vector<double>{0.0, 2.0, 4.0, 6.0, 8.0});
    CHECK_THROWS_AS(parse_grid("geom(0, 1, 3)"), ConfigError);
    CHECK_THROWS_AS(parse_grid("lin(0, 1)"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1, x"), ConfigError);
}

TEST_CASE("sections, values and comments") {
    const auto cfg = ExperimentConfig::parse(R"(
# experiment
[space]
kind = grid   # trailing comment
dim = 2
side = 10
periodic = yes

[suite.rsk]
t = geom(0.1, 10, 21)
tol.kappa = 0.2
)");
    const auto& s = cfg.section("space");
    CHECK(s.text("kind") == "grid");
    CHECK(s.integer("dim", 1) == 2);
    CHECK(s.number("side") == 10.0);
    CHECK(s.flag("periodic", false));
    CHECK(s.number("spacing", 1.5) == 1.5);
    CHECK_FALSE(s.optional_number("spacing"));
    const auto& r = cfg.section("suite.rsk");
    CHECK(r.grid("t").size() == 21);
    CHECK(r.tolerances() == std::map<std::string, double>{{"kappa", 0.2}});
    CHECK_NOTHROW(r.allow({"t"}, true));
    CHECK_THROWS_AS(r.allow({"t"}, false), ConfigError);
    CHECK_THROWS_AS(cfg.section("operator"), ConfigError);
    CHECK(cfg.section_or_empty("operator").entries().empty());
}

TEST_CASE("errors carry file and line") {
    CHECK(error_of("[a]\nx = 1\nx = 2\n").find("exp.ini:3") != std::string::npos);
    CHECK(error_of("x = 1\n").find("outside") != std::string::npos);
    CHECK(error_of("[a]\nnot a pair\n").find("exp.ini:2") != std::string::npos);
    CHECK(error_of("[a]\n[a]\n").find("duplicate section") != std::string::npos);
    CHECK(error_of("[a\n").find("malformed") != std::string::npos);
    CHECK(error_of("[a]\nt = 3, 2, 1\n", "a", "t").find("increasing") != std::string::npos);
    CHECK(error_of("[a]\nt = 0, 1\n", "a", "t").find("positive") != std::string::npos);
    CHECK(error_of("[a]\nt = 1, inf\n", "a", "t").find("exp.ini:2") != std::string::npos);
}

TEST_CASE("typed accessors reject bad values") {
    const auto cfg = ExperimentConfig::parse("[a]\nn = 2.5\nf = maybe\nx = abc\ni = 1, 2, -3\n", "c");
    const auto& a = cfg.section("a");
    CHECK_THROWS_AS(a.integer("n", 0), ConfigError);
    CHECK_THROWS_AS(a.flag("f", false), ConfigError);
    CHECK_THROWS_AS(a.number("x"), ConfigError);
    CHECK_THROWS_AS(a.number("missing"), ConfigError);
    CHECK_THROWS_AS(a.indices("i"), ConfigError);
    CHECK(a.grid("n", true) == std::vector<double>{2.5});
}
