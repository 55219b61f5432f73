#include <doctest.h>

#include "epinet/config.hpp"

using namespace epinet;

TEST_CASE("toml subset round-trips scalars, arrays and tables") {
  const auto t = toml::parse(R"(
# header comment
title = "runs"   # trailing comment
count = 42
ratio = 0.5
flag = true
grid = [1, 2, 3]
nested = [[0.0, 12.0], [300.0, 3.0]]

[model]
family = "SIR"
beta = 2e-4

[[sweep.parameter]]
name = "B"

[[sweep.parameter]]
name = "P"
)");
  CHECK(toml::get_string(t, "title", "") == "runs");
  CHECK(toml::get_int(t, "count", "") == 42);
  CHECK(toml::get_number(t, "ratio", "") == 0.5);
  CHECK(toml::find(t, "flag")->as_bool());
  const auto& grid = toml::find(t, "grid")->as_array();
  REQUIRE(grid.size() == 3);
  CHECK(grid[1].as_int() == 2);
  const auto& nested = toml::find(t, "nested")->as_array();
  REQUIRE(nested.size() == 2);
  CHECK(nested[1].as_array()[0].as_number() == 300.0);
  const auto& model = toml::get_table(t, "model", "");
  CHECK(toml::get_number(model, "beta", "model") == 2e-4);
  CHECK(toml::get_string(model, "family", "model") == "SIR");
  // dotted headers nest: [[sweep.parameter]] lives under the sweep table
  const auto& sweep = toml::get_table(t, "sweep", "");
  const auto* params = toml::find(sweep, "parameter");
  REQUIRE(params != nullptr);
  REQUIRE(params->is_array());
  CHECK(params->as_array().size() == 2);
  CHECK(toml::get_string(params->as_array()[0].as_table(), "name", "") == "B");
}

TEST_CASE("parse errors carry line numbers") {
  const auto check_error = [](const char* text, const char* needle) {
    try {
      (void)toml::parse(text);
      FAIL("expected a parse error for: ", text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  check_error("a = [1, 2\n", "array");
  check_error("a = 1\na = 2\n", "duplicate");
  check_error("a = 12abc\n", "cannot parse");
  check_error("a.b = 1\n", "dotted");
  check_error("a = {x = 1}\n", "inline");
  check_error("[t\na = 1\n", "']'");
  check_error("a = \"unterminated\n", "unterminated");
}

TEST_CASE("missing and mistyped fields name their path") {
  const auto t = toml::parse("[model]\nbeta = \"high\"\n");
  const auto& model = toml::get_table(t, "model", "");
  CHECK_THROWS_WITH_AS((void)toml::get_number(model, "beta", "model"),
                       doctest::Contains("model.beta"), ConfigError);
  CHECK_THROWS_WITH_AS((void)toml::get_number(model, "mu", "model"),
                       doctest::Contains("model.mu"), ConfigError);
  CHECK_THROWS_WITH_AS((void)toml::get_table(t, "input", ""),
                       doctest::Contains("input"), ConfigError);
  CHECK_THROWS_WITH_AS(
      toml::reject_unknown_keys(model, {"mu"}, "model"),
      doctest::Contains("model.beta"), ConfigError);
}
