#include <doctest.h>

#include <filesystem>

#include "cnnac/presets.hpp"
#include "cnnac/scenario.hpp"

using namespace cnnac;

TEST_CASE("emit then parse reproduces every preset") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const Scenario sc = make_preset(name);
    CHECK(same_scenario(parse_scenario(emit_scenario(sc)), sc));
  }
}

TEST_CASE("round trip keeps custom values exactly") {
  Scenario sc = make_preset("cnn1");
  sc.name = "custom_run";
  sc.controller.gamma = {0.1 + 0.2, 3.0e7};
  sc.controller.sgn_mode = SgnMode::Smoothed;
  sc.controller.theta_bar = 12.345678901234567;
  sc.plant.t_g = 4.5;
  sc.sim.feedforward = Feedforward::Oracle;
  sc.sim.seed = 123456789012345ull;
  sc.output.prefix = "out/run \"a\"";
  sc.output.window_start = 1.0;
  sc.output.window_end = 9.0;
  sc.delta_bar = 0.25;
  const Scenario back = parse_scenario(emit_scenario(sc));
  CHECK(same_scenario(back, sc));
  CHECK(back.controller.gamma.fc == 0.1 + 0.2);
  CHECK(back.output.prefix == sc.output.prefix);
}

TEST_CASE("committed preset files match the built-in presets") {
  const std::filesystem::path dir = CNNAC_PRESET_DIR;
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto path = dir / (name + ".toml");
    REQUIRE(std::filesystem::exists(path));
    CHECK(same_scenario(load_scenario(path), make_preset(name)));
  }
}

TEST_CASE("preset base with overrides") {
  const Scenario sc = parse_scenario(R"(
preset = "cnn4"
[sim]
seed = 7
t_end = 2.5
[plant]
t_g = "never"
)");
  CHECK(sc.name == "cnn4");
  CHECK(sc.controller.rho == 5e5);
  CHECK(sc.sim.seed == 7);
  CHECK(sc.sim.t_end == 2.5);
  CHECK(sc.network.weight_count() == 238);
}

TEST_CASE("name defaults to the file stem without a preset") {
  const std::string text = emit_scenario(make_preset("cnn1"));
  const std::string without_name = text.substr(text.find('\n') + 1);
  CHECK(parse_scenario(without_name, "dir/my_case.toml").name == "my_case");
  CHECK(parse_scenario(without_name).name == "custom");
}

TEST_CASE("unknown keys report file and line") {
  try {
    parse_scenario("preset = \"cnn1\"\n\n[controller]\nk_s = 2.0\nkappa = 1.0\n", "case.toml");
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 5);
    CHECK(e.source() == "case.toml");
    CHECK(std::string(e.what()).find("case.toml:5:") == 0);
    CHECK(std::string(e.what()).find("controller.kappa") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_scenario("bogus = 1\n"), doctest::Contains("unknown key bogus"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("[extra]\n"), doctest::Contains("unknown key extra"), ScenarioError);
}

TEST_CASE("type errors and bad values") {
  CHECK_THROWS_WITH_AS(parse_scenario("preset = \"cnn1\"\n[controller]\nk_s = \"big\"\n"),
                       doctest::Contains("k_s: expected a number"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("preset = \"cnn1\"\n[controller]\nsgn = \"soft\"\n"),
                       doctest::Contains("sgn"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("preset = \"cnn1\"\n[network]\ninput_rows = -3\n"),
                       doctest::Contains("positive integer"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("preset = \"nope\"\n"), doctest::Contains("unknown preset"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("preset = \"cnn1\"\n[sim\n"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.toml"), ScenarioError);
}

TEST_CASE("cross-field errors point at the offending section") {
  try {
    parse_scenario("preset = \"cnn1\"\n\n[network]\nconv_layers = [[5, 6, 2], [3, 3, 2]]\n");
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("conv layer 1: filter width 3") != std::string::npos);
  }
  try {
    parse_scenario("preset = \"cnn1\"\n[controller]\na_c = [[1.0, 0.0], [0.0, -1.0]]\n");
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("Hurwitz") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_scenario("preset = \"cnn1\"\n[network]\nstacking_time = 0.0105\n"),
                       doctest::Contains("stacking_time"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("preset = \"cnn1\"\n[controller]\na_c = [[1.0, 0.0]]\n"),
                       doctest::Contains("square"), ScenarioError);
}
