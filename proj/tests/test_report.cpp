#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "cnnac/errors.hpp"
#include "cnnac/presets.hpp"
#include "cnnac/report.hpp"

using namespace cnnac;

namespace {

Scenario short_run(const std::string& preset) {
  Scenario sc = make_preset(preset);
  sc.sim.t_end = 0.05;
  return sc;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("trajectory CSV layout") {
  const Scenario sc = short_run("cnn1");
  const RunResult r = simulate(sc);
  std::ostringstream os;
  write_trajectory_csv(os, r);
  const std::string text = os.str();
  CHECK(text.rfind("t,x1,x2,xd1,xd2,e1,e2,u1,u2,theta_norm\n", 0) == 0);
  CHECK(count_lines(text) == r.samples.size() + 1);
  std::istringstream in(text);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(std::count(first.begin(), first.end(), ',') == 9);
  CHECK(first.rfind("0,1,2,", 0) == 0);
}

TEST_CASE("summary lists metrics, reference values and the certificate") {
  const Scenario sc = short_run("cnn1");
  const RunResult r = simulate(sc);
  std::ostringstream os;
  write_summary(os, sc, r);
  const std::string text = os.str();
  CHECK(text.find("scenario          cnn1") != std::string::npos);
  CHECK(text.find("weights (Xi)      238") != std::string::npos);
  CHECK(text.find("published         0.0397  0.3752") != std::string::npos);
  CHECK(text.find("beta1") != std::string::npos);
  CHECK(text.find("satisfied") != std::string::npos);
  CHECK(text.find("post-change") == std::string::npos);
}

TEST_CASE("certificate is not computable without damping") {
  const Scenario sc = short_run("cnn3");
  const RunResult r = simulate(sc);
  std::ostringstream os;
  write_summary(os, sc, r);
  CHECK(os.str().find("not-computable (rho=0)") != std::string::npos);
  CHECK_FALSE(run_certificate(sc, r).computable);
}

TEST_CASE("summary reports the post-change window") {
  Scenario sc = short_run("cnn1");
  sc.sim.feedforward = Feedforward::Oracle;
  sc.sim.t_end = 1.0;
  sc.plant.t_g = 0.5;
  const RunResult r = simulate(sc);
  std::ostringstream os;
  write_summary(os, sc, r);
  CHECK(os.str().find("post-change rmse") != std::string::npos);
  CHECK(os.str().find("over [0.5, 1]") != std::string::npos);
}

TEST_CASE("median and spread") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), ConfigError);

  CompareCell cell;
  cell.preset = "cnn1";
  cell.seeds = {1, 2, 3};
  cell.rmse = {Vec{0.1, 0.4}, std::nullopt, Vec{0.3, 0.2}};
  cell.divergence_time = {std::nan(""), 2.5, std::nan("")};
  CHECK(cell.diverged() == 1);
  const auto s = spread(cell);
  REQUIRE(s.has_value());
  CHECK((*s)[0].median == doctest::Approx(0.2));
  CHECK((*s)[0].min == 0.1);
  CHECK((*s)[1].max == 0.4);

  CompareCell dead;
  dead.rmse = {std::nullopt};
  CHECK_FALSE(spread(dead).has_value());
}

TEST_CASE("compare table shows medians, published values and divergence counts") {
  CompareCell a;
  a.preset = "cnn1";
  a.seeds = {1};
  a.rmse = {Vec{0.05, 0.3}};
  CompareCell b;
  b.preset = "sudden_change_dnn";
  b.seeds = {1};
  b.rmse = {std::nullopt};
  std::ostringstream os;
  write_compare_table(os, {a, b});
  const std::string text = os.str();
  CHECK(count_lines(text) == 3);
  CHECK(text.find("0.0500 [0.0500, 0.0500]") != std::string::npos);
  CHECK(text.find("0.0397 0.3752") != std::string::npos);
  CHECK(text.find("0/1") != std::string::npos);
  CHECK(text.find("1/1") != std::string::npos);
}
