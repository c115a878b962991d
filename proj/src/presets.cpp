#include "cnnac/presets.hpp"

#include <algorithm>
#include <cctype>

#include "cnnac/errors.hpp"

namespace cnnac {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Mat diag2(double v) { return Mat{{v, 0.0}, {0.0, v}}; }

Scenario cnn1() {
  Scenario sc;
  sc.name = "cnn1";
  sc.plant.x0 = {1.0, 2.0};
  sc.controller.k_s = 1.0;
  sc.controller.rho = 1e5;
  sc.controller.a_c = diag2(-10.0);
  sc.controller.gamma = LearningRates::uniform(kDefaultLearningRate);
  sc.controller.theta_bar = 10.0;
  sc.network.input_rows = 10;
  sc.network.input_cols = 6;
  sc.network.conv_layers = {{5, 6, 2}, {3, 2, 2}};
  sc.network.fc_widths = {8, 8, 2};
  sc.network.alpha1 = 100.0;
  sc.network.alpha2 = 0.01;
  sc.stacking_time = 0.1;
  return sc;
}

}  // namespace

Scenario make_preset(std::string_view name) {
  const std::string key = lower(name);
  Scenario sc = cnn1();
  if (key == "cnn1") return sc;
  if (key == "cnn2") {
    sc.stacking_time = 0.01;
  } else if (key == "cnn3") {
    sc.controller.a_c = diag2(-1.0);
    sc.controller.rho = 0.0;
  } else if (key == "cnn4") {
    sc.controller.rho = 5e5;
  } else if (key == "cnn5") {
    sc.controller.a_c = diag2(-50.0);
  } else if (key == "dnn") {
    sc.network.input_rows = 1;
    sc.network.conv_layers.clear();
    sc.network.fc_widths = {8, 8, 8, 4, 2};
  } else if (key == "sudden_change_cnn1") {
    sc.plant.t_g = 3.0;
  } else if (key == "sudden_change_dnn") {
    sc = make_preset("dnn");
    sc.plant.t_g = 3.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  sc.name = key;
  return sc;
}

std::vector<std::string> preset_names() {
  return {"cnn1", "cnn2", "cnn3", "cnn4", "cnn5", "dnn", "sudden_change_cnn1", "sudden_change_dnn"};
}

std::optional<std::array<double, 2>> reference_rmse(std::string_view name) {
  // Table of published tracking RMSE (eps1, eps2).
  const std::string key = lower(name);
  if (key == "cnn1") return std::array{0.0397, 0.3752};
  if (key == "cnn2") return std::array{0.0384, 0.3680};
  if (key == "cnn3") return std::array{0.2160, 2.4030};
  if (key == "cnn4") return std::array{0.0716, 0.7524};
  if (key == "cnn5") return std::array{0.1291, 1.5446};
  if (key == "dnn") return std::array{0.0490, 0.4757};
  return std::nullopt;
}

}  // namespace cnnac
