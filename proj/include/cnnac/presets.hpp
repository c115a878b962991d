#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnnac/sim.hpp"

namespace cnnac {

// Learning rate used by every preset for both blocks of theta.
inline constexpr double kDefaultLearningRate = 1e7;

// Built-in scenarios: cnn1 .. cnn5, dnn, and sudden_change_cnn1 /
// sudden_change_dnn (g switched on at t = 3 s). Throws ConfigError for an
// unknown name.
Scenario make_preset(std::string_view name);

std::vector<std::string> preset_names();

// Published RMSE pair for the six comparison controllers, for side-by-side
// display only; nullopt for other names.
std::optional<std::array<double, 2>> reference_rmse(std::string_view name);

}  // namespace cnnac
