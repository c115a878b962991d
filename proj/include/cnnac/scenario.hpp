#pragma once

// Scenario files (TOML).
//
//   preset = "cnn1"          # optional base; every other key overrides it
//   name = "my_run"          # defaults to the preset name, else the file stem
//   delta_bar = 0.0
//
//   [plant]       x0, t_g ("never" or seconds)
//   [controller]  k_s, a_c (array of rows), gamma | gamma_fc + gamma_conv,
//                 rho, theta_bar, sgn ("exact" | "smoothed"), sgn_epsilon
//   [network]     input_rows, input_cols, conv_layers ([[p, m, q], ...]),
//                 fc_widths, alpha1, alpha2, activation, stacking_time
//   [sim]         dt, t_end, seed, init_range, feedforward, stiffness_step,
//                 max_substeps
//   [output]      prefix, rmse_window ([t0, t1]; t1 may be "end")
//
// Unknown keys, wrong types and failed cross-field checks raise
// ScenarioError carrying file and line.

#include <filesystem>
#include <string>
#include <string_view>

#include "cnnac/errors.hpp"
#include "cnnac/sim.hpp"

namespace cnnac {

class ScenarioError : public ConfigError {
 public:
  ScenarioError(const std::string& source, std::size_t line, const std::string& message);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// `source` names the text in diagnostics; the file stem is the default name.
Scenario parse_scenario(std::string_view text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

// Every effective value written explicitly, so parse(emit(s)) == s.
std::string emit_scenario(const Scenario& scenario);

bool same_scenario(const Scenario& a, const Scenario& b);

}  // namespace cnnac
