#pragma once

// Finite-difference check of assemble_full_jacobian.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "cnnac/network.hpp"

namespace cnnac {

struct GradcheckOptions {
  std::size_t trials = 20;
  double step = 1e-6;        // central difference step h
  double tolerance = 1e-6;   // pass iff every rel_err < tolerance
  std::uint64_t seed = 1;
  double theta_range = 0.5;  // theta ~ U(-r, r)
  double input_range = 1.0;  // X ~ U(-r, r) * alpha2
};

// Worst case of one weight coordinate over all trials and outputs.
// rel_err = |analytic - numeric| / (1 + |numeric|).
struct GradcheckEntry {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;  // one per weight coordinate
  double max_rel_err = 0.0;
  bool passed = false;

  // Entries sorted by descending rel_err, at most `count`.
  std::vector<GradcheckEntry> worst(std::size_t count) const;
};

// One conv layer (2x2, one filter) on a 3x2 input, then one FC layer with
// two outputs.
NetworkSpec minimal_network();

// Named architecture: "minimal" or any preset name.
NetworkSpec gradcheck_architecture(std::string_view name);

GradcheckReport run_gradcheck(const NetworkSpec& spec, const GradcheckOptions& options = {});

// CSV with header index,analytic,numeric,rel_err.
void write_gradcheck_csv(std::ostream& out, const GradcheckReport& report);

}  // namespace cnnac
