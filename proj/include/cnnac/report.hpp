#pragma once

// Text and CSV output for runs, comparisons and summaries.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cnnac/controller.hpp"
#include "cnnac/sim.hpp"

namespace cnnac {

// Columns t, x1.., xd1.., e1.., u1.., theta_norm (t,x1,x2,xd1,xd2,e1,e2,u1,u2,theta_norm for n = 2).
void write_trajectory_csv(std::ostream& out, const RunResult& result);

// Certificate for a finished run, using its measured Jacobian bound as Phi'_M.
GainCertificate run_certificate(const Scenario& scenario, const RunResult& result);

void write_summary(std::ostream& out, const Scenario& scenario, const RunResult& result);

// One preset over several seeds. A run that diverged has no RMSE.
struct CompareCell {
  std::string preset;
  std::vector<std::uint64_t> seeds;
  std::vector<std::optional<Vec>> rmse;
  std::vector<double> divergence_time;  // NaN for runs that finished

  std::size_t diverged() const;
};

struct Spread {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Per component over the finished runs; nullopt when every run diverged.
std::optional<std::vector<Spread>> spread(const CompareCell& cell);

double median(std::vector<double> values);

// Comparison grid: one row per preset, median [min, max] of eps1 and eps2,
// published values alongside where they exist.
void write_compare_table(std::ostream& out, const std::vector<CompareCell>& cells);

}  // namespace cnnac
