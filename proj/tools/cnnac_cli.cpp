// cnnac run | compare | gradcheck

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnnac/errors.hpp"
#include "cnnac/gradcheck.hpp"
#include "cnnac/presets.hpp"
#include "cnnac/report.hpp"
#include "cnnac/scenario.hpp"
#include "cnnac/sim.hpp"

namespace fs = std::filesystem;
using namespace cnnac;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kDivergence = 3;
constexpr int kGradcheckFailure = 4;

// A preset name or a path to a scenario file.
Scenario resolve_scenario(const std::string& ref) {
  if (fs::exists(ref)) return load_scenario(ref);
  return make_preset(ref);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string file_stem(const Scenario& sc) { return sc.output.prefix.empty() ? sc.name : sc.output.prefix; }

int cmd_run(const std::string& scenario_ref, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  Scenario sc = resolve_scenario(scenario_ref);
  if (seed) sc.sim.seed = *seed;
  fs::create_directories(out_dir);
  const RunResult result = simulate(sc);
  const std::string stem = file_stem(sc);
  {
    auto csv = open_output(out_dir / (stem + "_traj.csv"));
    write_trajectory_csv(csv, result);
  }
  std::ostringstream summary;
  write_summary(summary, sc, result);
  open_output(out_dir / (stem + "_summary.txt")) << summary.str();
  std::cout << summary.str();
  return kOk;
}

int cmd_compare(std::vector<std::string> refs, std::size_t seeds, const fs::path& out_dir) {
  std::erase_if(refs, [](const std::string& r) { return r.empty(); });
  if (refs.empty()) throw CLI::ValidationError("--presets", "at least one preset is required");
  if (seeds == 0) throw CLI::ValidationError("--seeds", "must be at least 1");
  std::vector<Scenario> scenarios;
  for (const auto& ref : refs) scenarios.push_back(resolve_scenario(ref));
  fs::create_directories(out_dir);

  std::vector<CompareCell> cells;
  bool any_diverged = false;
  auto runs_csv = open_output(out_dir / "compare_runs.csv");
  runs_csv << "preset,seed,eps1,eps2,status\n" << std::setprecision(17);
  for (Scenario sc : scenarios) {
    CompareCell cell;
    cell.preset = sc.name;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
      sc.sim.seed = seed;
      cell.seeds.push_back(seed);
      try {
        const RunResult r = simulate(sc);
        cell.rmse.emplace_back(r.rmse);
        cell.divergence_time.push_back(std::numeric_limits<double>::quiet_NaN());
        runs_csv << sc.name << ',' << seed << ',' << r.rmse[0] << ',' << r.rmse[1] << ",ok\n";
        std::ostringstream summary;
        write_summary(summary, sc, r);
        open_output(out_dir / (file_stem(sc) + "_seed" + std::to_string(seed) + "_summary.txt")) << summary.str();
      } catch (const DivergenceError& err) {
        any_diverged = true;
        cell.rmse.emplace_back(std::nullopt);
        cell.divergence_time.push_back(err.time());
        runs_csv << sc.name << ',' << seed << ",,,diverged at t=" << err.time() << "\n";
        std::cerr << sc.name << " seed " << seed << ": " << err.what() << "\n";
      }
    }
    cells.push_back(std::move(cell));
  }
  std::ostringstream table;
  write_compare_table(table, cells);
  open_output(out_dir / "compare.txt") << table.str();
  std::cout << table.str();
  return any_diverged ? kDivergence : kOk;
}

int cmd_gradcheck(const std::string& arch, const GradcheckOptions& options, const fs::path& out_dir) {
  const NetworkSpec spec = fs::exists(arch) ? load_scenario(arch).network : gradcheck_architecture(arch);
  const GradcheckReport report = run_gradcheck(spec, options);
  fs::create_directories(out_dir);
  const std::string stem = fs::exists(arch) ? fs::path(arch).stem().string() : arch;
  const fs::path csv_path = out_dir / ("gradcheck_" + stem + ".csv");
  {
    auto csv = open_output(csv_path);
    write_gradcheck_csv(csv, report);
  }
  const WeightLayout layout(spec);
  std::cout << "architecture " << arch << ": " << layout.size() << " weights, " << options.trials
            << " trials, step " << options.step << "\n";
  std::cout << "max rel_err " << report.max_rel_err << " (tolerance " << options.tolerance << ") -> "
            << (report.passed ? "pass" : "FAIL") << "\n";
  std::cout << "report: " << csv_path.string() << "\n";
  if (report.passed) return kOk;
  std::cout << "worst coordinates:\n";
  for (const auto& e : report.worst(10)) {
    std::cout << "  " << e.index << " " << layout.describe(e.index) << "  analytic " << e.analytic << "  numeric "
              << e.numeric << "  rel_err " << e.rel_err << "\n";
  }
  return kGradcheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive CNN tracking controller: simulation, comparison and Jacobian checks"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Simulate one scenario and write <name>_traj.csv and <name>_summary.txt");
  run->add_option("scenario", scenario_ref, "Scenario file or preset name")->required();
  run->add_option("--seed", seed, "Weight initialization seed");
  run->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> presets;
  std::size_t seeds = 5;
  auto* compare = app.add_subcommand("compare", "Run presets over several seeds and tabulate median RMSE");
  compare->add_option("--presets", presets, "Preset names or scenario files")->delimiter(',');
  compare->add_option("--seeds", seeds, "Seeds 1..k per preset");
  compare->add_option("--out", out_dir, "Output directory");

  std::string arch = "cnn1";
  GradcheckOptions options;
  auto* grad = app.add_subcommand("gradcheck", "Compare the analytic Jacobian with central finite differences");
  grad->add_option("--arch", arch, "minimal, a preset name, or a scenario file");
  grad->add_option("--trials", options.trials, "Random (theta, X) draws");
  grad->add_option("--step", options.step, "Finite-difference step");
  grad->add_option("--seed", options.seed, "Random seed");
  grad->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(scenario_ref, seed, out_dir);
    if (*compare) return cmd_compare(presets, seeds, out_dir);
    if (*grad) return cmd_gradcheck(arch, options, out_dir);
  } catch (const DivergenceError& err) {
    std::cerr << "divergence: " << err.what() << "\n";
    return kDivergence;
  } catch (const CLI::ValidationError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return kValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kValidation;
  }
  return kValidation;
}
