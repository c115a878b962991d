#include "cnnac/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "cnnac/errors.hpp"
#include "cnnac/jacobian.hpp"
#include "cnnac/presets.hpp"
#include "cnnac/rng.hpp"

namespace cnnac {

std::vector<GradcheckEntry> GradcheckReport::worst(std::size_t count) const {
  std::vector<GradcheckEntry> out = entries;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.rel_err > b.rel_err; });
  if (out.size() > count) out.resize(count);
  return out;
}

NetworkSpec minimal_network() {
  NetworkSpec spec;
  spec.input_rows = 3;
  spec.input_cols = 2;
  spec.conv_layers = {{2, 2, 1}};
  spec.fc_widths = {2};
  spec.alpha1 = 1.0;
  spec.alpha2 = 1.0;
  return spec;
}

NetworkSpec gradcheck_architecture(std::string_view name) {
  if (name == "minimal") return minimal_network();
  return make_preset(name).network;
}

GradcheckReport run_gradcheck(const NetworkSpec& spec, const GradcheckOptions& options) {
  spec.validate();
  if (options.trials == 0) throw ConfigError("gradcheck: trials must be at least 1");
  if (!(options.step > 0.0)) throw ConfigError("gradcheck: step must be positive");

  const std::size_t xi = spec.weight_count();
  const std::size_t outputs = spec.output_dim();
  UniformSource rng(options.seed);

  GradcheckReport report;
  report.entries.resize(xi);
  for (std::size_t k = 0; k < xi; ++k) report.entries[k].index = k;

  Vec theta(xi);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    for (double& v : theta) v = rng.uniform(-options.theta_range, options.theta_range);
    Mat x(spec.input_rows, spec.input_cols);
    for (double& v : x.data()) v = spec.alpha2 * rng.uniform(-options.input_range, options.input_range);

    const JacobianMatrix jac = assemble_full_jacobian(spec, forward(spec, theta, x), theta);
    for (std::size_t k = 0; k < xi; ++k) {
      const double saved = theta[k];
      theta[k] = saved + options.step;
      const Vec plus = forward(spec, theta, x).output;
      theta[k] = saved - options.step;
      const Vec minus = forward(spec, theta, x).output;
      theta[k] = saved;
      for (std::size_t i = 0; i < outputs; ++i) {
        const double numeric = (plus[i] - minus[i]) / (2.0 * options.step);
        const double analytic = jac.matrix(i, k);
        const double rel = std::abs(analytic - numeric) / (1.0 + std::abs(numeric));
        GradcheckEntry& e = report.entries[k];
        if (rel >= e.rel_err) e = {k, analytic, numeric, rel};
      }
    }
  }
  for (const auto& e : report.entries) report.max_rel_err = std::max(report.max_rel_err, e.rel_err);
  report.passed = report.max_rel_err < options.tolerance;
  return report;
}

void write_gradcheck_csv(std::ostream& out, const GradcheckReport& report) {
  out << "index,analytic,numeric,rel_err\n";
  out << std::setprecision(17);
  for (const auto& e : report.entries) out << e.index << ',' << e.analytic << ',' << e.numeric << ',' << e.rel_err << '\n';
}

}  // namespace cnnac
