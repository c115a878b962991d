#include "cnnac/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cnnac/errors.hpp"
#include "cnnac/presets.hpp"

namespace cnnac {

namespace {

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string general(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string pair_text(std::span<const double> v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "  " : "") + fixed(v[k]);
  return s;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const RunResult& result) {
  const std::size_t n = result.samples.empty() ? 0 : result.samples.front().x.size();
  out << 't';
  for (const char* stem : {"x", "xd", "e", "u"})
    for (std::size_t k = 1; k <= n; ++k) out << ',' << stem << k;
  out << ",theta_norm\n";
  out << std::setprecision(17);
  for (const auto& s : result.samples) {
    out << s.t;
    for (const Vec* v : {&s.x, &s.x_d, &s.e, &s.u})
      for (double value : *v) out << ',' << value;
    out << ',' << s.theta_norm << '\n';
  }
}

GainCertificate run_certificate(const Scenario& scenario, const RunResult& result) {
  return gain_certificate(scenario.controller, result.max_jacobian_norm, scenario.delta_bar,
                          !scenario.network.dnn_mode());
}

void write_summary(std::ostream& out, const Scenario& sc, const RunResult& r) {
  const double t1 = std::min(sc.output.window_end, sc.sim.t_end);
  out << "scenario          " << sc.name << "\n";
  out << "seed              " << sc.sim.seed << "\n";
  out << "weights (Xi)      " << r.weight_count << "\n";
  out << "dt                " << general(sc.sim.dt) << "\n";
  out << "t_end             " << general(sc.sim.t_end) << "\n";
  out << "rmse window       [" << general(sc.output.window_start) << ", " << general(t1) << "]\n";
  out << "\n";
  out << "                  eps1    eps2\n";
  out << "rmse              " << pair_text(r.rmse) << "\n";
  if (r.post_change) {
    out << "post-change rmse  " << pair_text(*r.post_change) << "   over [" << general(r.t_g) << ", "
        << general(sc.sim.t_end) << "]\n";
  }
  if (const auto ref = reference_rmse(sc.name)) out << "published         " << pair_text(*ref) << "\n";
  out << "\n";
  out << "max |theta|       " << fixed(r.max_theta_norm) << "   (theta_bar " << general(r.theta_bar) << ")\n";

  const GainCertificate cert = run_certificate(sc, r);
  out << "\ngain certificate\n";
  out << "  Phi'_M (measured max ||J||)  " << general(cert.phi_prime_bound) << "\n";
  out << "  delta_bar                    " << general(cert.delta_bar) << "\n";
  if (cert.computable) {
    out << "  beta1                        " << general(cert.beta1) << "\n";
    out << "  beta2                        " << general(cert.beta2) << "\n";
    out << "  k_s_min                      " << general(cert.k_s_min) << "\n";
    out << "  k_s                          " << general(sc.controller.k_s) << "\n";
  }
  out << "  satisfied                    " << cert.verdict() << "\n";
}

std::size_t CompareCell::diverged() const {
  return static_cast<std::size_t>(std::count_if(rmse.begin(), rmse.end(), [](const auto& v) { return !v; }));
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::optional<std::vector<Spread>> spread(const CompareCell& cell) {
  std::vector<std::vector<double>> per_component;
  for (const auto& v : cell.rmse) {
    if (!v) continue;
    if (per_component.empty()) per_component.resize(v->size());
    for (std::size_t k = 0; k < v->size(); ++k) per_component[k].push_back((*v)[k]);
  }
  if (per_component.empty()) return std::nullopt;
  std::vector<Spread> out;
  for (const auto& values : per_component) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.push_back({median(values), *lo, *hi});
  }
  return out;
}

void write_compare_table(std::ostream& out, const std::vector<CompareCell>& cells) {
  out << std::left << std::setw(20) << "preset" << std::setw(6) << "runs" << std::setw(28) << "eps1 median [min, max]"
      << std::setw(28) << "eps2 median [min, max]" << std::setw(18) << "published" << "diverged\n";
  for (const auto& cell : cells) {
    out << std::setw(20) << cell.preset << std::setw(6) << cell.rmse.size();
    const auto s = spread(cell);
    for (std::size_t k = 0; k < 2; ++k) {
      std::string text = "-";
      if (s && k < s->size()) {
        const Spread& c = (*s)[k];
        text = fixed(c.median) + " [" + fixed(c.min) + ", " + fixed(c.max) + "]";
      }
      out << std::setw(28) << text;
    }
    const auto ref = reference_rmse(cell.preset);
    out << std::setw(18) << (ref ? fixed((*ref)[0]) + " " + fixed((*ref)[1]) : std::string("-"));
    out << cell.diverged() << "/" << cell.rmse.size() << "\n";
  }
}

}  // namespace cnnac
