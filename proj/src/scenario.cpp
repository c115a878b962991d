#include "cnnac/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <toml++/toml.hpp>

#include "cnnac/presets.hpp"

namespace cnnac {

ScenarioError::ScenarioError(const std::string& source, std::size_t line, const std::string& message)
    : ConfigError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
      source_(source),
      line_(line) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::node& node, const std::string& message) const {
    throw ScenarioError(source_, node.source().begin.line, message);
  }
  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ScenarioError(source_, line, message);
  }

  double real(const toml::node& node, const std::string& key) const {
    if (auto v = node.value_exact<double>()) return *v;
    if (auto v = node.value_exact<std::int64_t>()) return static_cast<double>(*v);
    fail(node, key + ": expected a number");
  }

  // Number, or one of the given keywords mapped to `keyword_value`.
  double real_or(const toml::node& node, const std::string& key, std::initializer_list<std::string_view> words,
                 double keyword_value) const {
    if (auto s = node.value_exact<std::string>()) {
      for (auto w : words)
        if (*s == w) return keyword_value;
      fail(node, key + ": unexpected value \"" + *s + "\"");
    }
    return real(node, key);
  }

  std::size_t count(const toml::node& node, const std::string& key, bool allow_zero = false) const {
    const auto v = node.value_exact<std::int64_t>();
    if (!v || *v < 0 || (*v == 0 && !allow_zero)) fail(node, key + ": expected a positive integer");
    return static_cast<std::size_t>(*v);
  }

  std::string text(const toml::node& node, const std::string& key) const {
    if (auto v = node.value_exact<std::string>()) return *v;
    fail(node, key + ": expected a string");
  }

  const toml::array& array(const toml::node& node, const std::string& key) const {
    const auto* a = node.as_array();
    if (!a) fail(node, key + ": expected an array");
    return *a;
  }

  Vec reals(const toml::node& node, const std::string& key) const {
    Vec out;
    for (const auto& item : array(node, key)) out.push_back(real(item, key));
    return out;
  }

  std::vector<std::size_t> counts(const toml::node& node, const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : array(node, key)) out.push_back(count(item, key));
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void apply_plant(const Reader& r, const toml::table& t, PlantConfig& p) {
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (key == "x0") {
      p.x0 = r.reals(node, key);
    } else if (key == "t_g") {
      p.t_g = r.real_or(node, key, {"never", "none"}, kNever);
    } else {
      r.fail(node, "unknown key plant." + key);
    }
  }
}

void apply_controller(const Reader& r, const toml::table& t, ControllerParams& c) {
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (key == "k_s") {
      c.k_s = r.real(node, key);
    } else if (key == "a_c") {
      const auto& rows = r.array(node, key);
      std::vector<Vec> parsed;
      for (const auto& row : rows) parsed.push_back(r.reals(row, key));
      const std::size_t n = parsed.size();
      Mat a(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        if (parsed[i].size() != n) r.fail(node, "a_c: expected a square array of rows");
        for (std::size_t j = 0; j < n; ++j) a(i, j) = parsed[i][j];
      }
      c.a_c = a;
    } else if (key == "gamma") {
      c.gamma = LearningRates::uniform(r.real(node, key));
    } else if (key == "gamma_fc") {
      c.gamma.fc = r.real(node, key);
    } else if (key == "gamma_conv") {
      c.gamma.conv = r.real(node, key);
    } else if (key == "rho") {
      c.rho = r.real(node, key);
    } else if (key == "theta_bar") {
      c.theta_bar = r.real(node, key);
    } else if (key == "sgn") {
      const std::string mode = r.text(node, key);
      if (mode == "exact") {
        c.sgn_mode = SgnMode::Exact;
      } else if (mode == "smoothed") {
        c.sgn_mode = SgnMode::Smoothed;
      } else {
        r.fail(node, "sgn: expected \"exact\" or \"smoothed\"");
      }
    } else if (key == "sgn_epsilon") {
      c.sgn_epsilon = r.real(node, key);
    } else {
      r.fail(node, "unknown key controller." + key);
    }
  }
}

void apply_network(const Reader& r, const toml::table& t, Scenario& sc) {
  NetworkSpec& n = sc.network;
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (key == "input_rows") {
      n.input_rows = r.count(node, key);
    } else if (key == "input_cols") {
      n.input_cols = r.count(node, key);
    } else if (key == "conv_layers") {
      n.conv_layers.clear();
      for (const auto& layer : r.array(node, key)) {
        const auto dims = r.counts(layer, key);
        if (dims.size() != 3) r.fail(layer, "conv_layers: each layer is [filter_rows, filter_cols, filter_count]");
        n.conv_layers.push_back({dims[0], dims[1], dims[2]});
      }
    } else if (key == "fc_widths") {
      n.fc_widths = r.counts(node, key);
    } else if (key == "alpha1") {
      n.alpha1 = r.real(node, key);
    } else if (key == "alpha2") {
      n.alpha2 = r.real(node, key);
    } else if (key == "activation") {
      if (r.text(node, key) != "tanh") r.fail(node, "activation: only \"tanh\" is supported");
      n.activation = Activation::Tanh;
    } else if (key == "stacking_time") {
      sc.stacking_time = r.real(node, key);
    } else {
      r.fail(node, "unknown key network." + key);
    }
  }
}

void apply_sim(const Reader& r, const toml::table& t, SimConfig& s) {
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (key == "dt") {
      s.dt = r.real(node, key);
    } else if (key == "t_end") {
      s.t_end = r.real(node, key);
    } else if (key == "seed") {
      s.seed = r.count(node, key, true);
    } else if (key == "init_range") {
      const Vec range = r.reals(node, key);
      if (range.size() != 2) r.fail(node, "init_range: expected [low, high]");
      s.init_low = range[0];
      s.init_high = range[1];
    } else if (key == "feedforward") {
      const std::string mode = r.text(node, key);
      if (mode == "network") {
        s.feedforward = Feedforward::Network;
      } else if (mode == "oracle") {
        s.feedforward = Feedforward::Oracle;
      } else {
        r.fail(node, "feedforward: expected \"network\" or \"oracle\"");
      }
    } else if (key == "stiffness_step") {
      s.stiffness_step = r.real(node, key);
    } else if (key == "max_substeps") {
      s.max_substeps = r.count(node, key);
    } else {
      r.fail(node, "unknown key sim." + key);
    }
  }
}

void apply_output(const Reader& r, const toml::table& t, OutputConfig& o) {
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (key == "prefix") {
      o.prefix = r.text(node, key);
    } else if (key == "rmse_window") {
      const auto& a = r.array(node, key);
      if (a.size() != 2) r.fail(node, "rmse_window: expected [t0, t1]");
      o.window_start = r.real(*a.get(0), key);
      o.window_end = r.real_or(*a.get(1), key, {"end"}, kNever);
    } else {
      r.fail(node, "unknown key output." + key);
    }
  }
}

const toml::table& section(const Reader& r, const toml::node& node, const std::string& name) {
  const auto* t = node.as_table();
  if (!t) r.fail(node, name + ": expected a table");
  return *t;
}

std::string stem_of(const std::string& source) {
  const std::string stem = std::filesystem::path(source).stem().string();
  return stem.empty() || stem.front() == '<' ? std::string("custom") : stem;
}

// Line of the section a cross-field error message refers to ("network: ...").
std::size_t line_for(const toml::table& root, const std::string& message) {
  const auto colon = message.find(':');
  if (colon == std::string::npos) return 0;
  std::string head = message.substr(0, colon);
  if (head == "trajectory") head = "plant";
  if (const auto* node = root.get(head)) return node->source().begin.line;
  return 0;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string num_list(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
  return s + "]";
}

std::string quoted(const std::string& s) {
  std::ostringstream os;
  os << toml::value<std::string>(s);
  return os.str();
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source) {
  const Reader r(source);
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& err) {
    throw ScenarioError(source, err.source().begin.line, std::string(err.description()));
  }

  Scenario sc;
  std::optional<std::string> name;
  if (const auto* base = root.get("preset")) {
    try {
      sc = make_preset(r.text(*base, "preset"));
    } catch (const ScenarioError&) {
      throw;
    } catch (const ConfigError& err) {
      r.fail(*base, err.what());
    }
  } else {
    sc.name = stem_of(source);
  }

  for (const auto& [k, node] : root) {
    const std::string key(k.str());
    if (key == "preset") continue;
    if (key == "name") {
      name = r.text(node, key);
    } else if (key == "delta_bar") {
      sc.delta_bar = r.real(node, key);
    } else if (key == "plant") {
      apply_plant(r, section(r, node, key), sc.plant);
    } else if (key == "controller") {
      apply_controller(r, section(r, node, key), sc.controller);
    } else if (key == "network") {
      apply_network(r, section(r, node, key), sc);
    } else if (key == "sim") {
      apply_sim(r, section(r, node, key), sc.sim);
    } else if (key == "output") {
      apply_output(r, section(r, node, key), sc.output);
    } else {
      r.fail(node, "unknown key " + key);
    }
  }
  if (name) sc.name = *name;

  try {
    sc.validate();
  } catch (const ConfigError& err) {
    throw ScenarioError(source, line_for(root, err.what()), err.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string(), 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string emit_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "name = " << quoted(sc.name) << "\n";
  os << "delta_bar = " << num(sc.delta_bar) << "\n\n";

  os << "[plant]\n";
  os << "x0 = " << num_list(sc.plant.x0) << "\n";
  os << "t_g = " << (std::isinf(sc.plant.t_g) ? std::string("\"never\"") : num(sc.plant.t_g)) << "\n\n";

  const ControllerParams& c = sc.controller;
  os << "[controller]\n";
  os << "k_s = " << num(c.k_s) << "\n";
  os << "a_c = [";
  for (std::size_t i = 0; i < c.a_c.rows(); ++i) os << (i ? ", " : "") << num_list(c.a_c.row(i));
  os << "]\n";
  if (c.gamma.fc == c.gamma.conv) {
    os << "gamma = " << num(c.gamma.fc) << "\n";
  } else {
    os << "gamma_fc = " << num(c.gamma.fc) << "\n";
    os << "gamma_conv = " << num(c.gamma.conv) << "\n";
  }
  os << "rho = " << num(c.rho) << "\n";
  os << "theta_bar = " << num(c.theta_bar) << "\n";
  os << "sgn = \"" << (c.sgn_mode == SgnMode::Exact ? "exact" : "smoothed") << "\"\n";
  os << "sgn_epsilon = " << num(c.sgn_epsilon) << "\n\n";

  const NetworkSpec& n = sc.network;
  os << "[network]\n";
  os << "input_rows = " << n.input_rows << "\n";
  os << "input_cols = " << n.input_cols << "\n";
  os << "conv_layers = [";
  for (std::size_t j = 0; j < n.conv_layers.size(); ++j) {
    const auto& l = n.conv_layers[j];
    os << (j ? ", " : "") << "[" << l.filter_rows << ", " << l.filter_cols << ", " << l.filter_count << "]";
  }
  os << "]\n";
  os << "fc_widths = [";
  for (std::size_t j = 0; j < n.fc_widths.size(); ++j) os << (j ? ", " : "") << n.fc_widths[j];
  os << "]\n";
  os << "alpha1 = " << num(n.alpha1) << "\n";
  os << "alpha2 = " << num(n.alpha2) << "\n";
  os << "activation = \"tanh\"\n";
  os << "stacking_time = " << num(sc.stacking_time) << "\n\n";

  const SimConfig& s = sc.sim;
  os << "[sim]\n";
  os << "dt = " << num(s.dt) << "\n";
  os << "t_end = " << num(s.t_end) << "\n";
  os << "seed = " << s.seed << "\n";
  os << "init_range = [" << num(s.init_low) << ", " << num(s.init_high) << "]\n";
  os << "feedforward = \"" << (s.feedforward == Feedforward::Network ? "network" : "oracle") << "\"\n";
  os << "stiffness_step = " << num(s.stiffness_step) << "\n";
  os << "max_substeps = " << s.max_substeps << "\n\n";

  os << "[output]\n";
  if (!sc.output.prefix.empty()) os << "prefix = " << quoted(sc.output.prefix) << "\n";
  os << "rmse_window = [" << num(sc.output.window_start) << ", "
     << (std::isinf(sc.output.window_end) ? std::string("\"end\"") : num(sc.output.window_end)) << "]\n";
  return os.str();
}

bool same_scenario(const Scenario& a, const Scenario& b) {
  const auto& ca = a.controller;
  const auto& cb = b.controller;
  return a.name == b.name && a.delta_bar == b.delta_bar && a.plant.x0 == b.plant.x0 && a.plant.t_g == b.plant.t_g &&
         ca.k_s == cb.k_s && ca.a_c == cb.a_c && ca.gamma == cb.gamma && ca.rho == cb.rho &&
         ca.theta_bar == cb.theta_bar && ca.sgn_mode == cb.sgn_mode && ca.sgn_epsilon == cb.sgn_epsilon &&
         a.network == b.network && a.stacking_time == b.stacking_time && a.sim.dt == b.sim.dt &&
         a.sim.t_end == b.sim.t_end && a.sim.seed == b.sim.seed && a.sim.init_low == b.sim.init_low &&
         a.sim.init_high == b.sim.init_high && a.sim.feedforward == b.sim.feedforward &&
         a.sim.stiffness_step == b.sim.stiffness_step && a.sim.max_substeps == b.sim.max_substeps &&
         a.output.prefix == b.output.prefix && a.output.window_start == b.output.window_start &&
         a.output.window_end == b.output.window_end;
}

}  // namespace cnnac
