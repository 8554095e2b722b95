#include "decaylab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "decaylab/spectral_ops.hpp"
#include "decaylab/systems.hpp"

namespace decaylab::config {

ConfigError::ConfigError(const std::string& path, int line, const std::string& msg)
    : std::runtime_error(line > 0 ? path + ":" + std::to_string(line) + ": " + msg
                                  : path + ": " + msg),
      line_(line) {}

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Parser {
 public:
  Parser(std::string path, ExperimentSpec& spec) : path_(std::move(path)), spec_(spec) {
    build();
  }

  void apply(const Entry& e) {
    const std::string full = e.section.empty() ? e.key : e.section + "." + e.key;
    const auto it = setters_.find(full);
    if (it == setters_.end()) {
      if (e.section.empty()) fail(e.line, "unknown top-level key '" + e.key + "'");
      fail(e.line, "unknown key '" + e.key + "' in section [" + e.section + "]");
    }
    line_ = e.line;
    seen_[full] = e.line;
    it->second(e.value);
  }

  bool known_section(const std::string& s) const { return sections_.count(s) > 0; }
  bool has_key(const std::string& full) const { return setters_.count(full) > 0; }
  int line_of(const std::string& full) const {
    const auto it = seen_.find(full);
    return it == seen_.end() ? 0 : it->second;
  }
  bool seen(const std::string& full) const { return seen_.count(full) > 0; }

  [[noreturn]] void fail(int line, const std::string& msg) const { throw ConfigError(path_, line, msg); }

 private:
  double num(const std::string& v) const {
    if (v == "inf" || v == "infinity") return spectral::kInfinity;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
      fail(line_, "expected a number, got '" + v + "'");
    }
    return x;
  }
  double positive(const std::string& v) const {
    const double x = num(v);
    if (!(x > 0.0)) fail(line_, "value must be > 0, got " + v);
    return x;
  }
  double nonneg(const std::string& v) const {
    const double x = num(v);
    if (!(x >= 0.0)) fail(line_, "value must be >= 0, got " + v);
    return x;
  }
  long integer(const std::string& v) const {
    const double x = num(v);
    if (x != std::floor(x) || std::abs(x) > 1e9) fail(line_, "expected an integer, got '" + v + "'");
    return static_cast<long>(x);
  }
  bool boolean(const std::string& v) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(line_, "expected true or false, got '" + v + "'");
  }
  std::vector<double> nums(const std::string& v) const {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(num(s));
    return out;
  }
  std::vector<int> ints(const std::string& v) const {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(static_cast<int>(integer(s)));
    return out;
  }
  template <std::size_t N>
  std::array<double, N> fixed(const std::string& v) const {
    const auto xs = nums(v);
    if (xs.size() != N) {
      fail(line_, "expected " + std::to_string(N) + " comma-separated numbers, got " +
                      std::to_string(xs.size()));
    }
    std::array<double, N> out{};
    std::copy(xs.begin(), xs.end(), out.begin());
    return out;
  }
  Vec3 vec3(const std::string& v) const { return fixed<3>(v); }

  void set(const std::string& key, std::function<void(const std::string&)> fn) {
    sections_.insert(key.substr(0, key.find('.')));
    setters_[key] = std::move(fn);
  }

  void build() {
    ExperimentSpec& s = spec_;
    SimConfig& c = s.sim;
    SystemParams& p = c.params;
    InitialDataSpec& ini = c.initial;
    diagnostics::VerifyRequest& v = s.verify;

    auto system_id = [this, &c](const std::string& x) {
      try {
        c.system = system_from_string(x);
      } catch (const std::exception& e) {
        fail(line_, e.what());
      }
    };
    setters_["system"] = system_id;

    set("experiment.name", [&s](const std::string& x) { s.name = x; });
    set("experiment.theorems", [this, &s](const std::string& x) {
      s.theorems.clear();
      for (const auto& id : split_list(x)) {
        if (!kTheoremIds.count(id)) fail(line_, "unknown theorem id '" + id + "'");
        s.theorems.insert(id);
      }
    });
    set("experiment.alpha", [this, &v](const std::string& x) { v.alpha = nonneg(x); });
    set("experiment.m", [this, &v](const std::string& x) {
      v.m_list = ints(x);
      for (int m : v.m_list)
        if (m < 0 || m > 1) fail(line_, "m must be 0 or 1 (tracked derivative orders)");
    });
    set("experiment.s", [this, &v](const std::string& x) {
      v.s_list = nums(x);
      for (double q : v.s_list)
        if (q != 0.0 && q != 0.5 && q != 1.5) fail(line_, "s must be one of 0, 0.5, 1.5 (tracked orders)");
    });
    set("experiment.p", [this, &v](const std::string& x) {
      v.p_list = nums(x);
      for (double q : v.p_list)
        if (q != 2.0 && q != 4.0) fail(line_, "p must be 2 or 4 (tracked exponents; L^inf via linf_m)");
    });
    set("experiment.linf_m", [this, &v](const std::string& x) {
      v.linf_m = ints(x);
      for (int m : v.linf_m)
        if (m < 0 || m > 1) fail(line_, "linf_m must be 0 or 1");
    });
    set("experiment.window", [this, &v](const std::string& x) {
      const auto w = fixed<2>(x);
      if (!(w[0] > 0.0 && w[1] > w[0])) fail(line_, "window must satisfy 0 < lo < hi");
      v.window = diagnostics::Window{w[0], w[1]};
    });
    set("experiment.constant_tolerance",
        [this, &v](const std::string& x) { v.constant_tolerance = nonneg(x); });
    set("experiment.sobolev_samples", [this, &v](const std::string& x) {
      v.sobolev_samples = static_cast<int>(integer(x));
      if (v.sobolev_samples < 1) fail(line_, "sobolev_samples must be >= 1");
    });
    set("experiment.comparison_times", [this, &s](const std::string& x) {
      s.comparison_times = nums(x);
      for (double t : s.comparison_times)
        if (!(t > 0.0)) fail(line_, "comparison times must be > 0");
    });
    set("experiment.seed", [this, &v](const std::string& x) {
      v.seed = static_cast<std::uint64_t>(integer(x));
    });
    set("experiment.formats", [this, &s](const std::string& x) {
      s.formats.clear();
      for (const auto& f : split_list(x)) {
        if (f != "csv" && f != "json") fail(line_, "format must be csv or json, got '" + f + "'");
        s.formats.insert(f);
      }
    });

    set("system.id", system_id);
    set("system.mu", [this, &p](const std::string& x) { p.mu = positive(x); });
    set("system.chi", [this, &p](const std::string& x) { p.chi = nonneg(x); });
    set("system.gamma", [this, &p](const std::string& x) { p.gamma = positive(x); });
    set("system.kappa", [this, &p](const std::string& x) { p.kappa = nonneg(x); });
    set("system.magnetic_nu", [this, &p](const std::string& x) { p.magnetic_nu = positive(x); });
    set("system.omega", [this, &p](const std::string& x) { p.omega = num(x); });
    set("system.tropical_mu", [this, &p](const std::string& x) { p.tropical.mu = positive(x); });
    set("system.tropical_nu", [this, &p](const std::string& x) { p.tropical.nu = positive(x); });
    set("system.tropical_eta", [this, &p](const std::string& x) { p.tropical.eta = positive(x); });
    set("system.generic_gamma",
        [this, &p](const std::string& x) { p.generic_gamma_exponent = positive(x); });
    set("system.generic_c", [this, &p](const std::string& x) { p.generic_ci = fixed<3>(x); });
    set("system.generic_rotation",
        [this, &p](const std::string& x) { p.generic_rotation = fixed<9>(x); });
    set("system.parabolic_components", [this, &p](const std::string& x) {
      p.parabolic_components = static_cast<int>(integer(x));
    });
    set("system.parabolic_c", [this, &p](const std::string& x) { p.parabolic_c = positive(x); });
    set("system.flux", [&p](const std::string& x) { p.flux_library = x; });

    set("lattice.n", [this, &c](const std::string& x) { c.n = static_cast<int>(integer(x)); });
    set("lattice.box_length", [this, &c](const std::string& x) { c.box_length = positive(x); });

    set("initial.kind", [this, &ini](const std::string& x) {
      if (x != "bumps" && x != "gaussian" && x != "taylor_green" && x != "zero") {
        fail(line_, "initial kind must be bumps, gaussian, taylor_green or zero");
      }
      ini.kind = x;
    });
    set("initial.bumps", [this, &ini](const std::string& x) {
      ini.bumps = static_cast<int>(integer(x));
      if (ini.bumps < 1) fail(line_, "bumps must be >= 1");
    });
    set("initial.sigma", [this, &ini](const std::string& x) { ini.sigma = positive(x); });
    set("initial.spread", [this, &ini](const std::string& x) { ini.spread = nonneg(x); });
    set("initial.norm_u", [this, &ini](const std::string& x) { ini.norm_u = nonneg(x); });
    set("initial.norm_other", [this, &ini](const std::string& x) { ini.norm_other = nonneg(x); });
    set("initial.u_amplitude", [this, &ini](const std::string& x) { ini.u_amplitude = vec3(x); });
    set("initial.w_amplitude", [this, &ini](const std::string& x) { ini.w_amplitude = vec3(x); });
    set("initial.seed", [this, &ini](const std::string& x) {
      ini.seed = static_cast<std::uint64_t>(integer(x));
    });

    set("time.dt", [this, &c](const std::string& x) { c.dt = positive(x); });
    set("time.t_end", [this, &c](const std::string& x) { c.t_end = nonneg(x); });
    set("time.checkpoints", [this, &c](const std::string& x) {
      c.checkpoint_times = nums(x);
      std::sort(c.checkpoint_times.begin(), c.checkpoint_times.end());
    });
    set("time.anchors", [this, &c](const std::string& x) { c.anchors = nums(x); });
    set("time.samples_per_decade", [this, &c](const std::string& x) {
      c.samples_per_decade = static_cast<int>(integer(x));
    });
    set("time.first_sample", [this, &c](const std::string& x) { c.first_sample = positive(x); });
    set("time.track_lp", [this, &c](const std::string& x) { c.track_lp = boolean(x); });
    set("time.horizon_factor", [this, &c](const std::string& x) { c.horizon_factor = positive(x); });

    set("constants.alphas", [this, &s](const std::string& x) {
      s.constants.alphas = nums(x);
      for (double a : s.constants.alphas)
        if (a < 0.0 || a > 10.0) fail(line_, "constants alphas must lie in [0, 10]");
    });
    set("constants.m_max", [this, &s](const std::string& x) {
      s.constants.m_max = static_cast<int>(integer(x));
      if (s.constants.m_max < 0 || s.constants.m_max > 12) fail(line_, "m_max must lie in [0, 12]");
    });

    set("sweep.parameter", [this, &s](const std::string& x) {
      if (!s.sweep) s.sweep = SweepSpec{};
      if (!has_key(x) || x.rfind("sweep.", 0) == 0) fail(line_, "cannot sweep over '" + x + "'");
      s.sweep->parameter = x;
    });
    set("sweep.values", [this, &s](const std::string& x) {
      if (!s.sweep) s.sweep = SweepSpec{};
      s.sweep->values = split_list(x);
      if (s.sweep->values.empty()) fail(line_, "sweep values are empty");
    });
  }

  std::string path_;
  ExperimentSpec& spec_;
  int line_ = 0;
  std::map<std::string, std::function<void(const std::string&)>> setters_;
  std::set<std::string> sections_;
  std::map<std::string, int> seen_;
};

std::vector<Entry> lex(const std::string& text, const std::string& path) {
  std::vector<Entry> out;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  std::map<std::string, int> first_seen;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(path, line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(path, line, "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(path, line, "expected key = value");
    Entry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(path, line, "missing key before '='");
    if (e.value.empty()) throw ConfigError(path, line, "missing value for '" + e.key + "'");
    const std::string full = section.empty() ? e.key : section + "." + e.key;
    if (auto it = first_seen.find(full); it != first_seen.end()) {
      throw ConfigError(path, line,
                        "duplicate key '" + full + "' (first set on line " +
                            std::to_string(it->second) + ")");
    }
    first_seen[full] = line;
    out.push_back(std::move(e));
  }
  return out;
}

int line_for_message(const Parser& p, const std::string& msg) {
  static const std::vector<std::pair<std::string, std::string>> hints{
      {"t_end", "time.t_end"},       {"anchor", "time.anchors"},
      {"checkpoint", "time.checkpoints"}, {"dt", "time.dt"},
      {"samples_per_decade", "time.samples_per_decade"},
      {"lattice", "lattice.n"},      {"n must", "lattice.n"},
      {"flux", "system.flux"},       {"rotation", "system.generic_rotation"},
      {"components", "system.parabolic_components"}};
  for (const auto& [needle, key] : hints) {
    if (msg.find(needle) != std::string::npos && p.line_of(key) > 0) return p.line_of(key);
  }
  return 0;
}

ExperimentSpec parse_impl(const std::string& text, const std::string& path,
                          const std::vector<Entry>& overrides) {
  ExperimentSpec spec;
  spec.source_path = path;
  Parser parser(path, spec);
  std::vector<Entry> entries = lex(text, path);
  std::set<std::string> sections;
  for (const auto& e : entries) {
    if (!e.section.empty() && !parser.known_section(e.section)) {
      throw ConfigError(path, e.line, "unknown section [" + e.section + "]");
    }
  }
  for (const auto& e : entries) parser.apply(e);
  for (const auto& e : overrides) parser.apply(e);
  if (!parser.seen("time.anchors")) {
    for (double t0 : {1.0, 5.0}) {
      if (t0 <= spec.sim.t_end) spec.sim.anchors.push_back(t0);
    }
  }

  if (!parser.seen("system") && !parser.seen("system.id")) {
    throw ConfigError(path, 0, "missing mandatory key: system id ([system] id = ... or system = ...)");
  }
  if (parser.seen("system") && parser.seen("system.id")) {
    throw ConfigError(path, parser.line_of("system.id"), "system given twice (top level and [system] id)");
  }
  if (spec.sweep && (spec.sweep->parameter.empty() || spec.sweep->values.empty())) {
    throw ConfigError(path, parser.line_of("sweep.parameter") + parser.line_of("sweep.values"),
                      "[sweep] needs both parameter and values");
  }

  const double alpha = spec.verify.alpha;
  const int alpha_line = parser.line_of("experiment.alpha");
  if (alpha > 10.0) throw ConfigError(path, alpha_line, "alpha must lie in [0, 10]");
  if (spec.theorems.count("error_decay") && alpha >= 1.25) {
    throw ConfigError(path, alpha_line,
                      "alpha = " + format_number(alpha) +
                          " is outside the admissible range 0 <= alpha < 5/4 of error_decay");
  }
  if (spec.theorems.count("error_decay") && spec.sim.anchors.empty()) {
    throw ConfigError(path, parser.line_of("experiment.theorems"),
                      "error_decay needs at least one anchor in [time] anchors");
  }
  if (spec.theorems.count("anchor") && spec.sim.anchors.size() < 2) {
    throw ConfigError(path, parser.line_of("experiment.theorems"),
                      "anchor needs two anchors in [time] anchors");
  }
  if (spec.theorems.count("comparison") && spec.sim.system != SystemId::micropolar) {
    throw ConfigError(path, parser.line_of("experiment.theorems"),
                      "comparison is defined for the micropolar system only");
  }
  if (spec.theorems.count("pressure") &&
      (spec.sim.system == SystemId::generic_linear || spec.sim.system == SystemId::generic_parabolic)) {
    throw ConfigError(path, parser.line_of("experiment.theorems"),
                      "pressure is not defined for " + std::string(to_string(spec.sim.system)));
  }
  if (spec.theorems.count("interpolation") && !spec.sim.track_lp &&
      (!spec.verify.linf_m.empty() ||
       std::any_of(spec.verify.p_list.begin(), spec.verify.p_list.end(), [](double q) { return q != 2.0; }))) {
    throw ConfigError(path, parser.line_of("time.track_lp"),
                      "L^p and L^inf checks need track_lp = true");
  }
  try {
    validate(spec.sim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, line_for_message(parser, e.what()), e.what());
  }
  return spec;
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text, const std::string& path) {
  return parse_impl(text, path, {});
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  ExperimentSpec spec = parse_config_text(ss.str(), path.string());
  return spec;
}

std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec) {
  if (!spec.sweep) return {spec};
  std::ifstream is(spec.source_path);
  if (!is) throw ConfigError(spec.source_path, 0, "cannot reread config file for the sweep");
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto dot = spec.sweep->parameter.find('.');
  std::vector<ExperimentSpec> out;
  for (const auto& v : spec.sweep->values) {
    Entry e;
    if (dot == std::string::npos) {
      e.key = spec.sweep->parameter;
    } else {
      e.section = spec.sweep->parameter.substr(0, dot);
      e.key = spec.sweep->parameter.substr(dot + 1);
    }
    e.value = v;
    ExperimentSpec child = parse_impl(text, spec.source_path, {e});
    child.sweep.reset();
    child.name = spec.name + "_" + e.key + "=" + v;
    out.push_back(std::move(child));
  }
  return out;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  using nlohmann::json;
  auto num = [](double x) -> json {
    if (std::isinf(x)) return "inf";
    return x;
  };
  auto nums = [&](const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
  };
  const SimConfig& c = spec.sim;
  const SystemParams& p = c.params;
  const InitialDataSpec& ini = c.initial;
  const auto& v = spec.verify;
  json j;
  j["experiment"] = {{"name", spec.name},
                     {"theorems", std::vector<std::string>(spec.theorems.begin(), spec.theorems.end())},
                     {"alpha", v.alpha},
                     {"m", v.m_list},
                     {"s", nums(v.s_list)},
                     {"p", nums(v.p_list)},
                     {"linf_m", v.linf_m},
                     {"window", v.window ? json{v.window->first, v.window->second} : json(nullptr)},
                     {"constant_tolerance", v.constant_tolerance},
                     {"sobolev_samples", v.sobolev_samples},
                     {"comparison_times", nums(spec.comparison_times)},
                     {"seed", v.seed},
                     {"formats", std::vector<std::string>(spec.formats.begin(), spec.formats.end())}};
  j["system"] = {{"id", std::string(to_string(c.system))},
                 {"mu", p.mu},
                 {"chi", p.chi},
                 {"gamma", p.gamma},
                 {"kappa", p.kappa},
                 {"magnetic_nu", p.magnetic_nu},
                 {"omega", p.omega},
                 {"tropical_mu", p.tropical.mu},
                 {"tropical_nu", p.tropical.nu},
                 {"tropical_eta", p.tropical.eta},
                 {"generic_gamma", p.generic_gamma_exponent},
                 {"generic_c", p.generic_ci},
                 {"generic_rotation", p.generic_rotation},
                 {"parabolic_components", p.parabolic_components},
                 {"parabolic_c", p.parabolic_c},
                 {"flux", p.flux_library},
                 {"nu_min", p.nu_min()}};
  j["lattice"] = {{"n", c.n}, {"box_length", c.box_length}};
  j["initial"] = {{"kind", ini.kind},         {"bumps", ini.bumps},
                  {"sigma", ini.sigma},       {"spread", ini.spread},
                  {"norm_u", ini.norm_u},     {"norm_other", ini.norm_other},
                  {"u_amplitude", ini.u_amplitude}, {"w_amplitude", ini.w_amplitude},
                  {"seed", ini.seed}};
  j["time"] = {{"dt", c.dt},
               {"t_end", c.t_end},
               {"checkpoints", nums(c.checkpoint_times)},
               {"anchors", nums(c.anchors)},
               {"samples_per_decade", c.samples_per_decade},
               {"first_sample", c.first_sample},
               {"track_lp", c.track_lp},
               {"horizon_factor", c.horizon_factor},
               {"trusted_horizon", trusted_horizon(c)}};
  j["constants"] = {{"alphas", nums(spec.constants.alphas)}, {"m_max", spec.constants.m_max}};
  if (spec.sweep) j["sweep"] = {{"parameter", spec.sweep->parameter}, {"values", spec.sweep->values}};
  j["source"] = spec.source_path;
  return j;
}

}  // namespace decaylab::config
