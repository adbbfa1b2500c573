#pragma once

// Experiment configuration: line-oriented "key = value" text with optional
// [section] headers. Keys may appear at top level or inside the section
// that owns them. Parsing is strict: unknown keys, duplicates, bad values
// and violated constraints are reported with their line number.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rdfront/error.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/solver.hpp"

namespace rdfront {

enum class ExperimentKind {
  kSpeed,
  kSpreadingTheorem,
  kWave,
  kEnvelope,
  kSubadditivity,
  kTwSpeed,
  kInvariantSuite
};

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kSpeed: return "speed";
    case ExperimentKind::kSpreadingTheorem: return "spreading-theorem";
    case ExperimentKind::kWave: return "wave";
    case ExperimentKind::kEnvelope: return "envelope";
    case ExperimentKind::kSubadditivity: return "subadditivity";
    case ExperimentKind::kTwSpeed: return "tw-speed";
    case ExperimentKind::kInvariantSuite: return "invariant-suite";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::kSpeed, ExperimentKind::kSpreadingTheorem, ExperimentKind::kWave,
                 ExperimentKind::kEnvelope, ExperimentKind::kSubadditivity, ExperimentKind::kTwSpeed,
                 ExperimentKind::kInvariantSuite})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct ExperimentConfig {
  // [run]
  ExperimentKind experiment = ExperimentKind::kTwSpeed;
  std::string output = "out";
  int workers = 0;  ///< 0: FRONT_WORKERS or hardware concurrency
  std::optional<std::vector<int>> checks;  ///< acceptance criteria to run; unset: per-experiment default
  // [nonlinearity]
  NonlinearityFamily nonlinearity = NonlinearityFamily::kQuadratic;
  double theta0 = 0.25;
  // [medium]
  MediumFamily medium = MediumFamily::kIidUniform;
  double g_min = 1.0;
  double g_max = 2.0;
  std::uint64_t seed = 1;
  int realizations = 16;
  // [grid]
  GridConfig grid;
  // [experiment]
  std::int64_t N = 200;
  std::int64_t stride = 10;
  std::vector<int> n_list{5, 10, 20, 40, 80};
  double eps = 0.1;
  double T = 200.0;
  double h = 0.9;
  std::optional<double> k;  ///< defaults to theta0
  double h0 = 0.0;          ///< 0: (1 + theta0) / 2
  double burn_in = 5.0;
  double R = 30.0;
  double cauchy_tol = 1e-4;
  double forward_time = 0.0;  ///< 0: long enough to pass xi_last
  std::int64_t xi_first = 50;
  std::int64_t xi_last = 250;
  double q = 0.05;
  double tol = 1e-6;
  std::optional<double> c_plus;
  std::optional<double> c_minus;

  double level_k() const { return k.value_or(theta0); }

  IgnitionNonlinearity make_nonlinearity() const { return {nonlinearity, theta0}; }
  MediumRealization make_medium(std::uint64_t s) const {
    return MediumRealization::sample(s, medium, g_min, g_max);
  }
  ReactionField make_field(std::uint64_t s) const { return {make_nonlinearity(), make_medium(s)}; }
  std::vector<std::uint64_t> seeds() const {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < realizations; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
    return out;
  }

  /// Every result-affecting key with its effective value, one
  /// "section.key = value" per line in a fixed order. Output directory and
  /// worker count are left out: they do not change results. This text is
  /// what the content hash covers.
  std::string canonical() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e || !std::isfinite(out))
    throw ConfigError(line, "key '" + key + "' expects a real number, got '" + v + "'");
  return out;
}

inline std::int64_t parse_int(const std::string& v, int line, const std::string& key) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, "key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline std::uint64_t parse_uint(const std::string& v, int line, const std::string& key) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, "key '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

struct KeySpec {
  std::string section;
  std::function<void(ExperimentConfig&, const std::string&, int, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

inline const std::map<std::string, KeySpec>& key_table() {
  using C = ExperimentConfig;
  static const std::map<std::string, KeySpec> table = [] {
    std::map<std::string, KeySpec> t;
    auto real = [&](const char* sec, const char* name, double C::*field) {
      t[name] = {sec,
                 [field](C& c, const std::string& v, int l, const std::string& k) { c.*field = parse_real(v, l, k); },
                 [field](const C& c) { return fmt_real(c.*field); }};
    };
    auto grid_real = [&](const char* name, double GridConfig::*field) {
      t[name] = {"grid",
                 [field](C& c, const std::string& v, int l, const std::string& k) { c.grid.*field = parse_real(v, l, k); },
                 [field](const C& c) { return fmt_real(c.grid.*field); }};
    };
    auto window_real = [&](const char* name, double WindowPolicy::*field) {
      t[name] = {"grid",
                 [field](C& c, const std::string& v, int l, const std::string& k) { c.grid.window.*field = parse_real(v, l, k); },
                 [field](const C& c) { return fmt_real(c.grid.window.*field); }};
    };
    auto integer = [&](const char* sec, const char* name, std::int64_t C::*field) {
      t[name] = {sec,
                 [field](C& c, const std::string& v, int l, const std::string& k) { c.*field = parse_int(v, l, k); },
                 [field](const C& c) { return std::to_string(c.*field); }};
    };
    auto opt_real = [&](const char* sec, const char* name, std::optional<double> C::*field) {
      t[name] = {sec,
                 [field](C& c, const std::string& v, int l, const std::string& k) { c.*field = parse_real(v, l, k); },
                 [field](const C& c) { return (c.*field) ? fmt_real(*(c.*field)) : std::string("auto"); }};
    };

    t["experiment"] = {"run",
                       [](C& c, const std::string& v, int l, const std::string&) {
                         auto k = parse_experiment_kind(v);
                         if (!k) throw ConfigError(l, "unknown experiment '" + v + "'");
                         c.experiment = *k;
                       },
                       [](const C& c) { return std::string(to_string(c.experiment)); }};
    t["output"] = {"run", [](C& c, const std::string& v, int, const std::string&) { c.output = v; },
                   [](const C& c) { return c.output; }};
    t["workers"] = {"run",
                    [](C& c, const std::string& v, int l, const std::string& k) {
                      const auto n = parse_int(v, l, k);
                      if (n < 0) throw ConfigError(l, "workers must be non-negative");
                      c.workers = static_cast<int>(n);
                    },
                    [](const C& c) { return std::to_string(c.workers); }};
    t["checks"] = {"run",
                   [](C& c, const std::string& v, int l, const std::string& k) {
                     c.checks.emplace();
                     if (v == "none") return;
                     std::stringstream ss(v);
                     std::string item;
                     while (std::getline(ss, item, ',')) {
                       const auto n = parse_int(trim(item), l, k);
                       if (n < 1 || n > 12) throw ConfigError(l, "checks entries must lie in 1..12");
                       c.checks->push_back(static_cast<int>(n));
                     }
                   },
                   [](const C& c) {
                     if (!c.checks) return std::string("auto");
                     if (c.checks->empty()) return std::string("none");
                     std::string s;
                     for (std::size_t i = 0; i < c.checks->size(); ++i)
                       s += (i ? "," : "") + std::to_string((*c.checks)[i]);
                     return s;
                   }};

    t["family"] = {"nonlinearity",
                   [](C& c, const std::string& v, int l, const std::string&) {
                     try { c.nonlinearity = parse_nonlinearity_family(v); }
                     catch (const InvalidArgument& e) { throw ConfigError(l, e.what()); }
                   },
                   [](const C& c) { return std::string(to_string(c.nonlinearity)); }};
    real("nonlinearity", "theta0", &C::theta0);

    t["medium"] = {"medium",
                   [](C& c, const std::string& v, int l, const std::string&) {
                     try { c.medium = parse_medium_family(v); }
                     catch (const InvalidArgument& e) { throw ConfigError(l, e.what()); }
                   },
                   [](const C& c) { return std::string(to_string(c.medium)); }};
    real("medium", "g_min", &C::g_min);
    real("medium", "g_max", &C::g_max);
    t["g"] = {"medium",
              [](C& c, const std::string& v, int l, const std::string& k) {
                const double g = parse_real(v, l, k);
                c.g_min = c.g_max = g;
                c.medium = MediumFamily::kHomogeneous;
              },
              [](const C& c) { return c.g_min == c.g_max ? fmt_real(c.g_min) : std::string("varies"); }};
    t["seed"] = {"medium",
                 [](C& c, const std::string& v, int l, const std::string& k) { c.seed = parse_uint(v, l, k); },
                 [](const C& c) { return std::to_string(c.seed); }};
    t["realizations"] = {"medium",
                         [](C& c, const std::string& v, int l, const std::string& k) {
                           const auto n = parse_int(v, l, k);
                           if (n < 1) throw ConfigError(l, "realizations must be at least 1");
                           c.realizations = static_cast<int>(n);
                         },
                         [](const C& c) { return std::to_string(c.realizations); }};

    grid_real("dx", &GridConfig::dx);
    grid_real("dt", &GridConfig::dt);
    grid_real("decay_estimate", &GridConfig::decay_estimate);
    window_real("ahead", &WindowPolicy::ahead);
    window_real("behind", &WindowPolicy::behind);
    window_real("chunk", &WindowPolicy::chunk);
    window_real("max_length", &WindowPolicy::max_length);
    t["scheme"] = {"grid",
                   [](C& c, const std::string& v, int l, const std::string&) {
                     try { c.grid.scheme = parse_scheme(v); }
                     catch (const InvalidArgument& e) { throw ConfigError(l, e.what()); }
                   },
                   [](const C& c) { return std::string(to_string(c.grid.scheme)); }};

    integer("experiment", "N", &C::N);
    integer("experiment", "stride", &C::stride);
    integer("experiment", "xi_first", &C::xi_first);
    integer("experiment", "xi_last", &C::xi_last);
    t["n_list"] = {"experiment",
                   [](C& c, const std::string& v, int l, const std::string& k) {
                     c.n_list.clear();
                     std::stringstream ss(v);
                     std::string item;
                     while (std::getline(ss, item, ',')) {
                       const auto n = parse_int(trim(item), l, k);
                       if (n < 1) throw ConfigError(l, "n_list entries must be positive");
                       c.n_list.push_back(static_cast<int>(n));
                     }
                   },
                   [](const C& c) {
                     std::string s;
                     for (std::size_t i = 0; i < c.n_list.size(); ++i)
                       s += (i ? "," : "") + std::to_string(c.n_list[i]);
                     return s;
                   }};
    real("experiment", "eps", &C::eps);
    real("experiment", "T", &C::T);
    real("experiment", "h", &C::h);
    opt_real("experiment", "k", &C::k);
    real("experiment", "h0", &C::h0);
    real("experiment", "burn_in", &C::burn_in);
    real("experiment", "R", &C::R);
    real("experiment", "cauchy_tol", &C::cauchy_tol);
    real("experiment", "forward_time", &C::forward_time);
    real("experiment", "q", &C::q);
    real("experiment", "tol", &C::tol);
    opt_real("experiment", "c_plus", &C::c_plus);
    opt_real("experiment", "c_minus", &C::c_minus);
    return t;
  }();
  return table;
}

// g and g_min/g_max address the same values
inline std::vector<std::string> aliases_of(const std::string& key) {
  if (key == "g") return {"g", "g_min", "g_max"};
  if (key == "g_min" || key == "g_max") return {key, "g"};
  return {key};
}

inline const std::vector<std::string>& known_sections() {
  static const std::vector<std::string> s{"run", "nonlinearity", "medium", "grid", "experiment"};
  return s;
}

}  // namespace detail

inline std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  for (const auto& sec : detail::known_sections())
    for (const auto& [name, spec] : detail::key_table())
      if (spec.section == sec && name != "g" && name != "output" && name != "workers") os << sec << "." << name << " = " << spec.get(*this) << "\n";
  return os.str();
}

/// One "key=value" override from the command line.
struct ConfigOverride {
  std::string key, value;
};

inline ConfigOverride parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError(0, "override '" + std::string(text) + "' is not key=value");
  ConfigOverride o{detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1))};
  if (o.key.empty() || o.value.empty()) throw ConfigError(0, "override '" + std::string(text) + "' is not key=value");
  return o;
}

/// Parses configuration text. Cross-key constraints are reported at the
/// line of the key that completes the violation. Overridden keys replace any
/// assignment in the text and are validated with it (reported as line 0).
inline ExperimentConfig parse_config(std::string_view text, const std::vector<ConfigOverride>& overrides = {}) {
  ExperimentConfig cfg;
  const auto& table = detail::key_table();
  std::map<std::string, int> seen;
  std::string section;
  bool have_experiment = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      const auto& secs = detail::known_sections();
      if (std::find(secs.begin(), secs.end(), section) == secs.end())
        throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + s + "'");
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key before '='");
    if (value.empty()) throw ConfigError(line, "missing value for key '" + key + "'");
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (!section.empty() && it->second.section != section)
      throw ConfigError(line, "key '" + key + "' belongs to section [" + it->second.section +
                                  "], not [" + section + "]");
    const auto aliases = detail::aliases_of(key);
    for (const auto& a : aliases) {
      if (auto prev = seen.find(a); prev != seen.end())
        throw ConfigError(line, "duplicate key '" + key + "' (first set at line " +
                                    std::to_string(prev->second) + ", again at line " +
                                    std::to_string(line) + ")");
    }
    seen[key] = line;
    bool overridden = false;
    for (const auto& o : overrides)
      for (const auto& a : aliases) overridden = overridden || o.key == a;
    if (overridden) continue;
    it->second.set(cfg, value, line, key);
    if (key == "experiment") have_experiment = true;
  }
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    const auto& o = overrides[i];
    auto it = table.find(o.key);
    if (it == table.end()) throw ConfigError(0, "override: unknown key '" + o.key + "'");
    for (std::size_t j = 0; j < i; ++j)
      for (const auto& a : detail::aliases_of(o.key))
        if (overrides[j].key == a) throw ConfigError(0, "override: key '" + o.key + "' given twice");
    try {
      it->second.set(cfg, o.value, 0, o.key);
    } catch (const ConfigError& e) {
      throw ConfigError(0, std::string("override: ") + e.what());
    }
    seen[o.key] = 0;
    if (o.key == "experiment") have_experiment = true;
  }
  auto at = [&](std::initializer_list<const char*> keys) {
    int l = 0;
    for (const char* k : keys)
      if (auto f = seen.find(k); f != seen.end()) l = std::max(l, f->second);
    return l;
  };
  if (!have_experiment) throw ConfigError(0, "missing required key 'experiment'");
  if (!(cfg.theta0 > 0.0 && cfg.theta0 < 1.0))
    throw ConfigError(at({"theta0"}), "theta0 must lie in (0, 1)");
  if (!(cfg.g_min > 0.0)) throw ConfigError(at({"g_min", "g"}), "constraint g_min > 0 violated");
  if (cfg.g_min > cfg.g_max)
    throw ConfigError(at({"g_min", "g_max"}), "constraint g_min <= g_max violated (g_min=" +
                                                  detail::fmt_real(cfg.g_min) + ", g_max=" +
                                                  detail::fmt_real(cfg.g_max) + ")");
  if (cfg.medium == MediumFamily::kHomogeneous && cfg.g_min != cfg.g_max)
    throw ConfigError(at({"medium", "g_min", "g_max"}), "homogeneous medium requires g_min == g_max");
  if (!(cfg.grid.dx > 0.0) || !(cfg.grid.dt > 0.0))
    throw ConfigError(at({"dx", "dt"}), "dx and dt must be positive");
  if (!(cfg.grid.dt * cfg.make_nonlinearity().lipschitz() * cfg.g_max < 1.0))
    throw ConfigError(at({"dt", "g_max", "g", "theta0"}), "constraint dt*K*g_max < 1 violated");
  if (cfg.grid.window.ahead < cfg.grid.min_ahead(cfg.theta0))
    throw ConfigError(at({"ahead", "decay_estimate"}),
                      "ahead margin below (1/p)ln(theta0/1e-12) = " + detail::fmt_real(cfg.grid.min_ahead(cfg.theta0)));
  if (cfg.N < 2) throw ConfigError(at({"N"}), "N must be at least 2");
  if (cfg.stride < 1) throw ConfigError(at({"stride"}), "stride must be positive");
  if (cfg.n_list.size() < 3) throw ConfigError(at({"n_list"}), "n_list needs at least three entries");
  for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
    if (cfg.n_list[i] <= cfg.n_list[i - 1]) throw ConfigError(at({"n_list"}), "n_list must be increasing");
  if (!(cfg.h > cfg.theta0 && cfg.h < 1.0)) throw ConfigError(at({"h", "theta0"}), "h must lie in (theta0, 1)");
  if (cfg.k && !(*cfg.k > 0.0 && *cfg.k <= cfg.theta0))
    throw ConfigError(at({"k", "theta0"}), "k must lie in (0, theta0]");
  if (cfg.h0 != 0.0 && !(cfg.h0 > cfg.theta0 && cfg.h0 < 1.0))
    throw ConfigError(at({"h0"}), "h0 must lie in (theta0, 1)");
  if (!(cfg.T > 0.0)) throw ConfigError(at({"T"}), "T must be positive");
  if (!(cfg.eps > 0.0)) throw ConfigError(at({"eps"}), "eps must be positive");
  if (!(cfg.burn_in >= 0.0)) throw ConfigError(at({"burn_in"}), "burn_in must be non-negative");
  if (!(cfg.R > 0.0)) throw ConfigError(at({"R"}), "R must be positive");
  if (!(cfg.q >= 0.0 && cfg.q < cfg.theta0 / 3.0)) throw ConfigError(at({"q", "theta0"}), "q must lie in [0, theta0/3)");
  if (cfg.xi_last < cfg.xi_first) throw ConfigError(at({"xi_first", "xi_last"}), "xi_last must not be below xi_first");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path, const std::vector<ConfigOverride>& overrides = {}) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace rdfront
