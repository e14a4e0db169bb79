#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlqg/error.hpp"
#include "nlqg/table.hpp"

namespace nlqg::cli {

enum class ValueType { real, integer, boolean, string, real_list };

inline const char* to_string(ValueType t) {
  switch (t) {
    case ValueType::real: return "real";
    case ValueType::integer: return "integer";
    case ValueType::boolean: return "boolean";
    case ValueType::string: return "string";
    case ValueType::real_list: return "list of reals";
  }
  return "unknown";
}

using Value = std::variant<double, long long, bool, std::string, std::vector<double>>;

/// One configuration key: dotted path, type, default (as config text),
/// documentation and an optional range check returning an error message.
struct KeySpec {
  std::string key;
  ValueType type;
  std::string default_text;
  std::string doc;
  std::function<std::optional<std::string>(const Value&)> check = {};
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<std::string> unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'')) {
    if (s.back() != s.front()) return std::nullopt;
    return s.substr(1, s.size() - 2);
  }
  return s;
}

inline std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

/// Converts raw config text to a typed value; nullopt on a type mismatch.
inline std::optional<Value> parse_value(ValueType type, const std::string& raw) {
  const std::string text = trim(raw);
  switch (type) {
    case ValueType::real:
      if (auto v = parse_real(text)) return Value{*v};
      return std::nullopt;
    case ValueType::integer:
      if (auto v = parse_integer(text)) return Value{*v};
      return std::nullopt;
    case ValueType::boolean:
      if (text == "true") return Value{true};
      if (text == "false") return Value{false};
      return std::nullopt;
    case ValueType::string: {
      auto s = unquote(text);
      if (!s) return std::nullopt;
      return Value{*s};
    }
    case ValueType::real_list: {
      std::string body = text;
      if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') return std::nullopt;
        body = body.substr(1, body.size() - 2);
      }
      std::vector<double> out;
      if (trim(body).empty()) return Value{out};
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = parse_real(trim(item));
        if (!v) return std::nullopt;
        out.push_back(*v);
      }
      return Value{out};
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> at_least(const Value& v, double lo, const std::string& what) {
  const double x = std::holds_alternative<long long>(v) ? static_cast<double>(std::get<long long>(v))
                                                        : std::get<double>(v);
  if (x >= lo) return std::nullopt;
  return "must be >= " + format_number(lo) + " (" + what + ")";
}

inline std::optional<std::string> positive(const Value& v) {
  const double x = std::holds_alternative<long long>(v) ? static_cast<double>(std::get<long long>(v))
                                                        : std::get<double>(v);
  if (x > 0.0) return std::nullopt;
  return "must be > 0";
}

inline std::function<std::optional<std::string>(const Value&)> one_of(
    std::vector<std::string> options) {
  return [options](const Value& v) -> std::optional<std::string> {
    const auto& s = std::get<std::string>(v);
    if (std::find(options.begin(), options.end(), s) != options.end()) return std::nullopt;
    std::string msg = "must be one of";
    for (const auto& o : options) msg += " '" + o + "'";
    return msg;
  };
}

}  // namespace detail

/// Every key the tool accepts, in documentation order.
inline const std::vector<KeySpec>& schema() {
  using detail::one_of;
  using detail::positive;
  static const std::vector<KeySpec> keys = {
      {"experiment", ValueType::string, "\"evolve\"", "experiment name (see --list-experiments)"},

      {"grid.dim", ValueType::integer, "1", "spatial dimension per particle (1 or 2)",
       [](const Value& v) -> std::optional<std::string> {
         const auto d = std::get<long long>(v);
         if (d == 1 || d == 2) return std::nullopt;
         return "must be 1 or 2";
       }},
      {"grid.points", ValueType::integer, "512", "grid points per axis",
       [](const Value& v) { return detail::at_least(v, 8, "a spectral grid needs at least 8 points"); }},
      {"grid.length", ValueType::real, "40", "periodic box length", positive},

      {"dg.hbar", ValueType::real, "1", "reduced Planck constant", positive},
      {"dg.mass", ValueType::real, "1", "particle mass", positive},
      {"dg.D", ValueType::real, "0", "DG diffusion coefficient (length^2/time)"},
      {"dg.allow_negative_D", ValueType::boolean, "false", "permit D < 0 (ill-posed backward diffusion)"},
      {"dg.r1", ValueType::real, "0", "coefficient of R1 = div j / rho"},
      {"dg.r2", ValueType::real, "0", "coefficient of R2 = lap rho / rho"},
      {"dg.r3", ValueType::real, "0", "coefficient of R3 = j^2 / rho^2"},
      {"dg.r4", ValueType::real, "0", "coefficient of R4 = j . grad rho / rho^2"},
      {"dg.r5", ValueType::real, "0", "coefficient of R5 = (grad rho)^2 / rho^2"},
      {"dg.floor", ValueType::real, "1e-12", "relative density regularization floor", positive},
      {"dg.potential", ValueType::string, "\"none\"", "external potential: none, harmonic, cosine, linear",
       one_of({"none", "harmonic", "cosine", "linear"})},
      {"dg.potential_strength", ValueType::real, "0", "omega (harmonic) or amplitude (cosine, linear)"},
      {"dg.potential_center", ValueType::real, "0", "potential center"},
      {"dg.t_final", ValueType::real, "1", "evolution end time",
       [](const Value& v) { return detail::at_least(v, 0.0, "time runs forward"); }},
      {"dg.dt", ValueType::real, "0", "time step; 0 selects dt_scale times the suggested step",
       [](const Value& v) { return detail::at_least(v, 0.0, "0 means automatic"); }},
      {"dg.dt_scale", ValueType::real, "1", "multiplier on the suggested step when dg.dt = 0", positive},
      {"dg.sample_every", ValueType::integer, "10", "steps between diagnostic rows",
       [](const Value& v) { return detail::at_least(v, 1, "sample at least every step"); }},

      {"init.kind", ValueType::string, "\"gaussian\"", "initial field: gaussian or file",
       one_of({"gaussian", "file"})},
      {"init.x0", ValueType::real, "0", "gaussian center (every axis)"},
      {"init.sigma", ValueType::real, "1", "gaussian position width sigma_0", positive},
      {"init.k0", ValueType::real, "0", "gaussian mean wavenumber (axis 0)"},
      {"init.file", ValueType::string, "\"\"", "wave field file (.bin or .csv) when init.kind = file"},

      {"pair.initial", ValueType::string, "\"epr\"", "two-particle initial state: epr or product",
       one_of({"epr", "product"})},
      {"pair.a.D", ValueType::real, "0", "diffusion coefficient of particle a"},
      {"pair.a.potential", ValueType::string, "\"none\"", "potential on particle a",
       one_of({"none", "harmonic", "cosine", "linear"})},
      {"pair.a.potential_strength", ValueType::real, "0", "strength of the a potential"},
      {"pair.b.D", ValueType::real, "0.05", "diffusion coefficient of particle b"},
      {"pair.b.potential", ValueType::string, "\"none\"", "potential on particle b",
       one_of({"none", "harmonic", "cosine", "linear"})},
      {"pair.b.potential_strength", ValueType::real, "0", "strength of the b potential"},
      {"pair.alt_a.D", ValueType::real, "0", "causal-channel: alternative D of particle a"},
      {"pair.alt_a.potential", ValueType::string, "\"harmonic\"",
       "causal-channel: alternative potential on particle a",
       one_of({"none", "harmonic", "cosine", "linear"})},
      {"pair.alt_a.potential_strength", ValueType::real, "1",
       "causal-channel: alternative a potential strength"},
      {"pair.t_final", ValueType::real, "2", "pair evolution end time",
       [](const Value& v) { return detail::at_least(v, 0.0, "time runs forward"); }},
      {"pair.dt", ValueType::real, "0", "pair time step; 0 selects the suggested step",
       [](const Value& v) { return detail::at_least(v, 0.0, "0 means automatic"); }},
      {"pair.sample_every", ValueType::integer, "50", "steps between reduced-state samples",
       [](const Value& v) { return detail::at_least(v, 1, "sample at least every step"); }},
      {"pair.threshold", ValueType::real, "1e-3", "causal-channel trace-distance threshold", positive},
      {"pair.product_sigma", ValueType::real, "1", "product initial state: width of each factor", positive},

      {"epr.sigma_c", ValueType::real, "1", "EPR correlation width", positive},
      {"epr.sigma_env", ValueType::real, "4", "EPR envelope width", positive},
      {"epr.center", ValueType::real, "0", "EPR center"},
      {"epr.q", ValueType::real, "0", "position outcome of the a measurement"},
      {"epr.k_index", ValueType::integer, "1", "momentum outcome as a multiple of 2 pi / L"},
      {"epr.s_list", ValueType::real_list, "[]",
       "pointer sharpness values; empty selects one decade ending at the resolvable maximum"},
      {"epr.s_count", ValueType::integer, "10", "number of log-spaced s values when s_list is empty",
       [](const Value& v) { return detail::at_least(v, 4, "the fit needs at least 4 points"); }},
      {"epr.n", ValueType::integer, "1", "spatial dimension n of the Delta_1 sweep (1 or 2)",
       [](const Value& v) -> std::optional<std::string> {
         const auto d = std::get<long long>(v);
         if (d == 1 || d == 2) return std::nullopt;
         return "must be 1 or 2";
       }},
      {"epr.D_b", ValueType::real, "0.01", "diffusion coefficient of particle b"},
      {"epr.observable_mode", ValueType::integer, "1", "B = cos(2 pi m x / L) with this m",
       [](const Value& v) { return detail::at_least(v, 1, "a nonconstant cosine"); }},
      {"epr.parallel", ValueType::boolean, "true", "evaluate sweep cells concurrently"},

      {"cosmo.kappa0", ValueType::real, "1.7320508075688772", "gravitational coupling (kappa0^2 = 3 gives H^2 = rho)", positive},
      {"cosmo.w", ValueType::real, "-1.2", "phantom equation of state p = w rho"},
      {"cosmo.b0", ValueType::real, "0", "constant coupling b"},
      {"cosmo.b_table", ValueType::string, "\"\"", "CSV with t,b columns; overrides cosmo.b0 when set"},
      {"cosmo.t0", ValueType::real, "0", "initial time"},
      {"cosmo.a0", ValueType::real, "1", "initial scale factor", positive},
      {"cosmo.rho_m", ValueType::real, "0.3", "initial matter density",
       [](const Value& v) { return detail::at_least(v, 0.0, "densities are non-negative"); }},
      {"cosmo.rho_ph", ValueType::real, "0.7", "initial phantom density",
       [](const Value& v) { return detail::at_least(v, 0.0, "densities are non-negative"); }},
      {"cosmo.t_final", ValueType::real, "1", "integration end time"},
      {"cosmo.sample_interval", ValueType::real, "0.002", "output sampling interval", positive},
      {"cosmo.rtol", ValueType::real, "1e-10", "relative tolerance", positive},
      {"cosmo.atol", ValueType::real, "1e-12", "absolute tolerance", positive},
      {"cosmo.a_max", ValueType::real, "1e6", "big-rip cutoff on the scale factor", positive},
      {"cosmo.eta", ValueType::real, "1e-8", "dead band for the sign of b",
       [](const Value& v) { return detail::at_least(v, 0.0, "a band half-width"); }},
      {"cosmo.trajectory", ValueType::string, "\"\"",
       "reconstruct-b input CSV (t,H,omega_m columns); empty integrates first"},

      {"energy.rho", ValueType::real, "1", "energy density for a single check"},
      {"energy.p", ValueType::real, "0", "pressure for a single check"},
      {"energy.w_list", ValueType::real_list, "[0, -1, -1.2, 0.3333333333333333, 2]",
       "equations of state checked at energy.rho (p = w rho)"},

      {"output.write_field", ValueType::boolean, "true", "evolve: write the final wave field (binary)"},
  };
  return keys;
}

inline const KeySpec* find_key(const std::string& key) {
  for (const auto& k : schema())
    if (k.key == key) return &k;
  return nullptr;
}

/// An experiment from the registry together with its default overrides.
struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::pair<std::string, std::string>> defaults;
};

inline const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> list = {
      {"evolve", "one-particle DG evolution of a gaussian; diagnostics.csv", {}},
      {"evolve-pair", "two-particle separating evolution; norm and purity of particle b",
       {{"grid.points", "128"}, {"grid.length", "32"}}},
      {"epr-delta1", "Delta_1 sweep over the pointer sharpness s; delta1.csv",
       {{"grid.points", "256"}, {"grid.length", "64"}}},
      {"causal-channel", "trace distance of particle b under an a-side parameter change",
       {{"grid.points", "128"}, {"grid.length", "32"}}},
      {"cosmo-integrate", "two-fluid FRW integration; trajectory.csv",
       {{"cosmo.t0", "0.6666666666666666"},
        {"cosmo.rho_m", "1"},
        {"cosmo.rho_ph", "0"},
        {"cosmo.t_final", "10"},
        {"cosmo.sample_interval", "0.01"}}},
      {"cosmo-reconstruct-b", "reconstruct b(t) from a trajectory; b_table.csv", {}},
      {"energy-check", "perfect-fluid weak and dominant energy conditions; energy.csv", {}},
  };
  return list;
}

inline const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return &e;
  return nullptr;
}

/// Error in configuration text, tagged with its origin and line.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Fully resolved configuration: every schema key has a typed value.
class Config {
 public:
  const std::string& experiment() const { return std::get<std::string>(values_.at("experiment")); }

  double real(const std::string& k) const { return std::get<double>(get(k, ValueType::real)); }
  long long integer(const std::string& k) const {
    return std::get<long long>(get(k, ValueType::integer));
  }
  bool boolean(const std::string& k) const { return std::get<bool>(get(k, ValueType::boolean)); }
  const std::string& string(const std::string& k) const {
    return std::get<std::string>(get(k, ValueType::string));
  }
  const std::vector<double>& list(const std::string& k) const {
    return std::get<std::vector<double>>(get(k, ValueType::real_list));
  }

  const Value& get(const std::string& k, ValueType type) const {
    const KeySpec* spec = find_key(k);
    if (!spec || spec->type != type) throw Error("internal: bad config lookup '" + k + "'");
    return values_.at(k);
  }

  /// Sets one key from config text; `where` prefixes error messages.
  void set(const std::string& key, const std::string& raw, const std::string& where) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(where + ": unknown key '" + key + "'");
    auto v = detail::parse_value(spec->type, raw);
    if (!v)
      throw ConfigError(where + ": key '" + key + "' expects " + to_string(spec->type) +
                        ", got '" + detail::trim(raw) + "'");
    if (spec->check)
      if (auto msg = spec->check(*v)) throw ConfigError(where + ": key '" + key + "' " + *msg);
    if (key == "experiment" && !find_experiment(std::get<std::string>(*v)))
      throw ConfigError(where + ": unknown experiment '" + std::get<std::string>(*v) + "'");
    values_[key] = std::move(*v);
  }

  /// Schema defaults followed by the experiment's own defaults.
  static Config defaults_for(const std::string& experiment) {
    const ExperimentInfo* info = find_experiment(experiment);
    if (!info) throw ConfigError("unknown experiment '" + experiment + "'");
    Config c;
    for (const auto& k : schema()) c.set(k.key, k.default_text, "default");
    c.set("experiment", "\"" + experiment + "\"", "default");
    for (const auto& [k, v] : info->defaults) c.set(k, v, "default");
    return c;
  }

  /// key = value lines in schema order, grouped by section.
  std::string to_text() const {
    std::ostringstream out;
    std::string section;
    for (const auto& k : schema()) {
      const auto dot = k.key.find('.');
      const std::string sec = dot == std::string::npos ? "" : k.key.substr(0, dot);
      const std::string name = dot == std::string::npos ? k.key : k.key.substr(dot + 1);
      if (sec != section) {
        out << "\n[" << sec << "]\n";
        section = sec;
      }
      out << name << " = " << text_of(values_.at(k.key)) << "  # " << k.doc << "\n";
    }
    return out.str();
  }

  static std::string text_of(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) return format_number(x);
          else if constexpr (std::is_same_v<T, long long>) return std::to_string(x);
          else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
          else if constexpr (std::is_same_v<T, std::string>) return "\"" + x + "\"";
          else {
            std::string s = "[";
            for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_number(x[i]);
            return s + "]";
          }
        },
        v);
  }

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

/// One `section.key = value` assignment from a config file.
struct Assignment {
  std::string key;
  std::string value;
  int line;
};

/// INI-style text: `[section]` headers, `key = value` lines, `#` or `;`
/// comments. Keys outside a section are top-level (or already dotted).
inline std::vector<Assignment> parse_assignments(const std::string& text, const std::string& origin) {
  std::vector<Assignment> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line;
    bool quoted = false;
    char quote = 0;
    for (char c : raw) {
      if ((c == '"' || c == '\'') && (!quoted || c == quote)) {
        quoted = !quoted;
        quote = c;
      }
      if (!quoted && (c == '#' || c == ';')) break;
      line += c;
    }
    line = detail::trim(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");
    out.push_back({section.empty() ? key : section + "." + key, line.substr(eq + 1), line_no});
  }
  return out;
}

/// Resolves config text against the schema: the experiment's defaults
/// first, then every assignment in file order. Duplicate keys are errors.
/// `fallback` names the experiment when the text does not.
inline Config parse_config_text(const std::string& text, const std::string& origin,
                                const std::string& fallback = "") {
  const auto assignments = parse_assignments(text, origin);
  std::string experiment = fallback;
  for (const auto& a : assignments)
    if (a.key == "experiment") {
      auto v = detail::parse_value(ValueType::string, a.value);
      if (!v) throw ConfigError(origin + ":" + std::to_string(a.line) + ": malformed experiment name");
      experiment = std::get<std::string>(*v);
      if (!find_experiment(experiment))
        throw ConfigError(origin + ":" + std::to_string(a.line) + ": unknown experiment '" +
                          experiment + "'");
    }
  if (experiment.empty()) throw ConfigError(origin + ": missing 'experiment = <name>'");

  Config c = Config::defaults_for(experiment);
  std::map<std::string, int> seen;
  for (const auto& a : assignments) {
    const std::string where = origin + ":" + std::to_string(a.line);
    if (auto it = seen.find(a.key); it != seen.end())
      throw ConfigError(where + ": key '" + a.key + "' already set on line " +
                        std::to_string(it->second));
    seen[a.key] = a.line;
    c.set(a.key, a.value, where);
  }
  return c;
}

inline Config parse_config(const std::filesystem::path& path, const std::string& fallback = "") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string(), fallback);
}

/// Applies a command-line `key=value` override.
inline void apply_override(Config& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = detail::trim(assignment.substr(0, eq));
  if (key == "experiment")
    throw ConfigError("override '" + assignment + "': the experiment cannot be overridden");
  c.set(key, assignment.substr(eq + 1), "override '" + assignment + "'");
}

}  // namespace nlqg::cli
