#pragma once

// Flat key=value experiment configuration. '#' starts a comment, blank lines
// are skipped, list values are comma-separated. Exactly one of m, k, s_n may
// hold more than one value; that key becomes the sweep variable (m when all
// are scalar). Unknown keys are rejected by name.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "onebit/select.hpp"

namespace onebit {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ParamMode { ideal, cv, both };

inline const char* to_string(ParamMode m) {
  switch (m) {
    case ParamMode::ideal: return "ideal";
    case ParamMode::cv: return "cv";
    case ParamMode::both: return "both";
  }
  return "?";
}

struct ExperimentConfig {
  std::size_t n = 1000;
  std::vector<std::size_t> m{1000};
  std::vector<std::size_t> k{15};
  std::vector<double> s_n{10.0};
  double flip_ratio = 0.1;
  std::size_t trials = 100;
  std::uint64_t base_seed = 1;
  std::size_t folds = 10;
  std::vector<Method> methods{Method::passive, Method::mcp, Method::l0, Method::sorted_l1};
  ParamMode param_mode = ParamMode::both;
  std::string output_dir = ".";
  std::string sweep_var = "m";  // which of m / k / s_n is being swept

  // Per-method grid overrides; empty means use the defaults from select.hpp.
  std::vector<double> passive_lambda;
  std::vector<double> mcp_lambda;
  std::vector<double> mcp_b;
  std::vector<double> l0_lambda;
  std::vector<double> sorted_l1_lambda;
  std::vector<std::size_t> sorted_l1_n1;

  std::size_t sweep_size() const {
    if (sweep_var == "k") return k.size();
    if (sweep_var == "s_n") return s_n.size();
    return m.size();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double val = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return val;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + s + "'");
  }
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long val = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::uint64_t>(val);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + s + "'");
  }
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline std::vector<std::size_t> parse_unsigned_list(const std::string& key, const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s))
    out.push_back(static_cast<std::size_t>(parse_unsigned(key, item)));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "n") {
      cfg.n = static_cast<std::size_t>(detail::parse_unsigned(key, val));
    } else if (key == "m") {
      cfg.m = detail::parse_unsigned_list(key, val);
    } else if (key == "k") {
      cfg.k = detail::parse_unsigned_list(key, val);
    } else if (key == "s_n") {
      cfg.s_n = detail::parse_real_list(key, val);
    } else if (key == "flip_ratio") {
      cfg.flip_ratio = detail::parse_real(key, val);
    } else if (key == "trials") {
      cfg.trials = static_cast<std::size_t>(detail::parse_unsigned(key, val));
    } else if (key == "base_seed") {
      cfg.base_seed = detail::parse_unsigned(key, val);
    } else if (key == "folds") {
      cfg.folds = static_cast<std::size_t>(detail::parse_unsigned(key, val));
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& item : detail::split_list(val)) {
        const auto method = parse_method(item);
        if (!method) throw ConfigError("config key 'methods': unknown method '" + item + "'");
        cfg.methods.push_back(*method);
      }
      if (cfg.methods.empty()) throw ConfigError("config key 'methods': empty list");
    } else if (key == "param_mode") {
      if (val == "ideal")
        cfg.param_mode = ParamMode::ideal;
      else if (val == "cv")
        cfg.param_mode = ParamMode::cv;
      else if (val == "both")
        cfg.param_mode = ParamMode::both;
      else
        throw ConfigError("config key 'param_mode': expected ideal, cv, or both");
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "passive.lambda") {
      cfg.passive_lambda = detail::parse_real_list(key, val);
    } else if (key == "mcp.lambda") {
      cfg.mcp_lambda = detail::parse_real_list(key, val);
    } else if (key == "mcp.b") {
      cfg.mcp_b = detail::parse_real_list(key, val);
    } else if (key == "l0.lambda") {
      cfg.l0_lambda = detail::parse_real_list(key, val);
    } else if (key == "sorted_l1.lambda") {
      cfg.sorted_l1_lambda = detail::parse_real_list(key, val);
    } else if (key == "sorted_l1.n1") {
      cfg.sorted_l1_n1 = detail::parse_unsigned_list(key, val);
    } else {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }

  // Validation and sweep-variable resolution.
  if (cfg.n == 0) throw ConfigError("config: n must be positive");
  if (cfg.m.empty() || cfg.k.empty() || cfg.s_n.empty())
    throw ConfigError("config: m, k, s_n must be nonempty");
  if (cfg.trials == 0) throw ConfigError("config: trials must be positive");
  if (cfg.folds < 2) throw ConfigError("config: folds must be at least 2");
  if (!(cfg.flip_ratio >= 0.0) || !(cfg.flip_ratio <= 1.0))
    throw ConfigError("config: flip_ratio must lie in [0, 1]");
  int lists = 0;
  if (cfg.m.size() > 1) ++lists;
  if (cfg.k.size() > 1) ++lists;
  if (cfg.s_n.size() > 1) ++lists;
  if (lists > 1)
    throw ConfigError("config: only one of m, k, s_n may be a list");
  cfg.sweep_var = (cfg.k.size() > 1) ? "k" : (cfg.s_n.size() > 1) ? "s_n" : "m";
  for (std::size_t kv : cfg.k)
    if (kv == 0 || kv > cfg.n) throw ConfigError("config: every k must satisfy 1 <= k <= n");
  for (std::size_t mv : cfg.m)
    if (mv == 0) throw ConfigError("config: every m must be positive");
  for (double sv : cfg.s_n)
    if (!(sv > 0.0)) throw ConfigError("config: every s_n must be positive");
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace onebit
