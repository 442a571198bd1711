#pragma once

#include <map>
#include <string>
#include <vector>

#include "hkt/bps.hpp"

namespace hkt {

// One parsed value from the config text: a quoted string, a number, a
// boolean, or an inline array of values.
struct ConfigValue {
  enum class Kind { String, Number, Boolean, Array };
  Kind kind = Kind::String;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<ConfigValue> items;
};

struct ConfigTable {
  std::map<std::string, ConfigValue> entries;
};

// Structured key-value file: [section] headers with key = value lines,
// repeated [[charges]] tables, '#' comments.
struct ConfigFile {
  std::map<std::string, ConfigTable> sections;
  std::vector<ConfigTable> charges;
};
ConfigFile parse_config_text(const std::string& text);

// Complex scalar in the config grammar: "2", "-0.5", "i", "-i", "2i",
// "1+2i", "0.5-0.5i", with scientific notation allowed on either part.
cx parse_complex(const std::string& text);

struct ChargeEntry {
  std::vector<int> m, k;
  std::string omega;  // rational string
};

struct GridConfig {
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  int re_count = 3, im_count = 3;
  int fiber_count = 2;
};

struct RunConfig {
  // prepotential: exactly one of name (catalog) or expression (custom)
  std::string name;
  std::string expression;
  int n = 1;
  std::map<std::string, std::vector<cx>> params;

  std::vector<ChargeEntry> charges;  // empty = zero corrections

  GridConfig grid;
  unsigned seed = 1;

  double tail_tol = 1e-12;
  double h_fd = 1e-4;
  double cond_max = 1e6;
  double support_floor = 1e-6;
  double budget_algebraic = 1e-10;
  double budget_fd = 1e-5;
  double budget_series = 1e-9;
  double budget_periodicity = 1e-12;

  std::vector<std::string> suites;
  std::vector<cx> zeta_samples;
};

// Parse and validate; throws ConfigError with the offending path or line.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace hkt
