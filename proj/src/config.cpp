#include "hkt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hkt {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream os;
  os << "line " << line << ": " << what;
  throw ConfigError(os.str());
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

// Splits an inline array body at top-level commas.
std::vector<std::string> split_items(const std::string& body, int line) {
  std::vector<std::string> items;
  int depth = 0;
  bool quoted = false;
  std::string cur;
  for (char ch : body) {
    if (ch == '"') quoted = !quoted;
    if (!quoted) {
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (depth < 0) fail(line, "unbalanced ']'");
      if (ch == ',' && depth == 0) {
        items.push_back(cur);
        cur.clear();
        continue;
      }
    }
    cur += ch;
  }
  if (quoted) fail(line, "unterminated string");
  if (depth != 0) fail(line, "unbalanced '['");
  if (!trim(cur).empty() || !items.empty()) items.push_back(cur);
  return items;
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(line, "missing value");
  ConfigValue v;
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    v.kind = ConfigValue::Kind::String;
    v.str = s.substr(1, s.size() - 2);
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "array must close on the same line");
    v.kind = ConfigValue::Kind::Array;
    const std::string body = s.substr(1, s.size() - 2);
    if (!trim(body).empty()) {
      for (const std::string& item : split_items(body, line)) {
        if (trim(item).empty()) fail(line, "empty array element");
        v.items.push_back(parse_value(item, line));
      }
    }
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = ConfigValue::Kind::Boolean;
    v.boolean = s == "true";
    return v;
  }
  char* end = nullptr;
  const double num = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    fail(line, "unrecognized value '" + s + "' (strings must be quoted)");
  v.kind = ConfigValue::Kind::Number;
  v.num = num;
  return v;
}

}  // namespace

ConfigFile parse_config_text(const std::string& text) {
  ConfigFile file;
  ConfigTable* target = &file.sections[""];
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.size() >= 4 && line.substr(0, 2) == "[[") {
        if (line.substr(line.size() - 2) != "]]") fail(lineno, "malformed table header");
        const std::string name = trim(line.substr(2, line.size() - 4));
        if (name != "charges") fail(lineno, "unknown table array '" + name + "'");
        file.charges.emplace_back();
        target = &file.charges.back();
        continue;
      }
      if (line.back() != ']') fail(lineno, "malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(lineno, "empty section name");
      target = &file.sections[name];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(lineno, "empty key");
    if (target->entries.count(key)) fail(lineno, "duplicate key '" + key + "'");
    target->entries[key] = parse_value(line.substr(eq + 1), lineno);
  }
  return file;
}

cx parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty complex literal");
  double re = 0.0, im = 0.0;
  bool seen_re = false, seen_im = false;
  const char* p = s.c_str();
  while (*p != '\0') {
    double sign = 1.0;
    if (*p == '+' || *p == '-') {
      sign = *p == '-' ? -1.0 : 1.0;
      ++p;
    }
    double mag = 1.0;
    char* end = nullptr;
    bool has_digits = false;
    if (*p != 'i') {
      mag = std::strtod(p, &end);
      if (end == p) throw ConfigError("malformed complex literal '" + s + "'");
      has_digits = true;
      p = end;
    }
    if (*p == 'i') {
      if (seen_im) throw ConfigError("malformed complex literal '" + s + "'");
      im = sign * mag;
      seen_im = true;
      ++p;
    } else {
      if (!has_digits || seen_re)
        throw ConfigError("malformed complex literal '" + s + "'");
      re = sign * mag;
      seen_re = true;
    }
  }
  if (!seen_re && !seen_im) throw ConfigError("malformed complex literal '" + s + "'");
  return {re, im};
}

namespace {

const ConfigValue* find(const ConfigTable& t, const std::string& key) {
  auto it = t.entries.find(key);
  return it == t.entries.end() ? nullptr : &it->second;
}

double need_number(const ConfigTable& t, const std::string& section, const std::string& key) {
  const ConfigValue* v = find(t, key);
  if (!v || v->kind != ConfigValue::Kind::Number)
    throw ConfigError(section + "." + key + ": required number missing");
  return v->num;
}

double opt_number(const ConfigTable& t, const std::string& section, const std::string& key,
                  double fallback) {
  const ConfigValue* v = find(t, key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::Number)
    throw ConfigError(section + "." + key + ": expected a number");
  return v->num;
}

int opt_int(const ConfigTable& t, const std::string& section, const std::string& key,
            int fallback) {
  const double d = opt_number(t, section, key, fallback);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError(section + "." + key + ": expected an integer");
  return i;
}

cx value_as_complex(const ConfigValue& v, const std::string& path) {
  if (v.kind == ConfigValue::Kind::Number) return {v.num, 0.0};
  if (v.kind == ConfigValue::Kind::String) return parse_complex(v.str);
  throw ConfigError(path + ": expected a number or complex string");
}

std::vector<int> int_array(const ConfigValue& v, const std::string& path) {
  if (v.kind != ConfigValue::Kind::Array)
    throw ConfigError(path + ": expected an integer array");
  std::vector<int> out;
  for (const ConfigValue& item : v.items) {
    if (item.kind != ConfigValue::Kind::Number ||
        static_cast<double>(static_cast<int>(item.num)) != item.num)
      throw ConfigError(path + ": expected an integer array");
    out.push_back(static_cast<int>(item.num));
  }
  return out;
}

const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names = {
      "flatness",  "plebanski", "quaternion", "closedness",
      "nijenhuis", "crosscheck", "integrable", "dilog"};
  return names;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const ConfigFile file = parse_config_text(text);
  RunConfig cfg;

  auto section = [&file](const std::string& name) -> const ConfigTable& {
    static const ConfigTable empty;
    auto it = file.sections.find(name);
    return it == file.sections.end() ? empty : it->second;
  };

  // prepotential
  {
    auto it = file.sections.find("prepotential");
    if (it == file.sections.end()) throw ConfigError("prepotential: section missing");
    const ConfigTable& t = it->second;
    cfg.n = opt_int(t, "prepotential", "n", 1);
    if (cfg.n < 1) throw ConfigError("prepotential.n: must be >= 1");
    if (const ConfigValue* v = find(t, "name")) {
      if (v->kind != ConfigValue::Kind::String)
        throw ConfigError("prepotential.name: expected a string");
      cfg.name = v->str;
    }
    if (const ConfigValue* v = find(t, "expression")) {
      if (v->kind != ConfigValue::Kind::String)
        throw ConfigError("prepotential.expression: expected a string");
      cfg.expression = v->str;
    }
    if (cfg.name.empty() == cfg.expression.empty())
      throw ConfigError("prepotential: exactly one of name or expression is required");
    for (const auto& [key, val] : section("prepotential.params").entries) {
      std::vector<cx>& dst = cfg.params[key];
      const std::string path = "prepotential.params." + key;
      if (val.kind == ConfigValue::Kind::Array) {
        for (std::size_t i = 0; i < val.items.size(); ++i)
          dst.push_back(value_as_complex(val.items[i], path));
      } else {
        dst.push_back(value_as_complex(val, path));
      }
    }
  }

  // charges
  for (std::size_t c = 0; c < file.charges.size(); ++c) {
    const ConfigTable& t = file.charges[c];
    std::ostringstream prefix;
    prefix << "charges[" << c << "]";
    ChargeEntry entry;
    const ConfigValue* m = find(t, "m");
    const ConfigValue* k = find(t, "k");
    if (!m || !k) throw ConfigError(prefix.str() + ": m and k arrays are required");
    entry.m = int_array(*m, prefix.str() + ".m");
    entry.k = int_array(*k, prefix.str() + ".k");
    const ConfigValue* om = find(t, "omega");
    if (!om) throw ConfigError(prefix.str() + ".omega: required");
    if (om->kind == ConfigValue::Kind::String) {
      entry.omega = om->str;
    } else if (om->kind == ConfigValue::Kind::Number) {
      std::ostringstream os;
      os << om->num;
      entry.omega = os.str();
    } else {
      throw ConfigError(prefix.str() + ".omega: expected a rational string or number");
    }
    cfg.charges.push_back(std::move(entry));
  }

  // grid
  {
    auto it = file.sections.find("grid");
    if (it == file.sections.end()) throw ConfigError("grid: section missing");
    const ConfigTable& t = it->second;
    cfg.grid.re_min = need_number(t, "grid", "re_min");
    cfg.grid.re_max = need_number(t, "grid", "re_max");
    cfg.grid.im_min = need_number(t, "grid", "im_min");
    cfg.grid.im_max = need_number(t, "grid", "im_max");
    cfg.grid.re_count = opt_int(t, "grid", "re_count", 3);
    cfg.grid.im_count = opt_int(t, "grid", "im_count", 3);
    cfg.grid.fiber_count = opt_int(t, "grid", "fiber_count", 2);
    if (cfg.grid.re_count < 1 || cfg.grid.im_count < 1 || cfg.grid.fiber_count < 1)
      throw ConfigError("grid: counts must be >= 1");
    if (cfg.grid.re_max < cfg.grid.re_min || cfg.grid.im_max < cfg.grid.im_min)
      throw ConfigError("grid: box corners out of order");
  }

  // tolerances
  {
    const ConfigTable& t = section("tolerances");
    cfg.tail_tol = opt_number(t, "tolerances", "tail_tol", cfg.tail_tol);
    cfg.h_fd = opt_number(t, "tolerances", "h_fd", cfg.h_fd);
    cfg.cond_max = opt_number(t, "tolerances", "cond_max", cfg.cond_max);
    cfg.support_floor = opt_number(t, "tolerances", "support_floor", cfg.support_floor);
    cfg.budget_algebraic =
        opt_number(t, "tolerances", "budget_algebraic", cfg.budget_algebraic);
    cfg.budget_fd = opt_number(t, "tolerances", "budget_fd", cfg.budget_fd);
    cfg.budget_series = opt_number(t, "tolerances", "budget_series", cfg.budget_series);
    cfg.budget_periodicity =
        opt_number(t, "tolerances", "budget_periodicity", cfg.budget_periodicity);
    for (double tol : {cfg.tail_tol, cfg.h_fd, cfg.cond_max, cfg.support_floor,
                       cfg.budget_algebraic, cfg.budget_fd, cfg.budget_series,
                       cfg.budget_periodicity}) {
      if (!(tol > 0.0)) throw ConfigError("tolerances: all entries must be positive");
    }
  }

  // run
  {
    const ConfigTable& t = section("run");
    cfg.seed = static_cast<unsigned>(opt_int(t, "run", "seed", 1));
    if (const ConfigValue* v = find(t, "suites")) {
      if (v->kind != ConfigValue::Kind::Array)
        throw ConfigError("run.suites: expected an array of suite names");
      for (const ConfigValue& item : v->items) {
        if (item.kind != ConfigValue::Kind::String)
          throw ConfigError("run.suites: expected an array of suite names");
        if (std::find(all_suites().begin(), all_suites().end(), item.str) ==
            all_suites().end())
          throw ConfigError("run.suites: unknown suite '" + item.str + "'");
        cfg.suites.push_back(item.str);
      }
      if (cfg.suites.empty()) throw ConfigError("run.suites: must not be empty");
    } else {
      cfg.suites = all_suites();
    }
    if (const ConfigValue* v = find(t, "zeta_samples")) {
      if (v->kind != ConfigValue::Kind::Array)
        throw ConfigError("run.zeta_samples: expected an array");
      for (const ConfigValue& item : v->items)
        cfg.zeta_samples.push_back(value_as_complex(item, "run.zeta_samples"));
    } else {
      cfg.zeta_samples = {cx(1, 0),  cx(0, 1),        cx(-1, 0),
                          cx(0, -1), cx(2, 0),        cx(0.5, 0.5)};
    }
  }

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace hkt
