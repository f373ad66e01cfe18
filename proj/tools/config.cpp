// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace cellperm::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  return t;
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s) {
  const std::string t = lower(trim(s));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw std::invalid_argument("not a boolean: '" + t + "'");
}

Point2 parse_point(std::string_view s) {
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("expected 'x,y'");
  return {parse_double(s.substr(0, comma)), parse_double(s.substr(comma + 1))};
}

std::vector<Method> parse_methods(std::string_view s) {
  const std::string t = lower(trim(s));
  if (t == "velocity_avg") return {Method::VelocityAvg};
  if (t == "energy") return {Method::Energy};
  if (t == "both") return {Method::VelocityAvg, Method::Energy};
  throw std::invalid_argument("expected velocity_avg, energy or both");
}

}  // namespace

std::vector<int> parse_levels(std::string_view text) {
  std::vector<int> out;
  std::string_view rest = trim(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto dash = item.find('-');
    if (dash != std::string_view::npos && dash > 0) {
      const int a = parse_int(item.substr(0, dash));
      const int b = parse_int(item.substr(dash + 1));
      if (b < a) throw std::invalid_argument("empty level range");
      for (int l = a; l <= b; ++l) out.push_back(l);
    } else {
      out.push_back(parse_int(item));
    }
  }
  if (out.empty()) throw std::invalid_argument("no levels given");
  for (int l : out)
    if (l < 1 || l > 7) throw std::invalid_argument("levels must lie in 1..7");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

cplx parse_complex(std::string_view text) {
  const std::string_view t = trim(text);
  const auto comma = t.find(',');
  if (comma == std::string_view::npos) return {parse_double(t), 0.0};
  return {parse_double(t.substr(0, comma)), parse_double(t.substr(comma + 1))};
}

std::vector<cplx> parse_complex_list(std::string_view text) {
  std::vector<cplx> out;
  std::string item;
  auto flush = [&] {
    if (!trim(item).empty()) out.push_back(parse_complex(item));
    item.clear();
  };
  // Whitespace separates entries unless it sits next to the comma of "re, im".
  const std::string s(trim(text));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ';') {
      flush();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      const auto prev = trim(item);
      std::size_t j = i;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      const bool joins = (!prev.empty() && prev.back() == ',') || (j < s.size() && s[j] == ',');
      if (!joins) flush();
      i = j - 1;
    } else {
      item.push_back(c);
    }
  }
  flush();
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = lower(trim(raw_key));
  try {
    if (key == "run.case") {
      cfg.kind = parse_case(trim(value));
    } else if (key == "run.levels") {
      cfg.levels = parse_levels(value);
    } else if (key == "run.z") {
      cfg.z = parse_complex_list(value);
      for (const cplx z : cfg.z) ViscosityField{1.0, z}.validate_two_fluid();
    } else if (key == "run.mu1") {
      cfg.mu1 = parse_double(value);
      if (!(cfg.mu1 > 0.0) || !std::isfinite(cfg.mu1)) throw std::invalid_argument("must be positive");
    } else if (key == "run.output_dir") {
      cfg.output_dir = std::string(trim(value));
      if (cfg.output_dir.empty()) throw std::invalid_argument("must not be empty");
    } else if (key == "run.deterministic") {
      cfg.deterministic = parse_bool(value);
    } else if (key == "run.methods") {
      cfg.methods = parse_methods(value);
    } else if (key == "run.bubble_inner") {
      cfg.bubble_inner = parse_bool(value);
    } else if (key == "run.threads") {
      cfg.threads = parse_int(value);
      if (cfg.threads < 1) throw std::invalid_argument("must be at least 1");
    } else if (key == "geometry.inclusion_lo") {
      cfg.geometry.inclusion_lo = parse_point(value);
    } else if (key == "geometry.inclusion_hi") {
      cfg.geometry.inclusion_hi = parse_point(value);
    } else if (key == "spectral.max_order") {
      cfg.max_order = parse_int(value);
      if (cfg.max_order < 0) throw std::invalid_argument("must be nonnegative");
    } else if (key == "spectral.s") {
      cfg.s = parse_complex_list(value);
      for (const cplx s : cfg.s)
        if (s == cplx(0.0)) throw std::invalid_argument("s = 0 has no viscosity ratio");
    } else if (key == "spectral.kmax") {
      cfg.kmax = parse_int(value);
      if (cfg.kmax < 1) throw std::invalid_argument("must be at least 1");
    } else if (key == "spectral.expansion") {
      const std::string e = lower(trim(value));
      if (e != "large_z" && e != "small_z") throw std::invalid_argument("expected large_z or small_z");
      cfg.expansion = e;
    } else if (key == "export.run_id") {
      cfg.run_id = std::string(trim(value));
    } else if (key == "export.samples") {
      cfg.samples = parse_int(value);
      if (cfg.samples < 2) throw std::invalid_argument("must be at least 2");
    } else if (key == "export.direction") {
      cfg.direction = parse_int(value);
      if (cfg.direction != 1 && cfg.direction != 2) throw std::invalid_argument("must be 1 or 2");
    } else if (key == "solver.residual_tol") {
      cfg.residual_tol = parse_double(value);
      if (!(cfg.residual_tol > 0.0)) throw std::invalid_argument("must be positive");
    } else if (key == "solver.power_tol") {
      cfg.power_tol = parse_double(value);
      if (!(cfg.power_tol > 0.0)) throw std::invalid_argument("must be positive");
    } else if (key == "solver.power_max_iters") {
      cfg.power_max_iters = parse_int(value);
      if (cfg.power_max_iters < 1) throw std::invalid_argument("must be at least 1");
    } else {
      throw ConfigError(key, "unknown key");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
  if (key.rfind("geometry.", 0) == 0) {
    // Both corners may be set one at a time; check once the pair is ordered.
    const auto& g = cfg.geometry;
    if (g.inclusion_lo.x < g.inclusion_hi.x && g.inclusion_lo.y < g.inclusion_hi.y) {
      try {
        g.validate();
      } catch (const std::exception& e) {
        throw ConfigError(key, e.what());
      }
    }
  }
  cfg.assignments.emplace_back(key, std::string(trim(value)));
}

RunConfig parse_config(std::string_view text, RunConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno), "unterminated section");
      section = lower(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string name(trim(t.substr(0, eq)));
    if (section.empty()) throw ConfigError(name, "key outside a section");
    apply_setting(cfg, section + "." + name, std::string(trim(t.substr(eq + 1))));
  }
  cfg.geometry.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string fmt_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_fortran(double v) {
  if (v == 0.0) return "0.000000000E+00";
  if (!std::isfinite(v)) return fmt_g9(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", std::abs(v));  // d.dddddddde+XX
  const std::string s(buf);
  const auto e = s.find('e');
  const int exp10 = std::atoi(s.c_str() + e + 1) + 1;
  std::string digits = s.substr(0, 1) + s.substr(2, e - 2);
  char out[64];
  std::snprintf(out, sizeof out, "%s0.%sE%c%02d", v < 0 ? "-" : "", digits.c_str(),
                exp10 < 0 ? '-' : '+', std::abs(exp10));
  return out;
}

std::string run_id(CaseKind kind, int level, std::optional<cplx> z) {
  std::string id = to_string(kind) + "_L" + std::to_string(level);
  if (z) {
    id += "_z" + fmt_g9(z->real());
    if (z->imag() != 0.0) id += "_" + fmt_g9(z->imag());
  }
  return id;
}

std::string resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("CELLPERM_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

}  // namespace cellperm::cli
