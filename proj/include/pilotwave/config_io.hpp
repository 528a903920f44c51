#pragma once

#include <fstream>

#include "pilotwave/scenario_config.hpp"

namespace pw {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Flat key-value config with [section] headers and '#' comments. The scenario
// id must come first (or be preset) so section defaults are known before the
// remaining keys override them.
inline ScenarioConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;

  // First pass: find run.scenario to seed the defaults.
  std::string scenario;
  {
    std::istringstream scan(text);
    std::string sec;
    while (std::getline(scan, line)) {
      std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[' && t.back() == ']') {
        sec = t.substr(1, t.size() - 2);
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      if (sec == "run" && detail::trim(t.substr(0, eq)) == "scenario")
        scenario = detail::trim(t.substr(eq + 1));
    }
  }
  require(!scenario.empty(), ErrorCategory::parse_error,
          "config must set run.scenario");
  ScenarioConfig cfg = default_config(scenario);

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    require(eq != std::string::npos, ErrorCategory::parse_error,
            "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    require(!section.empty(), ErrorCategory::parse_error,
            "line " + std::to_string(line_no) + ": key outside any [section]");
    const ConfigField* field = find_config_field(section + "." + key);
    require(field != nullptr, ErrorCategory::parse_error,
            "line " + std::to_string(line_no) + ": unknown key " + section + "." + key);
    field->set(cfg, value);
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCategory::io_error, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// Command-line overrides of the form section.key=value.
inline void apply_overrides(ScenarioConfig& cfg,
                            const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    require(eq != std::string::npos, ErrorCategory::parse_error,
            "override must look like section.key=value: " + ov);
    const std::string key = detail::trim(ov.substr(0, eq));
    const ConfigField* field = find_config_field(key);
    require(field != nullptr, ErrorCategory::parse_error, "unknown key " + key);
    field->set(cfg, detail::trim(ov.substr(eq + 1)));
  }
}

}  // namespace pw
