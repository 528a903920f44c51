#pragma once

#include <functional>
#include <optional>
#include <sstream>

#include "pilotwave/common.hpp"

namespace pw {

inline constexpr const char* kToolVersion = "0.1.0";

// Flat, typed scenario configuration. Every field maps to one "section.key"
// entry of the config file; the table in config_fields() drives parsing,
// echoing and the JSON embed, so the three stay consistent.
struct ScenarioConfig {
  // [run]
  std::string scenario = "crossing";
  std::uint64_t seed = 20240501;
  int trajectories = 1000;
  int equivariance_samples = 10000;
  double report_dt = 0.1;
  int plot_trajectories = 40;

  // [grid]
  int points_x = 1024;
  double x_min = -50.0, x_max = 50.0;
  int points_y = 0;  // 0 = 1D
  double y_min = 0.0, y_max = 0.0;

  // [time]
  double dt = 0.01;
  double t_end = 20.0;

  // [packets] packet 1; packet 2 is its mirror image about the geometry
  // center unless the scenario uses a single state (protective).
  double packet_center = -10.0;
  double packet_sigma = 1.0;
  double packet_wavevector = 1.0;
  double offset = 0.0;  // rigid translation of the whole geometry

  // [recorder] (fast_recorder, spin_recorder)
  double window_center = 9.0;
  double window_half_width = 1.5;
  double coupling = 0.0;
  double gate_t0 = 0.0;
  double gate_t1 = 6.4;
  double gate_rise = 1.0;
  double pointer_mass = 8.0;
  double pointer_sigma = 1.0;

  // [protective]
  double point_a = 0.2;
  double point_b = 0.7;
  double point_b_alt = 0.4;
  double probe_half_width = 0.05;
  double probe_strength = 0.125;  // g0
  double ramp_duration = 8.0;
  double box_lo = 0.0;
  double box_hi = 1.0;
  double box_height = 1.0e4;
  double box_wall_width = 0.03125;
  double box_wall_shift = 0.042166;

  // [output]
  std::vector<double> dump_times;

  bool two_dimensional() const { return points_y > 0; }
};

struct ConfigField {
  std::string key;  // "section.key"
  enum class Kind { integer, unsigned64, real, text, real_list } kind;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require(pos == s.size(), ErrorCategory::parse_error, "trailing junk in " + key);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCategory::parse_error, "cannot parse number for " + key + ": '" + s + "'");
  }
}

inline long long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    require(pos == s.size(), ErrorCategory::parse_error, "trailing junk in " + key);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCategory::parse_error, "cannot parse integer for " + key + ": '" + s + "'");
  }
}

}  // namespace detail

inline const std::vector<ConfigField>& config_fields() {
  using Kind = ConfigField::Kind;
  static const std::vector<ConfigField> fields = [] {
    std::vector<ConfigField> f;
    auto add_int = [&f](const char* key, int ScenarioConfig::* m) {
      f.push_back({key, Kind::integer,
                   [m](const ScenarioConfig& c) { return std::to_string(c.*m); },
                   [m, key](ScenarioConfig& c, const std::string& s) {
                     c.*m = static_cast<int>(detail::parse_int(s, key));
                   }});
    };
    auto add_u64 = [&f](const char* key, std::uint64_t ScenarioConfig::* m) {
      f.push_back({key, Kind::unsigned64,
                   [m](const ScenarioConfig& c) { return std::to_string(c.*m); },
                   [m, key](ScenarioConfig& c, const std::string& s) {
                     c.*m = static_cast<std::uint64_t>(detail::parse_int(s, key));
                   }});
    };
    auto add_real = [&f](const char* key, double ScenarioConfig::* m) {
      f.push_back({key, Kind::real,
                   [m](const ScenarioConfig& c) { return detail::fmt_double(c.*m); },
                   [m, key](ScenarioConfig& c, const std::string& s) {
                     c.*m = detail::parse_double(s, key);
                   }});
    };
    auto add_text = [&f](const char* key, std::string ScenarioConfig::* m) {
      f.push_back({key, Kind::text,
                   [m](const ScenarioConfig& c) { return c.*m; },
                   [m](ScenarioConfig& c, const std::string& s) { c.*m = s; }});
    };

    add_text("run.scenario", &ScenarioConfig::scenario);
    add_u64("run.seed", &ScenarioConfig::seed);
    add_int("run.trajectories", &ScenarioConfig::trajectories);
    add_int("run.equivariance_samples", &ScenarioConfig::equivariance_samples);
    add_real("run.report_dt", &ScenarioConfig::report_dt);
    add_int("run.plot_trajectories", &ScenarioConfig::plot_trajectories);

    add_int("grid.points_x", &ScenarioConfig::points_x);
    add_real("grid.x_min", &ScenarioConfig::x_min);
    add_real("grid.x_max", &ScenarioConfig::x_max);
    add_int("grid.points_y", &ScenarioConfig::points_y);
    add_real("grid.y_min", &ScenarioConfig::y_min);
    add_real("grid.y_max", &ScenarioConfig::y_max);

    add_real("time.dt", &ScenarioConfig::dt);
    add_real("time.t_end", &ScenarioConfig::t_end);

    add_real("packets.center", &ScenarioConfig::packet_center);
    add_real("packets.sigma", &ScenarioConfig::packet_sigma);
    add_real("packets.wavevector", &ScenarioConfig::packet_wavevector);
    add_real("packets.offset", &ScenarioConfig::offset);

    add_real("recorder.window_center", &ScenarioConfig::window_center);
    add_real("recorder.window_half_width", &ScenarioConfig::window_half_width);
    add_real("recorder.coupling", &ScenarioConfig::coupling);
    add_real("recorder.gate_t0", &ScenarioConfig::gate_t0);
    add_real("recorder.gate_t1", &ScenarioConfig::gate_t1);
    add_real("recorder.gate_rise", &ScenarioConfig::gate_rise);
    add_real("recorder.pointer_mass", &ScenarioConfig::pointer_mass);
    add_real("recorder.pointer_sigma", &ScenarioConfig::pointer_sigma);

    add_real("protective.point_a", &ScenarioConfig::point_a);
    add_real("protective.point_b", &ScenarioConfig::point_b);
    add_real("protective.point_b_alt", &ScenarioConfig::point_b_alt);
    add_real("protective.probe_half_width", &ScenarioConfig::probe_half_width);
    add_real("protective.probe_strength", &ScenarioConfig::probe_strength);
    add_real("protective.ramp_duration", &ScenarioConfig::ramp_duration);
    add_real("protective.box_lo", &ScenarioConfig::box_lo);
    add_real("protective.box_hi", &ScenarioConfig::box_hi);
    add_real("protective.box_height", &ScenarioConfig::box_height);
    add_real("protective.box_wall_width", &ScenarioConfig::box_wall_width);
    add_real("protective.box_wall_shift", &ScenarioConfig::box_wall_shift);

    f.push_back({"output.dump_times", Kind::real_list,
                 [](const ScenarioConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.dump_times.size(); ++i) {
                     if (i) s += ' ';
                     s += detail::fmt_double(c.dump_times[i]);
                   }
                   return s;
                 },
                 [](ScenarioConfig& c, const std::string& s) {
                   c.dump_times.clear();
                   std::istringstream in(s);
                   std::string tok;
                   while (in >> tok)
                     c.dump_times.push_back(detail::parse_double(tok, "output.dump_times"));
                 }});
    return f;
  }();
  return fields;
}

inline const ConfigField* find_config_field(const std::string& key) {
  for (const auto& f : config_fields())
    if (f.key == key) return &f;
  return nullptr;
}

inline std::vector<std::string> scenario_ids() {
  return {"crossing", "fast_recorder", "spin_recorder", "protective"};
}

// Frozen scenario defaults. Geometry numbers are artifact choices: the paper
// fixes none of the packet widths or speeds.
inline ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "crossing") {
    c.dump_times = {0.0, 10.0, 20.0};
    return c;
  }
  if (scenario == "fast_recorder") {
    c.points_x = 512;
    c.x_min = -60.0;
    c.x_max = 60.0;
    c.points_y = 128;
    c.y_min = -6.5;
    c.y_max = 14.0;
    c.dt = 0.004;
    c.t_end = 9.6;
    c.packet_center = -24.0;
    c.packet_sigma = 2.0;
    c.packet_wavevector = 5.0;
    c.window_center = 14.0;
    c.window_half_width = 5.0;
    c.coupling = 8.0;  // pointer displacement lambda * W_eff / |v| = 8 sigma_y
    c.gate_t0 = 0.0;
    c.gate_t1 = 4.6;
    c.gate_rise = 0.4;
    c.report_dt = 0.048;
    c.dump_times = {0.0, 4.8, 9.6};
    return c;
  }
  if (scenario == "spin_recorder") {
    c.points_x = 2048;
    c.x_min = -60.0;
    c.x_max = 60.0;
    c.dt = 0.004;
    c.t_end = 6.0;
    c.packet_center = -24.0;
    c.packet_sigma = 2.5;
    c.packet_wavevector = 8.0;
    c.window_center = 11.0;
    c.window_half_width = 1.5;
    c.coupling = kPi * 8.0 / 1.5;  // accumulated rotation pi over one transit
    c.gate_t0 = 0.0;
    c.gate_t1 = 3.2;
    c.gate_rise = 0.35;
    c.report_dt = 0.048;
    c.dump_times = {0.0, 3.0, 6.0};
    return c;
  }
  if (scenario == "protective") {
    c.points_x = 224;
    c.x_min = -0.375;
    c.x_max = 1.375;
    c.points_y = 48;
    c.y_min = -260.0;
    c.y_max = 260.0;
    c.dt = 4e-5;
    c.t_end = 8.0;
    c.ramp_duration = 8.0;
    c.trajectories = 1;
    c.equivariance_samples = 4000;
    c.pointer_mass = 1000.0;
    c.pointer_sigma = 40.0;
    c.report_dt = 0.012;
    c.coupling = 0.0;
    c.dump_times = {0.0, 4.0, 8.0};
    return c;
  }
  fail(ErrorCategory::validation_error, "unknown scenario '" + scenario + "'");
}

// Field-level sanity checks shared by every scenario; geometry-specific
// guards live in the runners.
inline void validate_config(const ScenarioConfig& c) {
  auto check = [](bool ok, const std::string& field, const std::string& what) {
    require(ok, ErrorCategory::validation_error, field + ": " + what);
  };
  bool known = false;
  for (const auto& id : scenario_ids()) known = known || id == c.scenario;
  check(known, "run.scenario", "unknown scenario '" + c.scenario + "'");
  check(c.trajectories >= 1, "run.trajectories", "must be at least 1");
  check(c.equivariance_samples == 0 || c.equivariance_samples >= 100,
        "run.equivariance_samples", "must be 0 or at least 100");
  check(c.points_x >= 8, "grid.points_x", "must be at least 8");
  check(c.x_min < c.x_max, "grid.x_min", "extent must be non-degenerate");
  if (c.points_y > 0) {
    check(c.points_y >= 8, "grid.points_y", "must be at least 8");
    check(c.y_min < c.y_max, "grid.y_min", "extent must be non-degenerate");
  }
  check(c.dt > 0.0, "time.dt", "must be positive");
  check(c.t_end > 0.0, "time.t_end", "must be positive");
  check(c.report_dt >= c.dt, "run.report_dt", "must be at least time.dt");
  check(c.packet_sigma > 0.0, "packets.sigma", "must be positive");
  if (c.scenario == "fast_recorder" || c.scenario == "spin_recorder") {
    check(c.window_half_width > 0.0, "recorder.window_half_width", "must be positive");
    check(c.gate_t1 > c.gate_t0, "recorder.gate_t1", "gate must close after it opens");
    check(c.gate_rise > 0.0 && 2.0 * c.gate_rise <= c.gate_t1 - c.gate_t0,
          "recorder.gate_rise", "rise must fit inside the gate");
  }
  if (c.scenario == "fast_recorder") {
    check(c.points_y > 0, "grid.points_y", "fast_recorder needs a 2D grid");
    check(c.pointer_mass > 0.0, "recorder.pointer_mass", "must be positive");
    check(c.pointer_sigma > 0.0, "recorder.pointer_sigma", "must be positive");
  }
  if (c.scenario == "protective") {
    check(c.points_y > 0, "grid.points_y", "protective needs a 2D grid");
    check(c.box_lo < c.box_hi, "protective.box_lo", "box must be non-degenerate");
    check(c.box_height > 0.0, "protective.box_height", "must be positive");
    check(c.probe_half_width > 0.0, "protective.probe_half_width", "must be positive");
    check(c.ramp_duration > 0.0, "protective.ramp_duration", "must be positive");
    check(c.ramp_duration <= c.t_end, "protective.ramp_duration",
          "ramp cannot outlast the run");
    check(c.pointer_sigma > 0.0, "recorder.pointer_sigma", "must be positive");
  }
}

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  for (const auto& f : config_fields())
    if (f.get(a) != f.get(b)) return false;
  return true;
}

}  // namespace pw
