#pragma once

#include <filesystem>
#include <fstream>

#include "pilotwave/propagator.hpp"
#include "pilotwave/scenario.hpp"

namespace pw {

// Minimal ordered JSON emitter. Floating-point values are printed with 17
// significant digits so identical runs produce byte-identical reports.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(const std::string& k) {
    comma();
    out_ += '"' + escape(k) + "\":";
    after_key_ = true;
    return *this;
  }

  JsonWriter& number(const std::string& canonical) { return raw(canonical); }
  JsonWriter& value(double v) { return raw(detail::fmt_double(v)); }
  JsonWriter& value(int v) { return raw(std::to_string(v)); }
  JsonWriter& value(long v) { return raw(std::to_string(v)); }
  JsonWriter& value(std::size_t v) { return raw(std::to_string(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  JsonWriter& value(const std::string& v) { return raw('"' + escape(v) + '"'); }
  JsonWriter& value(const char* v) { return value(std::string(v)); }

  const std::string& str() const { return out_; }

 private:
  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  }
  void comma() {
    if (!out_.empty() && !after_key_ && out_.back() != '{' && out_.back() != '[')
      out_ += ',';
  }
  JsonWriter& raw(const std::string& s) {
    if (!after_key_) comma();
    out_ += s;
    after_key_ = false;
    return *this;
  }
  JsonWriter& open(char t) {
    if (!after_key_) comma();
    out_ += t;
    after_key_ = false;
    return *this;
  }
  JsonWriter& close(char t) {
    out_ += t;
    after_key_ = false;
    return *this;
  }

  std::string out_;
  bool after_key_ = false;
};

inline void config_to_json(JsonWriter& w, const ScenarioConfig& c) {
  w.begin_object();
  for (const auto& f : config_fields()) {
    w.key(f.key);
    const std::string text = f.get(c);
    switch (f.kind) {
      case ConfigField::Kind::integer:
      case ConfigField::Kind::unsigned64:
      case ConfigField::Kind::real:
        w.number(text);
        break;
      case ConfigField::Kind::text:
        w.value(text);
        break;
      case ConfigField::Kind::real_list: {
        w.begin_array();
        std::istringstream in(text);
        std::string tok;
        while (in >> tok) w.number(tok);
        w.end_array();
        break;
      }
    }
  }
  w.end_object();
}

inline std::string report_to_json(const ScenarioReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("scenario").value(r.config.scenario);
  w.key("tool_version").value(r.tool_version);
  w.key("config");
  config_to_json(w, r.config);

  w.key("metrics").begin_object();
  w.key("swap_fraction").value(r.swap_fraction);
  w.key("trajectory_record_mismatch").value(r.trajectory_record_mismatch);
  w.key("pointer_shift").value(r.pointer_shift);
  w.key("pointer_shift_predicted").value(r.pointer_shift_predicted);
  w.key("pointer_shift_relative_error").value(r.pointer_shift_relative_error);
  w.key("max_bohm_displacement").value(r.max_bohm_displacement);
  w.key("conditions").begin_object();
  w.key("has_environment").value(r.conditions.has_environment);
  w.key("record_orthogonality").value(r.conditions.record_orthogonality);
  w.key("inside_fraction").value(r.conditions.inside_fraction);
  w.key("displacement_sigma").value(r.conditions.displacement_sigma);
  w.end_object();
  w.key("equivariance").begin_object();
  w.key("statistic").value(r.equivariance.statistic);
  w.key("value").value(r.equivariance.value);
  w.key("samples").value(r.equivariance.samples);
  w.key("threshold").value(r.equivariance.threshold);
  w.key("pass").value(r.equivariance.pass);
  w.end_object();
  w.key("non_crossing").begin_object();
  w.key("pass").value(r.non_crossing.pass);
  w.key("violation_time").value(r.non_crossing.violation_time);
  w.end_object();
  w.key("axis_crossings").value(r.axis_crossings);
  w.key("branch_separation_sigma").value(r.branch_separation_sigma);
  w.key("flipped_weight").value(r.flipped_weight);
  w.key("adiabatic_fidelity").value(r.adiabatic_fidelity);
  w.key("ground_state_energy").value(r.ground_state_energy);
  w.key("meet_time").value(r.meet_time);
  w.key("classification_ties").value(r.classification_ties);
  w.end_object();

  w.key("runtime").begin_object();
  w.key("steps").value(r.steps);
  w.key("norm_drift").value(r.norm_drift);
  w.key("swap_trajectories").value(r.summary.size());
  w.key("equivariance_samples").value(r.equivariance.samples);
  w.key("node_encounters").value(r.node_encounters);
  w.key("clamps").value(r.clamps);
  w.key("escaped").value(r.escaped);
  w.end_object();

  w.key("artifacts").begin_object();
  w.key("trajectories").value("trajectories.csv");
  w.key("summary").value("summary.csv");
  w.key("config_echo").value("config_echo.cfg");
  w.key("pointer_series").value(r.pointer_series.empty() ? "" : "pointer_series.csv");
  w.key("branch_support").value(r.branch_support.empty() ? "" : "branch_support.csv");
  w.key("frames").begin_array();
  for (const auto& [t, psi] : r.dumps) {
    (void)psi;
    w.value("frames/frame_t" + detail::fmt_double(t) + ".csv");
  }
  w.end_array();
  w.end_object();

  w.end_object();
  std::string s = w.str();
  s += '\n';
  return s;
}

// Normalized flat config text, re-parseable by the config reader.
inline std::string config_to_cfg_text(const ScenarioConfig& c) {
  std::string out;
  std::string section;
  for (const auto& f : config_fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    const std::string key = f.key.substr(dot + 1);
    if (sec != section) {
      if (!out.empty()) out += '\n';
      out += '[' + sec + "]\n";
      section = sec;
    }
    out += key + " = " + f.get(c) + '\n';
  }
  return out;
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  require(out.good(), ErrorCategory::io_error, "cannot write " + p.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

}  // namespace detail

// Trajectory table: polyline blocks, one row per reported time with header
// "t,x[,y],flags"; flags = node_encounters|clamps|escaped.
inline std::string trajectories_to_csv(const std::vector<Trajectory>& trajs,
                                       int dims) {
  std::string out = dims == 2 ? "t,x,y,flags\n" : "t,x,flags\n";
  char buf[128];
  for (const auto& tr : trajs) {
    out += "# trajectory seed=" + std::to_string(tr.seed) + "\n";
    const std::string flags = std::to_string(tr.flags.node_encounters) + "|" +
                              std::to_string(tr.flags.clamps) + "|" +
                              (tr.flags.escaped ? "1" : "0");
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      int len;
      if (dims == 2)
        len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", tr.times[i],
                            tr.positions[i][0], tr.positions[i][1]);
      else
        len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,", tr.times[i],
                            tr.positions[i][0]);
      out.append(buf, len);
      out += flags;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

inline std::string summary_to_csv(const std::vector<TrajectorySummary>& rows,
                                  int dims) {
  std::string out =
      dims == 2
          ? "seed,x0,y0,xT,yT,vxT,swapped,exit_branch,tie,min_window_distance,"
            "crossed_axis,record_mismatch,node_encounters,clamps,escaped\n"
          : "seed,x0,xT,vxT,swapped,exit_branch,tie,min_window_distance,"
            "crossed_axis,record_mismatch,node_encounters,clamps,escaped\n";
  char buf[256];
  for (const auto& r : rows) {
    int len;
    if (dims == 2)
      len = std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g",
                          static_cast<unsigned long long>(r.seed), r.start[0],
                          r.start[1], r.finish[0], r.finish[1], r.final_velocity_x);
    else
      len = std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g",
                          static_cast<unsigned long long>(r.seed), r.start[0],
                          r.finish[0], r.final_velocity_x);
    out.append(buf, len);
    len = std::snprintf(buf, sizeof buf, ",%d,%d,%d,%.17g,%d,%d,%d,%d,%d\n",
                        r.swapped ? 1 : 0, r.exit_branch, r.classification_tie ? 1 : 0,
                        std::isfinite(r.min_window_distance) ? r.min_window_distance
                                                             : -1.0,
                        r.crossed_axis ? 1 : 0, r.record_mismatch ? 1 : 0,
                        r.flags.node_encounters, r.flags.clamps,
                        r.flags.escaped ? 1 : 0);
    out.append(buf, len);
  }
  return out;
}

// Writes every deterministic artifact of a completed run into out_dir; the
// manifest (with wall-clock metadata) is written last by the caller.
inline void write_run_artifacts(const ScenarioReport& rep,
                                const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const int dims = rep.config.two_dimensional() ? 2 : 1;

  detail::write_text(out_dir / "report.json", report_to_json(rep));
  detail::write_text(out_dir / "config_echo.cfg", config_to_cfg_text(rep.config));
  detail::write_text(out_dir / "trajectories.csv",
                     trajectories_to_csv(rep.plot_trajectories, dims));
  detail::write_text(out_dir / "summary.csv", summary_to_csv(rep.summary, dims));

  if (!rep.pointer_series.empty()) {
    std::string s = "t,mean_py,mean_y\n";
    char buf[128];
    for (const auto& row : rep.pointer_series) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row[0],
                                    row[1], row[2]);
      s.append(buf, len);
    }
    detail::write_text(out_dir / "pointer_series.csv", s);
  }
  if (!rep.branch_support.empty()) {
    std::string s = "t,branch,x_lo,x_hi\n";
    char buf[160];
    for (const auto& row : rep.branch_support) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", row[0],
                                    static_cast<int>(row[1]), row[2], row[3]);
      s.append(buf, len);
    }
    detail::write_text(out_dir / "branch_support.csv", s);
  }
  if (!rep.dumps.empty()) {
    fs::create_directories(out_dir / "frames");
    for (const auto& [t, psi] : rep.dumps)
      dump_frame(psi, (out_dir / "frames" /
                       ("frame_t" + detail::fmt_double(t) + ".csv")).string());
  }
}

struct RunManifest {
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> artifacts;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
};

inline void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir) {
  JsonWriter w;
  w.begin_object();
  w.key("config_path").value(m.config_path);
  w.key("output_dir").value(m.output_dir);
  w.key("tool_version").value(m.tool_version);
  w.key("wall_seconds").value(m.wall_seconds);
  w.key("artifacts").begin_array();
  for (const auto& a : m.artifacts) {
    require(std::filesystem::exists(out_dir / a), ErrorCategory::missing_artifacts,
            "artifact missing at manifest time: " + a);
    w.value(a);
  }
  w.end_array();
  w.end_object();
  detail::write_text(out_dir / "manifest.json", w.str() + "\n");
}

}  // namespace pw
