// pwrun: batch front end for the pilotwave scenario laboratory.
//
//   pwrun run <config.cfg> <outdir> [section.key=value ...]
//   pwrun list-scenarios
//   pwrun export-plotdata <outdir>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "pilotwave/pilotwave.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(pw::ErrorCategory c) {
  switch (c) {
    case pw::ErrorCategory::parse_error:
      return 2;
    case pw::ErrorCategory::validation_error:
    case pw::ErrorCategory::geometry_error:
    case pw::ErrorCategory::invalid_extent:
    case pw::ErrorCategory::invalid_points:
    case pw::ErrorCategory::support_overflow:
    case pw::ErrorCategory::empty_spec_list:
      return 3;
    case pw::ErrorCategory::missing_artifacts:
      return 5;
    default:
      return 4;
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  pw::ScenarioConfig cfg = pw::load_config(config_path);
  pw::apply_overrides(cfg, overrides);
  pw::validate_config(cfg);

  pw::ScenarioReport rep = pw::run_scenario(cfg);
  pw::write_run_artifacts(rep, out_dir);

  pw::RunManifest manifest;
  manifest.config_path = config_path;
  manifest.output_dir = out_dir;
  manifest.artifacts = {"report.json", "config_echo.cfg", "trajectories.csv",
                        "summary.csv"};
  if (!rep.pointer_series.empty()) manifest.artifacts.push_back("pointer_series.csv");
  if (!rep.branch_support.empty()) manifest.artifacts.push_back("branch_support.csv");
  for (const auto& [t, psi] : rep.dumps) {
    (void)psi;
    manifest.artifacts.push_back("frames/frame_t" + pw::detail::fmt_double(t) +
                                 ".csv");
  }
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  pw::write_manifest(manifest, out_dir);

  std::cout << "scenario " << cfg.scenario << " done: swap_fraction="
            << rep.swap_fraction << " equivariance_ks=" << rep.equivariance.value
            << " -> " << out_dir << "/report.json\n";
  return 0;
}

int cmd_list_scenarios() {
  struct Row {
    const char* id;
    const char* text;
  };
  const Row rows[] = {
      {"crossing",
       "two mirror wave packets meet head-on; the formerly empty packet "
       "carries the particle away"},
      {"fast_recorder",
       "a pointer on the empty-wave path is displaced before the packets "
       "overlap; the swap is suppressed"},
      {"spin_recorder",
       "the empty wave flips internal levels along its path; the flip record "
       "and the trajectory disagree"},
      {"protective",
       "weak adiabatic density probe of a boxed ground state; the pointer "
       "reads |psi|^2 at B while the particle stays near A"},
  };
  for (const auto& r : rows)
    std::cout << r.id << "\t" << r.text << "\tconfigs/" << r.id << ".cfg\n";
  return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int cmd_export_plotdata(const std::string& run_dir) {
  const fs::path dir(run_dir);
  for (const char* required : {"report.json", "trajectories.csv", "summary.csv"})
    pw::require(fs::exists(dir / required), pw::ErrorCategory::missing_artifacts,
                std::string(required) + " not found in " + run_dir);

  const fs::path plot = dir / "plot";
  fs::create_directories(plot);

  // (a) trajectory polylines: whitespace-separated columns, blank line
  // between trajectories (gnuplot/np.loadtxt friendly).
  {
    std::ifstream in(dir / "trajectories.csv");
    std::ofstream out(plot / "trajectories.dat");
    std::string line;
    std::getline(in, line);  // header
    out << "# " << line << "\n";
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') {
        out << "\n";
        continue;
      }
      auto cols = split_csv_line(line);
      for (std::size_t i = 0; i + 1 < cols.size(); ++i)
        out << cols[i] << (i + 2 < cols.size() ? " " : "\n");
    }
  }

  // (b) density heat-map per dumped frame.
  if (fs::exists(dir / "frames")) {
    for (const auto& entry : fs::directory_iterator(dir / "frames")) {
      std::ifstream in(entry.path());
      std::string header;
      std::getline(in, header);
      auto head_cols = split_csv_line(header);
      const bool two_d = head_cols.size() >= 2 && head_cols[1] == "y";
      const bool spin = std::find(head_cols.begin(), head_cols.end(), "spin") !=
                        head_cols.end();
      // rho summed over spin rows sharing a position.
      std::map<std::string, double> rho;
      std::vector<std::string> order;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cols = split_csv_line(line);
        const std::size_t pos_cols = two_d ? 2 : 1;
        std::string key = cols[0];
        if (two_d) key += "," + cols[1];
        const double re = std::stod(cols[pos_cols + (spin ? 1 : 0)]);
        const double im = std::stod(cols[pos_cols + (spin ? 1 : 0) + 1]);
        auto it = rho.find(key);
        if (it == rho.end()) {
          rho.emplace(key, re * re + im * im);
          order.push_back(key);
        } else {
          it->second += re * re + im * im;
        }
      }
      std::ofstream out(plot / ("density_" + entry.path().stem().string() + ".csv"));
      out << (two_d ? "x,y,rho\n" : "x,rho\n");
      char buf[64];
      for (const auto& key : order) {
        std::snprintf(buf, sizeof buf, ",%.17g\n", rho[key]);
        out << key << buf;
      }
    }
  }

  // (c) branch-support outlines and pointer drift pass through.
  if (fs::exists(dir / "branch_support.csv"))
    fs::copy_file(dir / "branch_support.csv", plot / "branch_support.csv",
                  fs::copy_options::overwrite_existing);
  if (fs::exists(dir / "pointer_series.csv"))
    fs::copy_file(dir / "pointer_series.csv", plot / "pointer_mean.csv",
                  fs::copy_options::overwrite_existing);

  std::cout << "plot data written to " << (plot).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilotwave scenario runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("outdir", out_dir, "output directory")->required();
  run->add_option("overrides", overrides, "section.key=value overrides");

  auto* list = app.add_subcommand("list-scenarios", "list available scenarios");

  auto* exp = app.add_subcommand("export-plotdata",
                                 "emit plot-ready files from a run directory");
  exp->add_option("rundir", run_dir, "completed run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, overrides);
    if (list->parsed()) return cmd_list_scenarios();
    if (exp->parsed()) return cmd_export_plotdata(run_dir);
  } catch (const pw::Error& e) {
    std::cerr << "error[" << pw::to_string(e.category()) << "]: " << e.what()
              << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[runtime]: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
