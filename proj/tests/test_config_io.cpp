#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "pilotwave/pilotwave.hpp"

using namespace pw;

TEST_CASE("defaults exist for every scenario and echo round-trips") {
  for (const auto& id : scenario_ids()) {
    auto cfg = default_config(id);
    validate_config(cfg);
    auto echoed = parse_config_text(config_to_cfg_text(cfg));
    CHECK(echoed == cfg);
  }
}

TEST_CASE("config parser handles comments, sections and errors") {
  const std::string text = R"(# comment
[run]
scenario = crossing
seed = 123

[grid]
points_x = 512
[time]
dt = 0.02
)";
  auto cfg = parse_config_text(text);
  CHECK(cfg.scenario == "crossing");
  CHECK(cfg.seed == 123);
  CHECK(cfg.points_x == 512);
  CHECK(cfg.dt == Catch::Approx(0.02));
  // Untouched keys keep scenario defaults.
  CHECK(cfg.packet_center == default_config("crossing").packet_center);

  CHECK_THROWS_AS(parse_config_text("[grid]\npoints_x = 8\n"), Error);  // no scenario
  CHECK_THROWS_AS(parse_config_text("[run]\nscenario = crossing\nbogus\n"), Error);
  CHECK_THROWS_AS(
      parse_config_text("[run]\nscenario = crossing\n[grid]\nnope = 1\n"), Error);
  CHECK_THROWS_AS(
      parse_config_text("[run]\nscenario = crossing\n[time]\ndt = abc\n"), Error);
}

TEST_CASE("overrides") {
  auto cfg = default_config("crossing");
  apply_overrides(cfg, {"run.trajectories=12", "packets.sigma=2.5"});
  CHECK(cfg.trajectories == 12);
  CHECK(cfg.packet_sigma == Catch::Approx(2.5));
  CHECK_THROWS_AS(apply_overrides(cfg, {"nosuch.key=1"}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, {"run.trajectories"}), Error);
}

TEST_CASE("report JSON parses and the embedded config is equivalent") {
  ScenarioConfig c = default_config("crossing");
  c.trajectories = 20;
  c.equivariance_samples = 200;
  c.plot_trajectories = 5;
  c.dump_times.clear();
  auto rep = run_crossing(c);
  const std::string body = report_to_json(rep);

  auto j = nlohmann::json::parse(body);
  CHECK(j["scenario"] == "crossing");
  CHECK(j["metrics"]["swap_fraction"].get<double>() == rep.swap_fraction);

  // Rebuild the config from the JSON echo via the field table.
  ScenarioConfig rebuilt = default_config(j["config"]["run.scenario"].get<std::string>());
  for (const auto& f : config_fields()) {
    const auto& v = j["config"][f.key];
    std::string text;
    if (f.kind == ConfigField::Kind::text) {
      text = v.get<std::string>();
    } else if (f.kind == ConfigField::Kind::real_list) {
      for (const auto& item : v) {
        if (!text.empty()) text += ' ';
        text += detail::fmt_double(item.get<double>());
      }
    } else if (f.kind == ConfigField::Kind::real) {
      text = detail::fmt_double(v.get<double>());
    } else {
      text = std::to_string(v.get<long long>());
    }
    f.set(rebuilt, text);
  }
  CHECK(rebuilt == c);
}

TEST_CASE("cfg echo text is stable and normalized") {
  auto cfg = default_config("protective");
  const std::string a = config_to_cfg_text(cfg);
  const std::string b = config_to_cfg_text(parse_config_text(a));
  CHECK(a == b);
  CHECK(a.find("[protective]") != std::string::npos);
}
