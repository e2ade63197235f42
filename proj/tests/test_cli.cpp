#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "harmlab/errors.hpp"
#include "harmlab/pipelines.hpp"

using namespace harmlab;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("harmlab_test_" + name)).string();
}

Json base_config(const std::string& pipeline, const Json& scenario, int res) {
  Json j;
  j["schema_version"] = 1;
  j["pipeline"] = pipeline;
  j["scenario"] = scenario;
  j["resolution"] = {res};
  return j;
}

std::string config_error_path(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST_CASE("config validation names the offending path") {
  Json ok = base_config("betti", {{"kind", "pair_of_pants"}}, 32);
  CHECK(config_error_path(ok).empty());

  Json missing = ok;
  missing.erase("resolution");
  CHECK(config_error_path(missing) == "/resolution");

  Json unknown = ok;
  unknown["scenario"]["hole_radius"] = 0.5;
  CHECK(config_error_path(unknown) == "/scenario/hole_radius");

  Json top = ok;
  top["colour"] = "blue";
  CHECK(config_error_path(top) == "/colour");

  Json version = ok;
  version["schema_version"] = 2;
  CHECK(config_error_path(version) == "/schema_version");

  Json kind = ok;
  kind["scenario"]["kind"] = "torus";
  CHECK(config_error_path(kind) == "/scenario/kind");

  Json type = ok;
  type["solver"] = {{"tolerance", "small"}};
  CHECK(config_error_path(type) == "/solver/tolerance");

  Json res = ok;
  res["resolution"] = {32, -1};
  CHECK(config_error_path(res) == "/resolution/1");

  Json quantity = ok;
  quantity["options"] = {{"quantity", "volume"}};
  CHECK(config_error_path(quantity) == "/options/quantity");
}

TEST_CASE("echoed config parses back to the same config") {
  Json j = base_config("kahler",
                       {{"kind", "annulus"}, {"rings_at", {1.5, 2.0}}, {"grade_first", 1e-4}}, 48);
  j["options"] = {{"alpha", 0.5}};
  ScenarioConfig c = parse_config(j);
  const Json echo = config_to_json(c);
  CHECK(config_to_json(parse_config(echo)).dump() == echo.dump());
  CHECK(echo["options"]["alpha"] == 0.5);
  CHECK(echo["solver"]["tolerance"] == 1e-10);
}

TEST_CASE("betti pipeline on the pair of pants reports rank 2") {
  Report r = run_scenario(parse_config(base_config("betti", {{"kind", "pair_of_pants"}}, 32)));
  CHECK(r.results["betti"]["rank"] == 2);
  CHECK(r.all_pass());
  for (const Check& c : r.checks) {
    CAPTURE(c.name);
    CHECK(!c.oracle.empty());
    CHECK(!c.comparison.empty());
  }
}

TEST_CASE("capacity pipeline reports the energy table and the extrapolation") {
  Report r = run_scenario(parse_config(base_config("capacity", {{"kind", "annulus"}}, 32)));
  REQUIRE(r.tables.size() == 1);
  CHECK(r.tables[0].rows.size() == 4);
  CHECK(r.results["capacity"]["fits"].size() == 3);
  CHECK(r.results["capacity"].contains("limit"));
  CHECK(r.results["exhaustion"]["levels"].size() == 4);
  CHECK(r.all_pass());
}

TEST_CASE("identical configs give byte-identical reports; wall times stay in the sidecar") {
  ScenarioConfig c = parse_config(base_config("periods", {{"kind", "annulus"}}, 32));
  const std::string a = temp_path("det_a.json"), b = temp_path("det_b.json");
  emit_report(run_scenario(c), a, ReportFormat::json);
  emit_report(run_scenario(c), b, ReportFormat::json);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a).find("wall") == std::string::npos);
  CHECK(std::filesystem::exists(a + ".timing.json"));
  for (const std::string& p : {a, b, a + ".timing.json", b + ".timing.json"}) std::filesystem::remove(p);
}

TEST_CASE("CSV tables have a header row") {
  ScenarioConfig c = parse_config(base_config("capacity", {{"kind", "annulus"}}, 16));
  const std::string p = temp_path("table.csv");
  c.table_path = p;
  write_outputs(run_scenario(c), c);
  const std::string text = read_file(p);
  CHECK(text.rfind("level,radius,energy,iterations,relative_residual\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  std::filesystem::remove(p);
}

TEST_CASE("reports echo every tolerance used") {
  Json j = base_config("classify", {{"kind", "annulus"}}, 16);
  j["solver"] = {{"tolerance", 1e-11}};
  j["thresholds"] = {{"rms_max", 0.2}};
  Report r = run_scenario(parse_config(j));
  const Json out = r.to_json();
  CHECK(out["config"]["solver"]["tolerance"] == 1e-11);
  CHECK(out["config"]["thresholds"]["rms_max"] == 0.2);
  CHECK(out["results"]["classification"]["thresholds"]["rms_max"] == 0.2);
  for (const Json& c : out["checks"]) {
    CHECK(c.contains("tolerance"));
    CHECK(c.contains("oracle"));
  }
}

TEST_CASE("unwritable report path is an io error") {
  Report r;
  try {
    emit_report(r, "/nonexistent-dir/sub/report.json", ReportFormat::json);
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("capacity convergence study shows order above 0.9") {
  Json j = base_config("converge", {{"kind", "annulus"}}, 16);
  j["refinements"] = 2;
  j["options"] = {{"quantity", "capacity"}, {"converge_tolerance", 0.05}};
  Report r = convergence_study(parse_config(j));
  CHECK(r.all_pass());
  for (double p : r.results["convergence"]["observed_orders"]) CHECK(p >= 0.9);
  CHECK(r.tables[0].columns.front() == "resolution");
}

TEST_CASE("pipelines refuse scenarios they do not support") {
  CHECK_THROWS_AS(run_scenario(parse_config(base_config("kahler", {{"kind", "disk"}}, 16))), ConfigError);
  CHECK_THROWS_AS(run_scenario(parse_config(base_config("counterexample", {{"kind", "annulus"}}, 16))),
                  ConfigError);
}
