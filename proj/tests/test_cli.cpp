#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "uam/report.hpp"

using namespace uam;
using report::run_cli;

namespace {

std::string bundled_model() { return std::string(UAM_MODEL_DIR) + "/horizonuam.adl"; }

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  std::string path = "/tmp/" + name;
  std::ofstream f(path);
  f << content;
  return path;
}

}  // namespace

TEST_CASE("validate accepts the bundled model") {
  auto r = cli({"validate", bundled_model()});
  CHECK(r.status == 0);
  CHECK(r.out.find("valid") != std::string::npos);
}

TEST_CASE("validate on an empty file is an input error") {
  auto path = temp_file("empty.adl", "");
  auto r = cli({"validate", path});
  CHECK(r.status == 2);
  CHECK(r.err.find("no sections") != std::string::npos);
}

TEST_CASE("validate reports structural violations with status 1") {
  // strip the third FCC: requirement is at least three
  std::ifstream in(bundled_model());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto pos = text.find("fcc_count: 3");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "fcc_count: 2");
  auto path = temp_file("two_fcc.adl", text);
  auto r = cli({"validate", path});
  CHECK(r.status == 1);
  CHECK(r.out.find("fcc") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
  auto r = cli({"validate", bundled_model(), "--what"});
  CHECK(r.status == 2);
  CHECK(!r.err.empty());
  auto missing = cli({"cutsets", bundled_model()});
  CHECK(missing.status == 2);
}

TEST_CASE("safety passes on the bundled model") {
  auto r = cli({"safety", bundled_model()});
  CHECK(r.status == 0);
  CHECK(r.out.find("loss_of_rotor_lift") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("safety monte carlo is seed-deterministic") {
  auto a = cli({"safety", bundled_model(), "--trials", "20000"});
  auto b = cli({"safety", bundled_model(), "--trials", "20000"});
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("monte carlo") != std::string::npos);
  // rare-event trees at desk-scale trials are flagged, never silently trusted
  CHECK(a.out.find("unreliable") != std::string::npos);
}

TEST_CASE("cutsets lists minimal sets of the requested tree") {
  auto r = cli({"cutsets", bundled_model(), "--tree", "loss_of_rotor_lift"});
  CHECK(r.status == 0);
  CHECK(r.out.find("unit_1_motor") != std::string::npos);
  // 2x2 unit pairs plus 3 FCC pairs
  CHECK(r.out.find("7 minimal cut sets") != std::string::npos);

  auto bad = cli({"cutsets", bundled_model(), "--tree", "nope"});
  CHECK(bad.status == 2);
}

TEST_CASE("size-battery prints the governing cases") {
  auto r = cli({"size-battery", bundled_model()});
  CHECK(r.status == 0);
  CHECK(r.out.find("43.5 Ah required, governed by emergency-power") != std::string::npos);
  CHECK(r.out.find("governed by emergency-energy") != std::string::npos);
  CHECK(r.out.find("167s x 31p") != std::string::npos);
}

TEST_CASE("simulate mission emits the trace csv") {
  auto r = cli({"simulate", "mission", bundled_model()});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("time_s,pack_id,power_w,energy_wh,soc\n", 0) == 0);
  CHECK(r.out.find("bat_1") != std::string::npos);

  auto f = cli({"simulate", "mission", bundled_model(), "--failure", "battery:bat_1@1791"});
  CHECK(f.status == 0);
  // the failed pack stops drawing: fewer rows than nominal
  CHECK(f.out.size() < r.out.size());
}

TEST_CASE("simulate thermal emits node traces") {
  auto r = cli({"simulate", "thermal", bundled_model(), "--ambient", "25"});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("time_s,node_id,temp_c,q_in_w,q_out_w\n", 0) == 0);
  CHECK(r.out.find("motor_1") != std::string::npos);
}

TEST_CASE("report verdict passes and the json is byte-stable") {
  auto a = cli({"report", bundled_model()});
  CHECK(a.status == 0);
  auto b = cli({"report", bundled_model()});
  CHECK(a.out == b.out);

  auto parsed = report::json::parse(a.out);
  CHECK(parsed["verdict"] == "pass");
  CHECK(parsed["input"]["digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(parsed["battery_sizing"]["main"]["governing_case"] == "emergency-power");
  CHECK(parsed["battery_sizing"]["push"]["governing_case"] == "emergency-energy");
  CHECK(parsed["battery_sizing"]["main"]["required_capacity_ah"].get<double>() ==
        doctest::Approx(43.5).epsilon(0.02));
  CHECK(parsed["battery_sizing"]["push"]["required_capacity_ah"].get<double>() ==
        doctest::Approx(88.8).epsilon(0.02));
  CHECK(parsed["mission"]["infeasible_scenarios"].empty());
  CHECK(parsed["powertrain"]["mass_rollup"]["total_kg"].get<double>() ==
        doctest::Approx(1144.0).epsilon(0.02));
  // emergency coolant exceedance is flagged, not a verdict failure
  CHECK(!parsed["thermal"]["drive"]["emergency"]["flagged"].empty());
  // every section names its source entities
  for (const char* section : {"validation", "safety", "battery_sizing", "mission",
                              "powertrain", "thermal"}) {
    CHECK(parsed[section].contains("entities"));
  }
}

TEST_CASE("report renders markdown and csv projections") {
  auto md = cli({"report", bundled_model(), "--format", "md"});
  CHECK(md.status == 0);
  CHECK(md.out.find("# Propulsion analysis report") != std::string::npos);
  CHECK(md.out.find("**pass**") != std::string::npos);

  auto csv = cli({"report", bundled_model(), "--format", "csv"});
  CHECK(csv.status == 0);
  CHECK(csv.out.rfind("section,name,value\n", 0) == 0);
  CHECK(csv.out.find("report,verdict,pass") != std::string::npos);
}

TEST_CASE("report writes outputs under the -o directory") {
  std::string dir = "/tmp/uamprop_out";
  std::remove((dir + "/report.json").c_str());
  auto r = cli({"report", bundled_model(), "-o", dir});
  CHECK(r.status == 0);
  std::ifstream json_file(dir + "/report.json");
  REQUIRE(json_file.good());
  auto parsed = report::json::parse(json_file);
  CHECK(parsed["verdict"] == "pass");
}

TEST_CASE("degraded single-drive model fails compliance with status 1") {
  std::ifstream in(bundled_model());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  // drop the dual-unit redundancy from the rotor-lift tree: the top event
  // becomes a single series chain at ~1e-4, far beyond the 2.5e-8 budget
  auto pos = text.find("gate dual_unit_loss = AND(unit_1_loss, unit_2_loss)");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 51, "gate dual_unit_loss = OR(unit_1_loss, unit_2_loss)");
  auto path = temp_file("single_drive.adl", text);
  auto r = cli({"safety", path});
  CHECK(r.status == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("missing model file is an input error") {
  auto r = cli({"report", "/tmp/does_not_exist.adl"});
  CHECK(r.status == 2);
  CHECK(r.err.find("cannot read") != std::string::npos);
}
