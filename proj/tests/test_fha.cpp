#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uam/fha.hpp"

using namespace uam;
using namespace uam::fha;

TEST_CASE("classification grid completeness") {
  auto table = default_fha_table();
  CHECK(table.size() == 30);  // 7 modes x 5 functions minus 5 n.a. cells
  // (function, mode) pairs unique
  for (size_t i = 0; i < table.size(); ++i) {
    for (size_t j = i + 1; j < table.size(); ++j) {
      CHECK(!(table[i].function == table[j].function && table[i].mode == table[j].mode));
    }
  }
  CHECK(classify(table, AircraftFunction::ProvideLift, FailureMode::TotalLoss) ==
        Severity::Catastrophic);
  CHECK(classify(table, AircraftFunction::ProvideLift, FailureMode::PartialLoss) ==
        Severity::Hazardous);
  CHECK(classify(table, AircraftFunction::ForwardThrust, FailureMode::TotalLoss) ==
        Severity::Major);
  CHECK(classify(table, AircraftFunction::ForwardThrust, FailureMode::IncorrectOps) ==
        Severity::Catastrophic);
  CHECK(classify(table, AircraftFunction::DiffThrustYaw, FailureMode::UnableToStop) ==
        Severity::Hazardous);
  CHECK(classify(table, AircraftFunction::DiffThrustRoll, FailureMode::Degradation) ==
        Severity::Minor);
  // n.a. cells absent
  CHECK(!classify(table, AircraftFunction::ProvideLift, FailureMode::UnsymPartialLoss));
  CHECK(!classify(table, AircraftFunction::ForwardThrust, FailureMode::PartialLoss));
}

TEST_CASE("allowable probability per severity") {
  CHECK(allowable_probability(Severity::Catastrophic) == 1e-9);
  CHECK(allowable_probability(Severity::Hazardous) == 1e-7);
  CHECK(allowable_probability(Severity::Major) == 1e-5);
  CHECK(allowable_probability(Severity::Minor) == 1e-3);
  BudgetConfig custom;
  custom.major = 5e-6;
  CHECK(allowable_probability(Severity::Major, custom) == 5e-6);
}

TEST_CASE("equal apportionment") {
  auto b = apportion("incorrect rotor ops", 1e-9, 4);
  CHECK(b.per_contributor == 2.5e-10);
  CHECK(apportion("rotor loss", 1e-7, 4).per_contributor == 2.5e-8);
  CHECK(apportion("inadvertent propeller", 1e-9, 2).per_contributor == 5e-10);
  // conservation
  CHECK(b.per_contributor * b.contributors == b.allowable);
}

namespace {

fta::FaultTree fixed_tree(const std::string& id, double p, Severity sev,
                          int contributors) {
  fta::FaultTree t;
  t.id = id;
  t.top = "g";
  t.events["e"] = {"e", 0.0, 1.0, p};
  t.gates["g"] = {"g", fta::GateOp::Or, 0, {"e"}};
  t.severity = sev;
  t.contributors = contributors;
  return t;
}

}  // namespace

TEST_CASE("compliance rows with pass, fail and boundary") {
  std::vector<fta::FaultTree> trees = {
      fixed_tree("rotor_lift_loss", 1.06e-8, Severity::Hazardous, 4),
      fixed_tree("rotor_incorrect_ops", 2.46e-10, Severity::Catastrophic, 4),
      fixed_tree("at_boundary", 2.5e-10, Severity::Catastrophic, 4),
      fixed_tree("over_budget", 3.0e-10, Severity::Catastrophic, 4),
  };
  auto rows = compliance_report(trees);
  REQUIRE(rows.size() == 4);

  CHECK(rows[0].allowable == 2.5e-8);
  CHECK(rows[0].pass);
  CHECK(rows[0].margin == doctest::Approx(2.5e-8 / 1.06e-8));

  CHECK(rows[1].allowable == 2.5e-10);
  CHECK(rows[1].pass);
  CHECK(rows[1].margin == doctest::Approx(2.5e-10 / 2.46e-10));

  // expected equal to allowable passes (<=, not <)
  CHECK(rows[2].pass);
  CHECK(rows[2].margin == doctest::Approx(1.0));

  CHECK(!rows[3].pass);
}

TEST_CASE("unbound hazard yields an explicit unassessed row") {
  std::vector<fta::FaultTree> trees = {
      fixed_tree("rotor_lift_loss", 1.06e-8, Severity::Hazardous, 4)};
  auto rows = compliance_report(trees, {"rotor_lift_loss", "battery_fire"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].hazard == "battery_fire");
  CHECK(!rows[1].assessed);
  CHECK(!rows[1].pass);
}

TEST_CASE("compliance is monotone in basic event rates") {
  auto t = fixed_tree("h", 2.0e-10, Severity::Catastrophic, 4);
  auto pass_before = compliance_report({t})[0].pass;
  REQUIRE(pass_before);
  t.events["e"].fixed_probability = 1.0e-10;  // lower the rate
  CHECK(compliance_report({t})[0].pass);  // never flips pass -> fail
}

TEST_CASE("function rollup mirrors the PASA table") {
  RollupInputs in;
  in.rotor_lift_loss = 1.06e-8;
  in.rotor_incorrect_ops = 2.46e-10;
  in.propeller_incorrect_ops = 2.76e-15;
  auto cells = function_rollup(in, default_fha_table());
  CHECK(cells.size() == 30);
  auto cell = [&](AircraftFunction f, FailureMode m) -> const RollupCell& {
    for (const auto& c : cells) {
      if (c.function == f && c.mode == m) return c;
    }
    FAIL("cell not found");
    return cells[0];
  };

  // total loss of lift: both diagonal pairs
  auto total = cell(AircraftFunction::ProvideLift, FailureMode::TotalLoss);
  REQUIRE(total.expected.has_value());
  CHECK(*total.expected == doctest::Approx(4.49e-16).epsilon(0.01));

  auto partial = cell(AircraftFunction::ProvideLift, FailureMode::PartialLoss);
  REQUIRE(partial.expected.has_value());
  CHECK(*partial.expected == doctest::Approx(4.24e-8).epsilon(0.01));

  auto incorrect = cell(AircraftFunction::DiffThrustRoll, FailureMode::IncorrectOps);
  REQUIRE(incorrect.expected.has_value());
  CHECK(*incorrect.expected == doctest::Approx(9.86e-10).epsilon(0.01));

  auto inadv = cell(AircraftFunction::ProvideLift, FailureMode::InadvertentOps);
  REQUIRE(inadv.expected.has_value());
  CHECK(*inadv.expected == doctest::Approx(9.86e-10).epsilon(0.01));

  auto fwd = cell(AircraftFunction::ForwardThrust, FailureMode::UnableToStop);
  REQUIRE(fwd.expected.has_value());
  CHECK(*fwd.expected == doctest::Approx(5.52e-15).epsilon(0.01));

  // qualitative cells carry severity only
  auto yaw = cell(AircraftFunction::DiffThrustYaw, FailureMode::TotalLoss);
  CHECK(!yaw.expected.has_value());
  CHECK(yaw.severity == Severity::Hazardous);
  auto deg = cell(AircraftFunction::ProvideLift, FailureMode::Degradation);
  CHECK(!deg.expected.has_value());
  CHECK(deg.severity == Severity::Major);
}
