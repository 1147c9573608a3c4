#pragma once

// Functional hazard assessment: severity classification grid, allowable
// per-hour probability budgets, equal apportionment to contributors and
// the PASA/PSSA compliance rollup.

#include <optional>
#include <string>
#include <vector>

#include "uam/core.hpp"
#include "uam/fta.hpp"

namespace uam::fha {

enum class AircraftFunction {
  ProvideLift,
  DiffThrustPitch,
  DiffThrustRoll,
  DiffThrustYaw,
  ForwardThrust,
};

enum class FailureMode {
  TotalLoss,
  PartialLoss,
  IncorrectOps,
  InadvertentOps,
  UnableToStop,
  UnsymPartialLoss,
  Degradation,
};

std::string_view to_string(AircraftFunction f);
std::string_view to_string(FailureMode m);

struct FunctionFailure {
  AircraftFunction function;
  FailureMode mode;
  Severity severity;
};

// The full classification grid; n.a. cells are simply absent.
// 30 entries: 7 modes x 5 functions minus 5 n.a. cells.
std::vector<FunctionFailure> default_fha_table();

std::optional<Severity> classify(const std::vector<FunctionFailure>& table,
                                 AircraftFunction f, FailureMode m);

struct BudgetConfig {
  double catastrophic = 1e-9;
  double hazardous = 1e-7;
  double major = 1e-5;       // configured default, overridable in [fha]
  double minor = 1e-3;       // configured default, overridable in [fha]
  double no_safety_effect = 1.0;
};

double allowable_probability(Severity severity, const BudgetConfig& config = {});

struct Budget {
  std::string hazard;
  double allowable = 0.0;
  int contributors = 1;
  double per_contributor = 0.0;
};

// Equal split; conserves the total budget exactly.
Budget apportion(const std::string& hazard, double allowable, int contributors);

struct ComplianceRow {
  std::string hazard;
  std::string condition;
  Severity severity = Severity::NoSafetyEffect;
  double allowable = 0.0;  // per-contributor budget
  double expected = 0.0;   // from the bound fault tree
  bool assessed = false;   // false = no tree bound, never a silent pass
  bool pass = false;       // expected <= allowable (boundary passes)
  double margin = 0.0;     // allowable / expected
};

// One row per declared tree. Hazards listed in `required` that have no
// matching tree yield explicit unassessed rows.
std::vector<ComplianceRow> compliance_report(
    const std::vector<fta::FaultTree>& trees,
    const std::vector<std::string>& required = {},
    const BudgetConfig& config = {});

// One PASA cell per Table-2 entry. Catastrophic cells carry numbers rolled
// up from the per-contributor system results; lower severities stay
// qualitative.
struct RollupCell {
  AircraftFunction function;
  FailureMode mode;
  Severity severity;
  std::optional<double> expected;
};

struct RollupInputs {
  double rotor_lift_loss = 0.0;       // per-rotor
  double rotor_incorrect_ops = 0.0;   // per-rotor
  double propeller_incorrect_ops = 0.0;  // per-propeller
  int rotors = 4;
  int propellers = 2;
};

std::vector<RollupCell> function_rollup(const RollupInputs& in,
                                        const std::vector<FunctionFailure>& table);

}  // namespace uam::fha
