#include "uam/fha.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uam::fha {

std::string_view to_string(AircraftFunction f) {
  switch (f) {
    case AircraftFunction::ProvideLift: return "provide lift";
    case AircraftFunction::DiffThrustPitch: return "diff thrust pitch";
    case AircraftFunction::DiffThrustRoll: return "diff thrust roll";
    case AircraftFunction::DiffThrustYaw: return "diff thrust yaw";
    case AircraftFunction::ForwardThrust: return "forward thrust";
  }
  return "?";
}

std::string_view to_string(FailureMode m) {
  switch (m) {
    case FailureMode::TotalLoss: return "total loss";
    case FailureMode::PartialLoss: return "partial loss";
    case FailureMode::IncorrectOps: return "incorrect ops";
    case FailureMode::InadvertentOps: return "inadvertent ops";
    case FailureMode::UnableToStop: return "unable to stop";
    case FailureMode::UnsymPartialLoss: return "unsym partial loss";
    case FailureMode::Degradation: return "degradation";
  }
  return "?";
}

std::vector<FunctionFailure> default_fha_table() {
  using F = AircraftFunction;
  using M = FailureMode;
  using S = Severity;
  // Classification grid for the quadcopter with two push propellers.
  // Rows follow the failure modes; n.a. cells are omitted:
  // partial loss x {yaw, forward}, unsym partial loss x {lift, pitch, roll}.
  return {
      {F::ProvideLift, M::TotalLoss, S::Catastrophic},
      {F::DiffThrustPitch, M::TotalLoss, S::Catastrophic},
      {F::DiffThrustRoll, M::TotalLoss, S::Catastrophic},
      {F::DiffThrustYaw, M::TotalLoss, S::Hazardous},
      {F::ForwardThrust, M::TotalLoss, S::Major},

      {F::ProvideLift, M::PartialLoss, S::Hazardous},
      {F::DiffThrustPitch, M::PartialLoss, S::Hazardous},
      {F::DiffThrustRoll, M::PartialLoss, S::Hazardous},

      {F::ProvideLift, M::IncorrectOps, S::Catastrophic},
      {F::DiffThrustPitch, M::IncorrectOps, S::Catastrophic},
      {F::DiffThrustRoll, M::IncorrectOps, S::Catastrophic},
      {F::DiffThrustYaw, M::IncorrectOps, S::Hazardous},
      {F::ForwardThrust, M::IncorrectOps, S::Catastrophic},

      {F::ProvideLift, M::InadvertentOps, S::Catastrophic},
      {F::DiffThrustPitch, M::InadvertentOps, S::Catastrophic},
      {F::DiffThrustRoll, M::InadvertentOps, S::Catastrophic},
      {F::DiffThrustYaw, M::InadvertentOps, S::Hazardous},
      {F::ForwardThrust, M::InadvertentOps, S::Catastrophic},

      {F::ProvideLift, M::UnableToStop, S::Catastrophic},
      {F::DiffThrustPitch, M::UnableToStop, S::Catastrophic},
      {F::DiffThrustRoll, M::UnableToStop, S::Catastrophic},
      {F::DiffThrustYaw, M::UnableToStop, S::Hazardous},
      {F::ForwardThrust, M::UnableToStop, S::Catastrophic},

      {F::DiffThrustYaw, M::UnsymPartialLoss, S::Minor},
      {F::ForwardThrust, M::UnsymPartialLoss, S::Minor},

      {F::ProvideLift, M::Degradation, S::Major},
      {F::DiffThrustPitch, M::Degradation, S::Major},
      {F::DiffThrustRoll, M::Degradation, S::Minor},
      {F::DiffThrustYaw, M::Degradation, S::Minor},
      {F::ForwardThrust, M::Degradation, S::Minor},
  };
}

std::optional<Severity> classify(const std::vector<FunctionFailure>& table,
                                 AircraftFunction f, FailureMode m) {
  for (const auto& entry : table) {
    if (entry.function == f && entry.mode == m) return entry.severity;
  }
  return std::nullopt;
}

double allowable_probability(Severity severity, const BudgetConfig& config) {
  switch (severity) {
    case Severity::Catastrophic: return config.catastrophic;
    case Severity::Hazardous: return config.hazardous;
    case Severity::Major: return config.major;
    case Severity::Minor: return config.minor;
    case Severity::NoSafetyEffect: return config.no_safety_effect;
  }
  return 1.0;
}

Budget apportion(const std::string& hazard, double allowable, int contributors) {
  Budget b;
  b.hazard = hazard;
  b.allowable = allowable;
  b.contributors = std::max(contributors, 1);
  b.per_contributor = allowable / b.contributors;
  return b;
}

std::vector<ComplianceRow> compliance_report(const std::vector<fta::FaultTree>& trees,
                                             const std::vector<std::string>& required,
                                             const BudgetConfig& config) {
  std::vector<ComplianceRow> rows;
  for (const auto& tree : trees) {
    ComplianceRow row;
    row.hazard = tree.id;
    row.condition = tree.condition;
    row.severity = tree.severity.value_or(Severity::NoSafetyEffect);
    double total = allowable_probability(row.severity, config);
    row.allowable = apportion(tree.id, total, tree.contributors).per_contributor;
    row.expected = fta::evaluate_top(tree);
    row.assessed = true;
    // boundary passes; the relative slack absorbs evaluation roundoff
    // (complement products lose ~1e-7 relative precision on rare events)
    row.pass = row.expected <= row.allowable * (1.0 + 1e-6);
    row.margin = row.expected > 0.0 ? row.allowable / row.expected
                                    : std::numeric_limits<double>::infinity();
    rows.push_back(std::move(row));
  }
  for (const auto& hazard : required) {
    bool bound = std::any_of(trees.begin(), trees.end(),
                             [&](const fta::FaultTree& t) { return t.id == hazard; });
    if (!bound) {
      ComplianceRow row;
      row.hazard = hazard;
      row.condition = "no fault tree bound";
      row.assessed = false;
      row.pass = false;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<RollupCell> function_rollup(const RollupInputs& in,
                                        const std::vector<FunctionFailure>& table) {
  std::vector<RollupCell> cells;
  for (const auto& entry : table) {
    RollupCell cell;
    cell.function = entry.function;
    cell.mode = entry.mode;
    cell.severity = entry.severity;
    if (entry.severity == Severity::Catastrophic) {
      bool lift_like = entry.function == AircraftFunction::ProvideLift ||
                       entry.function == AircraftFunction::DiffThrustPitch ||
                       entry.function == AircraftFunction::DiffThrustRoll;
      switch (entry.mode) {
        case FailureMode::TotalLoss:
          if (lift_like) {
            // both diagonal rotor pairs lost; losing either member grounds
            // the pair, so pair loss is twice the per-rotor figure
            double pair = (in.rotors / 2) * in.rotor_lift_loss;
            cell.expected = pair * pair;
          }
          break;
        case FailureMode::PartialLoss:
          break;  // never catastrophic in the grid
        case FailureMode::IncorrectOps:
        case FailureMode::InadvertentOps:
        case FailureMode::UnableToStop:
          // inadvertent ops and unable-to-stop are subsets of incorrect ops
          if (lift_like) {
            cell.expected = in.rotors * in.rotor_incorrect_ops;
          } else if (entry.function == AircraftFunction::ForwardThrust) {
            cell.expected = in.propellers * in.propeller_incorrect_ops;
          }
          break;
        case FailureMode::UnsymPartialLoss:
        case FailureMode::Degradation:
          break;
      }
    } else if (entry.severity == Severity::Hazardous &&
               entry.mode == FailureMode::PartialLoss) {
      // any one rotor lost
      cell.expected = in.rotors * in.rotor_lift_loss;
    }
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace uam::fha
