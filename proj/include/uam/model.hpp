#pragma once

// Binds a parsed ADL document to the domain objects the analysis stages
// consume: architecture, fault trees, budgets, mission profile, cell spec,
// thermal calibration and drive-chain configuration.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uam/adl.hpp"
#include "uam/battery.hpp"
#include "uam/core.hpp"
#include "uam/fha.hpp"
#include "uam/fta.hpp"
#include "uam/mission.hpp"
#include "uam/powertrain.hpp"
#include "uam/thermal.hpp"

namespace uam::model {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-drive-unit heat in one mission segment, with the cooling airspeed
// where it differs from the segment ground speed.
struct SegmentHeat {
  double motor_q = 0.0;       // W per motor
  double controller_q = 0.0;  // W per controller
  std::optional<double> airspeed;  // m/s override
};

struct ThermalModel {
  thermal::DriveThermalConfig drive;
  thermal::BatteryThermalConfig battery;
  std::map<std::string, SegmentHeat> segment_heat;  // by segment kind name
  SegmentHeat emergency{2900.0, 1800.0, 26.0};      // single-unit rating
};

struct PowertrainModel {
  double gross_mass = 1954.0;  // kg
  double air_density = 1.225;  // kg/m^3
  double figure_of_merit = 0.785;
  powertrain::RotorSpec rotor;
  powertrain::DriveChain geared;
  powertrain::DriveChain direct;
  powertrain::DriveChain push;
  std::vector<powertrain::RotorPoint> points;  // comparison points
};

struct Model {
  Architecture architecture;
  std::vector<fta::FaultTree> trees;
  fha::BudgetConfig budgets;
  mission::MissionProfile mission;
  mission::EmergencyPolicy policy;
  double turnaround = 300.0;  // s between flights
  battery::CellSpec cell;
  double system_voltage = 600.0;
  double push_reserve_factor = 1.0;  // energy-case multiplier, push pack
  ThermalModel thermal;
  PowertrainModel powertrain;
};

// Throws ModelError naming the offending entity. data_dir resolves the
// efficiency-map paths referenced from [powertrain].
Model bind(const adl::Document& doc, const std::string& data_dir = UAM_DATA_DIR);

// Read + parse + bind. Parse diagnostics are folded into the ModelError
// message, one line per error.
Model load_file(const std::string& path, const std::string& data_dir = UAM_DATA_DIR);

// Heat-phase schedule for one rotor drive loop over the whole mission,
// turnarounds included. With a scenario, phases are truncated at the onset
// and a flat emergency phase covers the retimed remainder (end_time from
// mission::simulate, mission time without turnarounds).
std::vector<thermal::HeatPhase> drive_heat_phases(
    const Model& m, const std::optional<mission::FailureScenario>& scenario = std::nullopt,
    double end_time = 0.0);

// Pack power phases for the battery thermal model, from a simulated pack
// trace; zero-power turnarounds inserted at completed flight boundaries.
std::vector<thermal::BatteryPhase> battery_phases(const Model& m,
                                                  const mission::PackTrace& trace,
                                                  double end_time);

}  // namespace uam::model
