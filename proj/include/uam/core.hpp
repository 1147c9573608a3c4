#pragma once

// Core domain model shared by every analysis stage: propulsion components,
// the vehicle architecture with its redundancy structure, battery power
// allocation and hazard severity categories.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uam {

enum class ComponentKind {
  Battery,
  MotorController,
  ElectricMotor,
  Gearbox,
  FlightControlComputer,
  DisconnectRelay,
  DisconnectClutch,
  Rotor,
  Propeller,
};

// Returns nullopt for unknown names; callers must treat that as an error,
// never as a silent default.
std::optional<ComponentKind> component_kind_from_string(std::string_view name);
std::string_view to_string(ComponentKind kind);

struct Component {
  std::string id;
  ComponentKind kind = ComponentKind::Battery;
  double failure_rate = 0.0;  // per flight hour, constant (exponential model)
  std::vector<std::string> failure_modes;
  int channels = 1;  // motor controllers: 2 = dual active/passive
};

// One motor-controller + motor (+ gearbox) chain. Two of these drive each
// main rotor; the push propellers use one each without gearbox or clutch.
struct DriveUnit {
  std::string id;
  std::string controller;
  std::string motor;
  std::optional<std::string> gearbox;
  std::optional<std::string> relay;
  std::optional<std::string> clutch;
};

struct RotorDrive {
  std::string rotor_id;
  std::vector<std::string> units;  // DriveUnit ids
};

struct PowerFeed {
  std::string primary;
  std::string alternate;
};

// Battery-to-controller assignment. Keyed by motor controller id.
struct PowerAllocation {
  std::map<std::string, PowerFeed> feeds;
};

struct Architecture {
  std::vector<Component> components;
  std::vector<DriveUnit> drive_units;
  std::vector<RotorDrive> rotors;      // main rotors
  std::vector<std::string> push_units; // DriveUnit ids of the two push drives
  int fcc_count = 0;
  std::vector<std::string> main_batteries;
  std::string push_battery;
  PowerAllocation allocation;

  const Component* find_component(std::string_view id) const;
  const DriveUnit* find_unit(std::string_view id) const;
};

// Ordered: Catastrophic > Hazardous > Major > Minor > NoSafetyEffect.
enum class Severity {
  NoSafetyEffect = 0,
  Minor = 1,
  Major = 2,
  Hazardous = 3,
  Catastrophic = 4,
};

std::optional<Severity> severity_from_string(std::string_view name);
std::string_view to_string(Severity severity);

struct Violation {
  std::string requirement;  // short tag, e.g. "dual-drive"
  std::string detail;
};

// Structural checks for the architecture requirements: dual drive per rotor,
// two decoupling means per motor unit, dual-channel controllers, dual battery
// sources per controller, battery counts, standalone push battery, FCC count
// and reference integrity. Violations are data, not errors.
std::vector<Violation> validate_architecture(const Architecture& arch);

// Historical per-hour failure rates for each component kind. Rotor and
// Propeller default to zero; override in the model file if structural
// failures are to be included.
std::map<ComponentKind, double> default_failure_rates();

}  // namespace uam
