#include "uam/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace uam {

namespace {

struct KindName {
  std::string_view name;
  ComponentKind kind;
};

constexpr KindName kKindNames[] = {
    {"Battery", ComponentKind::Battery},
    {"MotorController", ComponentKind::MotorController},
    {"ElectricMotor", ComponentKind::ElectricMotor},
    {"Gearbox", ComponentKind::Gearbox},
    {"FlightControlComputer", ComponentKind::FlightControlComputer},
    {"DisconnectRelay", ComponentKind::DisconnectRelay},
    {"DisconnectClutch", ComponentKind::DisconnectClutch},
    {"Rotor", ComponentKind::Rotor},
    {"Propeller", ComponentKind::Propeller},
};

constexpr std::string_view kSeverityNames[] = {
    "NoSafetyEffect", "Minor", "Major", "Hazardous", "Catastrophic"};

}  // namespace

std::optional<ComponentKind> component_kind_from_string(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

std::string_view to_string(ComponentKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "?";
}

std::optional<Severity> severity_from_string(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kSeverityNames[i] == name) return static_cast<Severity>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Severity severity) {
  return kSeverityNames[static_cast<int>(severity)];
}

const Component* Architecture::find_component(std::string_view id) const {
  for (const auto& c : components) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const DriveUnit* Architecture::find_unit(std::string_view id) const {
  for (const auto& u : drive_units) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

std::map<ComponentKind, double> default_failure_rates() {
  return {
      {ComponentKind::Battery, 9.31e-5},
      {ComponentKind::MotorController, 4.75e-5},
      {ComponentKind::ElectricMotor, 9.24e-5},
      {ComponentKind::Gearbox, 5.00e-6},
      {ComponentKind::FlightControlComputer, 1.57e-5},
      {ComponentKind::DisconnectRelay, 4.60e-5},
      {ComponentKind::DisconnectClutch, 4.70e-5},
      {ComponentKind::Rotor, 0.0},
      {ComponentKind::Propeller, 0.0},
  };
}

namespace {

void add(std::vector<Violation>& out, std::string req, std::string detail) {
  out.push_back({std::move(req), std::move(detail)});
}

}  // namespace

std::vector<Violation> validate_architecture(const Architecture& arch) {
  std::vector<Violation> out;

  // Reference integrity and id uniqueness first; later checks assume them.
  std::set<std::string> ids;
  for (const auto& c : arch.components) {
    if (!ids.insert(c.id).second) {
      add(out, "unique-ids", "duplicate component id '" + c.id + "'");
    }
  }
  auto check_ref = [&](const std::string& owner, const std::string& ref) {
    if (!ref.empty() && ids.count(ref) == 0) {
      add(out, "reference", owner + " references unknown component '" + ref + "'");
    }
  };
  for (const auto& u : arch.drive_units) {
    check_ref(u.id, u.controller);
    check_ref(u.id, u.motor);
    if (u.gearbox) check_ref(u.id, *u.gearbox);
    if (u.relay) check_ref(u.id, *u.relay);
    if (u.clutch) check_ref(u.id, *u.clutch);
  }

  // Requirement 1: dual active redundant drive train per main rotor.
  for (const auto& r : arch.rotors) {
    if (r.units.size() != 2) {
      std::ostringstream msg;
      msg << "rotor '" << r.rotor_id << "' has " << r.units.size()
          << " drive units, requires exactly 2";
      add(out, "dual-drive", msg.str());
    }
    for (const auto& uid : r.units) {
      const DriveUnit* unit = arch.find_unit(uid);
      if (unit == nullptr) {
        add(out, "reference", "rotor '" + r.rotor_id + "' references unknown drive unit '" + uid + "'");
        continue;
      }
      // Requirement 4: two decoupling means per motor unit.
      if (!unit->relay || !unit->clutch) {
        add(out, "dual-decoupling",
            "drive unit '" + uid + "' lacks relay and clutch decoupling pair");
      }
      // Requirement 5: dual-channel motor controllers.
      const Component* mc = arch.find_component(unit->controller);
      if (mc != nullptr && mc->channels < 2) {
        add(out, "dual-channel-controller",
            "controller '" + mc->id + "' is single channel");
      }
    }
  }

  // Requirement 7: two distinct battery sources per controller, at least
  // 4 main batteries, and each main battery feeds exactly 2 controllers
  // as primary.
  if (arch.main_batteries.size() < 4) {
    add(out, "battery-count", "fewer than 4 main battery packs");
  }
  if (arch.push_battery.empty()) {
    add(out, "battery-count", "no push battery pack declared");
  }
  std::map<std::string, int> primary_load;
  for (const auto& [mc, feed] : arch.allocation.feeds) {
    if (feed.primary == feed.alternate) {
      add(out, "dual-power-source",
          "controller '" + mc + "' has identical primary and alternate battery");
    }
    primary_load[feed.primary] += 1;
  }
  bool is_main_mc_present = !arch.rotors.empty();
  if (is_main_mc_present) {
    for (const auto& bat : arch.main_batteries) {
      int load = primary_load.count(bat) ? primary_load.at(bat) : 0;
      if (load != 2) {
        std::ostringstream msg;
        msg << "main battery '" << bat << "' feeds " << load
            << " controllers as primary, expected 2";
        add(out, "allocation-balance", msg.str());
      }
    }
  }

  // Requirement 8: stand-alone push battery, not shared with main drives.
  if (!arch.push_battery.empty()) {
    std::set<std::string> main_mcs;
    for (const auto& r : arch.rotors) {
      for (const auto& uid : r.units) {
        if (const DriveUnit* u = arch.find_unit(uid)) main_mcs.insert(u->controller);
      }
    }
    for (const auto& [mc, feed] : arch.allocation.feeds) {
      if (main_mcs.count(mc) &&
          (feed.primary == arch.push_battery || feed.alternate == arch.push_battery)) {
        add(out, "standalone-push-battery",
            "push battery '" + arch.push_battery + "' feeds main controller '" + mc + "'");
      }
    }
  }

  // Requirement 10: triple modular redundant FCC setup.
  if (arch.fcc_count < 3) {
    std::ostringstream msg;
    msg << "fcc_count is " << arch.fcc_count << ", requires >= 3";
    add(out, "fcc-redundancy", msg.str());
  }

  for (const auto& c : arch.components) {
    if (!(c.failure_rate >= 0.0) || !std::isfinite(c.failure_rate)) {
      add(out, "failure-rate", "component '" + c.id + "' has invalid failure rate");
    }
  }

  return out;
}

}  // namespace uam
