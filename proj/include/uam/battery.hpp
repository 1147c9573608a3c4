#pragma once

// Battery pack sizing: the four capacity relations (energy / power, normal /
// emergency), cell layout and mass. All energies in Wh, powers in W,
// capacities in Ah unless noted.

#include <string>
#include <vector>

namespace uam::battery {

struct CellSpec {
  double nominal_voltage = 3.593;  // V; 167 cells reach the 600 V bus
  double capacity = 2.9;           // Ah
  double rated_current = 10.0;     // A
  double mass = 0.0479;            // kg
};

// xi = rated current / rated capacity, per hour.
double discharge_rate(const CellSpec& cell);

// C = E / U
double capacity_from_energy(double energy_wh, double system_voltage);

// C = P / (xi * U)
double capacity_from_power(double power_w, double xi, double system_voltage);

// P = C * xi * U; exact algebraic inverse of capacity_from_power.
double available_power(double capacity_ah, double xi, double system_voltage);

struct PackLayout {
  int series = 0;
  int parallel = 0;
  int total_cells = 0;
  double capacity = 0.0;      // realized, Ah
  double pack_voltage = 0.0;  // realized, V
  double available_power = 0.0;  // W at rated discharge
  double mass = 0.0;          // cells only; housing and BMS excluded
};

PackLayout layout_pack(double required_capacity, double system_voltage,
                       const CellSpec& cell);

enum class SizingCase { NormalEnergy, EmergencyEnergy, NormalPower, EmergencyPower };

std::string_view to_string(SizingCase c);

struct SizingRequirement {
  SizingCase kind = SizingCase::NormalEnergy;
  double capacity = 0.0;  // Ah
  bool governs = false;
};

struct PackInputs {
  double normal_energy_wh = 0.0;     // whole-mission draw on this pack
  double emergency_energy_wh = 0.0;  // worst-case failure continuation
  double normal_power_w = 0.0;       // peak simultaneous draw, normal ops
  double emergency_power_w = 0.0;    // peak draw under the sizing failure
  double system_voltage = 600.0;
  // reserve factor applied to the energy cases (1.0 = none); the push pack
  // carries 20 % because its normal sizing is not the governing case
  double energy_reserve_factor = 1.0;
};

struct SizingResult {
  std::vector<SizingRequirement> requirements;  // the four cases, fixed order
  double required_capacity = 0.0;               // max over cases
  SizingCase governing = SizingCase::NormalEnergy;
  PackLayout layout;
};

SizingResult size_pack(const PackInputs& in, const CellSpec& cell);

}  // namespace uam::battery
