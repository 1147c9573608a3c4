#pragma once

// Drive chain sizing and evaluation: momentum-theory hover power, motor
// operating points on gridded efficiency maps, gearbox transformation,
// direct vs geared comparison, heat losses and the mass rollup.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uam::powertrain {

struct PowertrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RotorSpec {
  double radius = 2.64;            // m
  int blades = 3;
  double tip_mach_normal = 0.45;
  double tip_mach_emergency = 0.65;
  double disc_loading = 200.0;     // N/m^2
};

// Regular grid over (rpm, torque) with bilinear interpolation.
struct EfficiencyMap {
  std::vector<double> rpm;     // ascending
  std::vector<double> torque;  // ascending
  std::vector<std::vector<double>> eta;  // eta[i][j] at (rpm[i], torque[j])
  double max_rpm = 0.0;     // envelope; defaults to grid bounds on load
  double max_torque = 0.0;
  double max_power = 0.0;   // W; 0 = unlimited

  double interpolate(double rpm_value, double torque_value) const;
};

// Long-format CSV: header `rpm,torque_nm,efficiency`, one row per node.
EfficiencyMap load_map_csv(const std::string& path);

struct Motor {
  EfficiencyMap map;
  double mass = 0.0;  // kg
};

struct Controller {
  double efficiency_normal = 0.965;     // at rated power
  double efficiency_emergency = 0.970;  // at peak power
  double rated_power = 30e3;            // W electrical
  double peak_power = 61e3;
  double mass = 8.5;
};

// Load-dependent controller efficiency: linear between the rated and peak
// calibration points, clamped outside.
double controller_efficiency(const Controller& c, double input_power);

struct GearboxSpec {
  double ratio = 5.0;       // >= 1; motor speed = rotor speed * ratio
  double efficiency = 0.985;
  double mass = 26.0;
  double max_output_torque = 700.0;  // Nm at the rotor side
};

struct DriveChain {
  Motor motor;
  Controller controller;
  std::optional<GearboxSpec> gearbox;
};

// Ideal induced hover power divided by the figure of merit:
// P = T^1.5 / sqrt(2 rho A) / FM.
double hover_power(const RotorSpec& rotor, double thrust_n, double air_density,
                   double figure_of_merit);

struct OperatingPoint {
  double motor_rpm = 0.0;
  double motor_torque = 0.0;   // Nm
  double mechanical_power = 0.0;  // W at the motor shaft
  double electrical_power = 0.0;  // W into the motor
  double efficiency = 0.0;        // motor efficiency at the point
};

// Gear transform plus map lookup. Throws PowertrainError naming the
// violated limit when outside the envelope.
OperatingPoint operating_point(const DriveChain& chain, double rotor_rpm,
                               double rotor_torque);

// P_elec - P_mech.
double motor_heat(const OperatingPoint& point);

// Controller input power and dissipation for a motor drawing
// motor_electrical_w; heat = P_in * (1 - eta_mc).
double controller_heat(const Controller& c, double motor_electrical_w);

struct RotorPoint {
  std::string name;
  double rotor_rpm = 0.0;
  double rotor_torque = 0.0;  // per drive unit share
};

struct PointComparison {
  std::string name;
  double direct_efficiency = 0.0;
  double geared_efficiency = 0.0;
  double direct_heat = 0.0;  // motor heat, W
  double geared_heat = 0.0;
};

struct ArchitectureComparison {
  std::vector<PointComparison> points;
  std::vector<std::string> envelope_errors;
  double direct_mass = 0.0;  // 8 motors + 8 controllers
  double geared_mass = 0.0;  // 8 motors + 8 controllers + 8 gearboxes
  double mass_saving = 0.0;  // (direct - geared) / direct
  double direct_heat_total = 0.0;
  double geared_heat_total = 0.0;
};

ArchitectureComparison compare_architectures(const DriveChain& direct,
                                             const DriveChain& geared,
                                             const std::vector<RotorPoint>& points,
                                             int unit_count = 8);

struct MassRow {
  std::string item;
  double per_unit = 0.0;
  int count = 0;
  double total = 0.0;
};

struct MassTable {
  std::vector<MassRow> rows;
  double total = 0.0;
};

struct MassInputs {
  double main_motor = 12.3;
  double main_controller = 8.5;
  double gearbox = 26.0;
  double push_motor = 12.3;
  double push_controller = 8.5;
  double main_pack = 120.0;
  double push_pack = 248.0;
  int main_units = 8;   // 2 per rotor
  int push_units = 2;
  int main_packs = 4;
};

MassTable mass_rollup(const MassInputs& in);

}  // namespace uam::powertrain
