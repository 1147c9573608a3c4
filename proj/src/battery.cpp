#include "uam/battery.hpp"

#include <cmath>
#include <stdexcept>

namespace uam::battery {

namespace {

// ceil with a relative epsilon so that 43.5 / 2.9 yields 15, not 16
int safe_ceil(double x) {
  return static_cast<int>(std::ceil(x - 1e-9 * std::max(1.0, std::fabs(x))));
}

}  // namespace

double discharge_rate(const CellSpec& cell) {
  if (cell.capacity <= 0.0) throw std::invalid_argument("cell capacity must be > 0");
  return cell.rated_current / cell.capacity;
}

double capacity_from_energy(double energy_wh, double system_voltage) {
  if (system_voltage <= 0.0) throw std::invalid_argument("system voltage must be > 0");
  return energy_wh / system_voltage;
}

double capacity_from_power(double power_w, double xi, double system_voltage) {
  if (xi <= 0.0 || system_voltage <= 0.0) {
    throw std::invalid_argument("xi and system voltage must be > 0");
  }
  return power_w / (xi * system_voltage);
}

double available_power(double capacity_ah, double xi, double system_voltage) {
  return capacity_ah * xi * system_voltage;
}

PackLayout layout_pack(double required_capacity, double system_voltage,
                       const CellSpec& cell) {
  if (required_capacity <= 0.0 || system_voltage <= 0.0) {
    throw std::invalid_argument("layout_pack: inputs must be > 0");
  }
  PackLayout out;
  out.series = safe_ceil(system_voltage / cell.nominal_voltage);
  out.parallel = safe_ceil(required_capacity / cell.capacity);
  out.total_cells = out.series * out.parallel;
  out.capacity = out.parallel * cell.capacity;
  out.pack_voltage = out.series * cell.nominal_voltage;
  out.available_power = available_power(out.capacity, discharge_rate(cell),
                                        out.pack_voltage);
  out.mass = out.total_cells * cell.mass;
  return out;
}

std::string_view to_string(SizingCase c) {
  switch (c) {
    case SizingCase::NormalEnergy: return "normal-energy";
    case SizingCase::EmergencyEnergy: return "emergency-energy";
    case SizingCase::NormalPower: return "normal-power";
    case SizingCase::EmergencyPower: return "emergency-power";
  }
  return "?";
}

SizingResult size_pack(const PackInputs& in, const CellSpec& cell) {
  double xi = discharge_rate(cell);
  double f = in.energy_reserve_factor;
  SizingResult out;
  out.requirements = {
      {SizingCase::NormalEnergy,
       capacity_from_energy(f * in.normal_energy_wh, in.system_voltage), false},
      {SizingCase::EmergencyEnergy,
       capacity_from_energy(f * in.emergency_energy_wh, in.system_voltage), false},
      {SizingCase::NormalPower,
       capacity_from_power(in.normal_power_w, xi, in.system_voltage), false},
      {SizingCase::EmergencyPower,
       capacity_from_power(in.emergency_power_w, xi, in.system_voltage), false},
  };
  size_t best = 0;
  for (size_t i = 1; i < out.requirements.size(); ++i) {
    if (out.requirements[i].capacity > out.requirements[best].capacity) best = i;
  }
  out.requirements[best].governs = true;
  out.required_capacity = out.requirements[best].capacity;
  out.governing = out.requirements[best].kind;
  out.layout = layout_pack(out.required_capacity, in.system_voltage, cell);
  return out;
}

}  // namespace uam::battery
