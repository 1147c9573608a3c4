#include "uam/powertrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace uam::powertrain {

namespace {

// index of the grid interval containing x; clamps to the outermost interval
size_t interval(const std::vector<double>& axis, double x) {
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  size_t hi = static_cast<size_t>(it - axis.begin());
  if (hi == 0) return 0;
  if (hi >= axis.size()) return axis.size() - 2;
  return hi - 1;
}

double rpm_to_rad(double rpm) { return rpm * 2.0 * std::numbers::pi / 60.0; }

}  // namespace

double EfficiencyMap::interpolate(double rpm_value, double torque_value) const {
  if (rpm.size() < 2 || torque.size() < 2) {
    throw PowertrainError("efficiency map needs at least a 2x2 grid");
  }
  size_t i = interval(rpm, rpm_value);
  size_t j = interval(torque, torque_value);
  double tx = (rpm_value - rpm[i]) / (rpm[i + 1] - rpm[i]);
  double ty = (torque_value - torque[j]) / (torque[j + 1] - torque[j]);
  tx = std::clamp(tx, 0.0, 1.0);
  ty = std::clamp(ty, 0.0, 1.0);
  double a = eta[i][j] * (1 - tx) + eta[i + 1][j] * tx;
  double b = eta[i][j + 1] * (1 - tx) + eta[i + 1][j + 1] * tx;
  return a * (1 - ty) + b * ty;
}

EfficiencyMap load_map_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PowertrainError("cannot open efficiency map '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  std::map<double, std::map<double, double>> grid;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double n = 0.0, t = 0.0, e = 0.0;
    char c1 = 0, c2 = 0;
    if (!(row >> n >> c1 >> t >> c2 >> e) || c1 != ',' || c2 != ',') {
      throw PowertrainError(path + ":" + std::to_string(lineno) + ": bad map row");
    }
    if (!(e > 0.0 && e <= 1.0)) {
      throw PowertrainError(path + ":" + std::to_string(lineno) +
                            ": efficiency outside (0,1]");
    }
    grid[n][t] = e;
  }
  EfficiencyMap out;
  for (const auto& [n, cols] : grid) out.rpm.push_back(n);
  for (const auto& [t, e] : grid.begin()->second) out.torque.push_back(t);
  for (const auto& [n, cols] : grid) {
    if (cols.size() != out.torque.size()) {
      throw PowertrainError(path + ": ragged grid at rpm " + std::to_string(n));
    }
    std::vector<double> row;
    for (const auto& [t, e] : cols) row.push_back(e);
    out.eta.push_back(std::move(row));
  }
  out.max_rpm = out.rpm.back();
  out.max_torque = out.torque.back();
  out.max_power = 0.0;
  return out;
}

double controller_efficiency(const Controller& c, double input_power) {
  if (input_power <= c.rated_power) return c.efficiency_normal;
  if (input_power >= c.peak_power) return c.efficiency_emergency;
  double t = (input_power - c.rated_power) / (c.peak_power - c.rated_power);
  return c.efficiency_normal + t * (c.efficiency_emergency - c.efficiency_normal);
}

double hover_power(const RotorSpec& rotor, double thrust_n, double air_density,
                   double figure_of_merit) {
  if (thrust_n < 0.0) throw PowertrainError("hover_power: thrust must be >= 0");
  if (!(figure_of_merit > 0.0 && figure_of_merit <= 1.0)) {
    throw PowertrainError("hover_power: figure of merit outside (0,1]");
  }
  double area = std::numbers::pi * rotor.radius * rotor.radius;
  double ideal = std::pow(thrust_n, 1.5) / std::sqrt(2.0 * air_density * area);
  return ideal / figure_of_merit;
}

OperatingPoint operating_point(const DriveChain& chain, double rotor_rpm,
                               double rotor_torque) {
  OperatingPoint out;
  out.motor_rpm = rotor_rpm;
  out.motor_torque = rotor_torque;
  if (chain.gearbox) {
    const GearboxSpec& gb = *chain.gearbox;
    if (rotor_torque > gb.max_output_torque) {
      throw PowertrainError("gearbox output torque limit exceeded: " +
                            std::to_string(rotor_torque) + " > " +
                            std::to_string(gb.max_output_torque) + " Nm");
    }
    out.motor_rpm = rotor_rpm * gb.ratio;
    out.motor_torque = rotor_torque / gb.ratio / gb.efficiency;
  }
  const EfficiencyMap& map = chain.motor.map;
  if (out.motor_torque > map.max_torque) {
    throw PowertrainError("motor torque limit exceeded: " +
                          std::to_string(out.motor_torque) + " > " +
                          std::to_string(map.max_torque) + " Nm");
  }
  if (out.motor_rpm > map.max_rpm) {
    throw PowertrainError("motor speed limit exceeded: " +
                          std::to_string(out.motor_rpm) + " > " +
                          std::to_string(map.max_rpm) + " RPM");
  }
  out.mechanical_power = out.motor_torque * rpm_to_rad(out.motor_rpm);
  if (map.max_power > 0.0 && out.mechanical_power > map.max_power) {
    throw PowertrainError("motor power limit exceeded: " +
                          std::to_string(out.mechanical_power) + " > " +
                          std::to_string(map.max_power) + " W");
  }
  out.efficiency = map.interpolate(out.motor_rpm, out.motor_torque);
  out.electrical_power = out.mechanical_power / out.efficiency;
  return out;
}

double motor_heat(const OperatingPoint& point) {
  return point.electrical_power - point.mechanical_power;
}

double controller_heat(const Controller& c, double motor_electrical_w) {
  // iterate once: efficiency depends on input power, input on efficiency
  double eta = controller_efficiency(c, motor_electrical_w);
  double input = motor_electrical_w / eta;
  eta = controller_efficiency(c, input);
  input = motor_electrical_w / eta;
  return input * (1.0 - eta);
}

ArchitectureComparison compare_architectures(const DriveChain& direct,
                                             const DriveChain& geared,
                                             const std::vector<RotorPoint>& points,
                                             int unit_count) {
  ArchitectureComparison out;
  for (const auto& pt : points) {
    PointComparison cmp;
    cmp.name = pt.name;
    try {
      auto d = operating_point(direct, pt.rotor_rpm, pt.rotor_torque);
      cmp.direct_efficiency = d.efficiency;
      cmp.direct_heat = motor_heat(d);
      out.direct_heat_total += unit_count * cmp.direct_heat;
    } catch (const PowertrainError& err) {
      out.envelope_errors.push_back(pt.name + " (direct): " + err.what());
    }
    try {
      auto g = operating_point(geared, pt.rotor_rpm, pt.rotor_torque);
      cmp.geared_efficiency = g.efficiency;
      cmp.geared_heat = motor_heat(g);
      out.geared_heat_total += unit_count * cmp.geared_heat;
    } catch (const PowertrainError& err) {
      out.envelope_errors.push_back(pt.name + " (geared): " + err.what());
    }
    out.points.push_back(std::move(cmp));
  }
  auto chain_mass = [&](const DriveChain& chain) {
    return unit_count * (chain.motor.mass + chain.controller.mass +
                         (chain.gearbox ? chain.gearbox->mass : 0.0));
  };
  out.direct_mass = chain_mass(direct);
  out.geared_mass = chain_mass(geared);
  out.mass_saving =
      out.direct_mass > 0.0 ? (out.direct_mass - out.geared_mass) / out.direct_mass : 0.0;
  return out;
}

MassTable mass_rollup(const MassInputs& in) {
  MassTable out;
  auto row = [&](const std::string& item, double per_unit, int count) {
    MassRow r{item, per_unit, count, per_unit * count};
    out.total += r.total;
    out.rows.push_back(std::move(r));
  };
  row("main rotor motor", in.main_motor, in.main_units);
  row("main rotor motor controller", in.main_controller, in.main_units);
  row("main rotor gearbox", in.gearbox, in.main_units);
  row("push motor", in.push_motor, in.push_units);
  row("push motor controller", in.push_controller, in.push_units);
  row("main battery pack", in.main_pack, in.main_packs);
  row("push battery pack", in.push_pack, 1);
  return out;
}

}  // namespace uam::powertrain
