#include "uam/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace uam::model {

namespace {

[[noreturn]] void fail(const std::string& message) { throw ModelError(message); }

const adl::Value* entry(const adl::Section* s, const std::string& key) {
  if (s == nullptr) return nullptr;
  for (const auto& kv : s->entries) {
    if (kv.key == key) return &kv.value;
  }
  return nullptr;
}

double num_entry(const adl::Section* s, const std::string& key, double fallback) {
  const adl::Value* v = entry(s, key);
  if (v == nullptr) return fallback;
  if (v->kind != adl::Value::Kind::Number) {
    fail("entry '" + key + "' must be a number");
  }
  return v->number;
}

double num_field(const adl::Object& obj, const std::string& key) {
  const adl::Value* v = obj.field(key);
  if (v == nullptr || v->kind != adl::Value::Kind::Number) {
    fail("'" + obj.id + "' needs numeric field '" + key + "'");
  }
  return v->number;
}

double num_field_or(const adl::Object& obj, const std::string& key, double fallback) {
  const adl::Value* v = obj.field(key);
  if (v == nullptr) return fallback;
  if (v->kind != adl::Value::Kind::Number) {
    fail("'" + obj.id + "' field '" + key + "' must be a number");
  }
  return v->number;
}

std::string text_field(const adl::Object& obj, const std::string& key) {
  const adl::Value* v = obj.field(key);
  if (v == nullptr ||
      (v->kind != adl::Value::Kind::Ident && v->kind != adl::Value::Kind::String)) {
    fail("'" + obj.id + "' needs field '" + key + "'");
  }
  return v->text;
}

std::optional<std::string> opt_text_field(const adl::Object& obj, const std::string& key) {
  const adl::Value* v = obj.field(key);
  if (v == nullptr) return std::nullopt;
  return v->text;
}

// `a, b, c` lists parse as List; a lone name parses as Ident.
std::vector<std::string> name_list(const adl::Value& v, const std::string& what) {
  std::vector<std::string> out;
  if (v.kind == adl::Value::Kind::Ident) {
    out.push_back(v.text);
    return out;
  }
  if (v.kind != adl::Value::Kind::List) fail(what + " must be a name list");
  for (const auto& item : v.items) {
    if (item.kind != adl::Value::Kind::Ident) fail(what + " must list names");
    out.push_back(item.text);
  }
  return out;
}

void bind_components(const adl::Section* s, Architecture& arch) {
  if (s == nullptr) return;
  for (const auto& obj : s->objects) {
    auto kind = component_kind_from_string(obj.kind);
    if (!kind) fail("unknown component kind '" + obj.kind + "' for '" + obj.id + "'");
    Component c;
    c.id = obj.id;
    c.kind = *kind;
    c.failure_rate = num_field_or(obj, "lambda", 0.0);
    if (!(c.failure_rate >= 0.0) || !std::isfinite(c.failure_rate)) {
      fail("component '" + obj.id + "' has invalid lambda");
    }
    c.channels = static_cast<int>(num_field_or(obj, "channels", 1));
    if (const adl::Value* modes = obj.field("modes")) {
      c.failure_modes = name_list(*modes, "'" + obj.id + "' modes");
    }
    arch.components.push_back(std::move(c));
  }
}

void bind_architecture(const adl::Section* s, Architecture& arch) {
  if (s == nullptr) return;
  arch.fcc_count = static_cast<int>(num_entry(s, "fcc_count", 0));
  if (const adl::Value* v = entry(s, "main_batteries")) {
    arch.main_batteries = name_list(*v, "main_batteries");
  }
  if (const adl::Value* v = entry(s, "push_battery")) arch.push_battery = v->text;
  std::vector<std::string> push_units;
  if (const adl::Value* v = entry(s, "push_units")) {
    push_units = name_list(*v, "push_units");
  }
  for (const auto& obj : s->objects) {
    if (obj.kind == "DriveUnit") {
      DriveUnit du;
      du.id = obj.id;
      du.controller = text_field(obj, "controller");
      du.motor = text_field(obj, "motor");
      du.gearbox = opt_text_field(obj, "gearbox");
      du.relay = opt_text_field(obj, "relay");
      du.clutch = opt_text_field(obj, "clutch");
      arch.drive_units.push_back(std::move(du));
    } else if (obj.kind == "RotorDrive") {
      const adl::Value* units = obj.field("units");
      if (units == nullptr) fail("rotor '" + obj.id + "' needs a units list");
      arch.rotors.push_back({obj.id, name_list(*units, "'" + obj.id + "' units")});
    } else {
      fail("unexpected object kind '" + obj.kind + "' in [architecture]");
    }
  }
  arch.push_units = std::move(push_units);
}

void bind_allocation(const adl::Section* s, Architecture& arch) {
  if (s == nullptr) return;
  for (const auto& kv : s->entries) {
    auto names = name_list(kv.value, "allocation for '" + kv.key + "'");
    if (names.size() != 2) {
      fail("allocation for '" + kv.key + "' needs primary and alternate");
    }
    arch.allocation.feeds[kv.key] = {names[0], names[1]};
  }
}

void bind_fault_trees(const adl::Section* s, std::vector<fta::FaultTree>& trees) {
  if (s == nullptr) return;
  for (const auto& decl : s->trees) {
    fta::FaultTree tree;
    tree.id = decl.id;
    for (const auto& kv : decl.fields) {
      if (kv.key == "top") {
        tree.top = kv.value.text;
      } else if (kv.key == "severity") {
        auto sev = severity_from_string(kv.value.text);
        if (!sev) fail("tree '" + decl.id + "': unknown severity '" + kv.value.text + "'");
        tree.severity = *sev;
      } else if (kv.key == "contributors") {
        tree.contributors = static_cast<int>(kv.value.number);
      } else if (kv.key == "condition") {
        tree.condition = kv.value.text;
      } else {
        fail("tree '" + decl.id + "': unknown field '" + kv.key + "'");
      }
    }
    if (tree.top.empty()) fail("tree '" + decl.id + "' has no top gate");
    for (const auto& ev : decl.events) {
      fta::BasicEvent e;
      e.id = ev.id;
      e.lambda = num_field_or(ev, "lambda", 0.0);
      e.exposure = num_field_or(ev, "exposure", 1.0);
      if (const adl::Value* p = ev.field("p")) e.fixed_probability = p->number;
      tree.events[e.id] = std::move(e);
    }
    for (const auto& g : decl.gates) {
      fta::Gate gate;
      gate.id = g.id;
      gate.op = g.op == "AND"    ? fta::GateOp::And
                : g.op == "OR"   ? fta::GateOp::Or
                                 : fta::GateOp::KofN;
      gate.k = g.k;
      gate.children = g.children;
      tree.gates[gate.id] = std::move(gate);
    }
    try {
      fta::validate(tree);
    } catch (const fta::FtaError& e) {
      fail("tree '" + decl.id + "': " + e.what());
    }
    trees.push_back(std::move(tree));
  }
}

void bind_mission(const adl::Section* s, Model& m) {
  if (s == nullptr) return;
  int flights = static_cast<int>(num_entry(s, "flights", 1));
  if (flights < 1) fail("[mission] flights must be >= 1");
  m.turnaround = num_entry(s, "turnaround", m.turnaround);

  struct Decl {
    mission::Segment segment;
    std::optional<int> only_flight;
  };
  std::vector<Decl> decls;
  for (const auto& obj : s->objects) {
    if (obj.kind != "Segment") fail("unexpected object kind '" + obj.kind + "' in [mission]");
    Decl d;
    std::string kind_name = text_field(obj, "kind");
    auto kind = mission::segment_kind_from_string(kind_name);
    if (!kind) fail("segment '" + obj.id + "': unknown kind '" + kind_name + "'");
    d.segment.kind = *kind;
    d.segment.duration = num_field(obj, "duration");
    d.segment.distance = num_field_or(obj, "distance", 0.0);
    d.segment.unit_power = num_field_or(obj, "unit_power", 0.0);
    d.segment.push_power = num_field_or(obj, "push_power", 0.0);
    d.segment.speed =
        d.segment.distance > 0.0 ? d.segment.distance / d.segment.duration : 0.0;
    if (obj.field("only_flight")) {
      d.only_flight = static_cast<int>(num_field(obj, "only_flight"));
    }
    decls.push_back(std::move(d));
  }
  // objects come back sorted by id, so the declaration ids define the order
  for (int f = 1; f <= flights; ++f) {
    mission::Flight flight;
    for (const auto& d : decls) {
      if (d.only_flight && *d.only_flight != f) continue;
      flight.segments.push_back(d.segment);
    }
    m.mission.flights.push_back(std::move(flight));
  }
}

void bind_emergency(const adl::Section* s, mission::EmergencyPolicy& policy) {
  if (s == nullptr) return;
  policy.unit_power = num_entry(s, "unit_power", policy.unit_power);
  policy.single_unit_power = num_entry(s, "single_unit_power", policy.single_unit_power);
  policy.push_power = num_entry(s, "push_power", policy.push_power);
  policy.rotor_out_speed = num_entry(s, "rotor_out_speed", policy.rotor_out_speed);
}

void bind_cells(const adl::Section* s, Model& m) {
  if (s == nullptr) return;
  m.system_voltage = num_entry(s, "system_voltage", m.system_voltage);
  m.push_reserve_factor = num_entry(s, "push_reserve_factor", m.push_reserve_factor);
  for (const auto& obj : s->objects) {
    if (obj.kind != "Cell") fail("unexpected object kind '" + obj.kind + "' in [cells]");
    m.cell.nominal_voltage = num_field(obj, "nominal_voltage");
    m.cell.capacity = num_field(obj, "capacity");
    m.cell.rated_current = num_field(obj, "rated_current");
    m.cell.mass = num_field(obj, "mass");
  }
}

void bind_thermal(const adl::Section* s, ThermalModel& t) {
  if (s == nullptr) return;
  auto& d = t.drive;
  d.motor_capacity = num_entry(s, "motor_capacity", d.motor_capacity);
  d.controller_capacity = num_entry(s, "controller_capacity", d.controller_capacity);
  d.coolant_capacity = num_entry(s, "coolant_capacity", d.coolant_capacity);
  d.motor_air_g = num_entry(s, "motor_air_g", d.motor_air_g);
  d.controller_air_g = num_entry(s, "controller_air_g", d.controller_air_g);
  d.reference_airspeed = num_entry(s, "reference_airspeed", d.reference_airspeed);
  d.air_exponent = num_entry(s, "air_exponent", d.air_exponent);
  d.natural_g = num_entry(s, "natural_g", d.natural_g);
  d.motor_coolant_g = num_entry(s, "motor_coolant_g", d.motor_coolant_g);
  d.controller_coolant_g = num_entry(s, "controller_coolant_g", d.controller_coolant_g);
  d.stagnant_g = num_entry(s, "stagnant_g", d.stagnant_g);
  d.mdot = num_entry(s, "coolant_mdot", d.mdot);
  d.cp = num_entry(s, "coolant_cp", d.cp);
  d.hx_effectiveness = num_entry(s, "hx_effectiveness", d.hx_effectiveness);
  d.fan_airspeed = num_entry(s, "fan_airspeed", d.fan_airspeed);
  d.dt = num_entry(s, "drive_dt", d.dt);

  auto& b = t.battery;
  b.capacity = num_entry(s, "battery_capacity", b.capacity);
  b.loss_fraction = num_entry(s, "battery_loss_fraction", b.loss_fraction);
  b.natural_g = num_entry(s, "battery_natural_g", b.natural_g);
  b.liquid_g = num_entry(s, "battery_liquid_g", b.liquid_g);
  b.mdot = num_entry(s, "battery_mdot", b.mdot);
  b.cp = num_entry(s, "battery_cp", b.cp);
  b.hx_effectiveness = num_entry(s, "battery_hx_effectiveness", b.hx_effectiveness);
  b.dt = num_entry(s, "battery_dt", b.dt);

  for (const auto& obj : s->objects) {
    if (obj.kind != "Heat") fail("unexpected object kind '" + obj.kind + "' in [thermal]");
    if (obj.id.rfind("h_", 0) != 0) {
      fail("heat entry '" + obj.id + "' must be named h_<segment kind>");
    }
    SegmentHeat h;
    h.motor_q = num_field(obj, "motor_q");
    h.controller_q = num_field(obj, "controller_q");
    if (obj.field("airspeed")) h.airspeed = num_field(obj, "airspeed");
    std::string key = obj.id.substr(2);
    if (key == "emergency") {
      t.emergency = h;
    } else {
      t.segment_heat[key] = h;
    }
  }
}

powertrain::DriveChain bind_chain(const adl::Object& obj, const std::string& data_dir) {
  powertrain::DriveChain chain;
  chain.motor.map = powertrain::load_map_csv(data_dir + "/" + text_field(obj, "map"));
  chain.motor.map.max_rpm = num_field_or(obj, "max_rpm", chain.motor.map.max_rpm);
  chain.motor.map.max_torque = num_field_or(obj, "max_torque", chain.motor.map.max_torque);
  chain.motor.map.max_power = num_field_or(obj, "max_power", 0.0);
  chain.motor.mass = num_field_or(obj, "motor_mass", 0.0);
  chain.controller.mass = num_field_or(obj, "controller_mass", chain.controller.mass);
  if (obj.field("gear_ratio")) {
    powertrain::GearboxSpec gb;
    gb.ratio = num_field(obj, "gear_ratio");
    gb.efficiency = num_field_or(obj, "gear_efficiency", gb.efficiency);
    gb.mass = num_field_or(obj, "gearbox_mass", gb.mass);
    gb.max_output_torque = num_field_or(obj, "gearbox_max_torque", gb.max_output_torque);
    chain.gearbox = gb;
  }
  return chain;
}

void bind_powertrain(const adl::Section* s, PowertrainModel& p,
                     const std::string& data_dir) {
  if (s == nullptr) return;
  p.gross_mass = num_entry(s, "gross_mass", p.gross_mass);
  p.air_density = num_entry(s, "air_density", p.air_density);
  p.figure_of_merit = num_entry(s, "figure_of_merit", p.figure_of_merit);
  p.rotor.radius = num_entry(s, "rotor_radius", p.rotor.radius);
  p.rotor.blades = static_cast<int>(num_entry(s, "rotor_blades", p.rotor.blades));
  p.rotor.tip_mach_normal = num_entry(s, "tip_mach_normal", p.rotor.tip_mach_normal);
  p.rotor.tip_mach_emergency =
      num_entry(s, "tip_mach_emergency", p.rotor.tip_mach_emergency);
  p.rotor.disc_loading = num_entry(s, "disc_loading", p.rotor.disc_loading);
  for (const auto& obj : s->objects) {
    if (obj.kind == "Chain") {
      if (obj.id == "geared") {
        p.geared = bind_chain(obj, data_dir);
      } else if (obj.id == "direct") {
        p.direct = bind_chain(obj, data_dir);
      } else if (obj.id == "push") {
        p.push = bind_chain(obj, data_dir);
      } else {
        fail("unknown chain '" + obj.id + "' (expected geared, direct or push)");
      }
    } else if (obj.kind == "Point") {
      std::string name = obj.id.rfind("pt_", 0) == 0 ? obj.id.substr(3) : obj.id;
      p.points.push_back({name, num_field(obj, "rpm"), num_field(obj, "torque")});
    } else {
      fail("unexpected object kind '" + obj.kind + "' in [powertrain]");
    }
  }
}

void bind_fha(const adl::Section* s, fha::BudgetConfig& budgets) {
  if (s == nullptr) return;
  budgets.major = num_entry(s, "major", budgets.major);
  budgets.minor = num_entry(s, "minor", budgets.minor);
}

const SegmentHeat& heat_for(const Model& m, mission::SegmentKind kind) {
  std::string key{mission::to_string(kind)};
  auto it = m.thermal.segment_heat.find(key);
  if (it == m.thermal.segment_heat.end()) {
    fail("no thermal heat entry h_" + key + " in the model");
  }
  return it->second;
}

}  // namespace

Model bind(const adl::Document& doc, const std::string& data_dir) {
  Model m;
  bind_components(doc.section("components"), m.architecture);
  bind_architecture(doc.section("architecture"), m.architecture);
  bind_allocation(doc.section("allocation"), m.architecture);
  bind_fault_trees(doc.section("fault_trees"), m.trees);
  bind_mission(doc.section("mission"), m);
  bind_emergency(doc.section("emergency"), m.policy);
  bind_cells(doc.section("cells"), m);
  bind_thermal(doc.section("thermal"), m.thermal);
  bind_powertrain(doc.section("powertrain"), m.powertrain, data_dir);
  bind_fha(doc.section("fha"), m.budgets);
  return m;
}

Model load_file(const std::string& path, const std::string& data_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto result = adl::parse(buffer.str(), path);
  if (!result.ok()) {
    std::ostringstream msg;
    msg << "parse errors in '" << path << "':";
    for (const auto& e : result.errors) {
      msg << "\n  " << e.span.file << ":" << e.span.line << ":" << e.span.column
          << ": " << e.message;
    }
    fail(msg.str());
  }
  return bind(result.document, data_dir);
}

std::vector<thermal::HeatPhase> drive_heat_phases(
    const Model& m, const std::optional<mission::FailureScenario>& scenario,
    double end_time) {
  std::vector<thermal::HeatPhase> out;
  const double eps = 1e-9;
  auto emit_tail = [&](double onset) {
    if (end_time <= onset + eps) {
      fail("drive_heat_phases: end_time must lie beyond the failure onset");
    }
    const SegmentHeat& em = m.thermal.emergency;
    out.push_back({end_time - onset, em.motor_q, em.controller_q,
                   em.airspeed.value_or(0.0)});
  };
  double t = 0.0;  // mission time, turnarounds excluded
  for (size_t f = 0; f < m.mission.flights.size(); ++f) {
    for (const auto& seg : m.mission.flights[f].segments) {
      const SegmentHeat& h = heat_for(m, seg.kind);
      double air = h.airspeed.value_or(seg.speed);
      if (scenario && scenario->onset <= t + eps) {
        emit_tail(scenario->onset);
        return out;
      }
      if (scenario && scenario->onset < t + seg.duration - eps) {
        out.push_back({scenario->onset - t, h.motor_q, h.controller_q, air});
        emit_tail(scenario->onset);
        return out;
      }
      out.push_back({seg.duration, h.motor_q, h.controller_q, air});
      t += seg.duration;
    }
    if (f + 1 < m.mission.flights.size()) {
      out.push_back({m.turnaround, 0.0, 0.0, 0.0});
    }
  }
  if (scenario) emit_tail(scenario->onset);  // onset at the very end
  return out;
}

std::vector<thermal::BatteryPhase> battery_phases(const Model& m,
                                                  const mission::PackTrace& trace,
                                                  double end_time) {
  std::vector<thermal::BatteryPhase> out;
  const double eps = 1e-9;
  // completed-flight boundaries in mission time
  std::vector<double> boundaries;
  double acc = 0.0;
  for (size_t f = 0; f + 1 < m.mission.flights.size(); ++f) {
    acc += m.mission.flights[f].duration();
    boundaries.push_back(acc);
  }
  size_t next = 0;
  for (size_t i = 0; i < trace.samples.size(); ++i) {
    double t0 = trace.samples[i].time;
    double t1 = i + 1 < trace.samples.size() ? trace.samples[i + 1].time : end_time;
    if (t1 <= t0 + eps) continue;
    while (next < boundaries.size() && t0 >= boundaries[next] - eps) {
      out.push_back({m.turnaround, 0.0});
      ++next;
    }
    out.push_back({t1 - t0, trace.samples[i].power});
  }
  return out;
}

}  // namespace uam::model
