#include "uam/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace uam::report {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model::ModelError("cannot read model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// cumulative pack energy (Wh) at mission time t from a piecewise trace
double energy_at(const mission::PackTrace& trace, double t) {
  double e = 0.0;
  for (size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    double t1 = i + 1 < trace.samples.size()
                    ? trace.samples[i + 1].time
                    : std::numeric_limits<double>::infinity();
    if (t <= s.time) break;
    e = s.energy + s.power * (std::min(t, t1) - s.time) / 3600.0;
  }
  return e;
}

std::vector<mission::FailureScenario> all_scenarios(const model::Model& m) {
  std::vector<mission::FailureScenario> out;
  for (const auto& b : m.architecture.main_batteries) {
    out.push_back({mission::FailureKind::BatteryLoss, b, 0.0});
  }
  for (const auto& rotor : m.architecture.rotors) {
    out.push_back({mission::FailureKind::RotorLoss, rotor.rotor_id, 0.0});
    for (const auto& uid : rotor.units) {
      out.push_back({mission::FailureKind::DriveUnitLoss, uid, 0.0});
    }
  }
  return out;
}

struct Boundary {
  double time = 0.0;
  bool airborne = false;  // the segment starting here is not a taxi phase
};

std::vector<Boundary> segment_boundaries(const mission::MissionProfile& profile) {
  std::vector<Boundary> out;
  double t = 0.0;
  for (const auto& flight : profile.flights) {
    for (const auto& seg : flight.segments) {
      bool taxi = seg.kind == mission::SegmentKind::TaxiOut ||
                  seg.kind == mission::SegmentKind::TaxiIn;
      out.push_back({t, !taxi});
      t += seg.duration;
    }
  }
  return out;
}

mission::SimOptions sized_options(const model::Model& m, const Analysis& a) {
  mission::SimOptions opts;
  opts.policy = m.policy;
  for (const auto& b : m.architecture.main_batteries) {
    opts.pack_capacity_wh[b] = a.main_pack.layout.capacity * a.main_pack.layout.pack_voltage;
    opts.pack_available_w[b] = a.main_pack.layout.available_power;
  }
  if (!m.architecture.push_battery.empty()) {
    opts.pack_capacity_wh[m.architecture.push_battery] =
        a.push_pack.layout.capacity * a.push_pack.layout.pack_voltage;
    opts.pack_available_w[m.architecture.push_battery] =
        a.push_pack.layout.available_power;
  }
  return opts;
}

std::string scenario_tag(const mission::FailureScenario& s) {
  const char* kind = s.kind == mission::FailureKind::BatteryLoss    ? "battery"
                     : s.kind == mission::FailureKind::RotorLoss    ? "rotor"
                                                                    : "drive-unit";
  std::ostringstream tag;
  tag << kind << ":" << s.target << "@" << s.onset;
  return tag.str();
}

json violations_json(const std::vector<thermal::Violation>& vs) {
  json out = json::array();
  for (const auto& v : vs) {
    out.push_back({{"limit", v.limit}, {"node", v.node}, {"time_s", v.time},
                   {"value_c", v.value}});
  }
  return out;
}

json peaks_json(const std::map<std::string, double>& peaks) {
  json out = json::object();
  for (const auto& [id, peak] : peaks) out[id] = peak;
  return out;
}

}  // namespace

std::string input_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16) << h;
  return out.str();
}

Analysis analyze(const model::Model& m) {
  Analysis a;
  a.validation = validate_architecture(m.architecture);
  a.compliance = fha::compliance_report(m.trees, {}, m.budgets);

  mission::SimOptions bare;
  bare.policy = m.policy;
  auto nominal = mission::simulate(m.mission, m.architecture, std::nullopt, bare);

  double main_normal_e = 0.0, main_normal_p = 0.0;
  for (const auto& b : m.architecture.main_batteries) {
    const auto& tr = nominal.packs.at(b);
    main_normal_e = std::max(main_normal_e, tr.energy);
    main_normal_p = std::max(main_normal_p, tr.peak_power);
  }
  double push_normal_e = 0.0, push_normal_p = 0.0;
  if (!m.architecture.push_battery.empty()) {
    const auto& tr = nominal.packs.at(m.architecture.push_battery);
    push_normal_e = tr.energy;
    push_normal_p = tr.peak_power;
  }

  if (!m.mission.flights.empty()) {
    a.etp = mission::equal_time_point(m.mission, m.mission.flights.size() - 1);
    for (const auto& b : m.architecture.main_batteries) {
      a.energy_at_etp_wh = std::max(
          a.energy_at_etp_wh, energy_at(nominal.packs.at(b), a.etp.mission_time));
    }
  }

  // exhaustive single-failure sweep over every segment boundary, for the
  // worst peak draws; push energy is also worst-case swept (the rotor-out
  // continuation dominates it)
  double push_emergency_p = 0.0;
  auto scenarios = all_scenarios(m);
  auto boundaries = segment_boundaries(m.mission);
  for (auto scenario : scenarios) {
    for (const auto& boundary : boundaries) {
      scenario.onset = boundary.time;
      auto sim = mission::simulate(m.mission, m.architecture, scenario, bare);
      for (const auto& b : m.architecture.main_batteries) {
        if (scenario.kind == mission::FailureKind::BatteryLoss && b == scenario.target) {
          continue;
        }
        a.worst_main_peak_w = std::max(a.worst_main_peak_w, sim.packs.at(b).peak_power);
      }
      if (!m.architecture.push_battery.empty()) {
        const auto& tr = sim.packs.at(m.architecture.push_battery);
        // a ground failure aborts the flight rather than flying it out, so
        // only airborne onsets count toward the energy requirement
        if (boundary.airborne) {
          a.worst_push_energy_wh = std::max(a.worst_push_energy_wh, tr.energy);
        }
        push_emergency_p = std::max(push_emergency_p, tr.peak_power);
      }
    }
  }

  // main emergency energy: the restrictive case is a pack loss at the
  // flight-3 equal time point with continuation to destination
  for (const auto& failed : m.architecture.main_batteries) {
    mission::FailureScenario scenario{mission::FailureKind::BatteryLoss, failed,
                                      a.etp.mission_time};
    auto sim = mission::simulate(m.mission, m.architecture, scenario, bare);
    for (const auto& b : m.architecture.main_batteries) {
      if (b == failed) continue;
      a.worst_main_energy_wh = std::max(a.worst_main_energy_wh, sim.packs.at(b).energy);
    }
  }

  battery::PackInputs main_in;
  main_in.normal_energy_wh = main_normal_e;
  main_in.emergency_energy_wh = a.worst_main_energy_wh;
  main_in.normal_power_w = main_normal_p;
  main_in.emergency_power_w = a.worst_main_peak_w;
  main_in.system_voltage = m.system_voltage;
  a.main_pack = battery::size_pack(main_in, m.cell);

  battery::PackInputs push_in;
  push_in.normal_energy_wh = push_normal_e;
  push_in.emergency_energy_wh = a.worst_push_energy_wh;
  push_in.normal_power_w = push_normal_p;
  push_in.emergency_power_w = push_emergency_p;
  push_in.system_voltage = m.system_voltage;
  push_in.energy_reserve_factor = m.push_reserve_factor;
  a.push_pack = battery::size_pack(push_in, m.cell);

  // nominal run with the sized capacities bound, for SoC and feasibility
  auto opts = sized_options(m, a);
  a.nominal = mission::simulate(m.mission, m.architecture, std::nullopt, opts);

  if (!m.mission.flights.empty() && a.worst_main_peak_w > 0.0) {
    double cap = a.main_pack.layout.capacity * a.main_pack.layout.pack_voltage;
    a.reserve_endurance_min =
        mission::reserve_endurance(cap - a.energy_at_etp_wh, a.worst_main_peak_w);
  }

  // the sweep must stay feasible with the sized packs
  for (auto scenario : scenarios) {
    for (const auto& boundary : boundaries) {
      scenario.onset = boundary.time;
      try {
        mission::simulate(m.mission, m.architecture, scenario, opts);
      } catch (const mission::MissionError& e) {
        a.infeasible.push_back(scenario_tag(scenario) + ": " + e.what());
      }
    }
  }
  return a;
}

namespace {

json sizing_json(const battery::SizingResult& r, const std::string& pack_entity) {
  json reqs = json::array();
  for (const auto& req : r.requirements) {
    reqs.push_back({{"case", std::string(battery::to_string(req.kind))},
                    {"capacity_ah", req.capacity},
                    {"governs", req.governs}});
  }
  return json{{"entity", pack_entity},
              {"requirements", reqs},
              {"required_capacity_ah", r.required_capacity},
              {"governing_case", std::string(battery::to_string(r.governing))},
              {"layout",
               {{"series", r.layout.series},
                {"parallel", r.layout.parallel},
                {"total_cells", r.layout.total_cells},
                {"capacity_ah", r.layout.capacity},
                {"pack_voltage_v", r.layout.pack_voltage},
                {"available_power_w", r.layout.available_power},
                {"mass_kg", r.layout.mass}}}};
}

}  // namespace

json build_report(const model::Model& m, const Analysis& a, const Options& opts,
                  const std::string& input_path, const std::string& digest) {
  json report;
  report["tool"] = {{"name", "uamprop"}, {"version", "1.0.0"}};
  report["input"] = {{"file", input_path}, {"digest", digest}};

  // validation
  json violations = json::array();
  for (const auto& v : a.validation) {
    violations.push_back({{"requirement", v.requirement}, {"detail", v.detail}});
  }
  report["validation"] = {{"entities", {"[components]", "[architecture]", "[allocation]"}},
                          {"violations", violations}};

  // safety
  json safety_rows = json::array();
  for (const auto& row : a.compliance) {
    json r = {{"tree", row.hazard},
              {"condition", row.condition},
              {"severity", std::string(to_string(row.severity))},
              {"allowable_per_hour", row.allowable},
              {"expected_per_hour", row.expected},
              {"assessed", row.assessed},
              {"pass", row.pass},
              {"margin", row.margin}};
    for (const auto& tree : m.trees) {
      if (tree.id != row.hazard) continue;
      auto sets = fta::minimal_cut_sets(tree);
      json first = json::array();
      for (size_t i = 0; i < sets.size() && i < 5; ++i) {
        first.push_back({{"events", sets[i].events}, {"probability", sets[i].probability}});
      }
      r["cut_sets"] = {{"count", sets.size()},
                       {"min_order", sets.empty() ? 0 : sets.front().events.size()},
                       {"first", first}};
      if (opts.trials > 0) {
        auto mc = fta::monte_carlo_top(tree, opts.trials, opts.seed);
        r["monte_carlo"] = {{"estimate", mc.estimate},
                            {"std_error", mc.std_error},
                            {"trials", mc.trials},
                            {"seed", opts.seed},
                            {"reliable", mc.reliable}};
      }
    }
    safety_rows.push_back(std::move(r));
  }
  report["safety"] = {{"entities", {"[fault_trees]", "[fha]"}}, {"rows", safety_rows}};

  // battery sizing
  report["battery_sizing"] = {
      {"entities", {"[cells]", "[mission]", "[emergency]"}},
      {"main", sizing_json(a.main_pack, "main battery packs")},
      {"push", sizing_json(a.push_pack, m.architecture.push_battery)}};

  // mission summary
  json packs = json::object();
  for (const auto& [id, tr] : a.nominal.packs) {
    packs[id] = {{"energy_wh", tr.energy}, {"peak_power_w", tr.peak_power},
                 {"soc", tr.soc}};
  }
  report["mission"] = {
      {"entities", {"[mission]", "[allocation]"}},
      {"packs", packs},
      {"end_time_s", a.nominal.end_time},
      {"equal_time_point",
       {{"mission_time_s", a.etp.mission_time},
        {"flight_time_s", a.etp.flight_time},
        {"energy_wh", a.energy_at_etp_wh}}},
      {"worst_single_failure_pack_w", a.worst_main_peak_w},
      {"reserve_endurance_min", a.reserve_endurance_min},
      {"infeasible_scenarios", a.infeasible}};

  // powertrain
  auto cmp = powertrain::compare_architectures(m.powertrain.direct, m.powertrain.geared,
                                               m.powertrain.points);
  json cmp_points = json::array();
  for (const auto& pt : cmp.points) {
    cmp_points.push_back({{"point", pt.name},
                          {"direct_efficiency", pt.direct_efficiency},
                          {"geared_efficiency", pt.geared_efficiency},
                          {"direct_heat_w", pt.direct_heat},
                          {"geared_heat_w", pt.geared_heat}});
  }
  powertrain::MassInputs mass_in;
  mass_in.main_motor = m.powertrain.geared.motor.mass;
  mass_in.main_controller = m.powertrain.geared.controller.mass;
  mass_in.gearbox = m.powertrain.geared.gearbox ? m.powertrain.geared.gearbox->mass : 0.0;
  mass_in.push_motor = m.powertrain.push.motor.mass;
  mass_in.push_controller = m.powertrain.push.controller.mass;
  mass_in.main_pack = a.main_pack.layout.mass;
  mass_in.push_pack = a.push_pack.layout.mass;
  mass_in.main_units = 2 * static_cast<int>(m.architecture.rotors.size());
  mass_in.push_units = static_cast<int>(m.architecture.push_units.size());
  mass_in.main_packs = static_cast<int>(m.architecture.main_batteries.size());
  auto masses = powertrain::mass_rollup(mass_in);
  json mass_rows = json::array();
  for (const auto& row : masses.rows) {
    mass_rows.push_back({{"item", row.item}, {"per_unit_kg", row.per_unit},
                         {"count", row.count}, {"total_kg", row.total}});
  }
  report["powertrain"] = {
      {"entities", {"[powertrain]"}},
      {"comparison",
       {{"points", cmp_points},
        {"direct_mass_kg", cmp.direct_mass},
        {"geared_mass_kg", cmp.geared_mass},
        {"mass_saving", cmp.mass_saving},
        {"envelope_errors", cmp.envelope_errors}}},
      {"mass_rollup", {{"rows", mass_rows}, {"total_kg", masses.total}}}};

  // thermal
  auto phases = model::drive_heat_phases(m);
  auto air = thermal::simulate_drive_thermal(phases, m.thermal.drive, opts.ambient_c,
                                             thermal::CoolingMode::AirOnly);
  auto combined = thermal::simulate_drive_thermal(phases, m.thermal.drive, opts.ambient_c,
                                                  thermal::CoolingMode::Combined);

  // emergency: rotor loss at the flight-3 equal time point
  mission::FailureScenario em_scenario{mission::FailureKind::RotorLoss,
                                       m.architecture.rotors.empty()
                                           ? std::string{}
                                           : m.architecture.rotors.front().rotor_id,
                                       a.etp.mission_time};
  json emergency = json::object();
  json battery_thermal = json::object();
  std::vector<thermal::Violation> battery_normal_violations;
  if (!m.architecture.rotors.empty() && !m.mission.flights.empty()) {
    mission::SimOptions bare;
    bare.policy = m.policy;
    auto em_sim = mission::simulate(m.mission, m.architecture, em_scenario, bare);
    auto em_phases = model::drive_heat_phases(m, em_scenario, em_sim.end_time);
    auto em = thermal::simulate_drive_thermal(em_phases, m.thermal.drive, opts.ambient_c,
                                              thermal::CoolingMode::Combined);
    emergency = {{"scenario", scenario_tag(em_scenario)},
                 {"peaks_c", peaks_json(em.peak)},
                 {"motor_inlet_peak_c", em.motor_inlet_peak},
                 {"controller2_inlet_peak_c", em.controller2_inlet_peak},
                 {"flagged", violations_json(em.violations)}};

    // battery: nominal liquid-cooled, plus the battery-loss emergency case
    auto pack_phases =
        model::battery_phases(m, a.nominal.packs.at(m.architecture.main_batteries.front()),
                              a.nominal.end_time);
    auto liq = thermal::simulate_battery_thermal(pack_phases, m.thermal.battery,
                                                 opts.ambient_c,
                                                 thermal::BatteryCooling::Liquid);
    battery_normal_violations = liq.violations;
    mission::FailureScenario bat_scenario{mission::FailureKind::BatteryLoss,
                                          m.architecture.main_batteries.front(),
                                          a.etp.mission_time};
    auto bat_sim = mission::simulate(m.mission, m.architecture, bat_scenario, bare);
    const mission::PackTrace* worst = nullptr;
    for (const auto& b : m.architecture.main_batteries) {
      if (b == bat_scenario.target) continue;
      const auto& tr = bat_sim.packs.at(b);
      if (worst == nullptr || tr.peak_power > worst->peak_power) worst = &tr;
    }
    auto em_pack = model::battery_phases(m, *worst, bat_sim.end_time);
    auto em_liq = thermal::simulate_battery_thermal(em_pack, m.thermal.battery, 37.0,
                                                    thermal::BatteryCooling::Liquid);
    double ceiling = thermal::max_feasible_ambient(em_pack, m.thermal.battery,
                                                   thermal::BatteryCooling::Liquid);
    battery_thermal = {
        {"normal", {{"ambient_c", opts.ambient_c}, {"peak_c", liq.peak},
                    {"offset_c", liq.peak_offset},
                    {"violations", violations_json(liq.violations)}}},
        {"emergency", {{"scenario", scenario_tag(bat_scenario)},
                       {"pack", worst->id},
                       {"ambient_c", 37.0},
                       {"peak_c", em_liq.peak},
                       {"offset_c", em_liq.peak_offset}}},
        {"max_feasible_ambient_c", ceiling}};
  }

  auto cooldown_off = thermal::ground_cooldown(air.network, m.thermal.drive, false, 1800.0);
  auto cooldown_on = thermal::ground_cooldown(air.network, m.thermal.drive, true, 1800.0);

  report["thermal"] = {
      {"entities", {"[thermal]"}},
      {"ambient_c", opts.ambient_c},
      {"drive",
       {{"air_only",
         {{"peaks_c", peaks_json(air.peak)},
          {"motor_first_exceedance_s",
           air.motor_first_exceedance ? json(*air.motor_first_exceedance) : json()},
          {"violations", violations_json(air.violations)}}},
        {"combined",
         {{"peaks_c", peaks_json(combined.peak)},
          {"motor_inlet_peak_c", combined.motor_inlet_peak},
          {"controller2_inlet_peak_c", combined.controller2_inlet_peak},
          {"violations", violations_json(combined.violations)}}},
        {"emergency", emergency}}},
      {"battery", battery_thermal},
      {"ground_cooldown",
       {{"fan_off", {{"final_max_c", cooldown_off.final_max},
                     {"violations", violations_json(cooldown_off.violations)}}},
        {"fan_on", {{"final_max_c", cooldown_on.final_max}}}}}};

  // verdict: the normal operating configuration must be clean; emergency
  // exceedances (e.g. the motor coolant inlet) stay flagged, not failing
  bool compliance_ok = true;
  for (const auto& row : a.compliance) {
    if (!row.assessed || !row.pass) compliance_ok = false;
  }
  bool pass = a.validation.empty() && compliance_ok && a.infeasible.empty() &&
              combined.violations.empty() && battery_normal_violations.empty() &&
              cmp.envelope_errors.empty();
  report["verdict"] = pass ? "pass" : "fail";
  return report;
}

std::string render_markdown(const json& report) {
  std::ostringstream md;
  md << "# Propulsion analysis report\n\n";
  md << "- input: `" << report["input"]["file"].get<std::string>() << "`\n";
  md << "- digest: `" << report["input"]["digest"].get<std::string>() << "`\n";
  md << "- verdict: **" << report["verdict"].get<std::string>() << "**\n\n";

  md << "## Validation\n\n";
  const auto& viol = report["validation"]["violations"];
  if (viol.empty()) {
    md << "No architecture violations.\n\n";
  } else {
    for (const auto& v : viol) {
      md << "- " << v["requirement"].get<std::string>() << ": "
         << v["detail"].get<std::string>() << "\n";
    }
    md << "\n";
  }

  md << "## Safety\n\n";
  md << "| hazard | severity | allowable | expected | margin | pass |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& row : report["safety"]["rows"]) {
    md << "| " << row["tree"].get<std::string>() << " | "
       << row["severity"].get<std::string>() << " | "
       << row["allowable_per_hour"].get<double>() << " | "
       << row["expected_per_hour"].get<double>() << " | "
       << row["margin"].get<double>() << " | "
       << (row["pass"].get<bool>() ? "yes" : "no") << " |\n";
  }
  md << "\n## Battery sizing\n\n";
  for (const char* pack : {"main", "push"}) {
    const auto& s = report["battery_sizing"][pack];
    md << "- " << pack << ": " << s["required_capacity_ah"].get<double>()
       << " Ah, governed by " << s["governing_case"].get<std::string>() << ", "
       << s["layout"]["series"].get<int>() << "s x "
       << s["layout"]["parallel"].get<int>() << "p, "
       << s["layout"]["mass_kg"].get<double>() << " kg\n";
  }
  md << "\n## Mass rollup\n\n";
  md << "Total propulsion mass: "
     << report["powertrain"]["mass_rollup"]["total_kg"].get<double>() << " kg\n";
  return md.str();
}

std::string render_csv(const json& report) {
  std::ostringstream csv;
  csv << "section,name,value\n";
  for (const auto& row : report["safety"]["rows"]) {
    csv << "safety," << row["tree"].get<std::string>() << ","
        << (row["pass"].get<bool>() ? "pass" : "fail") << "\n";
  }
  for (const char* pack : {"main", "push"}) {
    const auto& s = report["battery_sizing"][pack];
    csv << "battery_sizing," << pack << "_required_ah,"
        << s["required_capacity_ah"].get<double>() << "\n";
    csv << "battery_sizing," << pack << "_governing,"
        << s["governing_case"].get<std::string>() << "\n";
  }
  for (const auto& [id, p] : report["mission"]["packs"].items()) {
    csv << "mission," << id << "_energy_wh," << p["energy_wh"].get<double>() << "\n";
    csv << "mission," << id << "_soc," << p["soc"].get<double>() << "\n";
  }
  csv << "powertrain,total_mass_kg,"
      << report["powertrain"]["mass_rollup"]["total_kg"].get<double>() << "\n";
  csv << "report,verdict," << report["verdict"].get<std::string>() << "\n";
  return csv.str();
}

namespace {

// `kind:target@time`, e.g. battery:bat_1@1791. Bare kinds pick the first
// matching entity of the bundled naming scheme.
mission::FailureScenario parse_failure(const std::string& text) {
  auto at = text.rfind('@');
  if (at == std::string::npos) {
    throw model::ModelError("--failure needs kind[:target]@time, got '" + text + "'");
  }
  mission::FailureScenario out;
  try {
    out.onset = std::stod(text.substr(at + 1));
  } catch (const std::exception&) {
    throw model::ModelError("--failure time is not a number in '" + text + "'");
  }
  std::string head = text.substr(0, at);
  std::string kind = head, target;
  if (auto colon = head.find(':'); colon != std::string::npos) {
    kind = head.substr(0, colon);
    target = head.substr(colon + 1);
  }
  if (kind == "battery") {
    out.kind = mission::FailureKind::BatteryLoss;
    out.target = target.empty() ? "bat_1" : target;
  } else if (kind == "rotor") {
    out.kind = mission::FailureKind::RotorLoss;
    out.target = target.empty() ? "rotor_1" : target;
  } else if (kind == "drive-unit" || kind == "drive_unit") {
    out.kind = mission::FailureKind::DriveUnitLoss;
    out.target = target.empty() ? "du_1_1" : target;
  } else {
    throw model::ModelError("unknown failure kind '" + kind + "'");
  }
  return out;
}

void write_mission_csv(std::ostream& out, const mission::SimResult& sim,
                       const mission::SimOptions& opts) {
  out << "time_s,pack_id,power_w,energy_wh,soc\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  for (const auto& [id, tr] : sim.packs) {
    double cap = opts.pack_capacity_wh.count(id) ? opts.pack_capacity_wh.at(id) : 0.0;
    for (const auto& s : tr.samples) {
      double soc = cap > 0.0 ? 1.0 - s.energy / cap : 1.0;
      out << fmt(s.time) << "," << id << "," << fmt(s.power) << "," << fmt(s.energy)
          << "," << fmt(soc) << "\n";
    }
  }
}

struct CliContext {
  std::string model_path;
  Options options;
  std::string failure_text;
  std::string format = "json";
  std::string out_dir;
  std::string tree_id;
};

int do_validate(const CliContext& ctx, std::ostream& out) {
  std::string bytes = read_file(ctx.model_path);
  auto parsed = adl::parse(bytes, ctx.model_path);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) {
      out << e.span.file << ":" << e.span.line << ":" << e.span.column << ": "
          << e.message << "\n";
    }
    return 2;
  }
  if (parsed.document.sections.empty()) {
    throw model::ModelError("'" + ctx.model_path + "' declares no sections");
  }
  auto m = model::bind(parsed.document);
  auto violations = validate_architecture(m.architecture);
  for (const auto& v : violations) {
    out << v.requirement << ": " << v.detail << "\n";
  }
  out << (violations.empty() ? "valid" : "invalid") << ": " << ctx.model_path << "\n";
  return violations.empty() ? 0 : 1;
}

int do_safety(const CliContext& ctx, std::ostream& out) {
  auto m = model::load_file(ctx.model_path);
  auto rows = fha::compliance_report(m.trees, {}, m.budgets);
  bool all_pass = !rows.empty();
  for (const auto& row : rows) {
    out << row.hazard << ": expected " << adl::format_number(row.expected)
        << " vs allowable " << adl::format_number(row.allowable) << " -> "
        << (row.pass ? "pass" : "FAIL") << " (margin "
        << adl::format_number(row.margin) << ")\n";
    if (!row.assessed || !row.pass) all_pass = false;
    if (ctx.options.trials > 0) {
      for (const auto& tree : m.trees) {
        if (tree.id != row.hazard) continue;
        auto mc = fta::monte_carlo_top(tree, ctx.options.trials, ctx.options.seed);
        out << "  monte carlo: " << adl::format_number(mc.estimate) << " +- "
            << adl::format_number(mc.std_error) << " (" << mc.trials << " trials"
            << (mc.reliable ? "" : ", unreliable") << ")\n";
      }
    }
  }
  return all_pass ? 0 : 1;
}

int do_cutsets(const CliContext& ctx, std::ostream& out) {
  auto m = model::load_file(ctx.model_path);
  for (const auto& tree : m.trees) {
    if (tree.id != ctx.tree_id) continue;
    auto sets = fta::minimal_cut_sets(tree);
    for (const auto& set : sets) {
      out << set.events.size() << ": {";
      for (size_t i = 0; i < set.events.size(); ++i) {
        out << (i ? ", " : "") << set.events[i];
      }
      out << "} p=" << adl::format_number(set.probability) << "\n";
    }
    out << sets.size() << " minimal cut sets\n";
    return 0;
  }
  throw model::ModelError("no fault tree '" + ctx.tree_id + "' in " + ctx.model_path);
}

int do_size_battery(const CliContext& ctx, std::ostream& out) {
  auto m = model::load_file(ctx.model_path);
  auto a = analyze(m);
  for (const auto& [name, r] :
       {std::pair<std::string, const battery::SizingResult&>{"main", a.main_pack},
        {"push", a.push_pack}}) {
    out << name << " pack: " << adl::format_number(r.required_capacity)
        << " Ah required, governed by " << battery::to_string(r.governing) << "\n";
    for (const auto& req : r.requirements) {
      out << "  " << battery::to_string(req.kind) << ": "
          << adl::format_number(req.capacity) << " Ah"
          << (req.governs ? " (governs)" : "") << "\n";
    }
    out << "  layout: " << r.layout.series << "s x " << r.layout.parallel << "p = "
        << r.layout.total_cells << " cells, "
        << adl::format_number(r.layout.capacity) << " Ah, "
        << adl::format_number(r.layout.mass) << " kg, "
        << adl::format_number(r.layout.available_power / 1e3) << " kW available\n";
  }
  return 0;
}

int do_simulate_mission(const CliContext& ctx, std::ostream& out) {
  auto m = model::load_file(ctx.model_path);
  auto a = analyze(m);
  auto opts = sized_options(m, a);
  std::optional<mission::FailureScenario> scenario;
  if (!ctx.failure_text.empty()) scenario = parse_failure(ctx.failure_text);
  auto sim = mission::simulate(m.mission, m.architecture, scenario, opts);
  if (!ctx.out_dir.empty()) {
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream file(ctx.out_dir + "/mission_trace.csv");
    write_mission_csv(file, sim, opts);
    out << ctx.out_dir << "/mission_trace.csv\n";
  } else {
    write_mission_csv(out, sim, opts);
  }
  return 0;
}

int do_simulate_thermal(const CliContext& ctx, std::ostream& out) {
  auto m = model::load_file(ctx.model_path);
  std::optional<mission::FailureScenario> scenario;
  if (!ctx.failure_text.empty()) scenario = parse_failure(ctx.failure_text);
  mission::SimOptions bare;
  bare.policy = m.policy;
  auto sim = mission::simulate(m.mission, m.architecture, scenario, bare);
  auto phases = model::drive_heat_phases(m, scenario, sim.end_time);
  auto drive = thermal::simulate_drive_thermal(phases, m.thermal.drive,
                                               ctx.options.ambient_c,
                                               thermal::CoolingMode::Combined);
  std::string worst_pack;
  double worst_peak = -1.0;
  for (const auto& [id, tr] : sim.packs) {
    if (tr.peak_power > worst_peak) {
      worst_peak = tr.peak_power;
      worst_pack = id;
    }
  }
  auto pack_phases = model::battery_phases(m, sim.packs.at(worst_pack), sim.end_time);
  auto pack = thermal::simulate_battery_thermal(pack_phases, m.thermal.battery,
                                                ctx.options.ambient_c,
                                                thermal::BatteryCooling::Liquid);
  if (!ctx.out_dir.empty()) {
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream dfile(ctx.out_dir + "/drive_thermal.csv");
    thermal::write_trace_csv(dfile, drive.traces);
    std::ofstream bfile(ctx.out_dir + "/battery_thermal.csv");
    thermal::write_trace_csv(bfile, {{worst_pack, pack.trace}});
    out << ctx.out_dir << "/drive_thermal.csv\n"
        << ctx.out_dir << "/battery_thermal.csv\n";
  } else {
    thermal::write_trace_csv(out, drive.traces);
  }
  for (const auto& v : drive.violations) {
    out << "# violation " << v.limit << " at " << v.node << " t=" << v.time
        << " value=" << v.value << "\n";
  }
  return 0;
}

int do_report(const CliContext& ctx, std::ostream& out) {
  std::string bytes = read_file(ctx.model_path);
  auto parsed = adl::parse(bytes, ctx.model_path);
  if (!parsed.ok()) {
    throw model::ModelError("parse errors in '" + ctx.model_path + "'");
  }
  auto m = model::bind(parsed.document);
  auto a = analyze(m);
  json report =
      build_report(m, a, ctx.options, ctx.model_path, input_digest(bytes));
  std::string rendered;
  std::string filename;
  if (ctx.format == "md") {
    rendered = render_markdown(report);
    filename = "report.md";
  } else if (ctx.format == "csv") {
    rendered = render_csv(report);
    filename = "report.csv";
  } else {
    rendered = report.dump(2) + "\n";
    filename = "report.json";
  }
  if (!ctx.out_dir.empty()) {
    std::filesystem::create_directories(ctx.out_dir);
    // the JSON report always lands next to the rendered form
    std::ofstream jfile(ctx.out_dir + "/report.json");
    jfile << report.dump(2) << "\n";
    if (filename != "report.json") {
      std::ofstream rfile(ctx.out_dir + "/" + filename);
      rfile << rendered;
    }
    out << ctx.out_dir << "/" << filename << "\n";
  } else {
    out << rendered;
  }
  return report["verdict"].get<std::string>() == "pass" ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"safety-assessment and sizing toolkit for battery-electric "
               "multirotor propulsion"};
  app.require_subcommand(1);
  CliContext ctx;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("model", ctx.model_path, "model file (.adl)")->required();
    cmd->add_option("--seed", ctx.options.seed, "Monte Carlo seed");
    cmd->add_option("--trials", ctx.options.trials, "Monte Carlo trials (0 = off)");
  };

  auto* validate = app.add_subcommand("validate", "structural architecture checks");
  add_common(validate);
  auto* safety = app.add_subcommand("safety", "fault trees, budgets and compliance");
  add_common(safety);
  auto* cutsets = app.add_subcommand("cutsets", "minimal cut sets of one tree");
  add_common(cutsets);
  cutsets->add_option("--tree", ctx.tree_id, "fault tree id")->required();
  auto* size = app.add_subcommand("size-battery", "pack sizing from the mission");
  add_common(size);
  auto* simulate = app.add_subcommand("simulate", "mission or thermal simulation");
  simulate->require_subcommand(1);
  auto* sim_mission = simulate->add_subcommand("mission", "per-pack energy trace");
  add_common(sim_mission);
  sim_mission->add_option("--failure", ctx.failure_text, "kind[:target]@time_s");
  sim_mission->add_option("-o,--output", ctx.out_dir, "output directory");
  auto* sim_thermal = simulate->add_subcommand("thermal", "temperature traces");
  add_common(sim_thermal);
  sim_thermal->add_option("--failure", ctx.failure_text, "kind[:target]@time_s");
  sim_thermal->add_option("--ambient", ctx.options.ambient_c, "ambient temperature C");
  sim_thermal->add_option("-o,--output", ctx.out_dir, "output directory");
  auto* report_cmd = app.add_subcommand("report", "full pipeline report");
  add_common(report_cmd);
  report_cmd->add_option("--format", ctx.format, "json, csv or md")
      ->check(CLI::IsMember({"json", "csv", "md"}));
  report_cmd->add_option("--ambient", ctx.options.ambient_c, "ambient temperature C");
  report_cmd->add_option("-o,--output", ctx.out_dir, "output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (validate->parsed()) return do_validate(ctx, out);
    if (safety->parsed()) return do_safety(ctx, out);
    if (cutsets->parsed()) return do_cutsets(ctx, out);
    if (size->parsed()) return do_size_battery(ctx, out);
    if (sim_mission->parsed()) return do_simulate_mission(ctx, out);
    if (sim_thermal->parsed()) return do_simulate_thermal(ctx, out);
    if (report_cmd->parsed()) return do_report(ctx, out);
    err << "no subcommand\n";
    return 2;
  } catch (const model::ModelError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace uam::report
