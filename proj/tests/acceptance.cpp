// Acceptance suite: one line per criterion, PASS or FAIL, followed by the
// offending checks for any failure. Exit status is the number of failed
// criteria, so this binary doubles as a ctest entry.
//
// Criterion 1 is expected to fail on one value: the published table lists
// 29.3 Ah for the 60 kW normal-power case, but the capacity relation
// C = P / (xi * U) gives 60000 / (3.448 * 600) = 29.0 Ah. The 43.5 Ah row
// of the same table follows the relation exactly, so the implementation
// keeps the formula and this suite reports the discrepancy instead of
// special-casing it away.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uam/adl.hpp"
#include "uam/battery.hpp"
#include "uam/fha.hpp"
#include "uam/fta.hpp"
#include "uam/model.hpp"
#include "uam/report.hpp"
#include "uam/thermal.hpp"

using namespace uam;

namespace {

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<std::string> failures;

  Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void expect_near(double actual, double target, double rel, const std::string& what) {
    bool ok = std::abs(actual - target) <= rel * std::abs(target);
    if (!ok) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: got %.6g, want %.6g +-%.2g%%",
                    what.c_str(), actual, target, rel * 100.0);
      failures.push_back(buf);
    }
  }
};

// Round to n significant figures; the table values are quoted that way.
double sig(double value, int n) {
  if (value == 0.0) return 0.0;
  double mag = std::pow(10.0, n - 1 - static_cast<int>(std::floor(std::log10(std::abs(value)))));
  return std::round(value * mag) / mag;
}

std::string bundled_model() { return std::string(UAM_MODEL_DIR) + "/horizonuam.adl"; }

// Seeded generator shared with the unit suites: gates only reference
// earlier nodes, so trees are acyclic by construction.
fta::FaultTree random_tree(std::mt19937_64& rng, int n_events) {
  auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  for (;;) {
    fta::FaultTree t;
    t.id = "rnd";
    std::vector<std::string> pool;
    for (int i = 0; i < n_events; ++i) {
      std::string id = "e" + std::to_string(i);
      t.events[id] = {id, 0.0, 1.0, 0.02 + 0.4 * uniform()};
      pool.push_back(id);
    }
    int n_gates = 2 + static_cast<int>(rng() % 3);
    for (int g = 0; g < n_gates; ++g) {
      fta::Gate gate;
      gate.id = "g" + std::to_string(g);
      int fanout = 2 + static_cast<int>(rng() % 2);
      for (int c = 0; c < fanout; ++c) {
        gate.children.push_back(pool[rng() % pool.size()]);
      }
      std::sort(gate.children.begin(), gate.children.end());
      gate.children.erase(std::unique(gate.children.begin(), gate.children.end()),
                          gate.children.end());
      switch (rng() % 3) {
        case 0: gate.op = fta::GateOp::And; break;
        case 1: gate.op = fta::GateOp::Or; break;
        default:
          gate.op = fta::GateOp::KofN;
          gate.k = 1 + static_cast<int>(rng() % gate.children.size());
      }
      t.gates[gate.id] = gate;
      pool.push_back(gate.id);
    }
    t.top = "g" + std::to_string(n_gates - 1);
    try {
      if (fta::minimal_cut_sets(t).size() <= 20) return t;
    } catch (const fta::FtaError&) {
    }
  }
}

// Boolean evaluation of a tree under a fixed event state.
bool holds(const fta::FaultTree& t, const std::string& node,
           const std::set<std::string>& on) {
  if (t.events.count(node)) return on.count(node) > 0;
  const fta::Gate& g = t.gates.at(node);
  int truthy = 0;
  for (const auto& child : g.children) {
    if (holds(t, child, on)) ++truthy;
  }
  switch (g.op) {
    case fta::GateOp::And: return truthy == static_cast<int>(g.children.size());
    case fta::GateOp::Or: return truthy > 0;
    case fta::GateOp::KofN: return truthy >= g.k;
  }
  return false;
}

// Minimal cut sets by exhaustive enumeration. Fault trees are monotone,
// so a cut set is minimal iff dropping any single member breaks it.
std::vector<std::vector<std::string>> enumerated_cut_sets(const fta::FaultTree& t) {
  std::vector<std::string> ids;
  for (const auto& [id, ev] : t.events) ids.push_back(id);
  size_t n = ids.size();
  std::vector<std::vector<std::string>> minimal;
  for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
    std::set<std::string> on;
    for (size_t i = 0; i < n; ++i) {
      if (mask & (size_t{1} << i)) on.insert(ids[i]);
    }
    if (!holds(t, t.top, on)) continue;
    bool min = true;
    for (const auto& id : on) {
      std::set<std::string> sub = on;
      sub.erase(id);
      if (holds(t, t.top, sub)) {
        min = false;
        break;
      }
    }
    if (!min) continue;
    minimal.emplace_back(on.begin(), on.end());
  }
  std::sort(minimal.begin(), minimal.end(),
            [](const auto& a, const auto& b) {
              return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
  return minimal;
}

}  // namespace

int main() {
  model::Model m = model::load_file(bundled_model());
  report::Analysis a = report::analyze(m);
  std::ifstream in(bundled_model());
  std::stringstream buffer;
  buffer << in.rdbuf();
  report::json rep =
      report::build_report(m, a, {}, bundled_model(), report::input_digest(buffer.str()));

  std::vector<Criterion> criteria;

  {
    Criterion c{1, "battery capacity relations match the quoted table values"};
    double xi = battery::discharge_rate(m.cell);
    c.expect(sig(battery::capacity_from_energy(19.7e3, 600.0), 3) == 32.8,
             "19.7 kWh at 600 V should give 32.8 Ah");
    c.expect(sig(xi, 4) == 3.448, "xi should be 3.448 per hour");
    double normal_power = battery::capacity_from_power(60e3, xi, 600.0);
    if (sig(normal_power, 3) != 29.3) {
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "60 kW gives %.1f Ah by C = P/(xi*U), not the quoted 29.3 Ah; "
                    "the 43.5 Ah row follows the same relation, so the quoted "
                    "value is inconsistent with its own formula",
                    normal_power);
      c.failures.push_back(buf);
    }
    c.expect(sig(battery::capacity_from_power(90e3, xi, 600.0), 3) == 43.5,
             "90 kW should give 43.5 Ah");
    c.expect(sig(battery::available_power(32.8, xi, 600.0), 2) == 68e3,
             "32.8 Ah should make 68 kW available");
    c.expect(sig(battery::available_power(90.0, xi, 600.0), 3) == 186e3,
             "90 Ah should make 186 kW available");
    criteria.push_back(c);
  }

  {
    Criterion c{2, "pack layouts realize the published cell counts and masses"};
    auto main_pack = battery::layout_pack(43.5, 600.0, m.cell);
    c.expect(main_pack.series == 167 && main_pack.parallel == 15, "main pack is 167s x 15p");
    c.expect(main_pack.total_cells == 2505, "main pack has 2505 cells");
    c.expect_near(main_pack.mass, 120.0, 0.01, "main pack mass");
    auto push = battery::layout_pack(88.8, 600.0, m.cell);
    c.expect(push.series == 167 && push.parallel == 31, "push pack is 167s x 31p");
    c.expect(push.total_cells == 5177, "push pack has 5177 cells");
    c.expect(sig(push.capacity, 2) == 90.0, "push pack realizes 90 Ah");
    c.expect_near(push.mass, 248.0, 0.01, "push pack mass");
    criteria.push_back(c);
  }

  {
    Criterion c{3, "sizing governance and per-case capacities within 2%"};
    c.expect(a.main_pack.governing == battery::SizingCase::EmergencyPower,
             "main pack governed by emergency power");
    c.expect(a.push_pack.governing == battery::SizingCase::EmergencyEnergy,
             "push pack governed by emergency energy");
    const double main_rows[] = {32.8, 34.3, 29.3, 43.5};
    const double push_rows[] = {70.0, 88.8, 32.6, 61.1};
    for (size_t i = 0; i < 4; ++i) {
      c.expect_near(a.main_pack.requirements[i].capacity, main_rows[i], 0.02,
                    "main " + std::string(battery::to_string(
                                  a.main_pack.requirements[i].kind)));
      c.expect_near(a.push_pack.requirements[i].capacity, push_rows[i], 0.02,
                    "push " + std::string(battery::to_string(
                                  a.push_pack.requirements[i].kind)));
    }
    criteria.push_back(c);
  }

  {
    Criterion c{4, "hazard budgets apportion exactly"};
    c.expect(fha::apportion("a", 1e-9, 4).per_contributor == 2.5e-10, "1e-9 / 4 = 2.5e-10");
    c.expect(fha::apportion("b", 1e-7, 4).per_contributor == 2.5e-8, "1e-7 / 4 = 2.5e-8");
    c.expect(fha::apportion("c", 1e-9, 2).per_contributor == 5e-10, "1e-9 / 2 = 5e-10");
    criteria.push_back(c);
  }

  {
    Criterion c{5, "fta engine agrees with enumeration and monte carlo"};
    std::mt19937_64 rng(90210);
    for (int i = 0; i < 100; ++i) {
      int n = 4 + static_cast<int>(rng() % 9);  // 4..12 events
      auto t = random_tree(rng, n);
      double exact = fta::evaluate_top(t);
      double brute = fta::brute_force_top(t);
      if (std::abs(exact - brute) > 1e-12 * std::max(1e-300, std::abs(brute))) {
        c.failures.push_back("analytic vs brute force diverged on tree " +
                             std::to_string(i));
        break;
      }
      auto mocus = fta::minimal_cut_sets(t);
      std::vector<std::vector<std::string>> got;
      for (const auto& cs : mocus) got.push_back(cs.events);
      if (got != enumerated_cut_sets(t)) {
        c.failures.push_back("MOCUS cut sets differ from enumeration on tree " +
                             std::to_string(i));
        break;
      }
    }
    std::mt19937_64 mc_rng(1234);
    int unreliable = 0;
    for (int i = 0; i < 100; ++i) {
      auto t = random_tree(mc_rng, 8);
      double exact = fta::evaluate_top(t);
      auto mc = fta::monte_carlo_top(t, 100000, 7);
      auto again = fta::monte_carlo_top(t, 100000, 7);
      if (mc.estimate != again.estimate || mc.hits != again.hits) {
        c.failures.push_back("monte carlo not reproducible for a fixed seed");
        break;
      }
      if (!mc.reliable) {
        ++unreliable;  // flagged by the engine, not silently trusted
        continue;
      }
      if (std::abs(mc.estimate - exact) > 4.0 * mc.std_error) {
        c.failures.push_back("monte carlo estimate beyond 4 SE on tree " +
                             std::to_string(i));
      }
    }
    c.expect(unreliable < 20, "most sampled trees give reliable estimates");
    criteria.push_back(c);
  }

  {
    Criterion c{6, "single-drive chain and full architecture failure rates"};
    // quadcopter-style series chain: every component failure drops the rotor
    fta::FaultTree chain;
    chain.id = "single_drive";
    chain.top = "loss";
    chain.events["battery"] = {"battery", 9.31e-5, 1.0, {}};
    chain.events["controller"] = {"controller", 4.75e-5, 1.0, {}};
    chain.events["motor"] = {"motor", 9.24e-5, 1.0, {}};
    chain.events["gearbox"] = {"gearbox", 5.0e-6, 1.0, {}};
    chain.events["relay"] = {"relay", 4.6e-5, 1.0, {}};
    chain.gates["loss"] = {"loss", fta::GateOp::Or, 0,
                           {"battery", "controller", "motor", "gearbox", "relay"}};
    c.expect(sig(fta::evaluate_top(chain), 2) == 2.8e-4,
             "series chain evaluates to 2.8e-4");

    double lift = 0.0;
    for (const auto& tree : m.trees) {
      if (tree.id == "loss_of_rotor_lift") lift = fta::evaluate_top(tree);
    }
    c.expect(lift > 1.06e-8 / 3.0 && lift < 1.06e-8 * 3.0,
             "loss of one rotor lift within a factor 3 of 1.06e-8");
    criteria.push_back(c);
  }

  {
    Criterion c{7, "mission energies, equal time point and reserves"};
    c.expect_near(a.nominal.packs.at("bat_1").energy, 19.7e3, 0.02, "main pack energy");
    c.expect(std::abs(a.etp.flight_time / 60.0 - 5.7) <= 0.5, "flight-3 ETP near 5.7 min");
    c.expect_near(a.energy_at_etp_wh, 12.2e3, 0.05, "energy consumed at the ETP");
    c.expect_near(a.worst_main_energy_wh - a.energy_at_etp_wh, 8.5e3, 0.05,
                  "continuation energy from the ETP");
    c.expect(std::abs(a.nominal.packs.at("bat_1").soc - 0.25) <= 0.02, "main pack SoC 25%");
    c.expect(std::abs(a.nominal.packs.at("bat_p").soc - 0.37) <= 0.02, "push pack SoC 37%");
    c.expect_near(a.worst_main_peak_w, 90e3, 0.02, "worst single-failure pack draw");
    c.expect(std::abs(a.reserve_endurance_min - 9.2) <= 0.5, "reserve endurance 9.2 min");
    criteria.push_back(c);
  }

  {
    Criterion c{8, "propulsion mass rollup"};
    const auto& cmp = rep["powertrain"]["comparison"];
    c.expect_near(cmp["geared_mass_kg"].get<double>(), 374.0, 0.02, "geared drives mass");
    c.expect_near(cmp["direct_mass_kg"].get<double>(), 400.0, 0.02, "direct drives mass");
    c.expect_near(rep["powertrain"]["mass_rollup"]["total_kg"].get<double>(), 1144.0,
                  0.02, "total propulsion mass");
    criteria.push_back(c);
  }

  {
    Criterion c{9, "thermal anchor points"};
    const auto& th = rep["thermal"]["drive"];
    c.expect_near(th["air_only"]["peaks_c"]["motor_1"].get<double>(), 136.0, 0.10,
                  "air-only motor peak");
    c.expect_near(th["air_only"]["motor_first_exceedance_s"].get<double>(), 2088.0, 0.10,
                  "air-only winding-limit exceedance time");
    double em_motor = std::max(th["emergency"]["peaks_c"]["motor_1"].get<double>(),
                               th["emergency"]["peaks_c"]["motor_2"].get<double>());
    double em_mc = std::max(th["emergency"]["peaks_c"]["mc_1"].get<double>(),
                            th["emergency"]["peaks_c"]["mc_2"].get<double>());
    c.expect(em_motor < 120.0, "combined cooling keeps the motor below 120 C in emergency");
    c.expect(em_mc < 85.0, "combined cooling keeps the controller below 85 C in emergency");

    auto sim = mission::simulate(m.mission, m.architecture);
    auto phases = model::battery_phases(m, sim.packs.at("bat_1"), sim.end_time);
    auto uncooled = thermal::simulate_battery_thermal(phases, m.thermal.battery, 20.0,
                                                      thermal::BatteryCooling::None);
    c.expect(uncooled.peak > 40.0, "uncooled pack exceeds 40 C at 20 C ambient");
    // the published offsets are upper bounds ("within T_amb + 5"), checked
    // with the stated 1 C slack
    double normal_offset = rep["thermal"]["battery"]["normal"]["offset_c"].get<double>();
    double em_offset = rep["thermal"]["battery"]["emergency"]["offset_c"].get<double>();
    c.expect(normal_offset <= 5.0 + 1.0, "liquid-cooled normal offset within T_amb + 5");
    c.expect(em_offset <= 7.0 + 1.0, "liquid-cooled emergency offset within T_amb + 7");
    c.expect(std::abs(rep["thermal"]["battery"]["max_feasible_ambient_c"].get<double>() -
                      36.2) <= 0.5,
             "feasible ambient ceiling 36.2 C");

    auto air = thermal::simulate_drive_thermal(model::drive_heat_phases(m),
                                               m.thermal.drive, 25.0,
                                               thermal::CoolingMode::AirOnly);
    auto off = thermal::ground_cooldown(air.network, m.thermal.drive, false, 300.0);
    auto on = thermal::ground_cooldown(air.network, m.thermal.drive, true, 1800.0);
    c.expect(off.final_max > 65.0, "still above 65 C after 5 min without the fan");
    c.expect(on.final_max < 50.0, "below 50 C after 30 min with the fan");
    criteria.push_back(c);
  }

  {
    Criterion c{10, "property suites hold independently of the anchors"};
    thermal::Network net;
    net.set_ambient(22.0);
    net.add_node("a", 2500.0, 60.0);
    net.add_node("b", 4000.0, 35.0);
    net.add_conductance(0, 1, 8.0);
    net.add_conductance(1, thermal::Network::kAmbient, 2.5);
    thermal::Network::Loop loop;
    loop.mdot = 0.1;
    loop.cp = 3600.0;
    loop.effectiveness = 0.6;
    loop.passes = {{0, 55.0}, {1, 40.0}};
    net.add_loop(loop);
    double dt = 0.4 * net.stability_limit();
    for (int i = 0; i < 500; ++i) net.step(dt, {900.0, 300.0});
    c.expect(std::abs(net.injected() - net.rejected() - net.stored_delta()) <=
                 1e-9 * net.injected(),
             "thermal energy balance within 1e-9 relative");

    std::mt19937_64 rng(5150);
    for (int i = 0; i < 10; ++i) {
      auto t = random_tree(rng, 6);
      double base = fta::evaluate_top(t);
      for (const auto& [id, ev] : t.events) {
        fta::FaultTree bumped = t;
        bumped.events[id].fixed_probability =
            std::min(1.0, *ev.fixed_probability + 0.2);
        c.expect(fta::evaluate_top(bumped) >= base - 1e-12, "fta monotonicity");
      }
    }

    auto first = adl::parse(buffer.str(), "bundled");
    c.expect(first.ok(), "bundled model parses");
    std::string canonical = adl::serialize(first.document);
    auto second = adl::parse(canonical, "canonical");
    c.expect(second.ok() && second.document == first.document &&
                 adl::serialize(second.document) == canonical,
             "parser round trip is a fixpoint");

    for (const auto& b : m.architecture.main_batteries) {
      auto reconf = mission::reconfigure(m.architecture,
                                         {mission::FailureKind::BatteryLoss, b, 100.0});
      for (const auto& [mc, bat] : reconf.assignment) {
        c.expect(bat != b, "reconfiguration avoids the failed battery");
      }
    }

    c.expect(a.infeasible.empty(), "single-failure sweep feasible with sized packs");
    criteria.push_back(c);
  }

  int failed = 0;
  for (const auto& c : criteria) {
    bool ok = c.failures.empty();
    if (!ok) ++failed;
    std::printf("criterion %2d: %s  %s\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str());
    for (const auto& f : c.failures) std::printf("    - %s\n", f.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
